use num_traits::One;
use serde::Serialize;

use super::{BratteliDiagram, Extremal};

/// Hypotheses H1 to H4 and uniqueness of extremal paths. Levels are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProperReport {
    pub h1_ok: bool,
    pub simple_ok: bool,
    pub non_simple_levels: Vec<usize>,
    pub max_source_ok: bool,
    pub max_source_failures: Vec<usize>,
    pub constant_rank: bool,
    pub unique_max: bool,
    pub unique_min: bool,
    /// Largest gap `n - m` needed before `V_n -> V_m` becomes constant.
    pub max_witness_gap: Option<usize>,
    pub min_witness_gap: Option<usize>,
}

impl ProperReport {
    pub fn proper(&self) -> bool {
        self.unique_max && self.unique_min
    }
}

fn extremal_witness(d: &BratteliDiagram, kind: Extremal) -> (bool, Option<usize>) {
    let depth = d.depth();
    if depth < 2 {
        return (false, None);
    }
    let r = d.max_vertex_count();
    let mut audited: Vec<(usize, usize)> = (1..depth)
        .filter(|m| m + r <= depth)
        .map(|m| (m, r))
        .collect();
    if audited.is_empty() {
        audited.push((1, depth - 1));
    }
    let mut worst = 0;
    for (m, limit) in audited {
        let gap = (1..=limit).find(|g| {
            d.extremal_vertex(m, m + g, kind)
                .ok()
                .flatten()
                .is_some()
        });
        match gap {
            Some(g) => worst = worst.max(g),
            None => return (false, None),
        }
    }
    (true, Some(worst))
}

pub(super) fn check(d: &BratteliDiagram) -> ProperReport {
    let h1_ok = d.hat().iter().all(|h| h.is_one());
    let mut non_simple_levels = Vec::new();
    let mut max_source_failures = Vec::new();
    for n in 2..=d.depth() {
        let level = d.level(n).unwrap();
        if !level.incidence().is_positive() {
            non_simple_levels.push(n);
        }
        let first = level.max_source(0);
        if (0..level.target_count()).any(|v| level.max_source(v) != first) {
            max_source_failures.push(n);
        }
    }
    let constant_rank = (1..=d.depth()).all(|n| d.vertex_count(n) == d.vertex_count(1));
    let (unique_max, max_witness_gap) = extremal_witness(d, Extremal::Max);
    let (unique_min, min_witness_gap) = extremal_witness(d, Extremal::Min);
    ProperReport {
        h1_ok,
        simple_ok: non_simple_levels.is_empty(),
        non_simple_levels,
        max_source_ok: max_source_failures.is_empty(),
        max_source_failures,
        constant_rank,
        unique_max,
        unique_min,
        max_witness_gap,
        min_witness_gap,
    }
}
