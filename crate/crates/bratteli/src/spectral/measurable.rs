use serde::Serialize;

use super::{Outcome, Term, Thresholds, Verdict};
use crate::arith::{AngleSpec, Rat, RealEnclosure};
use crate::diagram::BratteliDiagram;
use crate::dynamics::TransferTable;
use crate::error::{Error, Result};
use crate::measure::{CleanReport, MeasureEnclosure};

/// Pairs `(m, n)` with `m_lo <= m <= m_hi` and `m < n <= top`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub m_lo: usize,
    pub m_hi: usize,
    pub top: usize,
}

impl Grid {
    pub fn full(top: usize) -> Self {
        Grid {
            m_lo: 1,
            m_hi: top.saturating_sub(1).max(1),
            top,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaEntry {
    pub m: usize,
    pub n: usize,
    /// `Delta_{m,n}(u, v)` for every `u` and `v`.
    pub delta: Vec<Vec<RealEnclosure>>,
    /// Largest `Delta_{m,n}(u, v)` over `u` and `v` in `I_mu`.
    pub max_delta: RealEnclosure,
    /// Largest `1 - sum_{u in I_mu} (h_m(u)/h_n(v)) |F_{m,n}(u, v)|` over `v` in `I_mu`.
    pub defect: RealEnclosure,
}

/// `Delta_{m,n}(u,v) = (h_m(u)/h_n(v)) (P_{m,n}(u,v) - |F_{m,n}(u,v)|)` over the grid.
pub fn delta_grid(
    d: &BratteliDiagram,
    clean: &CleanReport,
    alpha: &AngleSpec,
    grid: &Grid,
    bits: u32,
) -> Result<Vec<DeltaEntry>> {
    if grid.m_lo < 1 || grid.m_lo > grid.m_hi || grid.m_hi >= grid.top {
        return Err(Error::Invalid(format!(
            "grid {}..={} below {} is empty",
            grid.m_lo, grid.m_hi, grid.top
        )));
    }
    let d = if d.depth() < grid.top { d.deepen(grid.top)? } else { d.truncate(grid.top) };
    let table = TransferTable::new(&d, alpha, bits)?;
    let mut out = Vec::new();
    for m in grid.m_lo..=grid.m_hi {
        let hm = d.heights_slice(m)?;
        let row = table.row(m, grid.top)?;
        let mut p = d.product_matrix(m, m)?;
        for (i, f) in row.iter().enumerate() {
            let n = m + 1 + i;
            p = p.mul(&d.incidence_matrix(n)?);
            let hn = d.heights_slice(n)?;
            let mut delta = vec![Vec::with_capacity(f.cols()); f.rows()];
            let mut max_delta = RealEnclosure::zero();
            let mut defect = RealEnclosure::zero();
            let mut first = true;
            for v in 0..f.cols() {
                let mut c = RealEnclosure::zero();
                for (u, du) in delta.iter_mut().enumerate() {
                    let ratio = Rat::new(hm[u].clone(), hn[v].clone());
                    let modulus = f.get(u, v).abs(bits);
                    let gap = &RealEnclosure::from_bigint(p.get(u, v)) - &modulus;
                    let x = gap.scale(&ratio);
                    if clean.contains(u) && clean.contains(v) {
                        max_delta = max_delta.max(&x);
                    }
                    if clean.contains(u) {
                        c = &c + &modulus.scale(&ratio);
                    }
                    du.push(x);
                }
                if clean.contains(v) {
                    let dv = &RealEnclosure::one() - &c;
                    defect = if first { dv } else { defect.max(&dv) };
                    first = false;
                }
            }
            out.push(DeltaEntry {
                m,
                n,
                delta,
                max_delta,
                defect,
            });
        }
    }
    Ok(out)
}

/// Per-row suprema over `n > m`.
fn rows(grid: &[DeltaEntry], pick: impl Fn(&DeltaEntry) -> &RealEnclosure) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for e in grid {
        match out.last_mut() {
            Some(t) if t.level == e.m => t.value = t.value.max(pick(e)),
            _ => out.push(Term {
                level: e.m,
                value: pick(e).clone(),
            }),
        }
    }
    out
}

/// Rows with fewer than two `n` values say little about `sup_{n > m}` and are
/// left out of the audit.
fn classify(series: &[Term], th: &Thresholds, depth: usize) -> Outcome {
    let audited: Vec<&Term> = series
        .iter()
        .filter(|t| t.level >= th.burn_in && t.level + 2 <= depth)
        .collect();
    if audited.is_empty() {
        return Outcome::Inconclusive {
            depth,
            note: "no audited rows".into(),
        };
    }
    if audited.iter().all(|t| t.value.lo() >= &th.theta_div) {
        let last = audited.last().unwrap();
        return Outcome::FailAtDepth {
            level: last.level,
            witness: last.value.clone(),
        };
    }
    // tail of rows below tolerance and nonincreasing
    let mut start = audited.len();
    while start > 0 {
        let t = audited[start - 1];
        let ok = t.value.hi() <= &th.tolerance
            && (start == audited.len() || audited[start].value.hi() <= t.value.hi());
        if !ok {
            break;
        }
        start -= 1;
    }
    if audited.len() - start >= 2 {
        let exact = audited[start..].iter().all(|t| t.value.is_zero());
        return Outcome::PassUpToDepth {
            depth,
            tail_bound: if exact { Some("0".into()) } else { None },
        };
    }
    Outcome::Inconclusive {
        depth,
        note: "rows neither stay above the failure threshold nor settle below the tolerance".into(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasurableReport {
    /// Condition (2): rows `sup_{n > m} Delta_{m,n}`.
    pub verdict: Verdict,
    /// Condition (1): rows of the defect `1 - sum (h_m/h_n) |F|`.
    pub condition1: Verdict,
    pub agree: bool,
    pub grid: Grid,
    pub entries: Vec<DeltaEntry>,
}

/// Measurable eigenvalue test on a finite grid of level pairs.
pub fn test_measurable(
    d: &BratteliDiagram,
    mu: &MeasureEnclosure,
    clean: &CleanReport,
    alpha: &AngleSpec,
    grid: &Grid,
    th: &Thresholds,
    bits: u32,
) -> Result<MeasurableReport> {
    let width = d.vertex_count(1);
    if (1..=d.depth().min(grid.top)).any(|n| d.vertex_count(n) != width) {
        return Err(Error::Invalid("measurable test needs constant rank".into()));
    }
    let entries = delta_grid(d, clean, alpha, grid, bits)?;
    let mut notes = vec![format!(
        "grid m in {}..={}, n up to {}; uniformity in n is only checked on this grid",
        grid.m_lo, grid.m_hi, grid.top
    )];
    if mu.ergodic_hint > 1 {
        notes.push(format!("{} measure clusters; rows use the given I_mu", mu.ergodic_hint));
    }
    let series = rows(&entries, |e| &e.max_delta);
    let defects = rows(&entries, |e| &e.defect);
    let outcome = classify(&series, th, grid.top);
    let outcome1 = classify(&defects, th, grid.top);
    let agree = outcome.name() == outcome1.name();
    let make = |test: &str, outcome: Outcome, series: Vec<Term>| Verdict {
        test: test.into(),
        alpha: alpha.to_string(),
        depth: grid.top,
        outcome,
        series,
        thresholds: th.clone(),
        notes: notes.clone(),
        properness: None,
    };
    Ok(MeasurableReport {
        verdict: make("measurable-delta", outcome, series),
        condition1: make("measurable-sum", outcome1, defects),
        agree,
        grid: grid.clone(),
        entries,
    })
}
