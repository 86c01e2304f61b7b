//! Local-order rewrites: bounded order modifications with the preservation
//! audit, and the telescope-and-reorder construction that removes irrational
//! continuous eigenvalues.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{nearest_int_dist, pow2_neg, rat, AngleSpec, Rat, RealEnclosure};
use crate::diagram::{BratteliDiagram, Extremal, OrderedLevel, ProperReport};
use crate::error::{Error, Result};
use crate::measure::{CleanReport, MeasureEnclosure};
use crate::spectral::{Outcome, Term, Thresholds, Verdict};

/// New ascending source list for vertex `vertex` (0-based) of level `level`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderEdit {
    pub level: usize,
    pub vertex: usize,
    pub order: Vec<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EditFile {
    pub edits: Vec<OrderEdit>,
}

impl EditFile {
    pub fn parse(text: &str) -> Result<Vec<OrderEdit>> {
        let f: EditFile = serde_json::from_str(text).map_err(|e| Error::Format {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        Ok(f.edits)
    }
}

impl OrderEdit {
    /// Positions at which the edited list differs from `old`.
    pub fn omega(&self, old: &[usize]) -> usize {
        self.order.iter().zip(old).filter(|(a, b)| a != b).count()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Modification {
    #[serde(skip)]
    pub diagram: BratteliDiagram,
    /// `omega[n - 2] = omega_n`, largest edit size at level `n`.
    pub omega: Vec<usize>,
    pub properness: ProperReport,
}

fn sorted(list: &[usize]) -> Vec<usize> {
    let mut s = list.to_vec();
    s.sort_unstable();
    s
}

/// Applies the edits; matrices and heights are unchanged by construction and
/// any edit changing the multiset of sources is rejected.
pub fn order_modification(d: &BratteliDiagram, edits: &[OrderEdit]) -> Result<Modification> {
    let mut orders: Vec<Vec<Vec<usize>>> = d.levels().iter().map(|l| l.orders().to_vec()).collect();
    for (i, e) in edits.iter().enumerate() {
        if e.level < 2 || e.level > d.depth() {
            return Err(Error::LevelRange {
                level: e.level,
                depth: d.depth(),
            });
        }
        let lists = &mut orders[e.level - 2];
        let old = lists.get_mut(e.vertex).ok_or(Error::VertexRange {
            level: e.level,
            vertex: e.vertex,
        })?;
        if sorted(old) != sorted(&e.order) {
            return Err(Error::Invalid(format!(
                "edit {i} changes the sources of vertex {} at level {}",
                e.vertex, e.level
            )));
        }
        *old = e.order.clone();
    }
    let mut levels = Vec::with_capacity(orders.len());
    let mut omega = Vec::with_capacity(orders.len());
    for (old, new) in d.levels().iter().zip(orders) {
        let w = old
            .orders()
            .iter()
            .zip(&new)
            .map(|(a, b)| a.iter().zip(b).filter(|(x, y)| x != y).count())
            .max()
            .unwrap_or(0);
        omega.push(w);
        levels.push(OrderedLevel::new(old.source_count(), new)?);
    }
    let changed = omega.iter().any(|&w| w > 0);
    let base = if changed { d.without_generator() } else { d.clone() };
    let diagram = base.with_levels(levels)?;
    Ok(Modification {
        properness: diagram.check_properness(),
        diagram,
        omega,
    })
}

/// Audits `sum_n omega_{n+1} |||alpha h_n|||` for `1 <= n <= depth`, where
/// `|||alpha h_n|||` is the largest over `V_n`.
pub fn check_preservation(
    d: &BratteliDiagram,
    alpha: &AngleSpec,
    omega: &[usize],
    depth: usize,
    th: &Thresholds,
    bits: u32,
) -> Result<Verdict> {
    if omega.len() < depth {
        return Err(Error::Depth {
            needed: depth + 1,
            available: omega.len() + 1,
        });
    }
    let d = if d.depth() < depth { d.deepen(depth)? } else { d.clone() };
    let bound = d.heights_slice(depth)?.iter().max().unwrap().clone();
    let a = alpha.value_for_multiplier(&bound, bits);
    let mut series = Vec::with_capacity(depth);
    for n in 1..=depth {
        let w = BigInt::from(omega[n - 1]);
        let mut t = RealEnclosure::zero();
        for h in d.heights_slice(n)? {
            t = t.max(&nearest_int_dist(&a.mul_int(h)));
        }
        series.push(Term {
            level: n,
            value: t.mul_int(&w),
        });
    }
    let zero_from = series
        .iter()
        .rev()
        .take_while(|t| t.value.is_zero())
        .last()
        .map(|t| t.level);
    let mut notes = vec!["term n is omega_(n+1) times the largest |||alpha h_n(v)|||".to_string()];
    let outcome = match zero_from {
        Some(l) if l < depth || l == 1 => {
            notes.push(format!("terms vanish exactly from level {l}"));
            Outcome::PassUpToDepth {
                depth,
                tail_bound: Some("0".into()),
            }
        }
        _ => match crate::spectral::failure(&series, th) {
            Some(f) => f,
            None => Outcome::Inconclusive {
                depth,
                note: "series does not vanish and no tail bound is registered".into(),
            },
        },
    };
    Ok(Verdict {
        test: "order-preservation".into(),
        alpha: alpha.to_string(),
        depth,
        outcome,
        series,
        thresholds: th.clone(),
        notes,
        properness: None,
    })
}

#[derive(Clone, Debug)]
pub struct Schedule {
    /// Last stage `n`; the output has `stages` levels.
    pub stages: usize,
    /// `eps[n - 2]` bounds the mass of the reordered blocks at stage `n`;
    /// defaults to `2^-n`.
    pub eps: Option<Vec<Rat>>,
    /// Deepest original level the search may use.
    pub max_level: usize,
    pub bits: u32,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            stages: 4,
            eps: None,
            max_level: 64,
            bits: 128,
        }
    }
}

impl Schedule {
    fn eps(&self, n: usize) -> Rat {
        self.eps
            .as_ref()
            .and_then(|e| e.get(n - 2).cloned())
            .unwrap_or_else(|| pow2_neg(n as u32))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpoilStage {
    pub n: usize,
    /// Original levels `l_(2n-3) < l_(2n-2) < l_(2n-1)`.
    pub levels: (usize, usize, usize),
    /// Sources of the maximal paths at the first two of them.
    pub d_b: usize,
    pub d_a: usize,
    #[serde(serialize_with = "crate::arith::ser_int")]
    pub p: BigInt,
    /// `sum_v mu(v) h(d_a)`, the mass of the reordered blocks.
    pub mass: RealEnclosure,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub eps: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpoilWitness {
    pub target: usize,
    pub stage: usize,
    /// Level of the output diagram holding the edge.
    pub level: usize,
    pub vertex: usize,
    pub rank: usize,
    pub t: u64,
    /// Signed `alpha h(d_b) - nearest integer`.
    pub eta: RealEnclosure,
    /// `|||t eta|||`.
    pub term: RealEnclosure,
    pub inside: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpoilReport {
    #[serde(skip)]
    pub diagram: BratteliDiagram,
    /// The telescoped input before reordering.
    #[serde(skip)]
    pub telescoped: BratteliDiagram,
    pub cuts: Vec<usize>,
    pub stages: Vec<SpoilStage>,
    pub witnesses: Vec<SpoilWitness>,
    pub mass_total: RealEnclosure,
    pub properness: ProperReport,
}

fn signed_eta(x: &RealEnclosure) -> RealEnclosure {
    let k = (x.midpoint() + rat(1, 2)).floor();
    x.add_rat(&-k)
}

/// Witness multiplier for `eta`: `floor(1/(2|eta|)) + 1` when `|eta| < 1/4`,
/// and `1` when `|eta| > 1/4`.
fn witness_t(eta: &RealEnclosure) -> Result<(u64, Rat)> {
    let abs = eta.abs();
    let quarter = rat(1, 4);
    if abs.lo() > &quarter {
        return Ok((1, Rat::zero()));
    }
    if !abs.certainly_lt(&quarter) || abs.lo() <= &Rat::zero() {
        return Err(Error::Precision(format!("|eta| = {abs} not separated from 0 and 1/4")));
    }
    let lo_t = (Rat::one() / (abs.hi() * BigInt::from(2))).floor();
    let hi_t = (Rat::one() / (abs.lo() * BigInt::from(2))).floor();
    if lo_t != hi_t {
        return Err(Error::Precision(format!("floor(1/(2 eta)) undecided for eta = {eta}")));
    }
    let t = lo_t.to_integer().to_u64().ok_or_else(|| Error::Invalid("t too large".into()))? + 1;
    Ok((t, Rat::one() / abs.lo()))
}

struct Choice {
    a: usize,
    c: usize,
    d_b: usize,
    d_a: usize,
    p: BigInt,
    mass: RealEnclosure,
}

/// Telescopes `d` at `0, l_1, l_3, ...` and, at each stage `n >= 2`, reorders
/// the paths through the maximal segment from `d_a` to each vertex so that
/// sources come in increasing order with `d_b` last. Every target then has a
/// suffix `t e_(d_b)` whose term lies in `(1/4, 3/4)`.
pub fn spoil_continuous(
    d: &BratteliDiagram,
    mu: &MeasureEnclosure,
    clean: &CleanReport,
    targets: &[AngleSpec],
    schedule: &Schedule,
) -> Result<SpoilReport> {
    if targets.is_empty() {
        return Err(Error::Invalid("no targets".into()));
    }
    if schedule.stages < 2 {
        return Err(Error::Invalid("at least stage 2 is needed".into()));
    }
    if clean.i_mu.is_empty() {
        return Err(Error::Hypothesis("measure has no clean towers".into()));
    }
    let deep = if d.depth() < schedule.max_level && d.generator().is_some() {
        d.deepen(schedule.max_level)?
    } else {
        d.clone()
    };
    let report = deep.check_properness();
    if !report.proper() {
        return Err(Error::Hypothesis("input diagram is not properly ordered".into()));
    }
    let top = deep.depth().min(schedule.max_level);
    let bound = deep.heights_slice(top)?.iter().max().unwrap().clone();
    let alphas: Vec<RealEnclosure> = targets
        .iter()
        .map(|t| t.value_for_multiplier(&(&bound * &bound), schedule.bits))
        .collect();
    let mut ell = vec![0usize, 1];
    let mut stages = Vec::new();
    let mut picks = Vec::new();
    for n in 2..=schedule.stages {
        let b = ell[2 * n - 3];
        let eps = schedule.eps(n);
        let choice = choose_stage(&deep, mu, &alphas, n, b, top, &eps)?;
        ell.push(choice.a);
        ell.push(choice.c);
        stages.push(SpoilStage {
            n,
            levels: (b, choice.a, choice.c),
            d_b: choice.d_b,
            d_a: choice.d_a,
            p: choice.p.clone(),
            mass: choice.mass.clone(),
            eps,
        });
        picks.push(choice);
    }
    let mut cuts = vec![0usize];
    cuts.extend(ell.iter().skip(1).step_by(2));
    let last = *cuts.last().unwrap();
    let telescoped = deep.truncate(last).without_generator().telescope(&cuts)?;
    let mut levels: Vec<OrderedLevel> = telescoped.levels().to_vec();
    let mut witnesses = Vec::new();
    for (st, ch) in stages.iter().zip(&picks) {
        let n = st.n;
        let (b, a, _) = st.levels;
        let block_src = deep.induced_sources(b, a, ch.d_a)?;
        let k = block_src.len();
        let level = &levels[n - 2];
        let mut new_orders = Vec::with_capacity(level.target_count());
        for v in 0..level.target_count() {
            let list = level.order(v);
            let cut = list.len() - k;
            if list[cut..] != block_src[..] {
                return Err(Error::Hypothesis(format!(
                    "top block of vertex {v} at stage {n} is not the maximal segment"
                )));
            }
            let mut block = list[cut..].to_vec();
            block.sort_by_key(|&u| (u == ch.d_b, u));
            let mut out = list[..cut].to_vec();
            out.extend(block);
            new_orders.push(out);
        }
        levels[n - 2] = OrderedLevel::new(level.source_count(), new_orders)?;
        let h_b = &deep.heights_slice(b)?[ch.d_b];
        for (i, alpha) in alphas.iter().enumerate() {
            let eta = signed_eta(&alpha.mul_int(h_b));
            let (t, _) = witness_t(&eta)?;
            if BigInt::from(t) > &ch.p - 1 {
                return Err(Error::Hypothesis(format!("stage {n}: t = {t} exceeds P - 1 = {}", &ch.p - 1)));
            }
            let lvl = &levels[n - 2];
            for v in 0..lvl.target_count() {
                let rank = lvl.order(v).len() - 1 - t as usize;
                let s = lvl.suffix(v, rank);
                let mut expect = vec![0u64; lvl.source_count()];
                expect[ch.d_b] = t;
                if s != expect {
                    return Err(Error::Hypothesis(format!("stage {n}: suffix at vertex {v} is {s:?}")));
                }
                let term = nearest_int_dist(&alpha.mul_int(&(h_b * BigInt::from(t))));
                let inside = term.lo() > &rat(1, 4) && term.hi() < &rat(3, 4);
                witnesses.push(SpoilWitness {
                    target: i,
                    stage: n,
                    level: n,
                    vertex: v,
                    rank,
                    t,
                    eta: eta.clone(),
                    term,
                    inside,
                });
            }
        }
    }
    let diagram = telescoped.with_levels(levels)?;
    let mass_total = RealEnclosure::sum(stages.iter().map(|s| &s.mass));
    Ok(SpoilReport {
        properness: diagram.check_properness(),
        diagram,
        telescoped,
        cuts,
        stages,
        witnesses,
        mass_total,
    })
}

fn choose_stage(
    d: &BratteliDiagram,
    mu: &MeasureEnclosure,
    alphas: &[RealEnclosure],
    n: usize,
    b: usize,
    top: usize,
    eps: &Rat,
) -> Result<Choice> {
    let quarter = rat(1, 4);
    let min_h = BigInt::from(n);
    for a in b + 1..top {
        let p_ba = d.product_matrix(b, a)?;
        for c in a + 1..=top {
            let (Some(d_b), Some(d_a)) = (
                d.extremal_vertex(b, c, Extremal::Max)?,
                d.extremal_vertex(a, c, Extremal::Max)?,
            ) else {
                continue;
            };
            let p = p_ba.get(d_b, d_a).clone();
            let h_b = &d.heights_slice(b)?[d_b];
            let mut ok = true;
            for alpha in alphas {
                let eta = signed_eta(&alpha.mul_int(h_b));
                let (_, need) = witness_t(&eta)?;
                // P - 1 > 1/|eta|, or P >= 2 when t = 1
                let have = Rat::from_integer(&p - 1);
                if have <= need || p < BigInt::from(2) {
                    ok = false;
                }
            }
            if !ok {
                break;
            }
            let h_c = d.heights_slice(c)?;
            if h_c.iter().any(|h| h < &min_h) {
                continue;
            }
            if alphas.iter().any(|alpha| {
                h_c.iter()
                    .any(|h| !nearest_int_dist(&alpha.mul_int(h)).certainly_lt(&quarter))
            }) {
                continue;
            }
            if mu.depth() < c {
                return Err(Error::Depth {
                    needed: c,
                    available: mu.depth(),
                });
            }
            let h_da = &d.heights_slice(a)?[d_a];
            let mass = RealEnclosure::sum(mu.level(c)?).mul_int(h_da);
            if mass.hi() > eps {
                continue;
            }
            return Ok(Choice { a, c, d_b, d_a, p, mass });
        }
    }
    Err(Error::Depth {
        needed: top + 1,
        available: top,
    })
}
