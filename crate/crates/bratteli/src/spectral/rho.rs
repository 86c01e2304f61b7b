use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{failure, geometric_cluster, Outcome, Term, Thresholds, Verdict};
use crate::arith::{
    acos_over_2pi, cis_2pi, nearest_int_dist, pow2_neg, rat, sqrt_enclosure, AngleSpec,
    ComplexEnclosure, Rat, RealEnclosure,
};
use crate::diagram::BratteliDiagram;
use crate::error::{Error, Result};
use crate::measure::{CleanReport, MeasureEnclosure};

#[derive(Clone, Debug, Serialize)]
pub struct LambdaEntry {
    pub m: usize,
    pub n: usize,
    pub u: usize,
    pub v: usize,
    /// `|S_{m,n}(u, v)| = P_{m,n}(u, v)`.
    pub count: usize,
    /// Selected `Lambda_{m,n}(u, v) = <s, h_m>`.
    #[serde(serialize_with = "crate::arith::ser_int")]
    pub lambda: BigInt,
    /// `alpha * Lambda` reduced mod 1.
    pub phase: RealEnclosure,
    pub delta: RealEnclosure,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub gamma: Rat,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub eps: Rat,
    pub outliers: usize,
    pub bound: RealEnclosure,
}

#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub levels: (usize, usize, usize),
    pub vertices: (usize, usize, usize),
    /// `|||alpha (Lambda_{l,n}(u,v) - Lambda_{l,m}(u,w) - Lambda_{m,n}(w,v))|||`.
    pub value: RealEnclosure,
    /// `gamma_{l,m} + gamma_{m,n} + gamma_{l,n}`.
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub bound: Rat,
    pub within: bool,
}

/// Phases `rho_m(u) = alpha Lambda_{m,N}(u, v0)` mod 1 with their evidence.
#[derive(Clone, Debug, Serialize)]
pub struct RhoEstimate {
    pub depth: usize,
    pub v0: usize,
    /// `phases[m - 1][u]`, `None` where no selection was possible.
    pub phases: Vec<Vec<Option<RealEnclosure>>>,
    pub lambda: Vec<LambdaEntry>,
    pub residuals: Vec<Residual>,
}

impl RhoEstimate {
    /// `rho = 0` at every level and vertex.
    pub fn zero(d: &BratteliDiagram, depth: usize) -> Self {
        RhoEstimate {
            depth,
            v0: 0,
            phases: (1..=depth)
                .map(|n| vec![Some(RealEnclosure::zero()); d.vertex_count(n)])
                .collect(),
            lambda: Vec::new(),
            residuals: Vec::new(),
        }
    }

    pub fn phase(&self, n: usize, u: usize) -> Option<&RealEnclosure> {
        self.phases.get(n.checked_sub(1)?)?.get(u)?.as_ref()
    }
}

/// `<s_{m,n}, h_m>` over all segments from `u` at level `m`, grouped by the
/// vertex reached at level `n`.
fn segment_values(
    d: &BratteliDiagram,
    m: usize,
    n: usize,
    u: usize,
    cap: usize,
) -> Result<Vec<Vec<BigInt>>> {
    let mut cur: Vec<Vec<BigInt>> = vec![Vec::new(); d.vertex_count(m)];
    cur[u].push(BigInt::zero());
    for k in m..n {
        let level = d.level(k + 1)?;
        let h = d.heights_slice(k)?;
        let mut next: Vec<Vec<BigInt>> = vec![Vec::new(); level.target_count()];
        for (w, out) in next.iter_mut().enumerate() {
            for (r, s) in level.suffixes(w).into_iter().enumerate() {
                let src = level.order(w)[r];
                if cur[src].is_empty() {
                    continue;
                }
                let add: BigInt = s.iter().zip(h).map(|(a, b)| BigInt::from(*a) * b).sum();
                for x in &cur[src] {
                    out.push(x + &add);
                }
            }
            if out.len() > cap {
                return Err(Error::Cap {
                    required: out.len().to_string(),
                    cap,
                });
            }
        }
        cur = next;
    }
    Ok(cur)
}

fn select(
    d: &BratteliDiagram,
    alpha: &RealEnclosure,
    (m, n, u, v): (usize, usize, usize, usize),
    values: &[BigInt],
    bits: u32,
) -> Option<LambdaEntry> {
    let count = values.len();
    if count == 0 {
        return None;
    }
    let phases: Vec<RealEnclosure> = values.iter().map(|k| alpha.mul_int(k)).collect();
    if count == 1 {
        return Some(LambdaEntry {
            m,
            n,
            u,
            v,
            count,
            lambda: values[0].clone(),
            phase: phases[0].shift_to_unit(),
            delta: RealEnclosure::zero(),
            gamma: rat(1, 2),
            eps: Rat::one(),
            outliers: 0,
            bound: RealEnclosure::zero(),
        });
    }
    let mut s = ComplexEnclosure::zero();
    for p in &phases {
        s = &s + &cis_2pi(p, bits);
    }
    let modulus = s.abs(bits);
    let nn = Rat::from_integer(BigInt::from(count));
    let ratio = Rat::new(
        d.heights_slice(m).ok()?[u].clone(),
        d.heights_slice(n).ok()?[v].clone(),
    );
    let delta = (&RealEnclosure::exact(nn.clone()) - &modulus).scale(&ratio);
    let root = sqrt_enclosure(&delta, bits);
    let gamma = if root.hi() >= &Rat::one() || delta.hi() <= &Rat::zero() {
        rat(1, 2)
    } else {
        let g = acos_over_2pi(&(Rat::one() - root.hi()), bits);
        g.hi().clone().min(rat(1, 2))
    };
    let gamma = if gamma <= Rat::zero() { pow2_neg(bits / 2) } else { gamma };
    // tightest certified eps
    let eps = ((&nn - modulus.lo()) / &nn + pow2_neg(40)).min(Rat::one());
    // angles as rational midpoints; the enclosures are far narrower than gamma
    let mids: Vec<Rat> = phases.iter().map(|p| {
        let r = p.midpoint();
        &r - r.floor()
    }).collect();
    let c = geometric_cluster(&mids, &eps, &gamma).ok()?;
    Some(LambdaEntry {
        m,
        n,
        u,
        v,
        count,
        lambda: values[c.index].clone(),
        phase: phases[c.index].shift_to_unit(),
        delta,
        gamma,
        eps,
        outliers: c.outliers,
        bound: c.bound,
    })
}

/// Selections `Lambda_{m,n}(u, v)` for all `m < n <= depth` by the geometric
/// lemma, phases at `v0`, and quasi-additivity residuals.
pub fn estimate_rho(
    d: &BratteliDiagram,
    _mu: &MeasureEnclosure,
    clean: &CleanReport,
    alpha: &AngleSpec,
    depth: usize,
    v0: usize,
    cap: usize,
    bits: u32,
) -> Result<RhoEstimate> {
    if !clean.contains(v0) {
        return Err(Error::Invalid(format!("vertex {} is not in I_mu", v0 + 1)));
    }
    let d = if d.depth() < depth { d.deepen(depth)? } else { d.truncate(depth) };
    let bound = d.heights_slice(depth)?.iter().max().unwrap().clone();
    let a = alpha.value_for_multiplier(&bound, bits);
    let mut table: BTreeMap<(usize, usize, usize, usize), LambdaEntry> = BTreeMap::new();
    for m in 1..depth {
        for n in m + 1..=depth {
            for u in 0..d.vertex_count(m) {
                let vals = match segment_values(&d, m, n, u, cap) {
                    Ok(v) => v,
                    Err(Error::Cap { .. }) => continue,
                    Err(e) => return Err(e),
                };
                for (v, list) in vals.iter().enumerate() {
                    if let Some(e) = select(&d, &a, (m, n, u, v), list, bits) {
                        table.insert((m, n, u, v), e);
                    }
                }
            }
        }
    }
    let mut phases: Vec<Vec<Option<RealEnclosure>>> = (1..=depth)
        .map(|m| {
            (0..d.vertex_count(m))
                .map(|u| table.get(&(m, depth, u, v0)).map(|e| e.phase.clone()))
                .collect()
        })
        .collect();
    phases[depth - 1] = (0..d.vertex_count(depth))
        .map(|v| if v == v0 { Some(RealEnclosure::zero()) } else { None })
        .collect();
    let mut residuals = Vec::new();
    for (&(l, n, u, v), outer) in &table {
        for m in l + 1..n {
            for w in 0..d.vertex_count(m) {
                let (Some(a1), Some(a2)) = (table.get(&(l, m, u, w)), table.get(&(m, n, w, v))) else {
                    continue;
                };
                let k = &outer.lambda - &a1.lambda - &a2.lambda;
                let value = nearest_int_dist(&a.mul_int(&k));
                let bound = &a1.gamma + &a2.gamma + &outer.gamma;
                residuals.push(Residual {
                    levels: (l, m, n),
                    vertices: (u, w, v),
                    within: value.hi() <= &bound,
                    value,
                    bound,
                });
            }
        }
    }
    Ok(RhoEstimate {
        depth,
        v0,
        phases,
        lambda: table.into_values().collect(),
        residuals,
    })
}

/// Exact finite rank series: for each level the largest average
/// `(1/M(u,v)) sum_s |||alpha <s, h_n> + rho_{n+1}(v) - rho_n(u)|||^2`.
pub fn test_exact_rank_series(
    d: &BratteliDiagram,
    clean: &CleanReport,
    alpha: &AngleSpec,
    rho: &RhoEstimate,
    depth: usize,
    th: &Thresholds,
    bits: u32,
) -> Result<Verdict> {
    if !clean.exact_rank {
        return Err(Error::Invalid("exact finite rank required (I_mu must be every vertex)".into()));
    }
    let depth = depth.min(rho.depth);
    let d = if d.depth() < depth { d.deepen(depth)? } else { d.truncate(depth) };
    let bound = d.heights_slice(depth)?.iter().max().unwrap().clone();
    let a = alpha.value_for_multiplier(&bound, bits);
    let mut series = Vec::new();
    let mut missing = Vec::new();
    for n in 1..depth {
        let level = d.level(n + 1)?;
        let h = d.heights_slice(n)?;
        let mut term: Option<RealEnclosure> = None;
        for v in 0..level.target_count() {
            let Some(pv) = rho.phase(n + 1, v) else { continue };
            let mut sums: BTreeMap<usize, (RealEnclosure, usize)> = BTreeMap::new();
            for (r, s) in level.suffixes(v).into_iter().enumerate() {
                let u = level.order(v)[r];
                let Some(pu) = rho.phase(n, u) else { continue };
                let k: BigInt = s.iter().zip(h).map(|(x, y)| BigInt::from(*x) * y).sum();
                let theta = &(&a.mul_int(&k) + pv) - pu;
                let sq = nearest_int_dist(&theta).square();
                let e = sums.entry(u).or_insert((RealEnclosure::zero(), 0));
                e.0 = &e.0 + &sq;
                e.1 += 1;
            }
            for (_, (sum, count)) in sums {
                let avg = sum.scale(&Rat::new(BigInt::one(), BigInt::from(count)));
                term = Some(match term {
                    None => avg,
                    Some(t) => t.max(&avg),
                });
            }
        }
        match term {
            Some(t) => series.push(Term { level: n, value: t.round_outward(bits) }),
            None => missing.push(n),
        }
    }
    let mut notes = vec!["terms maximized per level over vertex pairs".to_string()];
    if !missing.is_empty() {
        notes.push(format!("no rho phases available at levels {missing:?}"));
    }
    let zero_from = series
        .iter()
        .rev()
        .take_while(|t| t.value.is_zero())
        .last()
        .map(|t| t.level);
    let outcome = match zero_from {
        Some(l) if l + 2 <= depth && missing.iter().all(|&m| m < l) => {
            notes.push(format!("terms vanish exactly from level {l}"));
            Outcome::PassUpToDepth {
                depth,
                tail_bound: Some("0".into()),
            }
        }
        _ => match failure(&series, th) {
            Some(f) => f,
            None if series.is_empty() => Outcome::Inconclusive {
                depth,
                note: "missing rho entries".into(),
            },
            None => Outcome::Inconclusive {
                depth,
                note: "no divergence evidence and no exact tail".into(),
            },
        },
    };
    Ok(Verdict {
        test: "exact-rank-series".into(),
        alpha: alpha.to_string(),
        depth,
        outcome,
        series,
        thresholds: th.clone(),
        notes,
        properness: None,
    })
}
