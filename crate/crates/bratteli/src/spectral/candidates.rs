use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use super::Term;
use crate::arith::{rat, rat_int, AngleSpec, Rat, RealEnclosure};
use crate::diagram::BratteliDiagram;
use crate::error::{Error, Result};
use crate::measure::MeasureEnclosure;

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    /// `alpha = nu . mu_m`, shifted so the lower end lies in `[0, 1)`.
    pub alpha: RealEnclosure,
    pub seed_level: usize,
    #[serde(serialize_with = "crate::arith::ser_ints")]
    pub nu: Vec<BigInt>,
    /// `||eta_n||_inf` for `n = seed_level ..= depth`.
    pub eta_trace: Vec<Term>,
    /// `nu_N` at the deepest level.
    #[serde(serialize_with = "crate::arith::ser_ints")]
    pub nu_final: Vec<BigInt>,
    /// Enclosures too wide to decide the threshold.
    pub flagged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identified: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CandidateOptions {
    pub depth: usize,
    pub seed_bound: i64,
    /// Seed levels, inclusive.
    pub window: (usize, usize),
    /// Final `||eta_N||` must be below this.
    pub threshold: Rat,
    /// Base angle and coefficient bound for `m * base + n` identification.
    pub identify: Option<(AngleSpec, i64)>,
}

impl CandidateOptions {
    /// Seed levels `3 ..= depth - 3` (at least level 1), bound 8, threshold 1/4.
    pub fn new(depth: usize) -> Self {
        let lo = 3.min(depth.saturating_sub(3)).max(1);
        let hi = depth.saturating_sub(3).max(lo);
        CandidateOptions {
            depth,
            seed_bound: 8,
            window: (lo, hi),
            threshold: rat(1, 4),
            identify: None,
        }
    }
}

fn overlaps_mod1(a: &RealEnclosure, b: &RealEnclosure) -> bool {
    let d = a - b;
    d.hi().floor() >= d.lo().ceil()
}

/// `(m, n)` with `|m|, |n| <= bound` and `m * base + n` meeting `alpha` mod 1,
/// smallest `|m|` first.
pub fn identify_affine(alpha: &RealEnclosure, base: &AngleSpec, bound: i64) -> Option<(i64, i64)> {
    let b = base.value(&rat(1, 1 << 40));
    let mut ms: Vec<i64> = (-bound..=bound).collect();
    ms.sort_by_key(|m| (m.abs(), *m));
    for m in ms {
        let mb = b.mul_int(&BigInt::from(m));
        if overlaps_mod1(alpha, &mb) {
            let n = (alpha.midpoint() - mb.midpoint() + rat(1, 2)).floor().to_integer();
            let n = i64::try_from(&n).ok()?;
            if n.abs() <= bound {
                return Some((m, n));
            }
        }
    }
    None
}

fn vectors(width: usize, bound: i64) -> Vec<Vec<BigInt>> {
    let mut out = vec![Vec::new()];
    for _ in 0..width {
        let mut next = Vec::with_capacity(out.len() * (2 * bound as usize + 1));
        for v in &out {
            for k in -bound..=bound {
                let mut w = v.clone();
                w.push(BigInt::from(k));
                next.push(w);
            }
        }
        out = next;
    }
    out
}

fn eta_norm(alpha: &RealEnclosure, h: &[BigInt], nu: &[BigInt]) -> RealEnclosure {
    let mut norm = RealEnclosure::zero();
    for (hv, nv) in h.iter().zip(nu) {
        let e = alpha.mul_int(hv).add_rat(&-rat_int(nv));
        norm = norm.max(&e.abs());
    }
    norm
}

/// Seeds `nu_m` with `||nu_m|| <= bound` at each window level, sets
/// `alpha = nu_m . mu_m` and keeps those whose `eta_n = alpha h_n - nu_n`
/// never certainly grows and ends below the threshold.
pub fn enumerate_candidates(
    d: &BratteliDiagram,
    mu: &MeasureEnclosure,
    opts: &CandidateOptions,
) -> Result<Vec<Candidate>> {
    let depth = opts.depth;
    if depth < 3 {
        return Err(Error::Invalid("candidate search needs depth >= 3".into()));
    }
    if mu.depth() < depth {
        return Err(Error::Depth {
            needed: depth,
            available: mu.depth(),
        });
    }
    let d = if d.depth() < depth { d.deepen(depth)? } else { d.clone() };
    let (lo, hi) = opts.window;
    if lo < 1 || hi > depth || lo > hi {
        return Err(Error::Invalid(format!("seed window {lo}..={hi} outside 1..={depth}")));
    }
    let h_top = d.heights_slice(depth)?;
    let max_h = h_top.iter().max().unwrap();
    let undecided = &opts.threshold / Rat::from_integer(BigInt::from(2));
    let mut out: Vec<Candidate> = Vec::new();
    for m in lo..=hi {
        let mats: Vec<_> = (m + 1..=depth).map(|n| d.incidence_matrix(n)).collect::<Result<_>>()?;
        for nu in vectors(d.vertex_count(m), opts.seed_bound) {
            let alpha = mu.pair(m, &nu)?;
            let mut trace = vec![Term {
                level: m,
                value: eta_norm(&alpha, d.heights_slice(m)?, &nu),
            }];
            let mut cur = nu.clone();
            let mut growing = false;
            for (i, mat) in mats.iter().enumerate() {
                let n = m + 1 + i;
                cur = mat.left_mul(&cur);
                let e = eta_norm(&alpha, d.heights_slice(n)?, &cur);
                if e.certainly_gt(trace.last().unwrap().value.hi()) {
                    growing = true;
                    break;
                }
                trace.push(Term { level: n, value: e });
            }
            if growing {
                continue;
            }
            let last = &trace.last().unwrap().value;
            if !last.certainly_lt(&opts.threshold) && last.lo() >= &opts.threshold {
                continue;
            }
            let flagged = !last.certainly_lt(&opts.threshold)
                || last.width() >= undecided
                || alpha.width() * rat_int(max_h) >= undecided;
            let alpha = alpha.shift_to_unit();
            let dup = out.iter().any(|c| {
                overlaps_mod1(&c.alpha, &alpha) && {
                    let diffs: Vec<BigInt> = c.nu_final.iter().zip(&cur).map(|(a, b)| a - b).collect();
                    let k = &diffs[0] / &h_top[0];
                    diffs.iter().zip(h_top).all(|(x, h)| x == &(&k * h))
                }
            });
            if dup {
                continue;
            }
            let identified = opts.identify.as_ref().and_then(|(base, b)| {
                identify_affine(&alpha, base, *b).map(|(m, n)| format!("{m}*<{base}>+({n})"))
            });
            out.push(Candidate {
                alpha,
                seed_level: m,
                nu,
                eta_trace: trace,
                nu_final: cur,
                flagged,
                identified,
            });
        }
    }
    out.sort_by(|a, b| a.alpha.lo().cmp(b.alpha.lo()).then(a.alpha.hi().cmp(b.alpha.hi())));
    Ok(out)
}

