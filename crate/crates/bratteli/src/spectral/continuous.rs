use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{failure, Outcome, Term, Thresholds, Verdict};
use crate::arith::{nearest_int_dist, AngleSpec, CfStream, DyadicAngle, FixedAngle, Rat, RealEnclosure};
use crate::diagram::{BratteliDiagram, Generator};
use crate::error::{Error, Result};

/// Diagram holding at least `levels` levels, deepened through its generator.
pub(crate) fn with_depth(d: &BratteliDiagram, levels: usize) -> Result<BratteliDiagram> {
    if d.depth() >= levels {
        Ok(d.clone())
    } else {
        d.deepen(levels)
    }
}

/// Distinct values `<s, h_n>` over the suffix vectors of level `n + 1`
/// (for `n = 0`, the root suffixes `0 .. max hat`).
pub(crate) fn suffix_values(d: &BratteliDiagram, n: usize) -> Result<BTreeSet<BigInt>> {
    let mut out = BTreeSet::new();
    if n == 0 {
        let top = d.hat().iter().max().unwrap();
        let mut k = BigInt::zero();
        while &k < top {
            out.insert(k.clone());
            k += 1;
        }
        return Ok(out);
    }
    let level = d.level(n + 1)?;
    let h = d.heights_slice(n)?;
    for list in level.orders() {
        // walk ranks downward, adding the height of each edge passed
        let mut acc = BigInt::zero();
        for &u in list.iter().rev() {
            out.insert(acc.clone());
            acc += &h[u];
        }
    }
    Ok(out)
}

fn fast_term(d: &BratteliDiagram, a: &FixedAngle, n: usize) -> Result<RealEnclosure> {
    let (mut lo, mut hi) = (0u128, 0u128);
    let mut visit = |k: u128| {
        let (l, h) = a.dist(k);
        lo = lo.max(l);
        hi = hi.max(h);
    };
    if n == 0 {
        let top = d.hat().iter().max().unwrap().to_u128().unwrap();
        (0..top).for_each(&mut visit);
    } else {
        let h: Vec<u128> = d.heights_slice(n)?.iter().map(|x| x.to_u128().unwrap()).collect();
        for list in d.level(n + 1)?.orders() {
            let mut acc = 0u128;
            for &u in list.iter().rev() {
                visit(acc);
                acc += h[u];
            }
        }
    }
    Ok(FixedAngle::enclosure(lo, hi))
}

fn fixed_term(d: &BratteliDiagram, a: &DyadicAngle, n: usize) -> Result<RealEnclosure> {
    let (mut lo, mut hi) = (BigInt::zero(), BigInt::zero());
    let mut visit = |k: &BigInt| {
        let (l, h) = a.dist_scaled(k);
        if l > lo {
            lo = l;
        }
        if h > hi {
            hi = h;
        }
    };
    if n == 0 {
        let top = d.hat().iter().max().unwrap();
        let mut k = BigInt::zero();
        while &k < top {
            visit(&k);
            k += 1;
        }
    } else {
        let h = d.heights_slice(n)?;
        for list in d.level(n + 1)?.orders() {
            let mut acc = BigInt::zero();
            for &u in list.iter().rev() {
                visit(&acc);
                acc += &h[u];
            }
        }
    }
    Ok(a.enclosure(&lo, &hi))
}

/// Exact term for `alpha = p/q`: `max min(x, q - x) / q` over `x = p k mod q`.
fn residue_term(d: &BratteliDiagram, alpha: &Rat, n: usize) -> Result<RealEnclosure> {
    let q = alpha.denom();
    let p = alpha.numer().mod_floor(q);
    let mut best = BigInt::zero();
    let mut visit = |k: &BigInt| {
        let x = (&p * k).mod_floor(q);
        let y = q - &x;
        let m = if x < y { x } else { y };
        if m > best {
            best = m;
        }
    };
    if n == 0 {
        let top = d.hat().iter().max().unwrap();
        let mut k = BigInt::zero();
        while &k < top {
            visit(&k);
            k += 1;
        }
    } else {
        let h: Vec<BigInt> = d.heights_slice(n)?.iter().map(|x| x.mod_floor(q)).collect();
        for list in d.level(n + 1)?.orders() {
            let mut acc = BigInt::zero();
            for &u in list.iter().rev() {
                visit(&acc);
                acc += &h[u];
                if &acc >= q {
                    acc -= q;
                }
            }
        }
    }
    Ok(RealEnclosure::exact(Rat::new(best, q.clone())))
}

/// `t_n = max |||alpha <s, h_n>|||` over all suffix vectors of level `n + 1`,
/// for `0 <= n <= depth`.
pub fn continuous_terms(
    d: &BratteliDiagram,
    alpha: &AngleSpec,
    depth: usize,
    bits: u32,
) -> Result<Vec<Term>> {
    let d = with_depth(d, depth + 1)?;
    let bound = d.heights_slice(depth + 1)?.iter().max().unwrap().clone();
    let a = alpha.value_for_multiplier(&bound, bits);
    let mut series = Vec::with_capacity(depth + 1);
    if !a.is_exact() && bound.bits() < 64 {
        if let Some(fixed) = FixedAngle::new(&a) {
            for n in 0..=depth {
                series.push(Term {
                    level: n,
                    value: fast_term(&d, &fixed, n)?,
                });
            }
            return Ok(series);
        }
    }
    if !a.is_exact() {
        let fixed = DyadicAngle::new(&a, bits + bound.bits() as u32 + 4);
        for n in 0..=depth {
            series.push(Term {
                level: n,
                value: fixed_term(&d, &fixed, n)?,
            });
        }
        return Ok(series);
    }
    if let Some(r) = alpha.as_rational() {
        for n in 0..=depth {
            series.push(Term {
                level: n,
                value: residue_term(&d, r, n)?,
            });
        }
        return Ok(series);
    }
    for n in 0..=depth {
        let mut t = RealEnclosure::zero();
        for k in suffix_values(&d, n)? {
            t = t.max(&nearest_int_dist(&a.mul_int(&k)));
        }
        series.push(Term { level: n, value: t });
    }
    Ok(series)
}

/// First audited level `n` with `q | h_n(v)` for every `v`, where `alpha = p/q`.
pub fn rational_shortcut(d: &BratteliDiagram, alpha: &Rat) -> Option<usize> {
    let q = alpha.denom();
    (1..=d.depth()).find(|&n| {
        d.heights_slice(n)
            .unwrap()
            .iter()
            .all(|h| h.is_multiple_of(q))
    })
}

/// Constant coefficient `a` when `d` is the untelescoped Sturmian diagram of
/// `[0; a, a, ...]` and `alpha` is that number.
fn constant_sturmian(d: &BratteliDiagram, alpha: &AngleSpec) -> Option<u64> {
    let a = match d.generator()? {
        Generator::Sturmian {
            prefix,
            cf,
            periodic: true,
        } if prefix.is_empty() && cf.len() == 1 => cf[0],
        _ => return None,
    };
    let cf = CfStream::constant(a).ok()?;
    if alpha != &AngleSpec::ContinuedFraction(cf) {
        return None;
    }
    let fresh = crate::constructions::sturmian(&CfStream::constant(a).ok()?, d.depth(), false).ok()?;
    if fresh.levels() != d.levels() || fresh.hat() != d.hat() {
        return None;
    }
    Some(a)
}

/// Registered tail bound for constant-coefficient Sturmian diagrams: every
/// term with `5 <= n <= N` is checked against `1/q_{n-2}`, and the remaining
/// series is at most `2 (1/q_{N-1} + 1/q_N)` since `q_{k+2} >= 2 q_k`.
pub fn sturmian_tail_bound(d: &BratteliDiagram, alpha: &AngleSpec, series: &[Term]) -> Option<Rat> {
    let a = constant_sturmian(d, alpha)?;
    let depth = series.last()?.level;
    if depth < 5 {
        return None;
    }
    let q = crate::arith::cf_convergents(&vec![a; depth + 1], depth + 1).ok()?;
    for t in series.iter().filter(|t| t.level >= 5) {
        let bound = Rat::new(BigInt::one(), q[t.level - 2].1.clone());
        if !t.value.certainly_lt(&bound) {
            return None;
        }
    }
    let two = Rat::from_integer(BigInt::from(2));
    Some(two * (Rat::new(BigInt::one(), q[depth - 1].1.clone()) + Rat::new(BigInt::one(), q[depth].1.clone())))
}

/// Continuous eigenvalue test on the series `t_n`, `n <= depth`.
pub fn test_continuous(
    d: &BratteliDiagram,
    alpha: &AngleSpec,
    depth: usize,
    th: &Thresholds,
    bits: u32,
) -> Result<Verdict> {
    if d.depth() < depth + 1 && d.generator().is_none() {
        return Err(Error::Depth {
            needed: depth + 1,
            available: d.depth(),
        });
    }
    let deep = with_depth(d, depth + 1)?;
    let series = continuous_terms(&deep, alpha, depth, bits)?;
    let mut notes = Vec::new();
    let report = d.check_properness();
    let properness = if report.proper() {
        None
    } else {
        notes.push("diagram is not properly ordered at this depth; condition (2) is still evaluated".into());
        Some(report)
    };
    let wide = &th.theta_div / Rat::from_integer(BigInt::from(10));
    if series.iter().any(|t| t.value.width() > wide) {
        notes.push("some terms are wider than theta_div/10; raise the precision".into());
    }
    // certified tails first: finitely many large early terms do not matter
    let shortcut = alpha.as_rational().and_then(|r| rational_shortcut(&deep.truncate(depth), r));
    let outcome = if let Some(level) = shortcut.filter(|&l| {
        series.iter().filter(|t| t.level >= l).all(|t| t.value.is_zero())
    }) {
        notes.push(format!("denominator divides every height from level {level}; all later terms vanish"));
        Outcome::PassUpToDepth {
            depth,
            tail_bound: Some("0".into()),
        }
    } else if let Some(b) = sturmian_tail_bound(&deep, alpha, &series) {
        notes.push("t_n < 1/q_(n-2) checked for 5 <= n <= depth".into());
        Outcome::PassUpToDepth {
            depth,
            tail_bound: Some(b.to_string()),
        }
    } else if let Some(f) = failure(&series, th) {
        f
    } else if let Some(level) = shortcut {
        Outcome::Inconclusive {
            depth,
            note: format!("heights divisible from level {level} but terms are not exactly zero"),
        }
    } else {
        Outcome::Inconclusive {
            depth,
            note: "no divergence evidence and no registered tail bound".into(),
        }
    };
    Ok(Verdict {
        test: "continuous".into(),
        alpha: alpha.to_string(),
        depth,
        outcome,
        series,
        thresholds: th.clone(),
        notes,
        properness,
    })
}
