use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{cis_2pi, cos_2pi, nearest_int_dist, rat, ComplexEnclosure, Rat, RealEnclosure};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct ClusterResult {
    /// Index `l` of the centre angle.
    pub index: usize,
    /// `#{k : |||alpha_k - alpha_l||| >= gamma}`.
    pub outliers: usize,
    /// Enclosure of `2 N eps / (1 - cos 2 pi gamma)`.
    pub bound: RealEnclosure,
}

fn outlier_count(angles: &[Rat], l: usize, gamma: &Rat) -> usize {
    angles
        .iter()
        .filter(|a| nearest_int_dist(&RealEnclosure::exact(*a - &angles[l])).lo() >= gamma)
        .count()
}

/// Centre of a cluster of angles whose exponential sum is long:
/// if `|sum exp(2 pi i alpha_k)| > (1 - eps) N` then some `l` has fewer than
/// `2 N eps / (1 - cos 2 pi gamma)` angles at distance `>= gamma` from `alpha_l`.
pub fn geometric_cluster(angles: &[Rat], eps: &Rat, gamma: &Rat) -> Result<ClusterResult> {
    let n = angles.len();
    if n < 2 {
        return Err(Error::Invalid("geometric lemma needs at least two angles".into()));
    }
    if eps <= &Rat::zero() || eps > &Rat::one() {
        return Err(Error::Invalid("eps must lie in (0, 1]".into()));
    }
    if gamma <= &Rat::zero() || gamma > &rat(1, 2) {
        return Err(Error::Invalid("gamma must lie in (0, 1/2]".into()));
    }
    let nn = Rat::from_integer(BigInt::from(n));
    let target = (Rat::one() - eps) * &nn;
    let target_sq = &target * &target;
    let mut bits = 64;
    loop {
        let mut s = ComplexEnclosure::zero();
        for a in angles {
            s = &s + &cis_2pi(&RealEnclosure::exact(a.clone()), bits);
        }
        let m = s.abs_sq();
        if m.lo() > &target_sq {
            break;
        }
        if m.hi() <= &target_sq || bits >= 512 {
            return Err(Error::Hypothesis(format!(
                "|sum| = {} is not above (1 - eps) N = {}",
                s.abs(bits),
                target
            )));
        }
        bits *= 2;
    }
    let counts: Vec<usize> = (0..n).map(|l| outlier_count(angles, l, gamma)).collect();
    let best = *counts.iter().min().unwrap();
    let index = counts.iter().position(|&c| c == best).unwrap();
    let two_n_eps = Rat::from_integer(BigInt::from(2 * n as i64)) * eps;
    let mut bits = 64;
    loop {
        let den = &RealEnclosure::one() - &cos_2pi(&RealEnclosure::exact(gamma.clone()), bits);
        let bound = RealEnclosure::exact(two_n_eps.clone())
            .div(&den)
            .ok_or_else(|| Error::Precision("1 - cos 2 pi gamma encloses 0".into()))?;
        if bound.certainly_gt(&Rat::from_integer(BigInt::from(best))) {
            return Ok(ClusterResult {
                index,
                outliers: best,
                bound,
            });
        }
        if bound.hi() <= &Rat::from_integer(BigInt::from(best)) || bits >= 512 {
            return Err(Error::Precision(format!(
                "outlier count {best} not certified below {bound}"
            )));
        }
        bits *= 2;
    }
}
