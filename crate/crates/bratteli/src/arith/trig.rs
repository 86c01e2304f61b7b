//! Certified enclosures of pi, cos and sin on rational input, using
//! fixed-point integer arithmetic with explicit error budgets.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::interval::{rat, RealEnclosure};
use super::{ComplexEnclosure, Rat};

const PI_CACHE_BITS: u32 = 2048;

// atan(1/x) * 2^w, returned with its error bound in ulps.
fn atan_inv_fixed(x: u64, w: u32) -> (BigInt, u64) {
    let one = BigInt::one() << w;
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = &one / &x;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power = &power / &x2;
        k += 1;
    }
    (sum, 2 * k + 2)
}

fn pi_enclosure_bits(w: u32) -> RealEnclosure {
    let g = w + 16;
    let (a, ea) = atan_inv_fixed(5, g);
    let (b, eb) = atan_inv_fixed(239, g);
    let pi = a * 16 - b * 4;
    let err = BigInt::from(16 * ea + 4 * eb);
    let den = BigInt::one() << g;
    RealEnclosure::new(
        Rat::new(&pi - &err, den.clone()),
        Rat::new(&pi + &err, den),
    )
    .round_outward(w)
}

/// Enclosure of pi with width at most about `2^-bits`.
pub fn pi_enclosure(bits: u32) -> RealEnclosure {
    static CACHE: OnceLock<RealEnclosure> = OnceLock::new();
    if bits <= PI_CACHE_BITS {
        CACHE
            .get_or_init(|| pi_enclosure_bits(PI_CACHE_BITS))
            .round_outward(bits)
    } else {
        pi_enclosure_bits(bits)
    }
}

// cos(c) and sin(c) for c = theta / 2^w with |c| <= 4; the error bound is in ulps.
fn cos_sin_fixed(theta: &BigInt, w: u32) -> (BigInt, BigInt, BigInt) {
    let one = BigInt::one() << w;
    let mut term = one.clone();
    let mut cos = one;
    let mut sin = BigInt::zero();
    let mut k: u64 = 1;
    loop {
        term = (&term * theta) / (BigInt::from(k) << w);
        match k % 4 {
            1 => sin += &term,
            2 => cos -= &term,
            3 => sin -= &term,
            _ => cos += &term,
        }
        if term.is_zero() && k > 8 {
            break;
        }
        k += 1;
    }
    (cos, sin, BigInt::from(8 * k + 32))
}

/// Enclosure of `exp(2 pi i phase)`.
pub fn cis_2pi(phase: &RealEnclosure, bits: u32) -> ComplexEnclosure {
    if let Some(p) = phase.as_exact() {
        let f = p - p.floor();
        let quarter = rat(1, 4);
        if f.is_zero() {
            return ComplexEnclosure::one();
        }
        if f == quarter {
            return ComplexEnclosure::exact(Rat::zero(), Rat::one());
        }
        if f == rat(1, 2) {
            return ComplexEnclosure::exact(-Rat::one(), Rat::zero());
        }
        if f == rat(3, 4) {
            return ComplexEnclosure::exact(Rat::zero(), -Rat::one());
        }
    }
    let mut p = phase.shift_to_unit();
    if p.midpoint() > rat(1, 2) {
        p = p.add_rat(&-Rat::one());
    }
    let w = bits + 24;
    let two_pi = pi_enclosure(w + 8).scale(&Rat::from_integer(BigInt::from(2)));
    let theta = (&two_pi * &p).round_outward(w + 4);
    let den = BigInt::one() << w;
    let mid = theta.midpoint();
    let c_fixed = (mid.numer() << w).div_floor(mid.denom());
    let c = Rat::new(c_fixed.clone(), den.clone());
    let r = (theta.hi() - &c).max(&c - theta.lo());
    let (cos, sin, err) = cos_sin_fixed(&c_fixed, w);
    let slack = Rat::new(err, den.clone()) + r;
    let clamp = |v: BigInt| {
        let m = Rat::new(v, den.clone());
        let lo = (&m - &slack).max(-Rat::one());
        let hi = (&m + &slack).min(Rat::one());
        RealEnclosure::new(lo, hi).round_outward(bits + 8)
    };
    ComplexEnclosure::new(clamp(cos), clamp(sin))
}

/// Enclosure of `cos(2 pi x)`.
pub fn cos_2pi(x: &RealEnclosure, bits: u32) -> RealEnclosure {
    cis_2pi(x, bits).re().clone()
}

/// Enclosure of `arccos(c) / (2 pi)` for `c` in `[-1, 1]`, found by bisection
/// on `[0, 1/2]` where `cos(2 pi g)` is decreasing.
pub fn acos_over_2pi(c: &Rat, bits: u32) -> RealEnclosure {
    assert!(c.abs() <= Rat::one(), "acos argument outside [-1, 1]");
    if *c == Rat::one() {
        return RealEnclosure::zero();
    }
    if *c == -Rat::one() {
        return RealEnclosure::exact(rat(1, 2));
    }
    if c.is_zero() {
        return RealEnclosure::exact(rat(1, 4));
    }
    let mut lo = Rat::zero();
    let mut hi = rat(1, 2);
    for _ in 0..bits {
        let mid = (&lo + &hi) / Rat::from_integer(BigInt::from(2));
        let v = cos_2pi(&RealEnclosure::exact(mid.clone()), bits + 8);
        if v.lo() > c {
            lo = mid;
        } else if v.hi() < c {
            hi = mid;
        } else {
            break;
        }
    }
    RealEnclosure::new(lo, hi)
}
