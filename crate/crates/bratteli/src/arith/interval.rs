use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rat;

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RealEnclosure {
    lo: Rat,
    hi: Rat,
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

/// `2^-bits` as a rational.
pub fn pow2_neg(bits: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << bits)
}

fn floor_scaled(x: &Rat, bits: u32) -> BigInt {
    let num = x.numer() << bits;
    num.div_floor(x.denom())
}

fn ceil_scaled(x: &Rat, bits: u32) -> BigInt {
    let num = x.numer() << bits;
    num.div_ceil(x.denom())
}

impl RealEnclosure {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "enclosure with lo > hi");
        RealEnclosure { lo, hi }
    }

    pub fn exact(x: Rat) -> Self {
        RealEnclosure { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: i64) -> Self {
        Self::exact(Rat::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Self::exact(rat_int(n))
    }

    pub fn zero() -> Self {
        Self::exact(Rat::zero())
    }

    pub fn one() -> Self {
        Self::exact(Rat::one())
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2))
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_exact(&self) -> Option<&Rat> {
        if self.is_exact() {
            Some(&self.lo)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// True when `self` is contained in `other`.
    pub fn within(&self, other: &RealEnclosure) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn overlaps(&self, other: &RealEnclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &RealEnclosure) -> RealEnclosure {
        RealEnclosure {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Enclosure of `max(a, b)`.
    pub fn max(&self, other: &RealEnclosure) -> RealEnclosure {
        RealEnclosure {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn min(&self, other: &RealEnclosure) -> RealEnclosure {
        RealEnclosure {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }

    pub fn abs(&self) -> RealEnclosure {
        if self.lo >= Rat::zero() {
            self.clone()
        } else if self.hi <= Rat::zero() {
            -self
        } else {
            RealEnclosure {
                lo: Rat::zero(),
                hi: (-&self.lo).max(self.hi.clone()),
            }
        }
    }

    pub fn square(&self) -> RealEnclosure {
        let a = self.abs();
        RealEnclosure {
            lo: &a.lo * &a.lo,
            hi: &a.hi * &a.hi,
        }
    }

    pub fn scale(&self, k: &Rat) -> RealEnclosure {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            RealEnclosure { lo: a, hi: b }
        } else {
            RealEnclosure { lo: b, hi: a }
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> RealEnclosure {
        self.scale(&rat_int(k))
    }

    pub fn add_rat(&self, k: &Rat) -> RealEnclosure {
        RealEnclosure {
            lo: &self.lo + k,
            hi: &self.hi + k,
        }
    }

    /// Quotient, or `None` when the divisor touches zero.
    pub fn div(&self, other: &RealEnclosure) -> Option<RealEnclosure> {
        if other.lo <= Rat::zero() && other.hi >= Rat::zero() {
            return None;
        }
        let inv = RealEnclosure::new(
            Rat::one() / &other.hi,
            Rat::one() / &other.lo,
        );
        Some(self * &inv)
    }

    pub fn certainly_lt(&self, x: &Rat) -> bool {
        &self.hi < x
    }

    pub fn certainly_gt(&self, x: &Rat) -> bool {
        &self.lo > x
    }

    pub fn certainly_le(&self, x: &Rat) -> bool {
        &self.hi <= x
    }

    pub fn certainly_ge(&self, x: &Rat) -> bool {
        &self.lo >= x
    }

    /// Rounds endpoints outward onto the grid `2^-bits`, leaving short
    /// denominators untouched.
    pub fn round_outward(&self, bits: u32) -> RealEnclosure {
        let limit = bits as u64 + 8;
        let lo = if self.lo.denom().bits() > limit {
            Rat::new(floor_scaled(&self.lo, bits), BigInt::one() << bits)
        } else {
            self.lo.clone()
        };
        let hi = if self.hi.denom().bits() > limit {
            Rat::new(ceil_scaled(&self.hi, bits), BigInt::one() << bits)
        } else {
            self.hi.clone()
        };
        RealEnclosure { lo, hi }
    }

    /// Shift by an integer so that `lo` lies in `[0, 1)`.
    pub fn shift_to_unit(&self) -> RealEnclosure {
        let k = self.lo.floor();
        RealEnclosure {
            lo: &self.lo - &k,
            hi: &self.hi - &k,
        }
    }

    /// Reduction into `[0, 1)`; `None` when the interval straddles an integer.
    pub fn reduce_mod1(&self) -> Option<RealEnclosure> {
        let s = self.shift_to_unit();
        if s.hi < Rat::one() {
            Some(s)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a RealEnclosure>>(items: I) -> RealEnclosure {
        let mut acc = RealEnclosure::zero();
        for x in items {
            acc = &acc + x;
        }
        acc
    }
}

impl<'a> Add<&'a RealEnclosure> for &'a RealEnclosure {
    type Output = RealEnclosure;
    fn add(self, o: &RealEnclosure) -> RealEnclosure {
        RealEnclosure {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }
}

impl<'a> Sub<&'a RealEnclosure> for &'a RealEnclosure {
    type Output = RealEnclosure;
    fn sub(self, o: &RealEnclosure) -> RealEnclosure {
        RealEnclosure {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }
}

impl<'a> Mul<&'a RealEnclosure> for &'a RealEnclosure {
    type Output = RealEnclosure;
    fn mul(self, o: &RealEnclosure) -> RealEnclosure {
        if self.is_exact() {
            return o.scale(&self.lo);
        }
        if o.is_exact() {
            return self.scale(&o.lo);
        }
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RealEnclosure { lo, hi }
    }
}

impl<'a> Neg for &'a RealEnclosure {
    type Output = RealEnclosure;
    fn neg(self) -> RealEnclosure {
        RealEnclosure {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl fmt::Display for RealEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", decimal_down(&self.lo, 20), decimal_up(&self.hi, 20))
        }
    }
}

fn decimal(x: &Rat, digits: usize, up: bool) -> String {
    if x.is_integer() {
        return x.numer().to_string();
    }
    let scale = BigInt::from(10).pow(digits as u32);
    let num = x.numer() * &scale;
    let q = if up {
        num.div_ceil(x.denom())
    } else {
        num.div_floor(x.denom())
    };
    let neg = q.is_negative();
    let s = q.abs().to_string();
    let s = if s.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = s.split_at(s.len() - digits);
    let frac = frac.trim_end_matches('0');
    let body = if frac.is_empty() {
        int.to_string()
    } else {
        format!("{int}.{frac}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Decimal string not exceeding `x`.
pub fn decimal_down(x: &Rat, digits: usize) -> String {
    decimal(x, digits, false)
}

/// Decimal string not below `x`.
pub fn decimal_up(x: &Rat, digits: usize) -> String {
    decimal(x, digits, true)
}

/// Distance to the nearest integer, `|||x|||`.
pub fn nearest_int_dist(x: &RealEnclosure) -> RealEnclosure {
    let half = rat(1, 2);
    if x.width() >= Rat::one() {
        return RealEnclosure::new(Rat::zero(), half);
    }
    let dist = |t: &Rat| {
        let f = t - t.floor();
        let g = Rat::one() - &f;
        f.min(g)
    };
    let a = dist(x.lo());
    let b = dist(x.hi());
    let mut lo = a.clone().min(b.clone());
    let mut hi = a.max(b);
    if x.lo().ceil() <= *x.hi() {
        lo = Rat::zero();
    }
    if (x.lo() - &half).ceil() + &half <= *x.hi() {
        hi = half;
    }
    RealEnclosure::new(lo, hi)
}

/// Enclosure of the square root, exact for rational squares.
pub fn sqrt_enclosure(x: &RealEnclosure, bits: u32) -> RealEnclosure {
    let lo = sqrt_bound(x.lo(), bits, false);
    let hi = sqrt_bound(x.hi(), bits, true);
    RealEnclosure::new(lo, hi)
}

fn sqrt_bound(x: &Rat, bits: u32, up: bool) -> Rat {
    if *x <= Rat::zero() {
        return Rat::zero();
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        return Rat::new(n, d);
    }
    let scaled = if up {
        ceil_scaled(x, 2 * bits)
    } else {
        floor_scaled(x, 2 * bits)
    };
    let mut s = scaled.sqrt();
    if up && &s * &s < scaled {
        s += 1;
    }
    Rat::new(s, BigInt::one() << bits)
}

impl serde::Serialize for RealEnclosure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RealEnclosure", 2)?;
        st.serialize_field("lo", &self.lo.to_string())?;
        st.serialize_field("hi", &self.hi.to_string())?;
        st.end()
    }
}

/// Serializes a rational as its `p/q` string.
pub fn ser_rat<S: serde::Serializer>(x: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn ser_int<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn ser_ints<S: serde::Serializer>(x: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(x.len()))?;
    for k in x {
        seq.serialize_element(&k.to_string())?;
    }
    seq.end()
}

/// Fixed-point enclosure `[lo, hi] / 2^bits` of an angle for evaluating
/// `|||alpha k|||` over many nonnegative integers `k` without rational
/// normalization.
#[derive(Clone, Debug)]
pub struct DyadicAngle {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
    one: BigInt,
    half: BigInt,
}

impl DyadicAngle {
    pub fn new(x: &RealEnclosure, bits: u32) -> Self {
        DyadicAngle {
            lo: floor_scaled(x.lo(), bits),
            hi: ceil_scaled(x.hi(), bits),
            bits,
            one: BigInt::one() << bits,
            half: BigInt::one() << (bits - 1),
        }
    }

    fn dist(&self, y: &BigInt) -> BigInt {
        let r = y.mod_floor(&self.one);
        let s = &self.one - &r;
        r.min(s)
    }

    /// Scaled lower and upper bounds of `|||alpha k|||` for `k >= 0`.
    pub fn dist_scaled(&self, k: &BigInt) -> (BigInt, BigInt) {
        let p = k * &self.lo;
        let q = k * &self.hi;
        let w = &q - &p;
        if w >= self.one {
            return (BigInt::zero(), self.half.clone());
        }
        let r = p.mod_floor(&self.one);
        let s = &r + &w;
        let (fr, fs) = (self.dist(&r), self.dist(&s));
        let lo = if s >= self.one { BigInt::zero() } else { fr.clone().min(fs.clone()) };
        let three_halves = &self.one + &self.half;
        let hi = if (r <= self.half && self.half <= s) || s >= three_halves {
            self.half.clone()
        } else {
            fr.max(fs)
        };
        (lo, hi)
    }

    pub fn enclosure(&self, lo: &BigInt, hi: &BigInt) -> RealEnclosure {
        RealEnclosure::new(
            Rat::new(lo.clone(), self.one.clone()),
            Rat::new(hi.clone(), self.one.clone()),
        )
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }
}

/// Angle enclosure `[lo, lo + w] / 2^128` for multipliers below `2^64`;
/// reduction mod 1 is wrapping multiplication.
#[derive(Clone, Copy, Debug)]
pub struct FixedAngle {
    lo: u128,
    w: u128,
}

const HALF: u128 = 1 << 127;

fn fdist(y: u128) -> u128 {
    if y <= HALF {
        y
    } else {
        y.wrapping_neg()
    }
}

impl FixedAngle {
    pub fn new(x: &RealEnclosure) -> Option<Self> {
        let lo = floor_scaled(x.lo(), 128).to_u128()?;
        let hi = ceil_scaled(x.hi(), 128).to_u128()?;
        Some(FixedAngle { lo, w: hi - lo })
    }

    /// Bounds of `2^128 |||alpha k|||`.
    pub fn dist(&self, k: u128) -> (u128, u128) {
        let width = match k.checked_mul(self.w) {
            Some(w) if w < HALF => w,
            _ => return (0, HALF),
        };
        let p = k.wrapping_mul(self.lo);
        match p.checked_add(width) {
            Some(s) => {
                let (a, b) = (fdist(p), fdist(s));
                let hi = if p <= HALF && HALF <= s { HALF } else { a.max(b) };
                (a.min(b), hi)
            }
            None => {
                let s = p.wrapping_add(width);
                let hi = if p <= HALF || s >= HALF { HALF } else { fdist(p).max(fdist(s)) };
                (0, hi)
            }
        }
    }

    pub fn enclosure(lo: u128, hi: u128) -> RealEnclosure {
        let one: BigInt = BigInt::one() << 128u32;
        RealEnclosure::new(Rat::new(BigInt::from(lo), one.clone()), Rat::new(BigInt::from(hi), one))
    }
}
