use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::interval::{pow2_neg, rat_int, RealEnclosure};
use super::Rat;
use crate::error::{Error, Result};

/// Eventually periodic coefficient stream `a_1, a_2, ...`; an empty period
/// makes the stream finite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CfStream {
    prefix: Vec<u64>,
    period: Vec<u64>,
}

impl CfStream {
    pub fn new(prefix: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if prefix.iter().chain(period.iter()).any(|&a| a == 0) {
            return Err(Error::Invalid(
                "continued fraction coefficients must be positive".into(),
            ));
        }
        if prefix.is_empty() && period.is_empty() {
            return Err(Error::Invalid("empty continued fraction".into()));
        }
        Ok(CfStream { prefix, period })
    }

    pub fn periodic(period: Vec<u64>) -> Result<Self> {
        Self::new(Vec::new(), period)
    }

    pub fn golden() -> Self {
        CfStream {
            prefix: Vec::new(),
            period: vec![1],
        }
    }

    pub fn constant(a: u64) -> Result<Self> {
        Self::periodic(vec![a])
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Single repeated coefficient from the start.
    pub fn constant_value(&self) -> Option<u64> {
        if self.period.len() == 1 && self.prefix.iter().all(|&a| a == self.period[0]) {
            Some(self.period[0])
        } else {
            None
        }
    }

    /// Number of coefficients, `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        if self.is_finite() {
            Some(self.prefix.len())
        } else {
            None
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficient `a_k`, `k >= 1`.
    pub fn coeff(&self, k: usize) -> Option<u64> {
        assert!(k >= 1, "coefficients are indexed from 1");
        let i = k - 1;
        if i < self.prefix.len() {
            Some(self.prefix[i])
        } else if self.period.is_empty() {
            None
        } else {
            Some(self.period[(i - self.prefix.len()) % self.period.len()])
        }
    }

    pub fn take(&self, n: usize) -> Option<Vec<u64>> {
        (1..=n).map(|k| self.coeff(k)).collect()
    }

    /// Convergents `(p_k, q_k)` for `k = 0..=n`.
    pub fn convergents(&self, n: usize) -> Result<Vec<(BigInt, BigInt)>> {
        let a = self
            .take(n)
            .ok_or_else(|| Error::Invalid(format!("stream has fewer than {n} coefficients")))?;
        cf_convergents(&a, n)
    }

    /// Exact value of a finite stream `[0; a_1, ..., a_k]`.
    pub fn finite_value(&self) -> Option<Rat> {
        if !self.is_finite() {
            return None;
        }
        let k = self.prefix.len();
        let c = cf_convergents(&self.prefix, k).ok()?;
        let (p, q) = c[k].clone();
        Some(Rat::new(p, q))
    }

    /// Enclosure `[p_k/q_k, p_{k+1}/q_{k+1}]` (in order) of width at most `precision`.
    pub fn enclosure(&self, precision: &Rat) -> RealEnclosure {
        if let Some(v) = self.finite_value() {
            return RealEnclosure::exact(v);
        }
        let mut p0 = BigInt::zero();
        let mut q0 = BigInt::one();
        let mut p1 = BigInt::one();
        let mut q1 = BigInt::from(self.coeff(1).unwrap());
        let mut k = 1;
        loop {
            let w = Rat::new(BigInt::one(), &q0 * &q1);
            if &w <= precision && k > 1 {
                let a = Rat::new(p0.clone(), q0.clone());
                let b = Rat::new(p1.clone(), q1.clone());
                return if a <= b {
                    RealEnclosure::new(a, b)
                } else {
                    RealEnclosure::new(b, a)
                };
            }
            k += 1;
            let ak = BigInt::from(self.coeff(k).unwrap());
            let p2 = &ak * &p1 + &p0;
            let q2 = &ak * &q1 + &q0;
            p0 = std::mem::replace(&mut p1, p2);
            q0 = std::mem::replace(&mut q1, q2);
        }
    }
}

impl fmt::Display for CfStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.prefix.iter().map(|a| a.to_string()).collect();
        for (i, a) in self.period.iter().enumerate() {
            if i == 0 {
                parts.push(format!("~{a}"));
            } else {
                parts.push(a.to_string());
            }
        }
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for CfStream {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Format {
            location: format!("continued fraction '{s}'"),
            message: m.to_string(),
        };
        let mut prefix = Vec::new();
        let mut period = Vec::new();
        let mut in_period = false;
        let items: Vec<&str> = s.split(',').map(|t| t.trim()).collect();
        for (i, item) in items.iter().enumerate() {
            if *item == "..." {
                if i + 1 != items.len() || in_period {
                    return Err(bad("'...' must close the list"));
                }
                let last = prefix.pop().ok_or_else(|| bad("'...' needs a coefficient"))?;
                period.push(last);
                in_period = true;
                continue;
            }
            let (marker, digits) = match item.strip_prefix('~') {
                Some(rest) => (true, rest),
                None => (false, *item),
            };
            if marker {
                if in_period {
                    return Err(bad("repeated '~'"));
                }
                in_period = true;
            }
            let a: u64 = digits.parse().map_err(|_| bad("coefficient is not an integer"))?;
            if in_period {
                period.push(a);
            } else {
                prefix.push(a);
            }
        }
        CfStream::new(prefix, period).map_err(|e| bad(&e.to_string()))
    }
}

/// Convergents of `[0; a_1, a_2, ...]` with `p_0 = 0, p_1 = 1, q_0 = 1, q_1 = a_1`.
pub fn cf_convergents(a: &[u64], n: usize) -> Result<Vec<(BigInt, BigInt)>> {
    if a.len() < n {
        return Err(Error::Invalid(format!(
            "{} coefficients given, {n} needed",
            a.len()
        )));
    }
    if a[..n].iter().any(|&x| x == 0) {
        return Err(Error::Invalid(
            "continued fraction coefficients must be positive".into(),
        ));
    }
    let mut out = vec![(BigInt::zero(), BigInt::one())];
    if n >= 1 {
        out.push((BigInt::one(), BigInt::from(a[0])));
    }
    for k in 2..=n {
        let ak = BigInt::from(a[k - 1]);
        let p = &ak * &out[k - 1].0 + &out[k - 2].0;
        let q = &ak * &out[k - 1].1 + &out[k - 2].1;
        out.push((p, q));
    }
    Ok(out)
}

/// Exact description of an angle `alpha`; the eigenvalue is `exp(2 pi i alpha)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AngleSpec {
    Rational(Rat),
    ContinuedFraction(CfStream),
    /// `m * base + n`
    Affine {
        m: BigInt,
        base: Box<AngleSpec>,
        n: BigInt,
    },
}

impl AngleSpec {
    pub fn rational(r: Rat) -> Self {
        AngleSpec::Rational(r)
    }

    pub fn cf(stream: CfStream) -> Self {
        match stream.finite_value() {
            Some(v) => AngleSpec::Rational(v),
            None => AngleSpec::ContinuedFraction(stream),
        }
    }

    pub fn golden() -> Self {
        AngleSpec::ContinuedFraction(CfStream::golden())
    }

    /// `m * base + n`, normalized.
    pub fn affine(m: BigInt, base: AngleSpec, n: BigInt) -> Self {
        if m.is_zero() {
            return AngleSpec::Rational(rat_int(&n));
        }
        match base {
            AngleSpec::Rational(r) => AngleSpec::Rational(rat_int(&m) * r + rat_int(&n)),
            AngleSpec::Affine { m: m2, base, n: n2 } => {
                let n_total = &m * &n2 + &n;
                AngleSpec::affine(&m * &m2, *base, n_total)
            }
            b @ AngleSpec::ContinuedFraction(_) => {
                if m.is_one() && n.is_zero() {
                    b
                } else {
                    AngleSpec::Affine {
                        m,
                        base: Box::new(b),
                        n,
                    }
                }
            }
        }
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        match self {
            AngleSpec::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Enclosure of the unreduced value.
    pub fn raw_enclosure(&self, precision: &Rat) -> RealEnclosure {
        match self {
            AngleSpec::Rational(r) => RealEnclosure::exact(r.clone()),
            AngleSpec::ContinuedFraction(c) => c.enclosure(precision),
            AngleSpec::Affine { m, base, n } => {
                let p = precision / rat_int(&m.abs());
                base.raw_enclosure(&p).mul_int(m).add_rat(&rat_int(n))
            }
        }
    }

    /// Enclosure of the angle reduced into `[0, 1)` with width at most `precision`.
    pub fn value(&self, precision: &Rat) -> RealEnclosure {
        let mut p = precision.clone();
        for _ in 0..256 {
            if let Some(r) = self.raw_enclosure(&p).reduce_mod1() {
                return r;
            }
            p /= Rat::from_integer(BigInt::from(16));
        }
        panic!("angle {self} does not separate from an integer");
    }
}

impl AngleSpec {
    /// Value precise enough that multiplying by any integer up to `bound`
    /// keeps the width below `2^-bits`.
    pub fn value_for_multiplier(&self, bound: &BigInt, bits: u32) -> RealEnclosure {
        let p = pow2_neg(bits) / rat_int(&(bound.abs() + BigInt::one()));
        self.value(&p)
    }
}

/// Enclosure of `spec` reduced mod 1, width at most `precision`.
pub fn angle_value(spec: &AngleSpec, precision: &Rat) -> RealEnclosure {
    spec.value(precision)
}

impl fmt::Display for AngleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngleSpec::Rational(r) => write!(f, "rat:{r}"),
            AngleSpec::ContinuedFraction(c) => write!(f, "cf:{c}"),
            AngleSpec::Affine { m, base, n } => write!(f, "affine:{m}*{base}+({n})"),
        }
    }
}

impl FromStr for AngleSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |m: &str| Error::Format {
            location: format!("angle '{s}'"),
            message: m.to_string(),
        };
        if let Some(r) = s.strip_prefix("rat:") {
            let v: Rat = r.trim().parse().map_err(|_| bad("expected p/q"))?;
            return Ok(AngleSpec::Rational(v));
        }
        if let Some(c) = s.strip_prefix("cf:") {
            return Ok(AngleSpec::cf(c.parse()?));
        }
        if let Some(a) = s.strip_prefix("affine:") {
            let (m, rest) = a.split_once('*').ok_or_else(|| bad("expected m*<angle>+(n)"))?;
            let m: BigInt = m.trim().parse().map_err(|_| bad("bad multiplier"))?;
            let (base, n) = match rest.rfind('+') {
                Some(i) => (&rest[..i], rest[i + 1..].trim()),
                None => (rest, "0"),
            };
            let n = n.trim_start_matches('(').trim_end_matches(')');
            let n: BigInt = n.trim().parse().map_err(|_| bad("bad offset"))?;
            let base: AngleSpec = base.parse()?;
            return Ok(AngleSpec::affine(m, base, n));
        }
        Err(bad("expected rat:, cf: or affine: prefix"))
    }
}
