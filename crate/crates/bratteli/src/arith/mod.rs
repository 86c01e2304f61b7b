//! Exact rationals, interval reals, complex boxes and continued fractions.

mod cf;
mod complex;
mod interval;
mod trig;

pub use cf::{angle_value, cf_convergents, AngleSpec, CfStream};
pub use complex::{ComplexEnclosure, ComplexMatrix};
pub use interval::{
    decimal_down, decimal_up, nearest_int_dist, pow2_neg, rat, rat_int, ser_int, ser_ints, ser_rat,
    sqrt_enclosure, DyadicAngle, FixedAngle, RealEnclosure,
};
pub use trig::{acos_over_2pi, cis_2pi, cos_2pi, pi_enclosure};

pub type Rat = num_rational::BigRational;
pub type Int = num_bigint::BigInt;

/// Default working precision in bits for transcendental enclosures.
pub const DEFAULT_BITS: u32 = 96;

/// Parses a decimal or `p/q` literal.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Ok(r) = s.parse::<Rat>() {
        return Some(r);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let mut exp_part = 0i32;
    let (frac, e) = match frac.split_once(['e', 'E']) {
        Some((f, e)) => (f, Some(e)),
        None => (frac, None),
    };
    let int = if let Some((i, e2)) = int.split_once(['e', 'E']) {
        exp_part = e2.parse().ok()?;
        i
    } else {
        int
    };
    if let Some(e) = e {
        exp_part = e.parse().ok()?;
    }
    let digits = format!("{int}{frac}");
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let n: Int = digits.parse().ok()?;
    let scale = frac.len() as i32 - exp_part;
    let ten = Int::from(10);
    let v = if scale >= 0 {
        Rat::new(n, ten.pow(scale as u32))
    } else {
        Rat::from_integer(n * ten.pow((-scale) as u32))
    };
    Some(if neg { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{One, ToPrimitive, Zero};
    use proptest::prelude::*;

    fn exact(n: i64, d: i64) -> RealEnclosure {
        RealEnclosure::exact(rat(n, d))
    }

    #[test]
    fn nearest_int_examples() {
        assert_eq!(nearest_int_dist(&exact(9, 4)), exact(1, 4));
        assert_eq!(nearest_int_dist(&exact(-1, 2)), exact(1, 2));
        assert_eq!(nearest_int_dist(&exact(3, 1)), exact(0, 1));
        let x = RealEnclosure::new(rat(-1, 10), rat(1, 10));
        assert_eq!(nearest_int_dist(&x), RealEnclosure::new(Rat::zero(), rat(1, 10)));
        let y = RealEnclosure::new(rat(4, 10), rat(6, 10));
        assert_eq!(nearest_int_dist(&y), RealEnclosure::new(rat(4, 10), rat(1, 2)));
    }

    #[test]
    fn golden_nearest_int() {
        let a = AngleSpec::golden().value(&rat(1, 1_000_000_000_000));
        let d = nearest_int_dist(&a);
        // oracle: 1 - alpha = (3 - sqrt5)/2, so (3 - 2t)^2 = 5 at the true value
        let lo_ok = {
            let t = d.lo();
            let v = Rat::from_integer(BigInt::from(3)) - t * Rat::from_integer(BigInt::from(2));
            &v * &v >= Rat::from_integer(BigInt::from(5))
        };
        let hi_ok = {
            let t = d.hi();
            let v = Rat::from_integer(BigInt::from(3)) - t * Rat::from_integer(BigInt::from(2));
            &v * &v <= Rat::from_integer(BigInt::from(5))
        };
        assert!(lo_ok && hi_ok);
        assert!((d.to_f64() - 0.381966011250105).abs() < 1e-12);
    }

    #[test]
    fn convergent_examples() {
        let q: Vec<i64> = cf_convergents(&[1; 5], 5)
            .unwrap()
            .iter()
            .map(|c| c.1.to_i64().unwrap())
            .collect();
        assert_eq!(q, vec![1, 1, 2, 3, 5, 8]);
        let q: Vec<i64> = cf_convergents(&[2; 3], 3)
            .unwrap()
            .iter()
            .map(|c| c.1.to_i64().unwrap())
            .collect();
        assert_eq!(q, vec![1, 2, 5, 12]);
        assert!(cf_convergents(&[1, 0, 1], 3).is_err());
    }

    #[test]
    fn convergent_error_bound_golden() {
        let c = cf_convergents(&[1; 10], 10).unwrap();
        let (p, q) = &c[10];
        let a = AngleSpec::golden().value(&Rat::new(BigInt::one(), BigInt::from(10).pow(20)));
        let pq = Rat::new(p.clone(), q.clone());
        let bound = Rat::new(BigInt::one(), q * q);
        let dev = (a.lo() - &pq).max(a.hi() - &pq).max(&pq - a.lo());
        assert!(dev < bound);
    }

    #[test]
    fn angle_value_examples() {
        assert_eq!(AngleSpec::Rational(rat(3, 8)).value(&rat(1, 10)), exact(3, 8));
        let g = AngleSpec::golden().value(&rat(1, 1_000_000_000));
        assert!(g.width() <= rat(1, 1_000_000_000));
        assert!((g.to_f64() - 0.618033988749895).abs() < 1e-9);
        let a: AngleSpec = "affine:2*cf:1,~1+(-1)".parse().unwrap();
        let v = a.value(&rat(1, 1_000_000_000));
        assert!((v.to_f64() - 0.236067977499790).abs() < 1e-9);
        assert!(v.lo() >= &Rat::zero() && v.hi() < &Rat::one());
    }

    #[test]
    fn angle_parsing_round_trip() {
        for s in ["rat:3/8", "cf:~1", "cf:1,2,~3,4", "affine:2*cf:~1+(-1)"] {
            let a: AngleSpec = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        let a: AngleSpec = "cf:1,1,1,...".parse().unwrap();
        assert_eq!(a, AngleSpec::golden().clone_with_prefix(vec![1, 1]));
        let r: AngleSpec = "cf:2,3".parse().unwrap();
        assert_eq!(r, AngleSpec::Rational(rat(3, 7)));
        let n: AngleSpec = "affine:3*rat:1/4+(1)".parse().unwrap();
        assert_eq!(n, AngleSpec::Rational(rat(7, 4)));
        assert!("cf:1,0".parse::<AngleSpec>().is_err());
        assert!("deg:30".parse::<AngleSpec>().is_err());
    }

    impl AngleSpec {
        fn clone_with_prefix(&self, prefix: Vec<u64>) -> AngleSpec {
            match self {
                AngleSpec::ContinuedFraction(c) => AngleSpec::ContinuedFraction(
                    CfStream::new(prefix, c.period().to_vec()).unwrap(),
                ),
                _ => self.clone(),
            }
        }
    }

    #[test]
    fn pi_digits() {
        let digits: Rat = parse_rat("3.14159265358979323846264338327950288419716939937510").unwrap();
        let p = pi_enclosure(160);
        assert!(p.width() < rat(1, 1) / Rat::from_integer(BigInt::from(10).pow(45)));
        let slack = Rat::new(BigInt::one(), BigInt::from(10).pow(49));
        assert!(p.lo() <= &(&digits + &slack) && p.hi() >= &(&digits - &slack));
    }

    #[test]
    fn cis_exact_quarters() {
        assert_eq!(cis_2pi(&exact(5, 2), 64), ComplexEnclosure::exact(-Rat::one(), Rat::zero()));
        assert_eq!(cis_2pi(&exact(3, 4), 64), ComplexEnclosure::exact(Rat::zero(), -Rat::one()));
        assert_eq!(cis_2pi(&exact(-7, 1), 64), ComplexEnclosure::one());
    }

    #[test]
    fn acos_inverts_cos() {
        for c in [rat(1, 3), rat(-2, 3), rat(9, 10), rat(1, 1000)] {
            let g = acos_over_2pi(&c, 80);
            assert!(g.width() < rat(1, 1_000_000_000));
            let expect = c.to_f64().unwrap().acos() / (2.0 * std::f64::consts::PI);
            assert!((g.to_f64() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn sqrt_exact_on_squares() {
        let s = sqrt_enclosure(&exact(9, 4), 64);
        assert_eq!(s, exact(3, 2));
        let t = sqrt_enclosure(&exact(2, 1), 64);
        assert!(t.lo() * t.lo() <= rat(2, 1) && t.hi() * t.hi() >= rat(2, 1));
    }

    #[test]
    fn parse_rat_forms() {
        assert_eq!(parse_rat("1e-9").unwrap(), Rat::new(BigInt::one(), BigInt::from(10).pow(9)));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-3/6").unwrap(), rat(-1, 2));
        assert!(parse_rat("x").is_none());
    }

    proptest! {
        #[test]
        fn nearest_int_integer_shift(n in -1000i64..1000, d in 1i64..200, k in -50i64..50) {
            let x = exact(n, d);
            let y = x.add_rat(&Rat::from_integer(BigInt::from(k)));
            prop_assert_eq!(nearest_int_dist(&x), nearest_int_dist(&y));
        }

        #[test]
        fn nearest_int_enclosure_sound(n in -1000i64..1000, w in 0i64..400, d in 1i64..200) {
            let x = RealEnclosure::new(rat(n, d), rat(n + w, d));
            let e = nearest_int_dist(&x);
            prop_assert!(e.hi() <= &rat(1, 2));
            for j in 0..=w {
                let t = rat(n + j, d);
                let f = &t - t.floor();
                let v = f.clone().min(Rat::one() - f);
                prop_assert!(e.contains(&v));
            }
        }

        #[test]
        fn convergents_bracket(a in proptest::collection::vec(1u64..6, 2..12)) {
            let n = a.len();
            let s = CfStream::periodic(a.clone()).unwrap();
            let v = s.enclosure(&Rat::new(BigInt::one(), BigInt::from(10).pow(30)));
            let c = cf_convergents(&a, n).unwrap();
            for k in 1..=n {
                let r = Rat::new(c[k].0.clone(), c[k].1.clone());
                if k % 2 == 0 {
                    prop_assert!(r <= *v.lo());
                } else {
                    prop_assert!(r >= *v.hi());
                }
            }
        }

        #[test]
        fn refinement_monotone(a in proptest::collection::vec(1u64..5, 1..4), k in 3u32..20) {
            let s = CfStream::periodic(a).unwrap();
            let coarse = s.enclosure(&rat(1, 1 << k));
            let fine = s.enclosure(&rat(1, 1 << (k + 5)));
            prop_assert!(fine.within(&coarse));
        }

        #[test]
        fn cis_matches_float(n in 0i64..10000) {
            let x = exact(n, 9973);
            let z = cis_2pi(&x, 64);
            let t = 2.0 * std::f64::consts::PI * (n as f64) / 9973.0;
            prop_assert!((z.re().to_f64() - t.cos()).abs() < 1e-12);
            prop_assert!((z.im().to_f64() - t.sin()).abs() < 1e-12);
            prop_assert!(z.width() < rat(1, 1 << 40));
            // unit modulus lies inside the box
            let m = z.abs_sq();
            prop_assert!(m.contains(&Rat::one()));
        }
    }
}
