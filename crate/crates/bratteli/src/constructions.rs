//! Builders for the example families: Sturmian, odometer, Toeplitz-type and
//! stationary diagrams.
//!
//! Sturmian local orders. With `H` the heavy source (vertex 0 at level 2,
//! vertex 1 above) and `O` the other one, level `n` uses coefficient `a = a_{n-1}`
//! and one of two ascending patterns:
//!
//! ```text
//! type A (odd n):   target 0 = H^a O        target 1 = H^(a-1) O
//! type B (even n):  target 0 = H^(a-1) O H  target 1 = H^(a-1) O
//! ```
//!
//! Both give `M_2 = [[a_1, a_1-1], [1, 1]]` and `M_n = [[1, 1], [a, a-1]]`.
//! Every suffix vector lies in `{(0,0), (0,1)} ∪ {(1,i)}`. Alternating the
//! patterns makes any two consecutive levels collapse both the maximal and the
//! minimal edge maps to a single vertex, so extremal paths are unique.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::arith::CfStream;
use crate::diagram::{level_to_map, BratteliDiagram, Generator, IntMatrix, OrderedLevel};
use crate::error::{Error, Result};

/// Level `n >= 2` of the Sturmian diagram with coefficient `a`.
pub fn sturmian_level(n: usize, a: u64) -> Result<OrderedLevel> {
    if a == 0 {
        return Err(Error::Invalid("continued fraction coefficient 0".into()));
    }
    let (h, o) = if n == 2 { (0, 1) } else { (1, 0) };
    let a = a as usize;
    let mut t0 = Vec::with_capacity(a + 1);
    let mut t1 = vec![h; a - 1];
    t1.push(o);
    if n % 2 == 1 {
        t0.extend(std::iter::repeat(h).take(a));
        t0.push(o);
    } else {
        t0.extend(std::iter::repeat(h).take(a - 1));
        t0.push(o);
        t0.push(h);
    }
    OrderedLevel::new(2, vec![t0, t1])
}

pub fn odometer_level(q: u64) -> Result<OrderedLevel> {
    if q < 2 {
        return Err(Error::Invalid(format!("odometer needs q_n >= 2, got {q}")));
    }
    OrderedLevel::new(1, vec![vec![0; q as usize]])
}

/// Telescoping cuts making every product matrix positive, with gaps of at
/// most 2 when the family allows.
fn simplifying_cuts(d: &BratteliDiagram) -> Vec<usize> {
    let mut cuts = vec![0, 1];
    let mut c = 1;
    while c < d.depth() {
        let mut next = None;
        for g in 1..=d.depth() - c {
            if d.product_matrix(c, c + g).unwrap().is_positive() {
                next = Some(c + g);
                break;
            }
        }
        match next {
            Some(n) => {
                cuts.push(n);
                c = n;
            }
            None => break,
        }
    }
    cuts
}

/// Sturmian diagram of `[0; a_1, a_2, ...]` to the given depth.
pub fn sturmian(cf: &CfStream, depth: usize, simplify: bool) -> Result<BratteliDiagram> {
    let generator = if cf.is_finite() {
        Generator::Sturmian {
            prefix: Vec::new(),
            cf: cf.prefix().to_vec(),
            periodic: false,
        }
    } else {
        Generator::Sturmian {
            prefix: cf.prefix().to_vec(),
            cf: cf.period().to_vec(),
            periodic: true,
        }
    };
    let d = BratteliDiagram::generated(2, generator, depth.max(1))?;
    if simplify {
        d.telescope(&simplifying_cuts(&d))
    } else {
        Ok(d)
    }
}

/// Odometer with `q_n` edges at level `n + 1`; `q` repeats when `periodic`.
pub fn odometer(q: &[u64], periodic: bool, depth: usize) -> Result<BratteliDiagram> {
    if q.is_empty() {
        return Err(Error::Invalid("empty odometer sequence".into()));
    }
    if let Some(&bad) = q.iter().find(|&&x| x < 2) {
        return Err(Error::Invalid(format!("odometer needs q_n >= 2, got {bad}")));
    }
    let g = Generator::Odometer {
        prefix: Vec::new(),
        q: q.to_vec(),
        periodic,
    };
    BratteliDiagram::generated(1, g, depth.max(1))
}

pub fn odo2(depth: usize) -> BratteliDiagram {
    odometer(&[2], true, depth).expect("valid odometer")
}

/// Characteristic sequence of a Toeplitz-type diagram; `q[0]` is the hat entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToeplitzInfo {
    pub q: Vec<u64>,
}

impl ToeplitzInfo {
    /// `p_n = q_1 ... q_n`.
    pub fn p(&self, n: usize) -> BigInt {
        self.q[..n].iter().map(|&x| BigInt::from(x)).product()
    }

    /// `q_{m,n} = q_{m+1} ... q_n`.
    pub fn q_mn(&self, m: usize, n: usize) -> BigInt {
        self.q[m..n].iter().map(|&x| BigInt::from(x)).product()
    }
}

pub fn toeplitz_info(d: &BratteliDiagram) -> Result<ToeplitzInfo> {
    let h0 = &d.hat()[0];
    if d.hat().iter().any(|h| h != h0) {
        return Err(Error::Invalid("hat entries differ".into()));
    }
    let mut q = vec![u64::try_from(h0).map_err(|_| Error::Invalid("hat too large".into()))?];
    for n in 2..=d.depth() {
        let level = d.level(n)?;
        let first = level.order(0).len();
        if let Some(v) = (0..level.target_count()).find(|&v| level.order(v).len() != first) {
            return Err(Error::Invalid(format!(
                "unequal path numbers at level {n}: vertex {} has {} incoming edges, vertex 1 has {first}",
                v + 1,
                level.order(v).len()
            )));
        }
        q.push(first as u64);
    }
    Ok(ToeplitzInfo { q })
}

/// Toeplitz-type diagram; levels repeat periodically beyond those given.
pub fn toeplitz_type(
    first_level_vertices: usize,
    levels: Vec<OrderedLevel>,
    depth: usize,
) -> Result<(BratteliDiagram, ToeplitzInfo)> {
    if levels.is_empty() {
        return Err(Error::Invalid("no levels given".into()));
    }
    let generator = Generator::Periodic {
        levels: levels.iter().map(level_to_map).collect(),
    };
    let d = BratteliDiagram::with_unit_hat(first_level_vertices, Vec::new(), Some(generator))?
        .deepen(depth.max(1))?;
    let info = toeplitz_info(&d)?;
    Ok((d, info))
}

/// All levels share one positive matrix and one order.
pub fn stationary(m: &IntMatrix, order: &OrderedLevel, depth: usize) -> Result<BratteliDiagram> {
    if m.rows() != m.cols() {
        return Err(Error::Invalid("stationary matrix must be square".into()));
    }
    if order.source_count() != m.rows() || order.target_count() != m.cols() {
        return Err(Error::Invalid("order template does not match the matrix".into()));
    }
    if !m.is_positive() {
        return Err(Error::Invalid("stationary matrix must be positive".into()));
    }
    if &order.incidence() != m {
        return Err(Error::Invalid("order template multiplicities differ from the matrix".into()));
    }
    let generator = Generator::Periodic {
        levels: vec![level_to_map(order)],
    };
    BratteliDiagram::with_unit_hat(m.rows(), Vec::new(), Some(generator))?.deepen(depth.max(1))
}

/// Stationary diagram whose order lists sources in ascending index order.
pub fn stationary_sorted(rows: &[Vec<i64>], depth: usize) -> Result<BratteliDiagram> {
    let m = IntMatrix::from_rows(rows);
    let order: Vec<Vec<usize>> = (0..m.cols())
        .map(|v| {
            let mut l = Vec::new();
            for u in 0..m.rows() {
                let k = usize::try_from(m.get(u, v)).unwrap_or(0);
                l.extend(std::iter::repeat(u).take(k));
            }
            l
        })
        .collect();
    stationary(&m, &OrderedLevel::new(m.rows(), order)?, depth)
}

/// Unit hat of size `d`.
pub fn unit_hat(d: usize) -> Vec<BigInt> {
    vec![BigInt::one(); d]
}
