use num_bigint::BigInt;

use crate::arith::{cis_2pi, AngleSpec, ComplexMatrix, RealEnclosure};
use crate::diagram::BratteliDiagram;
use crate::error::{Error, Result};

/// Twisted one-step matrix `G_k(w, v) = sum lambda^<s, h_k>` over the edges
/// of level `k + 1` from `w` into `v`.
pub fn single_level_transfer(
    d: &BratteliDiagram,
    k: usize,
    alpha: &RealEnclosure,
    bits: u32,
) -> Result<ComplexMatrix> {
    let level = d.level(k + 1)?;
    let h = d.heights_slice(k)?;
    let mut g = ComplexMatrix::zeros(level.source_count(), level.target_count());
    for v in 0..level.target_count() {
        for (r, s) in level.suffixes(v).into_iter().enumerate() {
            let w = level.order(v)[r];
            let dot: BigInt = s.iter().zip(h).map(|(a, b)| BigInt::from(*a) * b).sum();
            let z = cis_2pi(&alpha.mul_int(&dot), bits);
            let acc = g.get(w, v) + &z;
            g.set(w, v, acc.round_outward(bits + 8));
        }
    }
    Ok(g)
}

/// Precomputed enclosure of `alpha` and the one-step matrices of a diagram.
#[derive(Clone, Debug)]
pub struct TransferTable {
    alpha: RealEnclosure,
    bits: u32,
    steps: Vec<ComplexMatrix>,
}

impl TransferTable {
    /// One-step matrices `G_1 ... G_{depth-1}`.
    pub fn new(d: &BratteliDiagram, alpha: &AngleSpec, bits: u32) -> Result<Self> {
        let bound = d.heights_slice(d.depth())?.iter().max().unwrap().clone();
        let a = alpha.value_for_multiplier(&bound, bits + 8);
        let steps = (1..d.depth())
            .map(|k| single_level_transfer(d, k, &a, bits))
            .collect::<Result<Vec<_>>>()?;
        Ok(TransferTable {
            alpha: a,
            bits,
            steps,
        })
    }

    pub fn alpha(&self) -> &RealEnclosure {
        &self.alpha
    }

    pub fn depth(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn step(&self, k: usize) -> &ComplexMatrix {
        &self.steps[k - 1]
    }

    /// `F_{m,n}` for all `n` in `m+1..=top`, in order.
    pub fn row(&self, m: usize, top: usize) -> Result<Vec<ComplexMatrix>> {
        if m < 1 || m >= top || top > self.depth() {
            return Err(Error::Invalid(format!(
                "transfer range {m}..{top} invalid at depth {}",
                self.depth()
            )));
        }
        let mut out: Vec<ComplexMatrix> = Vec::with_capacity(top - m);
        let mut f = self.steps[m - 1].clone();
        out.push(f.clone());
        for k in m + 1..top {
            f = f.mul(&self.steps[k - 1], self.bits);
            out.push(f.clone());
        }
        Ok(out)
    }

    pub fn get(&self, m: usize, n: usize) -> Result<ComplexMatrix> {
        Ok(self.row(m, n)?.pop().unwrap())
    }
}

/// `F_{m,n}(u, v) = sum over S_{m,n}(u, v) of lambda^<s, h_m>`, `lambda = exp(2 pi i alpha)`.
pub fn transfer_matrix(
    d: &BratteliDiagram,
    m: usize,
    n: usize,
    alpha: &AngleSpec,
    bits: u32,
) -> Result<ComplexMatrix> {
    if m < 1 || m >= n || n > d.depth() {
        return Err(Error::Invalid(format!(
            "transfer range {m}..{n} invalid at depth {}",
            d.depth()
        )));
    }
    TransferTable::new(&d.truncate(n), alpha, bits)?.get(m, n)
}

/// `F_{m,n}` for `n = m+1 ..= top`.
pub fn transfer_products(
    d: &BratteliDiagram,
    m: usize,
    top: usize,
    alpha: &AngleSpec,
    bits: u32,
) -> Result<Vec<ComplexMatrix>> {
    TransferTable::new(&d.truncate(top), alpha, bits)?.row(m, top)
}

