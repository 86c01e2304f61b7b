use std::ops::{Add, Mul};

use num_traits::{One, Zero};

use super::interval::{sqrt_enclosure, RealEnclosure};
use super::Rat;

/// Rectangular box in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexEnclosure {
    re: RealEnclosure,
    im: RealEnclosure,
}

impl ComplexEnclosure {
    pub fn new(re: RealEnclosure, im: RealEnclosure) -> Self {
        ComplexEnclosure { re, im }
    }

    pub fn exact(re: Rat, im: Rat) -> Self {
        ComplexEnclosure {
            re: RealEnclosure::exact(re),
            im: RealEnclosure::exact(im),
        }
    }

    pub fn zero() -> Self {
        Self::exact(Rat::zero(), Rat::zero())
    }

    pub fn one() -> Self {
        Self::exact(Rat::one(), Rat::zero())
    }

    pub fn from_real(re: RealEnclosure) -> Self {
        ComplexEnclosure {
            re,
            im: RealEnclosure::zero(),
        }
    }

    pub fn re(&self) -> &RealEnclosure {
        &self.re
    }

    pub fn im(&self) -> &RealEnclosure {
        &self.im
    }

    pub fn abs_sq(&self) -> RealEnclosure {
        &self.re.square() + &self.im.square()
    }

    pub fn abs(&self, bits: u32) -> RealEnclosure {
        sqrt_enclosure(&self.abs_sq(), bits)
    }

    pub fn scale(&self, k: &Rat) -> Self {
        ComplexEnclosure {
            re: self.re.scale(k),
            im: self.im.scale(k),
        }
    }

    pub fn round_outward(&self, bits: u32) -> Self {
        ComplexEnclosure {
            re: self.re.round_outward(bits),
            im: self.im.round_outward(bits),
        }
    }

    /// Largest side of the box.
    pub fn width(&self) -> Rat {
        self.re.width().max(self.im.width())
    }

    pub fn contains(&self, re: &Rat, im: &Rat) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    pub fn overlaps(&self, o: &ComplexEnclosure) -> bool {
        self.re.overlaps(&o.re) && self.im.overlaps(&o.im)
    }
}

impl<'a> Add<&'a ComplexEnclosure> for &'a ComplexEnclosure {
    type Output = ComplexEnclosure;
    fn add(self, o: &ComplexEnclosure) -> ComplexEnclosure {
        ComplexEnclosure {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl<'a> Mul<&'a ComplexEnclosure> for &'a ComplexEnclosure {
    type Output = ComplexEnclosure;
    fn mul(self, o: &ComplexEnclosure) -> ComplexEnclosure {
        let re = &(&self.re * &o.re) - &(&self.im * &o.im);
        let im = &(&self.re * &o.im) + &(&self.im * &o.re);
        ComplexEnclosure { re, im }
    }
}

/// Dense matrix of complex boxes, rows indexed by sources.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ComplexEnclosure>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ComplexEnclosure::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ComplexEnclosure::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &ComplexEnclosure {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: ComplexEnclosure) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, o: &ComplexMatrix, bits: u32) -> ComplexMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = ComplexEnclosure::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if a.re.is_zero() && a.im.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                out.set(i, j, acc.round_outward(bits));
            }
        }
        out
    }

    /// Largest box side over all entries.
    pub fn max_width(&self) -> Rat {
        self.data
            .iter()
            .map(|z| z.width())
            .max()
            .unwrap_or_else(Rat::zero)
    }
}
