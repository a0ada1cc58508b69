use std::fmt;

use super::gaussian::GaussianRational;
use super::scalar::{Scalar, Undecided, ZeroTest};
use super::ComplexBall;

/// x-adic order of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(usize),
    /// Every known coefficient vanishes; the true order is at least this.
    AtLeast(usize),
}

impl Valuation {
    /// Whether the order is certainly `>= k`; `None` if the truncation is too short to tell.
    pub fn at_least(self, k: i64) -> Option<bool> {
        match self {
            Valuation::Finite(v) => Some(v as i64 >= k),
            Valuation::AtLeast(n) if n as i64 >= k => Some(true),
            Valuation::AtLeast(_) => None,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }
}

/// Power series in `x` known modulo `x^prec`.
#[derive(Clone, PartialEq)]
pub struct Series<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Series<S> {
    pub fn new(mut coeffs: Vec<S>, prec: usize) -> Self {
        coeffs.resize(prec, S::zero());
        Series { coeffs }
    }

    pub fn zero(prec: usize) -> Self {
        Series { coeffs: vec![S::zero(); prec] }
    }

    pub fn constant(c: S, prec: usize) -> Self {
        let mut s = Self::zero(prec);
        if prec > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    pub fn one(prec: usize) -> Self {
        Self::constant(S::one(), prec)
    }

    pub fn monomial(c: S, k: usize, prec: usize) -> Self {
        let mut s = Self::zero(prec);
        if k < prec {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn from_gaussians(cs: &[GaussianRational], prec: usize) -> Self {
        Series::new(cs.iter().take(prec).map(S::from_gaussian).collect(), prec)
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &S {
        &self.coeffs[k]
    }

    pub fn set_coeff(&mut self, k: usize, c: S) {
        if k < self.coeffs.len() {
            self.coeffs[k] = c;
        }
    }

    pub fn truncate(&self, prec: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.truncate(prec);
        Series { coeffs: c }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.prec().min(o.prec());
        Series { coeffs: (0..n).map(|k| self.coeffs[k].add(&o.coeffs[k])).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.prec().min(o.prec());
        Series { coeffs: (0..n).map(|k| self.coeffs[k].sub(&o.coeffs[k])).collect() }
    }

    pub fn neg(&self) -> Self {
        Series { coeffs: self.coeffs.iter().map(S::neg).collect() }
    }

    pub fn scale(&self, c: &S) -> Self {
        Series { coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.prec().min(o.prec());
        let mut out = vec![S::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_negligible() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                if b.is_negligible() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Series { coeffs: out }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.prec());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplication by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut c = vec![S::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Series { coeffs: c }
    }

    /// Division by `x^k`, dropping the first `k` coefficients (assumed zero).
    pub fn shift_down(&self, k: usize) -> Self {
        Series { coeffs: self.coeffs.iter().skip(k).cloned().collect() }
    }

    pub fn inv(&self) -> Result<Self, Undecided> {
        let n = self.prec();
        if n == 0 {
            return Ok(self.clone());
        }
        let c0 = self.coeffs[0].inv()?;
        let mut out: Vec<S> = Vec::with_capacity(n);
        out.push(c0.clone());
        for k in 1..n {
            let mut acc = S::zero();
            for j in 1..=k {
                if self.coeffs[j].is_negligible() {
                    continue;
                }
                acc = acc.add(&self.coeffs[j].mul(&out[k - j]));
            }
            out.push(acc.mul(&c0).neg());
        }
        Ok(Series { coeffs: out })
    }

    pub fn valuation(&self) -> Result<Valuation, Undecided> {
        for (k, c) in self.coeffs.iter().enumerate() {
            match c.zero_test() {
                ZeroTest::Zero => continue,
                ZeroTest::NonZero => return Ok(Valuation::Finite(k)),
                ZeroTest::Unknown => return Err(Undecided),
            }
        }
        Ok(Valuation::AtLeast(self.prec()))
    }

    pub fn is_zero(&self) -> Result<bool, Undecided> {
        Ok(matches!(self.valuation()?, Valuation::AtLeast(_)))
    }

    pub fn conj(&self) -> Self {
        Series { coeffs: self.coeffs.iter().map(S::conj).collect() }
    }

    pub fn to_c64(&self) -> Vec<(f64, f64)> {
        self.coeffs.iter().map(S::to_c64).collect()
    }
}

impl Series<GaussianRational> {
    pub fn to_balls(&self) -> Series<ComplexBall> {
        Series { coeffs: self.coeffs.iter().map(ComplexBall::from_gaussian).collect() }
    }
}

impl<S: Scalar> fmt::Debug for Series<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_negligible() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:?})x^{}", c, k)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(x^{})", self.prec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    type G = GaussianRational;

    fn s(cs: &[i64], prec: usize) -> Series<G> {
        Series::new(cs.iter().map(|&c| G::from_int(c)).collect(), prec)
    }

    #[test]
    fn inverse_of_geometric_series() {
        let one_minus_x = s(&[1, -1], 8);
        let inv = one_minus_x.inv().unwrap();
        assert_eq!(inv, s(&[1, 1, 1, 1, 1, 1, 1, 1], 8));
        assert_eq!(inv.mul(&one_minus_x), Series::one(8));
    }

    #[test]
    fn valuation_and_truncation() {
        let a = s(&[0, 0, 3], 5);
        assert_eq!(a.valuation().unwrap(), Valuation::Finite(2));
        assert_eq!(Series::<G>::zero(4).valuation().unwrap(), Valuation::AtLeast(4));
        assert_eq!(Valuation::AtLeast(4).at_least(3), Some(true));
        assert_eq!(Valuation::AtLeast(4).at_least(5), None);
        let b = a.shift_down(2);
        assert_eq!(b.prec(), 3);
        assert_eq!(b.coeff(0), &G::from_int(3));
        let c = Series::<G>::new(vec![G::real(rat(1, 2))], 3).mul(&s(&[2, 4], 2));
        assert_eq!(c, s(&[1, 2], 2));
    }
}
