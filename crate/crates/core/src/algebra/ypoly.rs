use super::scalar::{Scalar, Undecided};
use super::series::{Series, Valuation};
use super::AlgebraError;

/// Polynomial in `y` whose coefficients are truncated power series in `x`.
#[derive(Clone, PartialEq)]
pub struct YPoly<S> {
    coeffs: Vec<Series<S>>,
    prec: usize,
}

impl<S: Scalar> std::fmt::Debug for YPoly<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl<S: Scalar> YPoly<S> {
    pub fn new(coeffs: Vec<Series<S>>, prec: usize) -> Self {
        let coeffs = coeffs.into_iter().map(|c| c.truncate(prec)).collect::<Vec<_>>();
        let prec = coeffs.iter().map(Series::prec).min().unwrap_or(prec).min(prec);
        YPoly { coeffs: coeffs.into_iter().map(|c| c.truncate(prec)).collect(), prec }
    }

    pub fn zero(prec: usize) -> Self {
        YPoly { coeffs: Vec::new(), prec }
    }

    pub fn constant(c: Series<S>) -> Self {
        let p = c.prec();
        YPoly { coeffs: vec![c], prec: p }
    }

    /// `y - a(x)`
    pub fn linear(a: &Series<S>) -> Self {
        let p = a.prec();
        YPoly { coeffs: vec![a.neg(), Series::one(p)], prec: p }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn coeffs(&self) -> &[Series<S>] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Series<S> {
        self.coeffs.get(j).cloned().unwrap_or_else(|| Series::zero(self.prec))
    }

    /// Formal degree (number of stored coefficients minus one).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, prec: usize) -> Self {
        YPoly::new(self.coeffs.clone(), prec.min(self.prec))
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec.min(o.prec);
        let n = self.coeffs.len().max(o.coeffs.len());
        YPoly::new((0..n).map(|j| self.coeff(j).truncate(p).add(&o.coeff(j).truncate(p))).collect(), p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        YPoly { coeffs: self.coeffs.iter().map(Series::neg).collect(), prec: self.prec }
    }

    pub fn scale(&self, s: &Series<S>) -> Self {
        let p = self.prec.min(s.prec());
        YPoly::new(self.coeffs.iter().map(|c| c.truncate(p).mul(s)).collect(), p)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec.min(o.prec);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return YPoly::zero(p);
        }
        let mut out = vec![Series::zero(p); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        YPoly::new(out, p)
    }

    /// Multiplication of every coefficient by `x^k` (precision grows by `k`).
    pub fn shift_x(&self, k: usize) -> Self {
        YPoly { coeffs: self.coeffs.iter().map(|c| c.shift_up(k)).collect(), prec: self.prec + k }
    }

    /// Division of every coefficient by `x^k` (the low coefficients are discarded).
    pub fn unshift_x(&self, k: usize) -> Self {
        YPoly {
            coeffs: self.coeffs.iter().map(|c| c.shift_down(k)).collect(),
            prec: self.prec.saturating_sub(k),
        }
    }

    pub fn derivative_y(&self) -> Self {
        let cs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.scale(&S::from_int(j as i64)))
            .collect();
        YPoly { coeffs: cs, prec: self.prec }
    }

    /// `F(x, a(x))`.
    pub fn eval_series(&self, a: &Series<S>) -> Series<S> {
        let p = self.prec.min(a.prec());
        let a = a.truncate(p);
        let mut acc = Series::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&a).add(&c.truncate(p));
        }
        acc
    }

    /// `F(x, g(x, y))`.
    pub fn compose_y(&self, g: &YPoly<S>) -> YPoly<S> {
        let p = self.prec.min(g.prec);
        let mut acc = YPoly::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&YPoly::constant(c.truncate(p)));
        }
        acc
    }

    /// Synthetic division by `y - a(x)`: `F = (y - a) * quotient + remainder`.
    pub fn div_linear(&self, a: &Series<S>) -> (YPoly<S>, Series<S>) {
        let p = self.prec.min(a.prec());
        let n = self.coeffs.len();
        if n == 0 {
            return (YPoly::zero(p), Series::zero(p));
        }
        let a = a.truncate(p);
        let mut q = vec![Series::zero(p); n.saturating_sub(1)];
        let mut carry = self.coeffs[n - 1].truncate(p);
        for j in (0..n - 1).rev() {
            q[j] = carry.clone();
            carry = self.coeffs[j].truncate(p).add(&carry.mul(&a));
        }
        (YPoly::new(q, p), carry)
    }

    /// Highest `y` index whose coefficient is not known to vanish.
    pub fn degree(&self) -> Result<Option<usize>, Undecided> {
        for j in (0..self.coeffs.len()).rev() {
            if !self.coeffs[j].is_zero()? {
                return Ok(Some(j));
            }
        }
        Ok(None)
    }

    /// Smallest `x`-order among the coefficients.
    pub fn x_valuation(&self) -> Result<Valuation, Undecided> {
        let mut best = Valuation::AtLeast(self.prec);
        for c in &self.coeffs {
            match c.valuation()? {
                Valuation::Finite(v) => {
                    best = match best {
                        Valuation::Finite(b) => Valuation::Finite(b.min(v)),
                        Valuation::AtLeast(_) => Valuation::Finite(v),
                    }
                }
                Valuation::AtLeast(_) => {}
            }
        }
        Ok(best)
    }

    pub fn is_zero(&self) -> Result<bool, Undecided> {
        Ok(matches!(self.x_valuation()?, Valuation::AtLeast(_)))
    }

    /// Division with remainder by `d`, whose top `y` coefficient must be a
    /// unit series; the remainder has `y`-degree below that of `d`.
    pub fn weierstrass_reduce(&self, d: &YPoly<S>) -> Result<(YPoly<S>, YPoly<S>), AlgebraError> {
        let m = d.coeffs.len().checked_sub(1).ok_or(AlgebraError::DivisionByZero)?;
        let p = self.prec.min(d.prec);
        let lead_inv = d.coeffs[m].truncate(p).inv().map_err(|_| AlgebraError::NotMonic)?;
        let mut r: Vec<Series<S>> = self.coeffs.iter().map(|c| c.truncate(p)).collect();
        let mut q = vec![Series::zero(p); r.len().saturating_sub(m)];
        for k in (m..r.len()).rev() {
            let coef = r[k].mul(&lead_inv);
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[k - m + j] = r[k - m + j].sub(&coef.mul(&dj.truncate(p)));
            }
            q[k - m] = coef;
        }
        r.truncate(m);
        Ok((YPoly::new(q, p), YPoly::new(r, p)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, BiPoly, GaussianRational};

    type G = GaussianRational;

    #[test]
    fn synthetic_division_reconstructs() {
        let f = BiPoly::y().pow(3).add(&BiPoly::x().mul(&BiPoly::y())).add(&BiPoly::x().pow(2));
        let fy: YPoly<G> = f.to_ypoly(10);
        let a = Series::new(vec![G::zero(), G::real(rat(2, 3)), G::from_int(-1)], 10);
        let (q, r) = fy.div_linear(&a);
        assert_eq!(r, fy.eval_series(&a));
        let back = YPoly::linear(&a).mul(&q).add(&YPoly::constant(r));
        assert_eq!(back.sub(&fy).is_zero(), Ok(true));
    }

    #[test]
    fn reduction_matches_exact_division() {
        let x = BiPoly::x();
        let y = BiPoly::y();
        let i = BiPoly::constant(G::i());
        let p = y.add(&x).add(&i.mul(&x.pow(2))).mul(&y.add(&x.scale(&G::from_int(2))).add(&i.mul(&x.pow(2))));
        let q = y.pow(3).add(&x);
        let (_, r_exact) = q.divrem_y(&p).unwrap();
        let (_, r) = q.to_ypoly::<G>(12).weierstrass_reduce(&p.to_ypoly(12)).unwrap();
        assert_eq!(r.sub(&r_exact.to_ypoly(12)).is_zero(), Ok(true));
    }
}
