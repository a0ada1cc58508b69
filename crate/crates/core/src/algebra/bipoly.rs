use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::gaussian::GaussianRational;
use super::rational::{format_rational, Rational};
use super::scalar::Scalar;
use super::series::Series;
use super::upoly::UPoly;
use super::ypoly::YPoly;
use super::AlgebraError;

type G = GaussianRational;

/// Sparse polynomial in `x, y` with coefficients in `Q[i]`, keyed by
/// `(deg_x, deg_y)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), G>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), G)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in it {
            p.add_term(k.0, k.1, &c);
        }
        p
    }

    pub fn constant(c: G) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(G::one())
    }

    pub fn monomial(c: G, dx: u32, dy: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(dx, dy, &c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(G::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(G::one(), 0, 1)
    }

    /// Polynomial in `x` alone from coefficients `c_0, c_1, ...`.
    pub fn from_x_coeffs(cs: &[G]) -> Self {
        Self::from_terms(cs.iter().enumerate().map(|(k, c)| ((k as u32, 0), c.clone())))
    }

    pub fn add_term(&mut self, dx: u32, dy: u32, c: &G) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((dx, dy)).or_default();
        *e = &*e + c;
        if e.is_zero() {
            self.terms.remove(&(dx, dy));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &G)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, dx: u32, dy: u32) -> G {
        self.terms.get(&(dx, dy)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn deg_y(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    /// Smallest power of `x` appearing.
    pub fn x_order(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).min()
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(G::is_real)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (k, c) in &o.terms {
            p.add_term(k.0, k.1, c);
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (k, c) in &o.terms {
            p.add_term(k.0, k.1, &-c);
        }
        p
    }

    pub fn neg(&self) -> Self {
        BiPoly { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn scale(&self, a: &G) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (*k, c * a)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero();
        for (ka, a) in &self.terms {
            for (kb, b) in &o.terms {
                p.add_term(ka.0 + kb.0, ka.1 + kb.1, &(a * b));
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplication by `x^a y^b`.
    pub fn shift(&self, a: u32, b: u32) -> Self {
        BiPoly { terms: self.terms.iter().map(|(k, c)| ((k.0 + a, k.1 + b), c.clone())).collect() }
    }

    /// Division by `x^a`; terms of lower `x` degree must be absent.
    pub fn div_x_pow(&self, a: u32) -> Self {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| {
                    assert!(k.0 >= a, "div_x_pow: term x^{} below x^{}", k.0, a);
                    ((k.0 - a, k.1), c.clone())
                })
                .collect(),
        }
    }

    /// `P̄(x, y)`: coefficientwise complex conjugate.
    pub fn reflect(&self) -> Self {
        BiPoly { terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect() }
    }

    /// Real polynomials `A = (P + P̄)/2`, `B = (P - P̄)/(2i)` with `P = A + iB`.
    pub fn real_imag_parts(&self) -> (BiPoly, BiPoly) {
        let a = Self::from_terms(self.terms.iter().map(|(k, c)| (*k, G::real(c.re.clone()))));
        let b = Self::from_terms(self.terms.iter().map(|(k, c)| (*k, G::real(c.im.clone()))));
        (a, b)
    }

    pub fn derivative_y(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(k, _)| k.1 > 0)
                .map(|(k, c)| ((k.0, k.1 - 1), c.scale(&Rational::from_integer(k.1.into())))),
        )
    }

    pub fn derivative_x(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(k, _)| k.0 > 0)
                .map(|(k, c)| ((k.0 - 1, k.1), c.scale(&Rational::from_integer(k.0.into())))),
        )
    }

    /// Coefficient of `y^j` as a polynomial in `x`.
    pub fn y_coeff(&self, j: u32) -> BiPoly {
        Self::from_terms(self.terms.iter().filter(|(k, _)| k.1 == j).map(|(k, c)| ((k.0, 0), c.clone())))
    }

    /// Coefficients in `y` as univariate polynomials in `x`.
    pub fn y_coeffs_upoly(&self) -> Vec<UPoly<G>> {
        let d = self.deg_y().map_or(0, |d| d as usize + 1);
        let mut out: Vec<Vec<G>> = vec![Vec::new(); d];
        for (k, c) in &self.terms {
            let v = &mut out[k.1 as usize];
            if v.len() <= k.0 as usize {
                v.resize(k.0 as usize + 1, G::zero());
            }
            v[k.0 as usize] = c.clone();
        }
        out.into_iter().map(UPoly::new).collect()
    }

    pub fn from_y_coeffs_upoly(cs: &[UPoly<G>]) -> Self {
        let mut p = Self::zero();
        for (j, u) in cs.iter().enumerate() {
            for (i, c) in u.coeffs().iter().enumerate() {
                p.add_term(i as u32, j as u32, c);
            }
        }
        p
    }

    /// `P(x, g(x, y))`.
    pub fn substitute_y(&self, g: &BiPoly) -> BiPoly {
        let d = match self.deg_y() {
            Some(d) => d,
            None => return Self::zero(),
        };
        let mut acc = Self::zero();
        for j in (0..=d).rev() {
            acc = acc.mul(g).add(&self.y_coeff(j));
        }
        acc
    }

    /// `P(x, x^n y - q(x))` where `q` is given by its coefficients from degree 1 up.
    pub fn substitute_datum(&self, n: u32, q: &[Rational]) -> BiPoly {
        let mut g = Self::monomial(G::one(), n, 1);
        for (k, c) in q.iter().enumerate() {
            g.add_term(k as u32 + 1, 0, &G::real(-c));
        }
        self.substitute_y(&g)
    }

    pub fn eval_c64(&self, x: (f64, f64), y: (f64, f64)) -> (f64, f64) {
        let cm = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
        let d = self.deg_y().unwrap_or(0);
        let mut acc = (0.0, 0.0);
        for j in (0..=d).rev() {
            let mut cj = (0.0, 0.0);
            let dx = self.terms.keys().filter(|k| k.1 == j).map(|k| k.0).max().unwrap_or(0);
            for i in (0..=dx).rev() {
                let c = self.terms.get(&(i, j)).map(|c| c.to_f64()).unwrap_or((0.0, 0.0));
                cj = cm(cj, x);
                cj = (cj.0 + c.0, cj.1 + c.1);
            }
            acc = cm(acc, y);
            acc = (acc.0 + cj.0, acc.1 + cj.1);
        }
        acc
    }

    pub fn to_ypoly<S: Scalar>(&self, prec: usize) -> YPoly<S> {
        let d = self.deg_y().map_or(0, |d| d as usize + 1);
        let mut cs: Vec<Vec<S>> = vec![vec![S::zero(); prec]; d];
        for (k, c) in &self.terms {
            if (k.0 as usize) < prec {
                cs[k.1 as usize][k.0 as usize] = S::from_gaussian(c);
            }
        }
        YPoly::new(cs.into_iter().map(|c| Series::new(c, prec)).collect(), prec)
    }

    /// `P(x, a(x))` to the precision of `a`.
    pub fn compose_series<S: Scalar>(&self, a: &Series<S>) -> Series<S> {
        self.to_ypoly::<S>(a.prec()).eval_series(a)
    }

    /// Division in `y` by a polynomial whose leading `y`-coefficient is a
    /// nonzero constant; returns `(quotient, remainder)` with `deg_y(remainder) < deg_y(d)`.
    pub fn divrem_y(&self, d: &BiPoly) -> Result<(BiPoly, BiPoly), AlgebraError> {
        let m = d.deg_y().ok_or(AlgebraError::DivisionByZero)?;
        let lead = d.y_coeff(m);
        if lead.num_terms() != 1 || lead.x_order() != Some(0) {
            return Err(AlgebraError::NotMonic);
        }
        let inv = lead.coeff(0, 0).inv().ok_or(AlgebraError::DivisionByZero)?;
        let mut r = self.clone();
        let mut q = BiPoly::zero();
        while let Some(k) = r.deg_y().filter(|&k| k >= m) {
            let top = r.y_coeff(k).scale(&inv).shift(0, k - m);
            q = q.add(&top);
            r = r.sub(&top.mul(d));
        }
        Ok((q, r))
    }

    /// Greatest common divisor up to a unit, via primitive remainder
    /// sequences in `Q[i][x][y]`.
    pub fn gcd(&self, o: &BiPoly) -> BiPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let a = self.y_coeffs_upoly();
        let b = o.y_coeffs_upoly();
        let ca = content(&a);
        let cb = content(&b);
        let cg = ca.gcd(&cb);
        let (mut a, mut b) = (primitive(&a, &ca), primitive(&b, &cb));
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while b.len() > 1 {
            let r = prem(&a, &b);
            if r.is_empty() {
                break;
            }
            let cr = content(&r);
            a = b;
            b = primitive(&r, &cr);
        }
        let g = if b.len() <= 1 { vec![UPoly::constant(G::one())] } else { b };
        let g: Vec<UPoly<G>> = g.iter().map(|c| c.mul(&cg)).collect();
        BiPoly::from_y_coeffs_upoly(&g)
    }

    /// Whether the polynomial is a nonzero constant.
    pub fn is_constant(&self) -> bool {
        !self.is_zero() && self.terms.keys().all(|k| *k == (0, 0))
    }
}

fn trim(mut v: Vec<UPoly<G>>) -> Vec<UPoly<G>> {
    while v.last().is_some_and(UPoly::is_zero) {
        v.pop();
    }
    v
}

fn content(a: &[UPoly<G>]) -> UPoly<G> {
    a.iter().fold(UPoly::zero(), |g, c| g.gcd(c))
}

fn primitive(a: &[UPoly<G>], c: &UPoly<G>) -> Vec<UPoly<G>> {
    if c.is_zero() {
        return a.to_vec();
    }
    trim(a.iter().map(|x| x.divrem(c).0).collect())
}

/// Pseudo-remainder of `a` by `b` in `y`.
fn prem(a: &[UPoly<G>], b: &[UPoly<G>]) -> Vec<UPoly<G>> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    while r.len() > db {
        let k = r.len() - 1;
        let lr = r[k].clone();
        let mut next: Vec<UPoly<G>> = r.iter().map(|c| c.mul(lb)).collect();
        for (j, bj) in b.iter().enumerate() {
            next[k - db + j] = next[k - db + j].sub(&bj.mul(&lr));
        }
        r = trim(next);
        if r.len() > k {
            unreachable!("pseudo-division failed to reduce degree");
        }
    }
    r
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coef = if c.im.is_zero() {
                format_rational(&c.re)
            } else if c.re.is_zero() {
                format!("{}*i", format_rational(&c.im))
            } else {
                format!("{}+{}*i", format_rational(&c.re), format_rational(&c.im))
            };
            let mut parts = Vec::new();
            if !c.is_one() || *k == (0, 0) {
                parts.push(format!("({})", coef));
            }
            match k.0 {
                0 => {}
                1 => parts.push("x".into()),
                e => parts.push(format!("x^{}", e)),
            }
            match k.1 {
                0 => {}
                1 => parts.push("y".into()),
                e => parts.push(format!("y^{}", e)),
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn x() -> BiPoly {
        BiPoly::x()
    }
    fn y() -> BiPoly {
        BiPoly::y()
    }
    fn c(n: i64) -> BiPoly {
        BiPoly::constant(G::from_int(n))
    }
    fn ic(n: i64) -> BiPoly {
        BiPoly::constant(G::new(rat(0, 1), rat(n, 1)))
    }

    #[test]
    fn reflect_conjugates_coefficients() {
        let p = y().add(&x()).add(&ic(1).mul(&x().pow(2)));
        let want = y().add(&x()).sub(&ic(1).mul(&x().pow(2)));
        assert_eq!(p.reflect(), want);
        assert_eq!(p.reflect().reflect(), p);
    }

    #[test]
    fn real_imag_parts_of_two_branch_product() {
        let f1 = y().add(&x()).add(&ic(1).mul(&x().pow(2)));
        let f2 = y().add(&c(2).mul(&x())).add(&ic(1).mul(&x().pow(2)));
        let (a, b) = f1.mul(&f2).real_imag_parts();
        let want_a = y().pow(2).add(&c(3).mul(&x()).mul(&y())).add(&c(2).mul(&x().pow(2))).sub(&x().pow(4));
        let want_b = x().pow(2).mul(&c(2).mul(&y()).add(&c(3).mul(&x())));
        assert_eq!(a, want_a);
        assert_eq!(b, want_b);
    }

    #[test]
    fn divrem_by_monic() {
        let p = y().add(&x()).add(&ic(1).mul(&x().pow(2))).mul(&y().add(&c(2).mul(&x())).add(&ic(1).mul(&x().pow(2))));
        let (q, r) = y().pow(2).divrem_y(&p).unwrap();
        assert_eq!(q, BiPoly::one());
        assert_eq!(r, y().pow(2).sub(&p));
        assert_eq!(r.deg_y(), Some(1));
    }

    #[test]
    fn gcd_detects_common_factor() {
        let f = y().add(&x());
        let g1 = y().add(&ic(1).mul(&x().pow(2)));
        let p = f.mul(&g1);
        let g = p.gcd(&p.reflect());
        assert_eq!(g.deg_y(), Some(1));
        let (_, r) = p.divrem_y(&g.scale(&g.y_coeff(1).coeff(0, 0).inv().unwrap())).unwrap();
        assert!(r.is_zero());
        let q = g1.mul(&y().add(&x()).add(&ic(1).mul(&x().pow(4))));
        assert!(q.gcd(&q.reflect()).is_constant());
    }

    #[test]
    fn substitution_and_evaluation() {
        let q = y().add(&x()).add(&x().pow(2)).add(&ic(1).mul(&x().pow(4))).mul(&y().add(&x()).add(&ic(1).mul(&x().pow(4))));
        let s = q.substitute_datum(3, &[rat(1, 1)]);
        assert_eq!(s.x_order(), Some(5));
        let v = q.eval_c64((0.5, 0.0), (0.25, 1.0));
        assert!(v.0.is_finite() && v.1.is_finite());
    }
}
