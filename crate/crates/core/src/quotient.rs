//! Explicit bases for `C{x,y}/(P, P̄)`, coordinates of a numerator in
//! that basis, and the `L^p` integrability basis.

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{format_rational, BiPoly, ComplexBall, GaussianRational, Rational, Scalar, Series, Undecided, Valuation, YPoly};
use crate::branches::{find_proper_t_with, is_proper, verify_bvanish, BranchError, BranchSet, ProperCert};
use crate::integrability::Exponent;
use crate::localmodel::LocalModel;

type G = GaussianRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuotientError {
    #[error(transparent)]
    Branch(#[from] BranchError),
    #[error("truncation {0} exhausted during reduction")]
    Inconclusive(usize),
    #[error("numeric coefficient could not be certified")]
    Undecided,
    #[error("reconstruction residual is nonzero at x^{0}")]
    Reconstruction(usize),
}

impl From<Undecided> for QuotientError {
    fn from(_: Undecided) -> Self {
        QuotientError::Undecided
    }
}

/// `F_k = ∏_{j>k} (y - a_j)` for `k = 0..M`, with `F_0 = A + tB` and `F_M = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis<S: Scalar> {
    pub branches: Vec<Series<S>>,
    pub f: Vec<YPoly<S>>,
    pub b: YPoly<S>,
    pub m: Vec<usize>,
    pub prec: usize,
}

/// Quotient basis `{x^i F_k : 0 <= i < m_k}`; `F_k` is indexed from 1 in
/// the math and stored at `f[k]` here, so element `k` (0-based) is `f[k + 1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum QuotientBasis {
    Exact { t: Rational, basis: Basis<G> },
    Numeric { t: Rational, basis: Basis<ComplexBall> },
}

/// Coordinates `c_k(x)` with `deg c_k < m_k`.
#[derive(Clone, Debug, PartialEq)]
pub enum CoordinateVector {
    Exact(Vec<Series<G>>),
    Numeric(Vec<Series<ComplexBall>>),
}

/// `Q = Σ c_k F_k + g F_0 + h B` modulo `x^prec`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction<S: Scalar> {
    pub c: Vec<Series<S>>,
    pub g: YPoly<S>,
    pub h: YPoly<S>,
    pub prec: usize,
}

fn build_basis<S: Scalar>(m: &LocalModel, branches: Vec<Series<S>>, n: usize) -> Basis<S> {
    let mm = m.len();
    let mut f = vec![YPoly::constant(Series::one(n)); mm + 1];
    for k in (0..mm).rev() {
        f[k] = f[k + 1].mul(&YPoly::linear(&branches[k].truncate(n)));
    }
    let (_, b) = m.build_p().real_imag_parts();
    Basis { branches, f, b: b.to_ypoly(n), m: (0..mm).map(|k| m.contact_sum(k) as usize).collect(), prec: n }
}

impl<S: Scalar> Basis<S> {
    pub fn dim(&self) -> usize {
        self.m.iter().sum()
    }

    /// Peels one branch at a time, from `F_M = 1` down to `F_0`.
    pub fn reduce(&self, q: &YPoly<S>) -> Result<Reduction<S>, QuotientError> {
        let mm = self.m.len();
        let mut c = vec![Series::zero(0); mm];
        let mut g = q.truncate(self.prec);
        let mut h = YPoly::zero(self.prec);
        for k in (0..mm).rev() {
            let a = &self.branches[k];
            let mk = self.m[k];
            let (g2, s) = g.div_linear(a);
            let p = s.prec();
            if p < mk + 1 {
                return Err(QuotientError::Inconclusive(self.prec));
            }
            c[k] = s.truncate(mk);
            let r = s.shift_down(mk);
            let p2 = r.prec();
            let (b1, bk) = self.b.truncate(p).div_linear(a);
            let w = bk.shift_down(mk);
            let u = w.inv()?;
            let ru = r.mul(&u);
            g = g2.truncate(p2).sub(&b1.truncate(p2).scale(&ru));
            h = h.truncate(p2).add(&self.f[k + 1].truncate(p2).scale(&ru));
        }
        let prec = g.prec().min(h.prec());
        Ok(Reduction { c, g, h, prec })
    }

    /// `Q - Σ c_k F_k - g F_0 - h B`.
    pub fn residual(&self, q: &YPoly<S>, red: &Reduction<S>) -> YPoly<S> {
        let p = red.prec;
        let mut r = q.truncate(p);
        for (k, ck) in red.c.iter().enumerate() {
            let mut ck = ck.clone();
            ck = Series::new(ck.coeffs().to_vec(), p);
            r = r.sub(&self.f[k + 1].truncate(p).scale(&ck));
        }
        r.sub(&red.g.mul(&self.f[0].truncate(p))).sub(&red.h.mul(&self.b.truncate(p)))
    }

    fn coords(&self, q: &YPoly<S>) -> Result<Vec<Series<S>>, QuotientError> {
        let red = self.reduce(q)?;
        let res = self.residual(q, &red);
        if !res.is_zero()? {
            let v = res.x_valuation()?.finite().unwrap_or(0);
            return Err(QuotientError::Reconstruction(v));
        }
        Ok(red.c)
    }
}

impl QuotientBasis {
    pub fn t(&self) -> &Rational {
        match self {
            QuotientBasis::Exact { t, .. } | QuotientBasis::Numeric { t, .. } => t,
        }
    }

    pub fn m(&self) -> &[usize] {
        match self {
            QuotientBasis::Exact { basis, .. } => &basis.m,
            QuotientBasis::Numeric { basis, .. } => &basis.m,
        }
    }

    pub fn dim(&self) -> usize {
        self.m().iter().sum()
    }

    pub fn prec(&self) -> usize {
        match self {
            QuotientBasis::Exact { basis, .. } => basis.prec,
            QuotientBasis::Numeric { basis, .. } => basis.prec,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, QuotientBasis::Exact { .. })
    }

    /// Coefficients of `F_k` (1-based `k`, `0..=M`) as floats, by `y` power then `x` power.
    pub fn f_approx(&self, k: usize) -> Vec<Vec<(f64, f64)>> {
        match self {
            QuotientBasis::Exact { basis, .. } => basis.f[k].coeffs().iter().map(|c| c.to_c64()).collect(),
            QuotientBasis::Numeric { basis, .. } => basis.f[k].coeffs().iter().map(|c| c.to_c64()).collect(),
        }
    }

    /// Exact `F_k` when every branch coefficient is rational.
    pub fn f_exact(&self, k: usize) -> Option<&YPoly<G>> {
        match self {
            QuotientBasis::Exact { basis, .. } => Some(&basis.f[k]),
            QuotientBasis::Numeric { .. } => None,
        }
    }
}

impl CoordinateVector {
    pub fn len(&self) -> usize {
        match self {
            CoordinateVector::Exact(c) => c.len(),
            CoordinateVector::Numeric(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn valuations(&self) -> Result<Vec<Valuation>, Undecided> {
        match self {
            CoordinateVector::Exact(c) => c.iter().map(Series::valuation).collect(),
            CoordinateVector::Numeric(c) => c.iter().map(Series::valuation).collect(),
        }
    }

    pub fn exact(&self) -> Option<&[Series<G>]> {
        match self {
            CoordinateVector::Exact(c) => Some(c),
            CoordinateVector::Numeric(_) => None,
        }
    }

    pub fn approx(&self) -> Vec<Vec<(f64, f64)>> {
        match self {
            CoordinateVector::Exact(c) => c.iter().map(Series::to_c64).collect(),
            CoordinateVector::Numeric(c) => c.iter().map(Series::to_c64).collect(),
        }
    }
}

/// Basis from a proper-`t` certificate, with `m_k` cross-checked against `Ord B(x, a_k)`.
pub fn quotient_basis_from_cert(m: &LocalModel, cert: &ProperCert) -> Result<QuotientBasis, QuotientError> {
    verify_bvanish(m, cert)?;
    let n = cert.prec();
    Ok(match &cert.branches {
        BranchSet::Exact(a) => QuotientBasis::Exact { t: cert.t.clone(), basis: build_basis(m, a.clone(), n) },
        BranchSet::Numeric(a) => QuotientBasis::Numeric { t: cert.t.clone(), basis: build_basis(m, a.clone(), n) },
    })
}

/// Truncation large enough for the reduction: `Σ m_k` is consumed, plus a guard.
pub fn reduction_truncation(m: &LocalModel) -> usize {
    2 * m.intersection_multiplicity() as usize + 8
}

pub fn quotient_basis(m: &LocalModel, t: &Rational, n: usize) -> Result<QuotientBasis, QuotientError> {
    let cert = is_proper(m, t, n)?;
    quotient_basis_from_cert(m, &cert)
}

/// Coordinates of `Q` in the basis; the cofactor transcript is checked to
/// reconstruct `Q` modulo `x^N` before returning.
pub fn reduce_mod_ideal(q: &BiPoly, basis: &QuotientBasis) -> Result<CoordinateVector, QuotientError> {
    Ok(match basis {
        QuotientBasis::Exact { basis, .. } => CoordinateVector::Exact(basis.coords(&q.to_ypoly(basis.prec))?),
        QuotientBasis::Numeric { basis, .. } => CoordinateVector::Numeric(basis.coords(&q.to_ypoly(basis.prec))?),
    })
}

/// `⌊(2L + 1)(1 - 1/p)⌋`.
pub fn l_of_p(two_l: u32, p: &Rational) -> i64 {
    let a = Rational::from_integer((two_l as i64 + 1).into());
    (a.clone() - a / p).floor().to_integer().to_i64().expect("small")
}

/// Ordering of branches for exponent `p`: the last slot goes to the index
/// maximizing `L_k(p) + Σ_{j≠k} O_kj` over the remaining set, recursively.
/// Ties go to the larger original index, so admissible orders are kept.
pub fn relabel_for_p(m: &LocalModel, p: &Exponent) -> Vec<usize> {
    let pe = p.effective(m);
    let mut rest: Vec<usize> = (0..m.len()).collect();
    let mut back = Vec::with_capacity(m.len());
    while !rest.is_empty() {
        let score = |k: usize| -> i64 {
            l_of_p(m.branch(k).two_l(), &pe) + rest.iter().filter(|&&j| j != k).map(|&j| m.contact(k, j) as i64).sum::<i64>()
        };
        let (pos, _) = rest
            .iter()
            .enumerate()
            .max_by_key(|&(_, &k)| (score(k), k))
            .expect("nonempty");
        back.push(rest.remove(pos));
    }
    back.reverse();
    back
}

/// `ℓ_k = L_k(p) + Σ_{j<k} O_jk` in the given order.
pub fn lower_bounds(m: &LocalModel, p: &Exponent) -> Vec<usize> {
    let pe = p.effective(m);
    (0..m.len())
        .map(|k| (l_of_p(m.branch(k).two_l(), &pe) + (0..k).map(|j| m.contact(j, k) as i64).sum::<i64>()) as usize)
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BasisElement {
    pub x_power: usize,
    pub k: usize,
}

/// `{x^i F_k : ℓ_k <= i < m_k}` for the relabeled model.
#[derive(Clone, Debug)]
pub struct IntegrabilityBasis {
    pub p: Exponent,
    pub permutation: Vec<usize>,
    pub model: LocalModel,
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
    pub basis: QuotientBasis,
}

impl IntegrabilityBasis {
    pub fn elements(&self) -> Vec<BasisElement> {
        let mut out = Vec::new();
        for k in 0..self.lower.len() {
            for i in self.lower[k]..self.upper[k] {
                out.push(BasisElement { x_power: i, k: k + 1 });
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u.saturating_sub(*l)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `x^i F_k` as a polynomial in `y` with exact series coefficients, when available.
    pub fn element_exact(&self, e: &BasisElement) -> Option<YPoly<G>> {
        self.basis.f_exact(e.k).map(|f| f.shift_x(e.x_power).truncate(f.prec()))
    }

    pub fn t(&self) -> &Rational {
        self.basis.t()
    }
}

fn cert_for(m: &LocalModel, t: Option<&Rational>, n: usize, seed: u64) -> Result<ProperCert, QuotientError> {
    Ok(match t {
        Some(t) => is_proper(m, t, n)?,
        None => find_proper_t_with(m, seed, 32, n)?,
    })
}

/// Integrability basis; `t = None` searches for a proper parameter.
pub fn integrability_basis(m: &LocalModel, p: &Exponent, t: Option<&Rational>, n: usize) -> Result<IntegrabilityBasis, QuotientError> {
    let permutation = relabel_for_p(m, p);
    let model = m.permuted(&permutation);
    let cert = cert_for(&model, t, n, 0)?;
    let basis = quotient_basis_from_cert(&model, &cert)?;
    let lower = lower_bounds(&model, p);
    let upper = basis.m().to_vec();
    Ok(IntegrabilityBasis { p: p.clone(), permutation, model, lower, upper, basis })
}

/// `Q/[P] ∈ L^p` via `Ord c_k >= ℓ_k` in the relabeled basis.
pub fn membership_via_coordinates(q: &BiPoly, m: &LocalModel, p: &Exponent, t: Option<&Rational>, n: usize) -> Result<bool, QuotientError> {
    let ib = integrability_basis(m, p, t, n)?;
    let c = reduce_mod_ideal(q, &ib.basis)?;
    for (k, v) in c.valuations()?.into_iter().enumerate() {
        if let Valuation::Finite(v) = v {
            if v < ib.lower[k] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// JSON view of an integrability basis.
#[derive(Serialize)]
pub struct BasisReport {
    pub p: Exponent,
    pub t: String,
    pub permutation: Vec<usize>,
    pub exact: bool,
    pub bounds: Vec<(usize, usize)>,
    pub dim: usize,
    pub elements: Vec<BasisElement>,
    pub f_series: Vec<Vec<Vec<(f64, f64)>>>,
}

impl From<&IntegrabilityBasis> for BasisReport {
    fn from(b: &IntegrabilityBasis) -> Self {
        let mm = b.lower.len();
        BasisReport {
            p: b.p.clone(),
            t: format_rational(b.t()),
            permutation: b.permutation.clone(),
            exact: b.basis.is_exact(),
            bounds: b.lower.iter().copied().zip(b.upper.iter().copied()).collect(),
            dim: b.len(),
            elements: b.elements(),
            f_series: (1..=mm).map(|k| b.basis.f_approx(k)).collect(),
        }
    }
}
