//! Real analytic branches of `A + tB` and the certificate that `t` is
//! proper: the branches match the model data and have the model's
//! pairwise contact orders.

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::roots::{real_roots, RealRoot};
use crate::algebra::{
    format_rational, BiPoly, ComplexBall, GaussianRational, Rational, Scalar, Series, Undecided, Valuation, YPoly,
};
use crate::integrability::{required_order, Exponent};
use crate::localmodel::{edge_polynomial, newton_edges, shift_branch, LocalModel};

type G = GaussianRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BranchError {
    #[error("t = {t} is not proper: {reason}")]
    NotProper { t: String, reason: String, pair: Option<(usize, usize)> },
    #[error("A + tB has a non-analytic or repeated branch: {0}")]
    NotAnalytic(String),
    #[error("numeric precision insufficient: {0}")]
    NumericInconclusive(String),
    #[error("series truncation {0} is too short to decide")]
    Inconclusive(usize),
    #[error("no proper t found in {0} attempts")]
    NoProperT(usize),
}

impl From<Undecided> for BranchError {
    fn from(_: Undecided) -> Self {
        BranchError::NumericInconclusive("coefficient could not be certified zero or nonzero".into())
    }
}

/// `A + tB` for `[P] = A + iB`.
pub fn a_plus_tb(m: &LocalModel, t: &Rational) -> BiPoly {
    let (a, b) = m.build_p().real_imag_parts();
    a.add(&b.scale(&G::real(t.clone())))
}

/// Branch series: exact when every coefficient is rational, otherwise balls.
#[derive(Clone, Debug, PartialEq)]
pub enum BranchSet {
    Exact(Vec<Series<G>>),
    Numeric(Vec<Series<ComplexBall>>),
}

impl BranchSet {
    pub fn len(&self) -> usize {
        match self {
            BranchSet::Exact(v) => v.len(),
            BranchSet::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, BranchSet::Exact(_))
    }

    pub fn prec(&self) -> usize {
        match self {
            BranchSet::Exact(v) => v.iter().map(Series::prec).min().unwrap_or(0),
            BranchSet::Numeric(v) => v.iter().map(Series::prec).min().unwrap_or(0),
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> BranchSet {
        match self {
            BranchSet::Exact(v) => BranchSet::Exact(perm.iter().map(|&k| v[k].clone()).collect()),
            BranchSet::Numeric(v) => BranchSet::Numeric(perm.iter().map(|&k| v[k].clone()).collect()),
        }
    }

    /// Coefficients as floating-point values (real parts).
    pub fn approx(&self) -> Vec<Vec<f64>> {
        match self {
            BranchSet::Exact(v) => v.iter().map(|s| s.to_c64().iter().map(|c| c.0).collect()).collect(),
            BranchSet::Numeric(v) => v.iter().map(|s| s.to_c64().iter().map(|c| c.0).collect()).collect(),
        }
    }

    /// Exact rational coefficients, when available.
    pub fn exact(&self) -> Option<Vec<Vec<Rational>>> {
        match self {
            BranchSet::Exact(v) => Some(v.iter().map(|s| s.coeffs().iter().map(|c| c.re.clone()).collect()).collect()),
            BranchSet::Numeric(_) => None,
        }
    }
}

enum Pending {
    /// Branch equal to the polynomial prefix.
    Polynomial(Vec<Rational>),
    /// Simple root `c` at exponent `e`; `F(x, x^g (c + y)) / x^v` lifts uniquely.
    Simple { prefix: Vec<Rational>, f: BiPoly, g: u32, v: u32, root: RealRoot },
}

fn split(f: &BiPoly, r: u32, prefix: &[Rational], out: &mut Vec<Pending>) -> Result<(), BranchError> {
    let (edges, low) = newton_edges(f, r);
    let covered: u32 = edges.iter().map(|e| e.j_start - e.j_end).sum();
    match r - covered {
        0 => {}
        1 => out.push(Pending::Polynomial(prefix.to_vec())),
        k => return Err(BranchError::NotAnalytic(format!("{} coincident polynomial branches", k))),
    }
    let e_cur = prefix.len() as u32;
    for edge in &edges {
        if !edge.slope.is_integer() {
            return Err(BranchError::NotAnalytic(format!("fractional exponent {}", format_rational(&edge.slope))));
        }
        let g = edge.slope.to_integer().to_u32().expect("slope");
        let v = edge.value.to_integer().to_u32().expect("edge value");
        let e = e_cur + g;
        let phi = edge_polynomial(f, edge, &low);
        let (re, im) = phi.split_re_im();
        if !im.is_zero() {
            return Err(BranchError::NotAnalytic("A + tB is not real".into()));
        }
        let roots = real_roots(&re);
        let n_real: usize = roots.iter().map(|r| r.1).sum();
        if n_real != re.degree().unwrap_or(0) {
            return Err(BranchError::NotAnalytic(format!("non-real leading coefficient at x^{}", e)));
        }
        let mut pre = prefix.to_vec();
        pre.resize(e as usize - 1, Rational::zero());
        for (root, k) in roots {
            if k == 1 {
                out.push(Pending::Simple { prefix: pre.clone(), f: f.clone(), g, v, root });
                continue;
            }
            let c = root.as_rational().cloned().ok_or_else(|| {
                BranchError::NumericInconclusive(format!("repeated irrational coefficient ~{} at x^{}", root.approx(), e))
            })?;
            let f1 = shift_branch(f, g, &G::real(c.clone()), v);
            let mut p2 = pre.clone();
            p2.push(c);
            split(&f1, k as u32, &p2, out)?;
        }
    }
    Ok(())
}

trait RootScalar: Scalar {
    fn from_root(r: &RealRoot) -> Self;
}

impl RootScalar for G {
    fn from_root(r: &RealRoot) -> Self {
        G::real(r.as_rational().expect("exact lift of rational root").clone())
    }
}

impl RootScalar for ComplexBall {
    fn from_root(r: &RealRoot) -> Self {
        ComplexBall::from_real(r.to_ball())
    }
}

fn prefix_series<S: Scalar>(prefix: &[Rational], n: usize) -> Series<S> {
    let mut s = Series::zero(n);
    for (k, c) in prefix.iter().enumerate() {
        s.set_coeff(k + 1, S::from_rational(c));
    }
    s
}

/// Newton iteration for the root `y(x)`, `y(0) = 0`, of `F(x, y)` with `F_y(0, 0) != 0`.
fn newton_lift<S: Scalar>(f1: &YPoly<S>) -> Result<Series<S>, Undecided> {
    let np = f1.prec();
    let df = f1.derivative_y();
    let mut y = Series::<S>::zero(np);
    let mut iters = 2;
    let mut k = 1;
    while k < np.max(1) {
        k *= 2;
        iters += 1;
    }
    for _ in 0..iters {
        let num = f1.eval_series(&y);
        let den = df.eval_series(&y);
        y = y.sub(&num.mul(&den.inv()?));
    }
    Ok(y)
}

fn lift<S: RootScalar>(pending: &[Pending], n: usize) -> Result<Vec<Series<S>>, BranchError> {
    pending
        .iter()
        .map(|p| match p {
            Pending::Polynomial(prefix) => Ok(prefix_series(prefix, n)),
            Pending::Simple { prefix, f, g, v, root } => {
                let e = prefix.len() + 1;
                let mut a = prefix_series::<S>(prefix, n);
                let c = S::from_root(root);
                a.set_coeff(e, c.clone());
                if e >= n {
                    return Ok(a);
                }
                let np = n - e;
                let base_prec = np + *v as usize;
                let fy: YPoly<S> = f.to_ypoly(base_prec);
                let xg = Series::monomial(S::one(), *g as usize, base_prec);
                let sub = YPoly::new(vec![xg.scale(&c), xg], base_prec);
                let f1 = fy.compose_y(&sub).unshift_x(*v as usize);
                let y2 = newton_lift(&f1)?;
                for k in 0..np {
                    let cur = if k == 0 { a.coeff(e).clone() } else { S::zero() };
                    a.set_coeff(e + k, cur.add(y2.coeff(k)));
                }
                Ok(a)
            }
        })
        .collect()
}

/// The `M` real branches `y = a_j(x; t)` of `A + tB` through the origin,
/// modulo `x^n`, in discovery order.
pub fn branch_series(m: &LocalModel, t: &Rational, n: usize) -> Result<BranchSet, BranchError> {
    let f = a_plus_tb(m, t);
    let mut pending = Vec::new();
    split(&f, m.len() as u32, &[], &mut pending)?;
    if pending.len() != m.len() {
        return Err(BranchError::NotAnalytic(format!("found {} branches, expected {}", pending.len(), m.len())));
    }
    let all_rational = pending.iter().all(|p| match p {
        Pending::Polynomial(_) => true,
        Pending::Simple { root, .. } => root.as_rational().is_some(),
    });
    if all_rational {
        Ok(BranchSet::Exact(lift::<G>(&pending, n)?))
    } else {
        Ok(BranchSet::Numeric(lift::<ComplexBall>(&pending, n)?))
    }
}

/// Certificate that `t` is proper; `branches[j]` is matched to datum `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProperCert {
    pub t: Rational,
    pub branches: BranchSet,
}

impl ProperCert {
    pub fn prec(&self) -> usize {
        self.branches.prec()
    }
}

fn datum_series<S: Scalar>(m: &LocalModel, j: usize, n: usize) -> Series<S> {
    prefix_series(&m.branch(j).q, n)
}

fn match_generic<S: Scalar>(m: &LocalModel, t: &Rational, a: &[Series<S>]) -> Result<Vec<usize>, BranchError> {
    let n = a.iter().map(Series::prec).min().unwrap_or(0);
    let ts = format_rational(t);
    let mut owner: Vec<Option<usize>> = vec![None; m.len()];
    for (b, ab) in a.iter().enumerate() {
        let mut best: Option<usize> = None;
        for j in 0..m.len() {
            let d = m.branch(j);
            let diff = ab.add(&datum_series(m, j, n));
            match diff.valuation()?.at_least(d.two_l() as i64) {
                Some(true) => {
                    if best.is_none_or(|bj| m.branch(bj).two_l() < d.two_l()) {
                        best = Some(j);
                    }
                }
                Some(false) => {}
                None => return Err(BranchError::Inconclusive(n)),
            }
        }
        let Some(j0) = best else {
            return Err(BranchError::NotProper { t: ts, reason: format!("branch {} matches no datum", b), pair: None });
        };
        let slot = (0..m.len()).find(|&j| m.branch(j) == m.branch(j0) && owner[j].is_none());
        match slot {
            Some(j) => owner[j] = Some(b),
            None => {
                return Err(BranchError::NotProper {
                    t: ts,
                    reason: format!("too many branches match datum {}", j0),
                    pair: None,
                })
            }
        }
    }
    let perm: Vec<usize> = owner.into_iter().map(|o| o.expect("every datum matched")).collect();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let want = m.contact(i, j) as usize;
            let got = a[perm[i]].sub(&a[perm[j]]).valuation()?;
            match got {
                Valuation::Finite(v) if v == want => {}
                Valuation::AtLeast(k) if k <= want => return Err(BranchError::Inconclusive(n)),
                _ => {
                    return Err(BranchError::NotProper {
                        t: ts,
                        reason: format!("contact of branches {} and {} is {:?}, expected {}", i, j, got, want),
                        pair: Some((i, j)),
                    })
                }
            }
        }
    }
    Ok(perm)
}

/// Checks that `t` is proper for `m` using branch series modulo `x^n`.
pub fn is_proper(m: &LocalModel, t: &Rational, n: usize) -> Result<ProperCert, BranchError> {
    let bs = branch_series(m, t, n)?;
    let perm = match &bs {
        BranchSet::Exact(a) => match_generic(m, t, a)?,
        BranchSet::Numeric(a) => match_generic(m, t, a)?,
    };
    Ok(ProperCert { t: t.clone(), branches: bs.permuted(&perm) })
}

/// Default truncation: twice the intersection multiplicity plus a guard.
pub fn default_truncation(m: &LocalModel) -> usize {
    2 * m.intersection_multiplicity() as usize + 4
}

/// Candidate parameters: `1, -1, 2, -2, ...` then seeded random rationals.
pub fn candidate_ts(seed: u64, count: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(count);
    let ints = count.min(16);
    for k in 0..ints {
        let v = (k / 2 + 1) as i64;
        out.push(Rational::from_integer(if k % 2 == 0 { v } else { -v }.into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let num: i64 = rng.random_range(-60..=60);
        let den: i64 = rng.random_range(1..=13);
        let t = Rational::new(num.into(), den.into());
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// First proper `t` among [`candidate_ts`], retrying with doubled
/// truncation when a candidate is inconclusive.
pub fn find_proper_t(m: &LocalModel, seed: u64, max_attempts: usize) -> Result<ProperCert, BranchError> {
    find_proper_t_with(m, seed, max_attempts, default_truncation(m))
}

pub fn find_proper_t_with(m: &LocalModel, seed: u64, max_attempts: usize, n: usize) -> Result<ProperCert, BranchError> {
    for t in candidate_ts(seed, max_attempts) {
        let mut n = n;
        for _ in 0..3 {
            match is_proper(m, &t, n) {
                Ok(c) => return Ok(c),
                Err(BranchError::Inconclusive(_)) => n *= 2,
                Err(_) => break,
            }
        }
    }
    Err(BranchError::NoProperT(max_attempts))
}

fn order_of<S: Scalar>(p: &BiPoly, a: &Series<S>) -> Result<Valuation, Undecided> {
    p.compose_series(a).valuation()
}

/// Orders of `B(x, a_j)` and `(A_y + t B_y)(x, a_j)` for each matched branch.
pub fn branch_orders(m: &LocalModel, cert: &ProperCert) -> Result<Vec<(Valuation, Valuation)>, BranchError> {
    let (a, b) = m.build_p().real_imag_parts();
    let dy = a.add(&b.scale(&G::real(cert.t.clone()))).derivative_y();
    let go = |s: &dyn Fn(&BiPoly) -> Result<Vec<Valuation>, Undecided>| -> Result<Vec<(Valuation, Valuation)>, BranchError> {
        Ok(s(&b)?.into_iter().zip(s(&dy)?).collect())
    };
    match &cert.branches {
        BranchSet::Exact(v) => go(&|p| v.iter().map(|s| order_of(p, s)).collect()),
        BranchSet::Numeric(v) => go(&|p| v.iter().map(|s| order_of(p, s)).collect()),
    }
}

/// Checks `Ord B(x, a_j) = Σ_i O_ij` and `Ord (A_y + t B_y)(x, a_j) = Σ_{i≠j} O_ij`.
pub fn verify_bvanish(m: &LocalModel, cert: &ProperCert) -> Result<Vec<(usize, usize)>, BranchError> {
    let orders = branch_orders(m, cert)?;
    let mut out = Vec::new();
    for (j, (ob, oa)) in orders.into_iter().enumerate() {
        let want_b = m.contact_sum(j) as usize;
        let want_a = want_b - m.branch(j).two_l() as usize;
        for (got, want) in [(ob, want_b), (oa, want_a)] {
            match got {
                Valuation::Finite(v) if v == want => {}
                Valuation::AtLeast(k) if k <= want => return Err(BranchError::Inconclusive(k)),
                _ => {
                    return Err(BranchError::NotProper {
                        t: format_rational(&cert.t),
                        reason: format!("branch {}: order {:?}, expected {}", j, got, want),
                        pair: None,
                    })
                }
            }
        }
        out.push((want_b, want_a));
    }
    Ok(out)
}

/// `Q/[P] ∈ L^p` via `Ord Q(x, a_j(x; t)) >= Σ_i O_ij - ⌈(2L_j+1)/p⌉ + 1`.
pub fn membership_via_branches(q: &BiPoly, m: &LocalModel, p: &Exponent, cert: &ProperCert) -> Result<bool, BranchError> {
    let pe = p.effective(m);
    let orders: Vec<Valuation> = match &cert.branches {
        BranchSet::Exact(v) => v.iter().map(|s| order_of(q, s)).collect::<Result<_, _>>()?,
        BranchSet::Numeric(v) => v.iter().map(|s| order_of(q, s)).collect::<Result<_, _>>()?,
    };
    for (j, o) in orders.into_iter().enumerate() {
        match o.at_least(required_order(m, j, &pe)) {
            Some(true) => {}
            Some(false) => return Ok(false),
            None => return Err(BranchError::Inconclusive(cert.prec())),
        }
    }
    Ok(true)
}
