//! `L^p` membership of `Q/P` decided from orders of vanishing along the
//! branch data of the local model.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{
    ceil_div, format_rational, parse_rational, BiPoly, GaussianRational, Rational, Scalar, Series, Undecided,
    Valuation, YPoly,
};
use crate::localmodel::LocalModel;

type G = GaussianRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrabilityError {
    #[error("exponent must be a rational >= 1 or inf, got {0}")]
    InvalidExponent(String),
    #[error("series truncation {0} is too short to decide")]
    Inconclusive(usize),
    #[error("numeric coefficient could not be certified")]
    Undecided,
}

impl From<Undecided> for IntegrabilityError {
    fn from(_: Undecided) -> Self {
        IntegrabilityError::Undecided
    }
}

/// Integrability exponent: a rational `p >= 1` or `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational),
    Infinity,
}

impl Exponent {
    pub fn finite(p: Rational) -> Result<Self, IntegrabilityError> {
        if p < Rational::one() {
            return Err(IntegrabilityError::InvalidExponent(format_rational(&p)));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn int(n: i64) -> Self {
        Exponent::finite(Rational::from_integer(n.into())).expect("exponent >= 1")
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Exponent::finite(Rational::new(n.into(), d.into())).expect("exponent >= 1")
    }

    /// Finite exponent standing in for `∞`: membership for every `p >= K + 1`
    /// coincides with boundedness.
    pub fn effective(&self, m: &LocalModel) -> Rational {
        match self {
            Exponent::Finite(p) => p.clone(),
            Exponent::Infinity => Rational::from_integer((m.k_max() as i64 + 1).into()),
        }
    }
}

impl FromStr for Exponent {
    type Err = IntegrabilityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if matches!(t, "inf" | "Inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinity);
        }
        let p = parse_rational(t).ok_or_else(|| IntegrabilityError::InvalidExponent(t.into()))?;
        Exponent::finite(p)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{}", format_rational(p)),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Order of vanishing, possibly infinite (for the zero polynomial).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn at_least(self, k: i64) -> bool {
        match self {
            Order::Finite(v) => v as i64 >= k,
            Order::Infinite => true,
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Finite(v) => s.serialize_u32(*v),
            Order::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchCheck {
    pub j: usize,
    pub actual: Order,
    pub required: i64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub p: Exponent,
    pub verdict: Verdict,
    pub branches: Vec<BranchCheck>,
    #[serde(serialize_with = "ser_pstar")]
    pub p_star: Option<Rational>,
    pub p_star_open: bool,
}

fn ser_pstar<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&format_rational(r)),
        None => s.serialize_str("inf"),
    }
}

/// Membership exponents `[1, p_star)`; `p_star = None` means every finite `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentRange {
    #[serde(serialize_with = "ser_pstar")]
    pub p_star: Option<Rational>,
    pub open: bool,
    pub includes_infinity: bool,
}

/// `O(n, q, Q)`: the x-adic order of `Q(x, x^n y - q(x))`.
pub fn order_on_datum(n: u32, q: &[Rational], qpoly: &BiPoly) -> Order {
    match qpoly.substitute_datum(n, q).x_order() {
        Some(v) => Order::Finite(v),
        None => Order::Infinite,
    }
}

/// `O(n, q, Q)` for `Q` with truncated series coefficients.
pub fn order_on_datum_series<S: Scalar>(n: u32, q: &[Rational], qpoly: &YPoly<S>) -> Result<Valuation, Undecided> {
    let prec = qpoly.prec();
    let mut shift = Series::<S>::zero(prec);
    for (k, c) in q.iter().enumerate() {
        shift.set_coeff(k + 1, S::from_rational(&-c));
    }
    let g = YPoly::new(vec![shift, Series::monomial(S::one(), n as usize, prec)], prec);
    qpoly.compose_y(&g).x_valuation()
}

/// `Σ_i O_ij - ⌈(2L_j + 1)/p⌉ + 1`.
pub fn required_order(m: &LocalModel, j: usize, p: &Rational) -> i64 {
    let a = m.branch(j).two_l() as i64 + 1;
    m.contact_sum(j) as i64 - ceil_div(a, p) + 1
}

/// Remainder of `Q` modulo `[P]` in `y`.
pub fn reduce_by_model(qpoly: &BiPoly, m: &LocalModel) -> BiPoly {
    qpoly.divrem_y(&m.build_p()).expect("model polynomial is monic").1
}

fn branch_orders(qpoly: &BiPoly, m: &LocalModel) -> Vec<Order> {
    let r = reduce_by_model(qpoly, m);
    m.branches().iter().map(|b| order_on_datum(b.two_l(), &b.q, &r)).collect()
}

fn threshold_from_orders(m: &LocalModel, orders: &[Order]) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for (j, o) in orders.iter().enumerate() {
        let Order::Finite(v) = o else { continue };
        let mj = m.contact_sum(j) as i64 - *v as i64 + 1;
        if mj >= 2 {
            let cand = Rational::new((m.branch(j).two_l() as i64 + 1).into(), (mj - 1).into());
            if best.as_ref().is_none_or(|b| &cand < b) {
                best = Some(cand);
            }
        }
    }
    best
}

/// Full per-branch report for `Q/[P] ∈ L^p`.
pub fn membership_report(qpoly: &BiPoly, m: &LocalModel, p: &Exponent) -> MembershipReport {
    let pe = p.effective(m);
    let orders = branch_orders(qpoly, m);
    let branches: Vec<BranchCheck> = orders
        .iter()
        .enumerate()
        .map(|(j, &actual)| {
            let required = required_order(m, j, &pe);
            BranchCheck { j, actual, required, ok: actual.at_least(required) }
        })
        .collect();
    let verdict = if branches.iter().all(|b| b.ok) { Verdict::Member } else { Verdict::NonMember };
    MembershipReport { p: p.clone(), verdict, branches, p_star: threshold_from_orders(m, &orders), p_star_open: true }
}

pub fn is_in_lp(qpoly: &BiPoly, m: &LocalModel, p: &Exponent) -> bool {
    membership_report(qpoly, m, p).verdict == Verdict::Member
}

/// Boundedness of `Q/[P]` near the origin.
pub fn is_in_linfty(qpoly: &BiPoly, m: &LocalModel) -> bool {
    is_in_lp(qpoly, m, &Exponent::Infinity)
}

/// The set of `p` with `Q/[P] ∈ L^p` is `[1, p_star)`.
pub fn lp_threshold(qpoly: &BiPoly, m: &LocalModel) -> ExponentRange {
    let orders = branch_orders(qpoly, m);
    ExponentRange { p_star: threshold_from_orders(m, &orders), open: true, includes_infinity: is_in_linfty(qpoly, m) }
}

/// `L^p` test for a numerator with truncated series coefficients. Fails
/// when the truncation is too short to certify an order.
pub fn is_in_lp_series<S: Scalar>(qpoly: &YPoly<S>, m: &LocalModel, p: &Exponent) -> Result<bool, IntegrabilityError> {
    let pe = p.effective(m);
    for (j, b) in m.branches().iter().enumerate() {
        let req = required_order(m, j, &pe);
        match order_on_datum_series(b.two_l(), &b.q, qpoly)?.at_least(req) {
            Some(true) => {}
            Some(false) => return Ok(false),
            None => return Err(IntegrabilityError::Inconclusive(qpoly.prec())),
        }
    }
    Ok(true)
}

/// `dim I^p / (P, P̄) = Σ_{j<k} O_jk + Σ_k (⌈(2L_k + 1)/p⌉ - 1)`.
pub fn dim_ip_quotient(m: &LocalModel, p: &Exponent) -> u64 {
    let pe = p.effective(m);
    let n = m.len();
    let mut total: i64 = 0;
    for j in 0..n {
        for k in j + 1..n {
            total += m.contact(j, k) as i64;
        }
        total += ceil_div(m.branch(j).two_l() as i64 + 1, &pe) - 1;
    }
    total as u64
}

/// `n + O(n, q, ∂Q/∂y) >= O(n, q, Q)`.
pub fn derivative_order_bound(n: u32, q: &[Rational], qpoly: &BiPoly) -> bool {
    let lhs = order_on_datum(n, q, &qpoly.derivative_y());
    let rhs = order_on_datum(n, q, qpoly);
    match (lhs, rhs) {
        (_, Order::Infinite) => lhs == Order::Infinite,
        (Order::Infinite, _) => true,
        (Order::Finite(a), Order::Finite(b)) => n + a >= b,
    }
}

/// `P_y / P ∈ L^p` exactly for `1 <= p < 1 + 1/K`.
pub fn derivative_lp_range(m: &LocalModel) -> Rational {
    Rational::one() + Rational::new(1.into(), (m.k_max() as i64).into())
}

/// Direct membership test in the product ideal `∏_j (y + q_j, x^{2L_j})`.
///
/// The ideal contains `A = Re P` (monic in `y`) and `x^D` with
/// `D = Σ 2L_j`, so membership is decided in the free
/// `Q[x]/(x^D)`-module `Q[x, y]/(A, x^D)` by echelon reduction over the
/// truncated power series ring.
pub fn product_ideal_membership(qpoly: &BiPoly, m: &LocalModel) -> bool {
    let d: u32 = m.branches().iter().map(|b| b.two_l()).sum();
    let prec = d as usize;
    let mm = m.len();
    let (a, _) = m.build_p().real_imag_parts();
    let to_vec = |f: &BiPoly| -> Vec<Series<G>> {
        let r = f.divrem_y(&a).expect("A is monic").1;
        let y = r.to_ypoly::<G>(prec);
        (0..mm).map(|j| y.coeff(j)).collect()
    };
    let mut rows: Vec<Vec<Series<G>>> = Vec::new();
    for mask in 0u32..(1 << mm) {
        let mut g = BiPoly::one();
        for (j, b) in m.branches().iter().enumerate() {
            if mask & (1 << j) != 0 {
                g = g.mul(&BiPoly::y().add(&b.q_poly()));
            } else {
                g = g.shift(b.two_l(), 0);
            }
        }
        if g.x_order().is_none_or(|o| o >= d) {
            continue;
        }
        for s in 0..mm as u32 {
            rows.push(to_vec(&g.shift(0, s)));
        }
    }
    let pivots = echelon(rows, mm);
    let (re, im) = qpoly.real_imag_parts();
    [re, im].iter().all(|part| reduces_to_zero(to_vec(part), &pivots))
}

struct Pivot {
    col: usize,
    val: usize,
    row: Vec<Series<G>>,
}

fn lead_val(s: &Series<G>) -> Option<usize> {
    match s.valuation().expect("exact") {
        Valuation::Finite(v) => Some(v),
        Valuation::AtLeast(_) => None,
    }
}

/// `e / (x^v u)` for `u` the unit part of the pivot entry.
fn quotient(e: &Series<G>, pivot_entry: &Series<G>, v: usize) -> Series<G> {
    let prec = e.prec();
    let unit = pivot_entry.shift_down(v);
    let num = e.shift_down(v);
    let q = num.mul(&unit.inv().expect("unit"));
    Series::new(q.coeffs().to_vec(), prec)
}

fn sub_multiple(row: &[Series<G>], f: &Series<G>, piv: &[Series<G>]) -> Vec<Series<G>> {
    row.iter().zip(piv).map(|(r, p)| r.sub(&f.mul(p))).collect()
}

fn echelon(mut rows: Vec<Vec<Series<G>>>, cols: usize) -> Vec<Pivot> {
    let mut pivots = Vec::new();
    for c in 0..cols {
        let best = rows
            .iter()
            .enumerate()
            .filter_map(|(k, r)| lead_val(&r[c]).map(|v| (v, k)))
            .min();
        let Some((v, k)) = best else { continue };
        let prow = rows.swap_remove(k);
        for r in rows.iter_mut() {
            if lead_val(&r[c]).is_some() {
                let f = quotient(&r[c], &prow[c], v);
                *r = sub_multiple(r, &f, &prow);
            }
        }
        pivots.push(Pivot { col: c, val: v, row: prow });
    }
    pivots
}

fn reduces_to_zero(mut w: Vec<Series<G>>, pivots: &[Pivot]) -> bool {
    let cols = w.len();
    for c in 0..cols {
        let Some(v) = lead_val(&w[c]) else { continue };
        match pivots.iter().find(|p| p.col == c) {
            Some(p) if v >= p.val => {
                let f = quotient(&w[c], &p.row[c], p.val);
                w = sub_multiple(&w, &f, &p.row);
            }
            _ => return false,
        }
    }
    true
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
    fn one_x() -> LocalModel {
        LocalModel::from_ints(&[(1, &[1])])
    }

    #[test]
    fn orders_on_datum() {
        let i = BiPoly::constant(G::i());
        let q = y().add(&x()).add(&x().pow(2)).add(&i.mul(&x().pow(4))).mul(&y().add(&x()).add(&i.mul(&x().pow(4))));
        let one = [rat(1, 1)];
        assert_eq!(order_on_datum(3, &one, &q), Order::Finite(5));
        assert_eq!(order_on_datum(4, &one, &q), Order::Finite(6));
        assert_eq!(order_on_datum(2, &one, &BiPoly::one()), Order::Finite(0));
        assert_eq!(order_on_datum(2, &one, &y().add(&x())), Order::Finite(2));
        let qs: YPoly<G> = q.to_ypoly(20);
        assert_eq!(order_on_datum_series(3, &one, &qs), Ok(Valuation::Finite(5)));
    }

    #[test]
    fn single_branch_thresholds() {
        let m = one_x();
        assert!(is_in_lp(&BiPoly::one(), &m, &Exponent::int(1)));
        assert!(!is_in_lp(&BiPoly::one(), &m, &Exponent::int(2)));
        assert!(is_in_lp(&x(), &m, &Exponent::int(2)));
        assert!(!is_in_lp(&x(), &m, &Exponent::int(3)));
        assert!(is_in_lp(&x().pow(2), &m, &Exponent::int(7)));
        assert_eq!(lp_threshold(&BiPoly::one(), &m).p_star, Some(rat(3, 2)));
        assert_eq!(lp_threshold(&x(), &m).p_star, Some(rat(3, 1)));
        assert_eq!(lp_threshold(&x().pow(2), &m).p_star, None);
        assert!(is_in_linfty(&y().add(&x()), &m));
        assert!(!is_in_linfty(&x(), &m));
    }

    #[test]
    fn multiples_of_p_are_members() {
        let m = LocalModel::from_ints(&[(1, &[]), (4, &[1]), (2, &[])]);
        let p = m.build_p();
        let r = membership_report(&p.mul(&y().add(&BiPoly::one())), &m, &Exponent::Infinity);
        assert_eq!(r.verdict, Verdict::Member);
        assert!(r.branches.iter().all(|b| b.actual == Order::Infinite));
    }

    #[test]
    fn dimension_formula() {
        let m = LocalModel::from_ints(&[(1, &[]), (4, &[1]), (2, &[])]);
        assert_eq!(dim_ip_quotient(&m, &Exponent::int(3)), 7);
        assert_eq!(dim_ip_quotient(&m, &Exponent::Infinity), 4);
        assert_eq!(dim_ip_quotient(&m, &Exponent::int(2)), 11);
        assert_eq!(dim_ip_quotient(&m, &Exponent::ratio(5, 4)), 16);
    }

    #[test]
    fn product_ideal_agrees_on_simple_cases() {
        let m = one_x();
        assert!(product_ideal_membership(&y().add(&x()), &m));
        assert!(product_ideal_membership(&x().pow(2), &m));
        assert!(!product_ideal_membership(&x(), &m));
        assert!(!product_ideal_membership(&BiPoly::one(), &m));
        let two = LocalModel::from_ints(&[(1, &[]), (2, &[])]);
        assert!(product_ideal_membership(&y().pow(2), &two));
        assert!(!product_ideal_membership(&y().mul(&x()), &two));
        assert!(product_ideal_membership(&y().mul(&x().pow(2)), &two));
    }

    #[test]
    fn derivative_bounds() {
        let q = y().add(&x()).add(&x().pow(3));
        assert!(derivative_order_bound(2, &[rat(1, 1)], &q));
        assert_eq!(derivative_lp_range(&one_x()), rat(3, 2));
        assert_eq!(derivative_lp_range(&LocalModel::from_ints(&[(1, &[]), (2, &[])])), rat(5, 4));
        assert!("0".parse::<Exponent>().is_err());
        assert_eq!("inf".parse::<Exponent>(), Ok(Exponent::Infinity));
    }
}
