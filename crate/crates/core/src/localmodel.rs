//! Local models `∏ (y + q_j(x) + i x^{2L_j})` and their extraction from a
//! polynomial via Newton–Puiseux expansion.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::numroots::complex_roots;
use crate::algebra::roots::real_roots;
use crate::algebra::upoly::UPoly;
use crate::algebra::{format_rational, parse_rational, BiPoly, GaussianRational, Rational};

type G = GaussianRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("branch {0}: L must be at least 1")]
    ZeroL(usize),
    #[error("branch {0}: deg q must be below 2L")]
    QTooLong(usize),
    #[error("a local model needs at least one branch")]
    Empty,
    #[error("invalid model JSON: {0}")]
    Json(String),
}

/// One branch `y + q(x) + i x^{2L}`: `q` real with `q(0) = 0`, `deg q < 2L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BranchDatum {
    pub l: u32,
    /// Coefficients of `x, x^2, ...`; trailing zeros are trimmed.
    pub q: Vec<Rational>,
}

impl BranchDatum {
    pub fn new(l: u32, q: Vec<Rational>) -> Self {
        let mut q = q;
        while q.last().is_some_and(Zero::is_zero) {
            q.pop();
        }
        BranchDatum { l, q }
    }

    pub fn two_l(&self) -> u32 {
        2 * self.l
    }

    /// Coefficient of `x^k` in `q`, `k >= 1`.
    pub fn q_coeff(&self, k: usize) -> Rational {
        if k == 0 {
            return Rational::zero();
        }
        self.q.get(k - 1).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn q_poly(&self) -> BiPoly {
        BiPoly::from_terms(self.q.iter().enumerate().map(|(k, c)| ((k as u32 + 1, 0), G::real(c.clone()))))
    }

    /// `q` padded with zeros to `2L - 1` coefficients.
    pub fn padded_q(&self) -> Vec<Rational> {
        (1..self.two_l() as usize).map(|k| self.q_coeff(k)).collect()
    }

    /// `y + q(x) + i x^{2L}`.
    pub fn factor(&self) -> BiPoly {
        let mut f = BiPoly::y().add(&self.q_poly());
        f.add_term(self.two_l(), 0, &G::i());
        f
    }

    fn sort_key(&self) -> (u32, Vec<Rational>) {
        (self.two_l(), self.padded_q())
    }
}

/// x-adic order of `q_i - q_j`, `None` when they coincide.
pub fn q_difference_order(a: &BranchDatum, b: &BranchDatum) -> Option<u32> {
    let n = a.q.len().max(b.q.len());
    (1..=n).find(|&k| a.q_coeff(k) != b.q_coeff(k)).map(|k| k as u32)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalModel {
    branches: Vec<BranchDatum>,
}

impl LocalModel {
    pub fn new(branches: Vec<BranchDatum>) -> Result<Self, ModelError> {
        if branches.is_empty() {
            return Err(ModelError::Empty);
        }
        let mut out = Vec::with_capacity(branches.len());
        for (j, b) in branches.into_iter().enumerate() {
            let b = BranchDatum::new(b.l, b.q);
            if b.l == 0 {
                return Err(ModelError::ZeroL(j));
            }
            if b.q.len() >= b.two_l() as usize {
                return Err(ModelError::QTooLong(j));
            }
            out.push(b);
        }
        Ok(LocalModel { branches: out })
    }

    /// Convenience constructor from `(L, q coefficients)` pairs with integer data.
    pub fn from_ints(data: &[(u32, &[i64])]) -> Self {
        let bs = data
            .iter()
            .map(|(l, q)| BranchDatum::new(*l, q.iter().map(|&c| Rational::from_integer(c.into())).collect()))
            .collect();
        Self::new(bs).expect("invalid model")
    }

    pub fn branches(&self) -> &[BranchDatum] {
        &self.branches
    }

    pub fn branch(&self, j: usize) -> &BranchDatum {
        &self.branches[j]
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// `K = max 2L_j`.
    pub fn k_max(&self) -> u32 {
        self.branches.iter().map(BranchDatum::two_l).max().unwrap_or(0)
    }

    /// Same data sorted by `(2L, q)`.
    pub fn canonical(&self) -> LocalModel {
        let mut b = self.branches.clone();
        b.sort_by_key(|a| a.sort_key());
        LocalModel { branches: b }
    }

    /// Data in the order given by `perm` (new index `k` holds old index `perm[k]`).
    pub fn permuted(&self, perm: &[usize]) -> LocalModel {
        LocalModel { branches: perm.iter().map(|&i| self.branches[i].clone()).collect() }
    }

    /// `[P] = ∏ (y + q_j(x) + i x^{2L_j})`.
    pub fn build_p(&self) -> BiPoly {
        self.branches.iter().fold(BiPoly::one(), |acc, b| acc.mul(&b.factor()))
    }

    /// `O_ij = min(Ord(q_j - q_i), 2L_i, 2L_j)`, with `O_jj = 2L_j`.
    pub fn contact(&self, i: usize, j: usize) -> u32 {
        let (a, b) = (&self.branches[i], &self.branches[j]);
        let m = a.two_l().min(b.two_l());
        match q_difference_order(a, b) {
            Some(k) => k.min(m),
            None => m,
        }
    }

    pub fn contact_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.contact(i, j)).collect()).collect()
    }

    /// `Σ_i O_ij`.
    pub fn contact_sum(&self, j: usize) -> u32 {
        (0..self.len()).map(|i| self.contact(i, j)).sum()
    }

    /// Intersection multiplicity of `P` and `P̄` at the origin, `Σ_{i,j} O_ij`.
    pub fn intersection_multiplicity(&self) -> u32 {
        (0..self.len()).map(|j| self.contact_sum(j)).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization")
    }

    pub fn from_json(s: &str) -> Result<Self, ModelError> {
        serde_json::from_str(s).map_err(|e| ModelError::Json(e.to_string()))
    }
}

impl fmt::Display for LocalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .branches
            .iter()
            .map(|b| format!("({}, {})", b.l, BiPoly::from_terms(b.q_poly().terms().map(|(k, c)| (*k, c.clone())))))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct BranchJson {
    #[serde(rename = "L")]
    l: u32,
    #[serde(default)]
    q: Vec<RationalJson>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    branches: Vec<BranchJson>,
}

/// Rational written as `"a/b"`; integers are also accepted as JSON numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalJson(pub Rational);

impl Serialize for RationalJson {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalJson {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let parsed = match &v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => n.as_i64().map(|i| Rational::from_integer(i.into())),
            _ => None,
        };
        parsed.map(RationalJson).ok_or_else(|| serde::de::Error::custom(format!("not a rational: {}", v)))
    }
}

impl Serialize for LocalModel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ModelJson {
            branches: self
                .branches
                .iter()
                .map(|b| BranchJson { l: b.l, q: b.q.iter().cloned().map(RationalJson).collect() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LocalModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = ModelJson::deserialize(d)?;
        LocalModel::new(m.branches.into_iter().map(|b| BranchDatum::new(b.l, b.q.into_iter().map(|r| r.0).collect())).collect())
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractError {
    #[error("P and its reflection share a nonconstant factor")]
    CommonFactor,
    #[error("P has a zero in the closed upper half-plane region: {reason}")]
    NotStable { reason: String, witness: Option<[f64; 4]> },
    #[error("branch classification needs numeric precision: {0}")]
    NumericInconclusive(String),
    #[error("P does not vanish at the origin")]
    NoZeroAtOrigin,
    #[error("P is the zero polynomial")]
    ZeroPolynomial,
}

/// Result of [`extract_local_model`].
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub model: LocalModel,
    /// Floating-point estimate of `b_j > 0` in the leading imaginary term `i b_j x^{2L_j}`.
    pub imaginary_coefficients: Vec<f64>,
    pub diagnostics: Vec<String>,
}

/// Sample grid for [`check_stability_sample`].
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub radius: f64,
    pub points: usize,
    /// Also sample `x` off the real axis (bi-upper half-plane probe).
    pub upper_x: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { radius: 0.5, points: 20, upper_x: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityProbe {
    pub stable: bool,
    /// `(Re x, Im x, Re y, Im y)` of a zero found with `Im y > 0`.
    pub witness: Option<[f64; 4]>,
}

/// Searches a grid of `x` values for zeros `y` of `P(x, ·)` with `Im y > 0`
/// and `|y| <= 1`.
pub fn check_stability_sample(p: &BiPoly, grid: GridSpec) -> StabilityProbe {
    let mut xs = Vec::new();
    for k in 1..=grid.points {
        let a = grid.radius * k as f64 / grid.points as f64;
        xs.push(Complex64::new(a, 0.0));
        xs.push(Complex64::new(-a, 0.0));
        if grid.upper_x {
            for m in 1..=4 {
                let b = a * m as f64 / 4.0;
                xs.push(Complex64::new(a, b));
                xs.push(Complex64::new(-a, b));
                xs.push(Complex64::new(0.0, b));
            }
        }
    }
    let coeffs = p.y_coeffs_upoly();
    for x in xs {
        let c: Vec<Complex64> = coeffs
            .iter()
            .map(|u| {
                u.coeffs().iter().rev().fold(Complex64::new(0.0, 0.0), |acc, g| {
                    let (re, im) = g.to_f64();
                    acc * x + Complex64::new(re, im)
                })
            })
            .collect();
        for y in complex_roots(&c) {
            if y.norm() <= 1.0 && y.im > 1e-8 * (1.0 + y.norm()) {
                return StabilityProbe { stable: false, witness: Some([x.re, x.im, y.re, y.im]) };
            }
        }
    }
    StabilityProbe { stable: true, witness: None }
}

pub(crate) struct Edge {
    pub(crate) j_start: u32,
    pub(crate) j_end: u32,
    pub(crate) slope: Rational,
    pub(crate) value: Rational,
}

/// Lower Newton polygon edges for the `r` roots of `F(x, ·)` tending to zero.
pub(crate) fn newton_edges(f: &BiPoly, r: u32) -> (Vec<Edge>, Vec<Option<u32>>) {
    let mut low: Vec<Option<u32>> = vec![None; r as usize + 1];
    for (k, _) in f.terms() {
        if k.1 <= r {
            let e = &mut low[k.1 as usize];
            *e = Some(e.map_or(k.0, |v| v.min(k.0)));
        }
    }
    let mut edges = Vec::new();
    let mut jc = r;
    let mut ic = low[r as usize].expect("x^0 y^r term missing");
    while jc > 0 {
        let mut best: Option<(Rational, u32)> = None;
        for j in (0..jc).rev() {
            if let Some(i) = low[j as usize] {
                let s = Rational::new((i as i64 - ic as i64).into(), ((jc - j) as i64).into());
                match &best {
                    Some((bs, _)) if &s > bs => {}
                    Some((bs, _)) if &s == bs => best = Some((s, j)),
                    _ => best = Some((s, j)),
                }
            }
        }
        let Some((slope, j)) = best else { break };
        let value = Rational::from_integer((ic as i64).into()) + &slope * Rational::from_integer((jc as i64).into());
        edges.push(Edge { j_start: jc, j_end: j, slope, value });
        ic = low[j as usize].unwrap();
        jc = j;
    }
    (edges, low)
}

/// Characteristic polynomial of an edge, divided by `c^{j_end}`.
pub(crate) fn edge_polynomial(f: &BiPoly, e: &Edge, low: &[Option<u32>]) -> UPoly<G> {
    let mut c = vec![G::zero(); (e.j_start - e.j_end) as usize + 1];
    for j in e.j_end..=e.j_start {
        if let Some(i) = low[j as usize] {
            let v = Rational::from_integer((i as i64).into()) + &e.slope * Rational::from_integer((j as i64).into());
            if v == e.value {
                c[(j - e.j_end) as usize] = f.coeff(i, j);
            }
        }
    }
    UPoly::new(c)
}

/// `x^{-v} F(x, x^g (c + y))`.
pub(crate) fn shift_branch(f: &BiPoly, g: u32, c: &G, v: u32) -> BiPoly {
    let sub = BiPoly::monomial(c.clone(), g, 0).add(&BiPoly::monomial(G::one(), g, 1));
    let h = f.substitute_y(&sub);
    debug_assert!(h.x_order().is_none_or(|o| o >= v));
    h.div_x_pow(v)
}

struct Found {
    datum: BranchDatum,
    count: usize,
    imag: Vec<f64>,
}

fn expand(f: &BiPoly, r: u32, prefix: &[Rational], out: &mut Vec<Found>) -> Result<(), ExtractError> {
    let (edges, low) = newton_edges(f, r);
    let covered: u32 = edges.iter().map(|e| e.j_start - e.j_end).sum();
    if covered < r {
        return Err(ExtractError::CommonFactor);
    }
    let e_cur = prefix.len() as u32;
    for edge in &edges {
        if !edge.slope.is_integer() {
            return Err(ExtractError::NotStable {
                reason: format!("fractional exponent {} before the first imaginary term", format_rational(&(&edge.slope + Rational::from_integer(e_cur.into())))),
                witness: None,
            });
        }
        let g = edge.slope.to_integer().to_u32().expect("slope");
        let v = edge.value.to_integer().to_u32().expect("edge value");
        let e = e_cur + g;
        let phi = edge_polynomial(f, edge, &low);
        let deg = phi.degree().unwrap_or(0);
        let (re, im) = phi.split_re_im();
        let real_part = if im.is_zero() { re.clone() } else { re.gcd(&im) };
        let reals = if real_part.degree().unwrap_or(0) == 0 { Vec::new() } else { real_roots(&real_part) };
        let n_real: usize = reals.iter().map(|(_, k)| *k).sum();
        let n_nonreal = deg - n_real;
        if n_nonreal > 0 {
            if e % 2 == 1 {
                return Err(ExtractError::NotStable {
                    reason: format!("first imaginary term has odd exponent {}", e),
                    witness: None,
                });
            }
            let num: Vec<Complex64> = phi
                .coeffs()
                .iter()
                .map(|c| {
                    let (a, b) = c.to_f64();
                    Complex64::new(a, b)
                })
                .collect();
            let mut roots = complex_roots(&num);
            roots.sort_by(|a, b| b.im.abs().partial_cmp(&a.im.abs()).unwrap_or(Ordering::Equal));
            let imag: Vec<f64> = roots.iter().take(n_nonreal).map(|z| -z.im).collect();
            if let Some(bad) = imag.iter().find(|&&b| b <= 0.0) {
                return Err(ExtractError::NotStable {
                    reason: format!("leading imaginary coefficient at x^{} has the wrong sign ({})", e, -bad),
                    witness: None,
                });
            }
            let mut q: Vec<Rational> = prefix.iter().map(|c| -c).collect();
            q.resize(e as usize - 1, Rational::zero());
            out.push(Found { datum: BranchDatum::new(e / 2, q), count: n_nonreal, imag });
        }
        for (root, k) in reals {
            let c = root.as_rational().cloned().ok_or_else(|| {
                ExtractError::NumericInconclusive(format!("irrational real coefficient ~{} at x^{}", root.approx(), e))
            })?;
            let f1 = shift_branch(f, g, &G::real(c.clone()), v);
            let mut pre = prefix.to_vec();
            pre.resize(e as usize - 1, Rational::zero());
            pre.push(c);
            expand(&f1, k as u32, &pre, out)?;
        }
    }
    Ok(())
}

/// Computes the local model of `P` at the origin. `P` must vanish at the
/// origin, have no factor in common with its reflection and no zeros on
/// `R x H` near the origin.
pub fn extract_local_model(p: &BiPoly) -> Result<Extraction, ExtractError> {
    if p.is_zero() {
        return Err(ExtractError::ZeroPolynomial);
    }
    if !p.coeff(0, 0).is_zero() {
        return Err(ExtractError::NoZeroAtOrigin);
    }
    let m = p.terms().filter(|(k, _)| k.0 == 0).map(|(k, _)| k.1).min().ok_or(ExtractError::CommonFactor)?;
    if !p.gcd(&p.reflect()).is_constant() {
        return Err(ExtractError::CommonFactor);
    }
    let probe = check_stability_sample(p, GridSpec::default());
    if !probe.stable {
        return Err(ExtractError::NotStable { reason: "sampled zero with Im y > 0".into(), witness: probe.witness });
    }
    let mut found = Vec::new();
    expand(p, m, &[], &mut found)?;
    let mut rows: Vec<(BranchDatum, f64)> = Vec::new();
    for f in found {
        for k in 0..f.count {
            rows.push((f.datum.clone(), f.imag.get(k).copied().unwrap_or(f64::NAN)));
        }
    }
    rows.sort_by_key(|a| a.0.sort_key());
    let mut diagnostics = Vec::new();
    for (j, (d, _)) in rows.iter().enumerate() {
        if !d.q_coeff(1).is_positive() {
            diagnostics.push(format!("branch {}: q'(0) = {} is not positive", j, format_rational(&d.q_coeff(1))));
        }
    }
    let model = LocalModel::new(rows.iter().map(|r| r.0.clone()).collect()).expect("extracted model is valid");
    Ok(Extraction { model, imaginary_coefficients: rows.iter().map(|r| r.1).collect(), diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn i() -> BiPoly {
        BiPoly::constant(G::i())
    }

    #[test]
    fn build_single_branch() {
        let m = LocalModel::from_ints(&[(1, &[1])]);
        let want = BiPoly::y().add(&BiPoly::x()).add(&i().mul(&BiPoly::x().pow(2)));
        assert_eq!(m.build_p(), want);
    }

    #[test]
    fn contact_matrix_of_three_branch_example() {
        let m = LocalModel::from_ints(&[(1, &[]), (4, &[1]), (2, &[])]);
        assert_eq!(m.contact_matrix(), vec![vec![2, 1, 2], vec![1, 8, 1], vec![2, 1, 4]]);
        assert_eq!(m.intersection_multiplicity(), 22);
    }

    #[test]
    fn json_round_trip() {
        let m = LocalModel::new(vec![BranchDatum::new(2, vec![rat(3, 2), rat(0, 1), rat(-1, 3)])]).unwrap();
        let s = m.to_json();
        assert_eq!(s, r#"{"branches":[{"L":2,"q":["3/2","0","-1/3"]}]}"#);
        assert_eq!(LocalModel::from_json(&s).unwrap(), m);
        let n = LocalModel::from_json(r#"{"branches":[{"L":1,"q":[1]}]}"#).unwrap();
        assert_eq!(n, LocalModel::from_ints(&[(1, &[1])]));
        assert!(LocalModel::from_json(r#"{"branches":[{"L":1,"q":[1,2]}]}"#).is_err());
    }

    #[test]
    fn extract_with_non_unit_imaginary_coefficient() {
        let p = BiPoly::y().add(&BiPoly::x()).add(&BiPoly::constant(G::new(rat(0, 1), rat(2, 1))).mul(&BiPoly::x().pow(2)));
        let e = extract_local_model(&p).unwrap();
        assert_eq!(e.model, LocalModel::from_ints(&[(1, &[1])]));
        assert!((e.imaginary_coefficients[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn extraction_rejects_common_factor_and_unstable() {
        let p = BiPoly::y().mul(&BiPoly::y().add(&i().mul(&BiPoly::x().pow(2))));
        assert_eq!(extract_local_model(&p), Err(ExtractError::CommonFactor));
        let bad = BiPoly::y().sub(&BiPoly::x()).sub(&i().mul(&BiPoly::x().pow(2)));
        assert!(matches!(extract_local_model(&bad), Err(ExtractError::NotStable { .. })));
        let probe = check_stability_sample(&bad, GridSpec::default());
        assert!(!probe.stable && probe.witness.is_some());
    }
}
