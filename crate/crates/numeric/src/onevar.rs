//! One-variable facts for a monic polynomial `p = A + iB` with no zeros in
//! the closed upper half-plane: real interlacing zeros, the quadrature
//! identity, the reproducing kernel and the `L^p` sampling inequalities.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use stablefrac_core::algebra::numroots::complex_roots;
use thiserror::Error;

use crate::quad::{integrate, integrate_real_line, QuadError, Tolerance};

type C = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OnevarError {
    #[error("polynomial has a zero at {re} + {im}i in the closed upper half-plane")]
    NotStable1D { re: f64, im: f64 },
    #[error("polynomial must have degree at least 1")]
    Degree,
    #[error("real zeros are not simple (gap {0:e})")]
    NotSimple(f64),
    #[error("integration failed: {0}")]
    IntegrationFailure(#[from] QuadError),
    #[error("degree condition violated: {0}")]
    DegreeCondition(String),
}

/// Evaluates `Σ c_k y^k`.
pub fn horner<T>(c: &[T], y: T) -> T
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Add<Output = T> + Default,
{
    c.iter().rev().fold(T::default(), |acc, &a| acc * y + a)
}

fn deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).collect()
}

fn trim(mut c: Vec<f64>) -> Vec<f64> {
    while c.last().is_some_and(|v| *v == 0.0) {
        c.pop();
    }
    c
}

/// Monic polynomial without zeros in the closed upper half-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct StablePoly {
    coeffs: Vec<C>,
}

impl StablePoly {
    /// Normalizes to monic and checks every root has negative imaginary part.
    pub fn new(coeffs: &[C]) -> Result<Self, OnevarError> {
        let mut c = coeffs.to_vec();
        while c.last().is_some_and(|z| z.norm() == 0.0) {
            c.pop();
        }
        if c.len() < 2 {
            return Err(OnevarError::Degree);
        }
        let lead = *c.last().expect("nonempty");
        let c: Vec<C> = c.iter().map(|z| z / lead).collect();
        let scale = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for r in complex_roots(&c) {
            if r.im >= -1e-12 * scale {
                return Err(OnevarError::NotStable1D { re: r.re, im: r.im });
            }
        }
        Ok(StablePoly { coeffs: c })
    }

    pub fn from_roots(roots: &[C]) -> Result<Self, OnevarError> {
        let mut c = vec![C::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![C::new(0.0, 0.0); c.len() + 1];
            for (k, v) in c.iter().enumerate() {
                next[k + 1] += v;
                next[k] -= v * r;
            }
            c = next;
        }
        Self::new(&c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn eval(&self, y: C) -> C {
        horner(&self.coeffs, y)
    }

    /// `p̄(y) = conj(p(conj y))`.
    pub fn eval_reflected(&self, y: C) -> C {
        self.eval(y.conj()).conj()
    }

    fn deriv_c(&self) -> Vec<C> {
        self.coeffs.iter().enumerate().skip(1).map(|(k, v)| v * k as f64).collect()
    }

    pub fn a(&self) -> Vec<f64> {
        self.coeffs.iter().map(|z| z.re).collect()
    }

    pub fn b(&self) -> Vec<f64> {
        trim(self.coeffs.iter().map(|z| z.im).collect())
    }

    /// `A + tB`.
    pub fn a_plus_tb(&self, t: f64) -> Vec<f64> {
        self.coeffs.iter().map(|z| z.re + t * z.im).collect()
    }
}

/// Real roots of a real polynomial known to have only simple real zeros:
/// companion eigenvalues followed by Newton polishing.
pub fn real_simple_roots(c: &[f64]) -> Result<Vec<f64>, OnevarError> {
    let c = trim(c.to_vec());
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        comp[(0, k)] = -c[n - 1 - k] / lead;
        if k + 1 < n {
            comp[(k + 1, k)] = 1.0;
        }
    }
    let dc = deriv(&c);
    let mut roots: Vec<f64> = comp
        .complex_eigenvalues()
        .iter()
        .map(|z| {
            let mut y = z.re;
            for _ in 0..60 {
                let d = horner(&dc, y);
                if d == 0.0 {
                    break;
                }
                let step = horner(&c, y) / d;
                y -= step;
                if step.abs() <= 1e-17 * (1.0 + y.abs()) {
                    break;
                }
            }
            y
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    let scale = 1.0 + roots.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let gap = roots.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if gap <= 1e-9 * scale {
        return Err(OnevarError::NotSimple(gap));
    }
    Ok(roots)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureData {
    pub t: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Nodes `a_j(t)` (zeros of `A + tB`) and weights `1/(B(a_j)(A'(a_j) + tB'(a_j)))`.
pub fn quadrature(p: &StablePoly, t: f64) -> Result<QuadratureData, OnevarError> {
    let f = p.a_plus_tb(t);
    let df = deriv(&f);
    let b = p.b();
    let nodes = real_simple_roots(&f)?;
    let weights = nodes.iter().map(|&a| 1.0 / (horner(&b, a) * horner(&df, a))).collect();
    Ok(QuadratureData { t, nodes, weights })
}

fn breakpoints(p: &StablePoly, nodes: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = nodes.to_vec();
    for r in complex_roots(p.coeffs()) {
        b.push(r.re);
        b.push(r.re - r.im.abs());
        b.push(r.re + r.im.abs());
    }
    b
}

/// `∫_R |f|^e dy/π` for `f = num/p`.
fn lp_integral<F: Fn(f64) -> C>(num: F, p: &StablePoly, e: f64, breaks: &[f64]) -> Result<f64, OnevarError> {
    let tol = Tolerance { abs: 0.0, rel: 1e-12, max_evals: 400_000 };
    let r = integrate_real_line(|y| (num(y) / p.eval(C::new(y, 0.0))).norm().powf(e), breaks, tol)?;
    Ok(r.value / std::f64::consts::PI)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParsevalReport {
    pub integral: f64,
    pub sum: f64,
    pub pass: bool,
}

/// `∫ |Q/p|^2 dy/π` against `Σ |Q(a_j)|^2 w_j`.
pub fn parseval_check(q: &[C], p: &StablePoly, t: f64, tol: f64) -> Result<ParsevalReport, OnevarError> {
    if q.len() > p.degree() {
        return Err(OnevarError::DegreeCondition("deg Q < deg p".into()));
    }
    let qd = quadrature(p, t)?;
    let sum: f64 = qd.nodes.iter().zip(&qd.weights).map(|(&a, &w)| horner(q, C::new(a, 0.0)).norm_sqr() * w).sum();
    let integral = lp_integral(|y| horner(q, C::new(y, 0.0)), p, 2.0, &breakpoints(p, &qd.nodes))?;
    Ok(ParsevalReport { integral, sum, pass: (integral - sum).abs() <= tol * (1.0 + sum.abs()) })
}

/// Largest deviation of `Q(y) - Σ Q(a_j)/(A'+tB')(a_j) · (A+tB)(y)/(y - a_j)`.
pub fn representation_check(q: &[C], p: &StablePoly, t: f64, samples: &[f64]) -> Result<f64, OnevarError> {
    let qd = quadrature(p, t)?;
    let f = p.a_plus_tb(t);
    let df = deriv(&f);
    let mut worst = 0.0f64;
    for &y in samples {
        let mut s = C::new(0.0, 0.0);
        for &a in &qd.nodes {
            let ratio = if (y - a).abs() < 1e-9 { horner(&df, a) } else { horner(&f, y) / (y - a) };
            s += horner(q, C::new(a, 0.0)) / horner(&df, a) * ratio;
        }
        worst = worst.max((horner(q, C::new(y, 0.0)) - s).norm());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterlacingReport {
    pub nodes: Vec<f64>,
    pub b_zeros: Vec<f64>,
    pub interlaced: bool,
    pub min_wronskian: f64,
    pub holds: bool,
}

/// Zeros of `A + tB` and `B` are simple, real and strictly interlace, and
/// `B A' - A B' > 0` on a sample grid.
pub fn interlacing_check(p: &StablePoly, t: f64) -> Result<InterlacingReport, OnevarError> {
    let f = p.a_plus_tb(t);
    let b = p.b();
    let nodes = real_simple_roots(&f)?;
    let bz = real_simple_roots(&b)?;
    let interlaced = bz.len() + 1 == nodes.len() && bz.iter().enumerate().all(|(k, &z)| nodes[k] < z && z < nodes[k + 1]);
    let (a, da, db) = (p.a(), deriv(&p.a()), deriv(&b));
    let lo = nodes.first().copied().unwrap_or(0.0) - 2.0;
    let hi = nodes.last().copied().unwrap_or(0.0) + 2.0;
    let min_wronskian = (0..=400)
        .map(|k| lo + (hi - lo) * k as f64 / 400.0)
        .map(|y| horner(&b, y) * horner(&da, y) - horner(&a, y) * horner(&db, y))
        .fold(f64::INFINITY, f64::min);
    Ok(InterlacingReport { nodes, b_zeros: bz, interlaced, min_wronskian, holds: interlaced && min_wronskian > 0.0 })
}

/// `K(y, η) = (p(y) conj p(η) - p̄(y) conj p̄(η)) / (-2i (y - conj η))`, with
/// the derivative form on the diagonal `y = conj η`.
pub fn kernel_eval(p: &StablePoly, y: C, eta: C) -> C {
    let two_i = C::new(0.0, -2.0);
    let d = y - eta.conj();
    let scale = 1.0 + y.norm() + eta.norm();
    if d.norm() > 1e-7 * scale {
        return (p.eval(y) * p.eval(eta).conj() - p.eval_reflected(y) * p.eval_reflected(eta).conj()) / (two_i * d);
    }
    let dp = p.deriv_c();
    let dpr = |z: C| horner(&dp, z.conj()).conj();
    (horner(&dp, y) * p.eval(eta).conj() - dpr(y) * p.eval_reflected(eta).conj()) / two_i
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingReport {
    pub exponent: f64,
    pub norm: f64,
    pub sampled: f64,
    pub upper_bound: f64,
    pub lower_factor: Option<f64>,
    pub upper_holds: bool,
    pub lower_holds: bool,
}

/// `‖(A + tB)/((· - a_j) p)‖` in `L^e(dy/π)`; `e = ∞` samples the sup norm.
fn i_norm(p: &StablePoly, f: &[f64], a: f64, e: f64, breaks: &[f64]) -> Result<f64, OnevarError> {
    let df = deriv(f);
    let num = |y: f64| {
        let v = if (y - a).abs() < 1e-10 { horner(&df, a) } else { horner(f, y) / (y - a) };
        C::new(v, 0.0)
    };
    if e.is_infinite() {
        let lo = breaks.iter().copied().fold(f64::INFINITY, f64::min) - 10.0;
        let hi = breaks.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 10.0;
        let g = |y: f64| (num(y) / p.eval(C::new(y, 0.0))).norm();
        let n = 20_000;
        let (mut best, mut arg) = (0.0f64, lo);
        for k in 0..=n {
            let y = lo + (hi - lo) * k as f64 / n as f64;
            if g(y) > best {
                best = g(y);
                arg = y;
            }
        }
        // Golden-section refinement around the best grid point.
        let h = (hi - lo) / n as f64;
        let (mut l, mut r) = (arg - h, arg + h);
        let phi = 0.618_033_988_749_895;
        for _ in 0..80 {
            let m1 = r - phi * (r - l);
            let m2 = l + phi * (r - l);
            if g(m1) > g(m2) {
                r = m2;
            } else {
                l = m1;
            }
        }
        return Ok(best.max(g(0.5 * (l + r))));
    }
    Ok(lp_integral(num, p, e, breaks)?.powf(1.0 / e))
}

/// Both inequalities of the `L^p`–`ℓ^p` sampling bounds for `1 < e < ∞`, or
/// their `e = 1` versions on `(-δ, δ)` (lower bound only when `deg Q <= M - 2`).
pub fn sampling_bounds_check(q: &[C], p: &StablePoly, e: f64, t: f64, delta: f64) -> Result<SamplingReport, OnevarError> {
    let m = p.degree();
    if q.len() > m {
        return Err(OnevarError::DegreeCondition("deg Q < deg p".into()));
    }
    let qd = quadrature(p, t)?;
    let f = p.a_plus_tb(t);
    let df = deriv(&f);
    let b = p.b();
    let breaks = breakpoints(p, &qd.nodes);
    let rel = 1e-7;
    let qv: Vec<f64> = qd.nodes.iter().map(|&a| (horner(q, C::new(a, 0.0)) / horner(&df, a)).norm()).collect();
    if e == 1.0 {
        let tol = Tolerance { abs: 0.0, rel: 1e-12, max_evals: 400_000 };
        let l1 = |g: &dyn Fn(f64) -> f64, lo: f64, hi: f64| integrate(g, lo, hi, tol).map(|r| r.value / std::f64::consts::PI);
        let mut ideltas = Vec::new();
        for &a in &qd.nodes {
            let g = |y: f64| {
                let v = if (y - a).abs() < 1e-10 { horner(&df, a) } else { horner(&f, y) / (y - a) };
                v.abs() / p.eval(C::new(y, 0.0)).norm()
            };
            ideltas.push(l1(&g, -delta, delta)?);
        }
        let qp = |y: f64| (horner(q, C::new(y, 0.0)) / p.eval(C::new(y, 0.0))).norm();
        let norm_local = l1(&qp, -delta, delta)?;
        let sampled: f64 = qv.iter().zip(&ideltas).map(|(v, i)| v * i).sum();
        let upper_holds = norm_local <= sampled * (1.0 + rel) + 1e-14;
        let (lower_factor, lower_holds) = if q.len() < m || q.iter().all(|c| c.norm() == 0.0) {
            let norm = lp_integral(|y| horner(q, C::new(y, 0.0)), p, 1.0, &breaks)?;
            let mut factor = 0.0;
            for (k, &a) in qd.nodes.iter().enumerate() {
                let iinf = i_norm(p, &f, a, f64::INFINITY, &breaks)?;
                factor += (horner(&b, a) / horner(&df, a)).abs() * iinf * ideltas[k];
            }
            (Some(factor), sampled <= norm * factor * (1.0 + rel) + 1e-14)
        } else {
            (None, true)
        };
        return Ok(SamplingReport { exponent: e, norm: norm_local, sampled, upper_bound: sampled, lower_factor, lower_holds, upper_holds });
    }
    let ep = e / (e - 1.0);
    let norm = lp_integral(|y| horner(q, C::new(y, 0.0)), p, e, &breaks)?.powf(1.0 / e);
    let mut ip = Vec::new();
    let mut ipp = Vec::new();
    for &a in &qd.nodes {
        ip.push(i_norm(p, &f, a, e, &breaks)?);
        ipp.push(i_norm(p, &f, a, ep, &breaks)?);
    }
    let sampled = qv.iter().zip(&ip).map(|(v, i)| (v * i).powf(e)).sum::<f64>().powf(1.0 / e);
    let upper_bound = (m as f64).powf(1.0 / ep) * sampled;
    let factor = qd
        .nodes
        .iter()
        .enumerate()
        .map(|(k, &a)| ((horner(&b, a) / horner(&df, a)).abs() * ip[k] * ipp[k]).powf(e))
        .sum::<f64>()
        .powf(1.0 / e);
    Ok(SamplingReport {
        exponent: e,
        norm,
        sampled,
        upper_bound,
        lower_factor: Some(factor),
        upper_holds: norm <= upper_bound * (1.0 + rel) + 1e-14,
        lower_holds: sampled <= norm * factor * (1.0 + rel) + 1e-14,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn linear_case() {
        let p = StablePoly::new(&[c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        for t in [0.0, 1.5, -3.0] {
            let q = quadrature(&p, t).unwrap();
            assert!((q.nodes[0] + t).abs() < 1e-14);
            assert!((q.weights[0] - 1.0).abs() < 1e-14);
        }
        assert!((kernel_eval(&p, c(0.3, 0.2), c(-1.0, 2.0)) - c(1.0, 0.0)).norm() < 1e-14);
        assert!((kernel_eval(&p, c(0.0, 1.0), c(0.0, 1.0)) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn double_root_case() {
        let p = StablePoly::from_roots(&[c(0.0, -1.0), c(0.0, -1.0)]).unwrap();
        let q = quadrature(&p, 0.0).unwrap();
        assert!((q.nodes[0] + 1.0).abs() < 1e-12 && (q.nodes[1] - 1.0).abs() < 1e-12);
        assert!(q.weights.iter().all(|w| (w - 0.25).abs() < 1e-12));
        let r = parseval_check(&[c(1.0, 0.0)], &p, 0.0, 1e-8).unwrap();
        assert!((r.integral - 0.5).abs() < 1e-9 && r.pass);
    }

    #[test]
    fn rejects_unstable() {
        assert!(matches!(StablePoly::new(&[c(0.0, -1.0), c(1.0, 0.0)]), Err(OnevarError::NotStable1D { .. })));
    }
}
