//! Numerical oracle for local `L^p` membership of `Q/P` at the origin.
//!
//! The box `max(|x|, |y|) < 2^{-k_0}` is cut into dyadic annuli
//! `2^{-k-1} <= max(|x|, |y|) < 2^{-k}` and each annulus integral `s_k` is
//! computed separately. Membership corresponds to geometric decay of
//! `s_k`, read off from the slope of `log2 s_k` over the deepest annuli.
//!
//! Near the origin `P` is tiny only in thin strips around the curves
//! `y = -q_j(x)`, of width about `|x|^{2L_j}`. For each distinct `q_j` the
//! numerator and denominator are re-expanded exactly in the shifted
//! variable `u = y + q_j(x)`, so that no cancellation happens in floating
//! point, and the `y` line is split into cells, one per strip.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use stablefrac_core::localmodel::{extract_local_model, ExtractError};
use stablefrac_core::{BiPoly, GaussianRational, LocalModel, Rational};
use thiserror::Error;

use crate::quad::{integrate, QuadError, QuadResult, Tolerance};

/// Relative error still good enough for a slope fit when the budget runs out.
const ACCEPTABLE_REL_ERROR: f64 = 1e-4;

fn integrate_lenient(f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult, QuadError> {
    match integrate(f, a, b, tol) {
        Err(QuadError::Budget { value, error }) if error <= ACCEPTABLE_REL_ERROR * value.abs() => {
            Ok(QuadResult { value, error, evals: tol.max_evals })
        }
        r => r,
    }
}

type C = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumVerifyError {
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("exponent must be positive")]
    Exponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NumVerdict {
    Converges,
    Diverges,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Params {
    pub k0: u32,
    pub k1: u32,
    /// Number of deepest annuli used for the slope fit.
    pub fit: usize,
    pub margin: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { k0: 2, k1: 15, fit: 6, margin: 0.1, rel_tol: 1e-7, max_evals: 60_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Annulus {
    pub k: u32,
    /// `log2 s_k`; `None` when the integral vanishes.
    pub log2_value: Option<f64>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub exponent: f64,
    pub annuli: Vec<Annulus>,
    pub slope: Option<f64>,
    pub residual: Option<f64>,
    pub verdict: NumVerdict,
    pub note: String,
}

/// Dense `Σ c[b][a] x^a u^b`.
#[derive(Clone, Debug)]
struct FramePoly {
    c: Vec<Vec<C>>,
}

impl FramePoly {
    fn new(p: &BiPoly) -> Self {
        let dy = p.deg_y().map_or(0, |d| d as usize + 1);
        let dx = p.deg_x().map_or(0, |d| d as usize + 1);
        let mut c = vec![vec![C::new(0.0, 0.0); dx]; dy];
        for (&(a, b), v) in p.terms() {
            let (re, im) = v.to_f64();
            c[b as usize][a as usize] = C::new(re, im);
        }
        FramePoly { c }
    }

    fn eval(&self, x: f64, u: f64) -> C {
        let mut acc = C::new(0.0, 0.0);
        for row in self.c.iter().rev() {
            let mut s = C::new(0.0, 0.0);
            for v in row.iter().rev() {
                s = s * x + v;
            }
            acc = acc * u + s;
        }
        acc
    }
}

fn eval_real(c: &[f64], x: f64) -> f64 {
    // c[k] is the coefficient of x^{k+1}
    c.iter().rev().fold(0.0, |acc, v| acc * x + v) * x
}

#[derive(Clone, Debug)]
struct Group {
    q: Vec<Rational>,
    qf: Vec<f64>,
    max_two_l: u32,
    num: FramePoly,
    den: FramePoly,
}

#[derive(Clone, Debug)]
enum Kind {
    Ratio,
    /// `|Im P_y/P| = Σ_i x^{2L_i} / |y + q_i + i x^{2L_i}|^2`; data are (group, 2L).
    Derivative(Vec<(usize, u32)>),
}

/// `|Q/P|^p` (or the derivative integrand) prepared in per-branch frames.
#[derive(Clone, Debug)]
pub struct LocalIntegrand {
    groups: Vec<Group>,
    diff: Vec<Vec<Vec<f64>>>,
    kind: Kind,
    exponent: f64,
}

fn group_data(m: &LocalModel) -> (Vec<(Vec<Rational>, u32)>, Vec<usize>) {
    let mut groups: Vec<(Vec<Rational>, u32)> = Vec::new();
    let mut of = Vec::new();
    for b in m.branches() {
        match groups.iter().position(|g| g.0 == b.q) {
            Some(g) => {
                groups[g].1 = groups[g].1.max(b.two_l());
                of.push(g);
            }
            None => {
                groups.push((b.q.clone(), b.two_l()));
                of.push(groups.len() - 1);
            }
        }
    }
    (groups, of)
}

fn rat_f64(r: &Rational) -> f64 {
    GaussianRational::real(r.clone()).to_f64().0
}

fn shift_frame(f: &BiPoly, q: &[Rational]) -> BiPoly {
    let mut s = BiPoly::y();
    for (k, c) in q.iter().enumerate() {
        s.add_term(k as u32 + 1, 0, &GaussianRational::real(-c));
    }
    f.substitute_y(&s)
}

impl LocalIntegrand {
    fn build(m: &LocalModel, q: &BiPoly, p: &BiPoly, kind_deriv: bool, exponent: f64) -> Self {
        let (gd, of) = group_data(m);
        let groups: Vec<Group> = gd
            .iter()
            .map(|(gq, l2)| Group {
                q: gq.clone(),
                qf: gq.iter().map(rat_f64).collect(),
                max_two_l: *l2,
                num: FramePoly::new(&shift_frame(q, gq)),
                den: FramePoly::new(&shift_frame(p, gq)),
            })
            .collect();
        let n = groups.len();
        let mut diff = vec![vec![Vec::new(); n]; n];
        for g in 0..n {
            for h in 0..n {
                let len = groups[g].q.len().max(groups[h].q.len());
                let get = |v: &[Rational], k: usize| v.get(k).cloned().unwrap_or_default();
                diff[g][h] = (0..len).map(|k| rat_f64(&(get(&groups[g].q, k) - get(&groups[h].q, k)))).collect();
            }
        }
        let kind = if kind_deriv {
            Kind::Derivative(m.branches().iter().zip(&of).map(|(b, &g)| (g, b.two_l())).collect())
        } else {
            Kind::Ratio
        };
        LocalIntegrand { groups, diff, kind, exponent }
    }

    /// `|Q/[P]|^p` for the model polynomial.
    pub fn from_model(q: &BiPoly, m: &LocalModel, exponent: f64) -> Self {
        Self::build(m, q, &m.build_p(), false, exponent)
    }

    /// `|Q/P|^p` for a general `P`; frames come from its extracted local model.
    pub fn from_polynomial(q: &BiPoly, p: &BiPoly, exponent: f64) -> Result<Self, NumVerifyError> {
        let m = extract_local_model(p)?.model;
        Ok(Self::build(&m, q, p, false, exponent))
    }

    /// `|Q/P|^p` with the strip geometry taken from `m`, which must describe
    /// the real zero strips of `P` (as it does for `P̄` when it describes `P`).
    pub fn with_geometry(q: &BiPoly, p: &BiPoly, m: &LocalModel, exponent: f64) -> Self {
        Self::build(m, q, p, false, exponent)
    }

    /// `|Im(P_y/P)|^p` for the model polynomial.
    pub fn derivative(m: &LocalModel, exponent: f64) -> Self {
        Self::build(m, &BiPoly::one(), &m.build_p(), true, exponent)
    }

    fn log_value(&self, g: usize, x: f64, u: f64) -> f64 {
        let e = self.exponent;
        match &self.kind {
            Kind::Ratio => {
                let grp = &self.groups[g];
                e * (grp.num.eval(x, u).norm().ln() - grp.den.eval(x, u).norm().ln())
            }
            Kind::Derivative(data) => {
                let mut s = 0.0;
                for &(h, l2) in data {
                    let w = x.abs().powi(l2 as i32);
                    let d = u + eval_real(&self.diff[h][g], x);
                    s += w / (d * d + w * w);
                }
                e * s.ln()
            }
        }
    }

    /// Groups sorted by center `-q_g(x)` with the gaps to the next center.
    fn cells(&self, x: f64) -> Vec<(usize, f64, f64)> {
        let mut order: Vec<usize> = (0..self.groups.len()).collect();
        order.sort_by(|&g, &h| {
            if g == h {
                return std::cmp::Ordering::Equal;
            }
            // center_g < center_h  iff  (q_g - q_h)(x) > 0
            0.0f64.total_cmp(&eval_real(&self.diff[g][h], x))
        });
        let mut out = Vec::with_capacity(order.len());
        for (k, &g) in order.iter().enumerate() {
            let lo = if k == 0 { f64::NEG_INFINITY } else { -0.5 * eval_real(&self.diff[order[k - 1]][g], x) };
            let hi = if k + 1 == order.len() { f64::INFINITY } else { 0.5 * eval_real(&self.diff[g][order[k + 1]], x) };
            out.push((g, lo, hi));
        }
        out
    }

    /// `ln ∫_{y0}^{y1} f(x, y) dy`.
    fn inner_log(&self, x: f64, y0: f64, y1: f64, tol: Tolerance) -> Result<f64, QuadError> {
        let mut parts = Vec::new();
        for (g, lo, hi) in self.cells(x) {
            let shift = eval_real(&self.groups[g].qf, x);
            let ulo = lo.max(y0 + shift);
            let uhi = hi.min(y1 + shift);
            if ulo >= uhi {
                continue;
            }
            let w = x.abs().powi(self.groups[g].max_two_l as i32).max(1e-300);
            let (s0, s1) = ((ulo / w).asinh(), (uhi / w).asinh());
            let lf = |s: f64| self.log_value(g, x, w * s.sinh()) + (w * s.cosh()).ln();
            let mut samples: Vec<f64> = (0..=20).map(|j| s0 + (s1 - s0) * j as f64 / 20.0).collect();
            samples.push(0.0f64.clamp(s0, s1));
            let scale = samples.iter().map(|&s| lf(s)).filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
            if !scale.is_finite() {
                continue;
            }
            let r = integrate_lenient(
                |s| {
                    let v = lf(s) - scale;
                    if v.is_nan() { 0.0 } else { v.exp() }
                },
                s0,
                s1,
                tol,
            )?;
            if r.value > 0.0 {
                parts.push(scale + r.value.ln());
            }
        }
        Ok(log_sum_exp(&parts))
    }

    /// Points in `(x0, x1)` where a strip center crosses a cut line `y = c`
    /// or two centers swap; the outer integrand changes abruptly there.
    fn breakpoints(&self, x0: f64, x1: f64, cuts: &[f64]) -> Vec<f64> {
        let mut fs: Vec<Box<dyn Fn(f64) -> f64 + '_>> = Vec::new();
        for g in &self.groups {
            for &c in cuts {
                fs.push(Box::new(move |x| c + eval_real(&g.qf, x)));
            }
        }
        for g in 0..self.groups.len() {
            for h in g + 1..self.groups.len() {
                fs.push(Box::new(move |x| eval_real(&self.diff[g][h], x)));
            }
        }
        const N: usize = 64;
        let mut out = Vec::new();
        for f in &fs {
            let xs: Vec<f64> = (0..=N).map(|j| x0 + (x1 - x0) * j as f64 / N as f64).collect();
            for w in xs.windows(2) {
                let (mut a, mut b) = (w[0], w[1]);
                let (fa, fb) = (f(a), f(b));
                if fa == 0.0 || fa.signum() == fb.signum() {
                    continue;
                }
                for _ in 0..80 {
                    let mid = 0.5 * (a + b);
                    if f(mid).signum() == fa.signum() {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                out.push(0.5 * (a + b));
            }
        }
        out.retain(|&x| x > x0 && x < x1);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (x1 - x0));
        out
    }

    /// `ln ∫∫` over `x ∈ [x0, x1]`, `y ∈ [y0, y1]`, with the log of the
    /// outer error estimate. Exhausting the outer budget is not an error
    /// here; the caller judges the accumulated error.
    fn rect_log(&self, x0: f64, x1: f64, y0: f64, y1: f64, params: &Params) -> Result<(f64, f64), QuadError> {
        let inner_tol = Tolerance { abs: 0.0, rel: params.rel_tol, max_evals: params.max_evals };
        let outer_tol = Tolerance { abs: 0.0, rel: params.rel_tol * 100.0, max_evals: 2000 };
        let mut edges = vec![x0];
        edges.extend(self.breakpoints(x0, x1, &[y0, y1]));
        edges.push(x1);
        let (mut parts, mut errs) = (Vec::new(), Vec::new());
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut scale = f64::NEG_INFINITY;
            for t in [1e-9, 0.01, 0.125, 0.25, 0.5, 0.75, 0.875, 0.99, 1.0 - 1e-9] {
                scale = scale.max(self.inner_log(a + (b - a) * t, y0, y1, inner_tol)?);
            }
            if !scale.is_finite() {
                continue;
            }
            let mut failure = None;
            let r = integrate(
                |x| match self.inner_log(x, y0, y1, inner_tol) {
                    Ok(v) => (v - scale).exp(),
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                a,
                b,
                outer_tol,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            let (value, error) = match r {
                Ok(r) => (r.value, r.error),
                Err(QuadError::Budget { value, error }) => (value, error),
                Err(e) => return Err(e),
            };
            if value > 0.0 {
                parts.push(scale + value.ln());
            }
            if error > 0.0 {
                errs.push(scale + error.ln());
            }
        }
        Ok((log_sum_exp(&parts), log_sum_exp(&errs)))
    }

    /// `log2 s_k` for the annulus `2^{-k-1} <= max(|x|, |y|) < 2^{-k}`.
    pub fn annulus(&self, k: u32, params: &Params) -> Annulus {
        let r = 0.5f64.powi(k as i32);
        let h = 0.5 * r;
        let rects = [(h, r, -r, r), (-r, -h, -r, r), (0.0, h, h, r), (0.0, h, -r, -h), (-h, 0.0, h, r), (-h, 0.0, -r, -h)];
        let (mut parts, mut errs) = (Vec::new(), Vec::new());
        for (x0, x1, y0, y1) in rects {
            match self.rect_log(x0, x1, y0, y1, params) {
                Ok((v, e)) => {
                    parts.push(v);
                    errs.push(e);
                }
                Err(_) => return Annulus { k, log2_value: None, ok: false },
            }
        }
        let v = log_sum_exp(&parts);
        if log_sum_exp(&errs) > v + ACCEPTABLE_REL_ERROR.ln() {
            return Annulus { k, log2_value: None, ok: false };
        }
        Annulus { k, log2_value: v.is_finite().then(|| v / std::f64::consts::LN_2), ok: true }
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Least-squares slope and RMS residual.
fn fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let res = (points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / n).sqrt();
    (slope, res)
}

/// Integrates over the annuli `k0..=k1` in parallel and classifies the decay.
pub fn integrate_local(f: &LocalIntegrand, params: &Params) -> ScalingReport {
    let annuli: Vec<Annulus> = (params.k0..=params.k1).into_par_iter().map(|k| f.annulus(k, params)).collect();
    classify(f.exponent, annuli, params)
}

fn classify(exponent: f64, annuli: Vec<Annulus>, params: &Params) -> ScalingReport {
    let report = |slope, residual, verdict, note: &str| ScalingReport {
        exponent,
        annuli: annuli.clone(),
        slope,
        residual,
        verdict,
        note: note.to_string(),
    };
    if annuli.iter().any(|a| !a.ok) {
        return report(None, None, NumVerdict::Inconclusive, "integration budget exhausted");
    }
    if annuli.iter().all(|a| a.log2_value.is_none()) {
        return report(None, None, NumVerdict::Converges, "integrand vanishes identically");
    }
    let tail: Vec<(f64, f64)> = annuli
        .iter()
        .rev()
        .take(params.fit)
        .filter_map(|a| a.log2_value.map(|v| (a.k as f64, v)))
        .collect();
    if tail.len() < 3 {
        return report(None, None, NumVerdict::Inconclusive, "too few nonzero annuli");
    }
    let (slope, res) = fit(&tail);
    // The last few steps must agree in sign with the fitted slope.
    let last: Vec<f64> = tail.windows(2).take(3).map(|w| w[0].1 - w[1].1).collect();
    let consistent = last.iter().all(|d| d.signum() == slope.signum());
    let verdict = if slope < -params.margin && consistent {
        NumVerdict::Converges
    } else if slope > params.margin && consistent {
        NumVerdict::Diverges
    } else {
        NumVerdict::Inconclusive
    };
    report(Some(slope), Some(res), verdict, "")
}

/// Oracle verdict for `Q/[P] ∈ L^p` with `[P]` built from the model.
pub fn oracle_membership(q: &BiPoly, m: &LocalModel, p: f64, params: &Params) -> Result<ScalingReport, NumVerifyError> {
    if p <= 0.0 || !p.is_finite() {
        return Err(NumVerifyError::Exponent);
    }
    Ok(integrate_local(&LocalIntegrand::from_model(q, m, p), params))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeProbe {
    pub expected: f64,
    pub reports: Vec<ScalingReport>,
    pub fitted_threshold: Option<f64>,
    pub flip_ok: bool,
}

/// Integrates `|Im(P_y/P)|^p` for `p` around `1 + 1/K`, checks the verdict
/// flips across it and fits the exponent where the decay slope vanishes.
pub fn derivative_probe(m: &LocalModel, params: &Params) -> DerivativeProbe {
    let expected = 1.0 + 1.0 / m.k_max() as f64;
    let ps = [expected - 0.2, expected - 0.1, expected + 0.1, expected + 0.2];
    let reports: Vec<ScalingReport> =
        ps.iter().map(|&p| integrate_local(&LocalIntegrand::derivative(m, p), params)).collect();
    let pts: Vec<(f64, f64)> = ps.iter().zip(&reports).filter_map(|(&p, r)| r.slope.map(|s| (p, s))).collect();
    let fitted_threshold = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let b = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        mx - my / b
    });
    let flip_ok = reports[1].verdict == NumVerdict::Converges && reports[2].verdict == NumVerdict::Diverges;
    DerivativeProbe { expected, reports, fitted_threshold, flip_ok }
}

#[cfg(test)]
mod tests {
    use super::*;
    use stablefrac_core::parse::parse_halfplane;

    fn quick() -> Params {
        Params { k0: 3, k1: 12, ..Params::default() }
    }

    #[test]
    fn single_branch_verdicts() {
        let p = parse_halfplane("y+x+2*i*x^2").unwrap();
        let one = BiPoly::one();
        let r = integrate_local(&LocalIntegrand::from_polynomial(&one, &p, 1.0).unwrap(), &quick());
        assert_eq!(r.verdict, NumVerdict::Converges, "{:?}", r);
        let r = integrate_local(&LocalIntegrand::from_polynomial(&one, &p, 2.0).unwrap(), &quick());
        assert_eq!(r.verdict, NumVerdict::Diverges, "{:?}", r);
        // slope of log2 s_k is -(3 - 2p)
        assert!((r.slope.unwrap() - 1.0).abs() < 0.05);
    }

    #[test]
    fn conjugate_symmetry() {
        let m = LocalModel::from_ints(&[(1, &[1]), (2, &[])]);
        let q = parse_halfplane("x+i*y").unwrap();
        let a = LocalIntegrand::from_model(&q, &m, 1.5).annulus(6, &quick());
        let f = LocalIntegrand::with_geometry(&q.reflect(), &m.build_p().reflect(), &m, 1.5).annulus(6, &quick());
        let (a, f) = (a.log2_value.unwrap(), f.log2_value.unwrap());
        assert!((a - f).abs() < 1e-6 * a.abs().max(1.0));
    }
}
