//! Cayley transfer from the bidisk at `(1, 1)` to the half-plane picture
//! at the origin: `z = (1 + ix)/(1 - ix)`, `w = (1 + iy)/(1 - iy)`.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{BiPoly, GaussianRational};
use crate::integrability::{membership_report, reduce_by_model, Exponent, MembershipReport};
use crate::localmodel::{extract_local_model, ExtractError, Extraction};

type G = GaussianRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransferError {
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferResult {
    #[serde(serialize_with = "ser_poly")]
    pub p_halfplane: BiPoly,
    pub bidegree: (u32, u32),
    pub unit_factor_note: String,
    pub vanishes_at_center: bool,
}

fn ser_poly<S: serde::Serializer>(p: &BiPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

fn binom_factor(plus: u32, minus: u32, var: BiPoly) -> BiPoly {
    let ivar = var.scale(&G::i());
    let one = BiPoly::one();
    one.add(&ivar).pow(plus).mul(&one.sub(&ivar).pow(minus))
}

/// `(1 - ix)^n (1 - iy)^m P(z(x), w(y))` with `(n, m)` the bidegree of `P`.
pub fn torus_to_halfplane(p_disk: &BiPoly) -> TransferResult {
    let n = p_disk.deg_x().unwrap_or(0);
    let m = p_disk.deg_y().unwrap_or(0);
    let mut out = BiPoly::zero();
    for (&(a, b), c) in p_disk.terms() {
        let t = binom_factor(a, n - a, BiPoly::x()).mul(&binom_factor(b, m - b, BiPoly::y()));
        out = out.add(&t.scale(c));
    }
    let total: G = p_disk.terms().fold(G::zero(), |acc, (_, c)| &acc + c);
    TransferResult {
        p_halfplane: out,
        bidegree: (n, m),
        unit_factor_note: format!("multiplied by (1-ix)^{} (1-iy)^{}, nonvanishing at the origin", n, m),
        vanishes_at_center: total.is_zero(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiskAnalysis {
    pub p: TransferResult,
    pub q: TransferResult,
    pub model: crate::localmodel::LocalModel,
    pub report: MembershipReport,
}

/// Transfers `P` and `Q`, extracts the local model of `P` at the origin and
/// tests `Q/P ∈ L^p` there. The cleared factors do not vanish at the point,
/// so local membership is unchanged.
pub fn analyze_disk(p_disk: &BiPoly, q_disk: &BiPoly, p: &Exponent) -> Result<DiskAnalysis, TransferError> {
    let tp = torus_to_halfplane(p_disk);
    let tq = torus_to_halfplane(q_disk);
    let Extraction { model, .. } = extract_local_model(&tp.p_halfplane)?;
    let q = reduce_by_model(&tq.p_halfplane, &model);
    let report = membership_report(&q, &model, p);
    Ok(DiskAnalysis { p: tp, q: tq, model, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrability::Verdict;
    use crate::parse::parse_expression;

    fn poly(s: &str) -> BiPoly {
        parse_expression(s).unwrap().poly
    }

    #[test]
    fn basic_transfers() {
        assert_eq!(torus_to_halfplane(&poly("2-z-w")).p_halfplane, poly("-2*i*(x+y-2*i*x*y)"));
        assert_eq!(torus_to_halfplane(&poly("1-z*w")).p_halfplane, poly("-2*i*(x+y)"));
        assert_eq!(torus_to_halfplane(&poly("1")).p_halfplane, BiPoly::one());
    }

    #[test]
    fn first_order_condition() {
        let p = poly("2-z-w");
        let member = |q: &str, e: Exponent| analyze_disk(&p, &poly(q), &e).unwrap().report.verdict == Verdict::Member;
        assert!(member("1", Exponent::int(1)));
        assert!(!member("1", Exponent::int(2)));
        assert!(member("1-z", Exponent::int(2)));
        assert!(!member("1-z", Exponent::int(3)));
        // equal first derivatives at (1, 1)
        assert!(member("(1-z)+(1-w)+(1-z)^2", Exponent::int(3)));
    }
}
