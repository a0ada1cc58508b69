use proptest::prelude::*;
use stablefrac_core::integrability::is_in_lp;
use stablefrac_core::parse::parse_halfplane;
use stablefrac_core::{BiPoly, Exponent, LocalModel};
use stablefrac_numeric::numverify::*;

fn params() -> Params {
    Params { k0: 3, k1: 13, ..Params::default() }
}

fn verdict(q: &str, m: &LocalModel, p: f64) -> NumVerdict {
    oracle_membership(&parse_halfplane(q).unwrap(), m, p, &params()).unwrap().verdict
}

#[test]
fn one_branch_examples() {
    let m = LocalModel::from_ints(&[(1, &[1])]);
    assert_eq!(verdict("1", &m, 1.0), NumVerdict::Converges);
    assert_eq!(verdict("1", &m, 1.4), NumVerdict::Converges);
    assert_eq!(verdict("1", &m, 2.0), NumVerdict::Diverges);
    assert_eq!(verdict("x", &m, 2.5), NumVerdict::Converges);
    assert_eq!(verdict("x", &m, 10.0), NumVerdict::Diverges);
}

#[test]
fn general_polynomial_input() {
    let p = parse_halfplane("y+x+2*i*x^2").unwrap();
    let f = LocalIntegrand::from_polynomial(&BiPoly::one(), &p, 2.0).unwrap();
    assert_eq!(integrate_local(&f, &params()).verdict, NumVerdict::Diverges);
}

#[test]
fn power_family_threshold() {
    // Q = x^j over y + 2i x^2 is in L^p exactly when j > 2 - 3/p.
    let m = LocalModel::from_ints(&[(1, &[])]);
    for j in 0..3 {
        for p in [1.0, 1.25, 2.0, 4.0, 8.0] {
            let crit: f64 = 2.0 - 3.0 / p;
            if (j as f64 - crit).abs() * p < 0.3 {
                continue;
            }
            let want = if (j as f64) > crit { NumVerdict::Converges } else { NumVerdict::Diverges };
            assert_eq!(verdict(&format!("x^{j}"), &m, p), want, "j={j} p={p}");
        }
    }
}

#[test]
fn constructed_member_two_branches() {
    // x F_1 + x^2 F_2 with F_1 = y + x - x^3, F_2 = 1 for (y+x+ix^2)(y+2x+ix^2).
    let m = LocalModel::from_ints(&[(1, &[1]), (1, &[2])]);
    let q = parse_halfplane("x*(y+x-x^3)+x^2").unwrap();
    assert!(is_in_lp(&q, &m, &Exponent::int(2)));
    assert_eq!(verdict("x*(y+x-x^3)+x^2", &m, 2.0), NumVerdict::Converges);
}

#[test]
fn derivative_flips() {
    for (m, want) in [(LocalModel::from_ints(&[(1, &[1])]), 1.5), (LocalModel::from_ints(&[(1, &[]), (2, &[])]), 1.25)] {
        let d = derivative_probe(&m, &params());
        assert!(d.flip_ok, "{d:?}");
        assert!((d.fitted_threshold.unwrap() - want).abs() < 0.1);
    }
}

#[test]
fn report_serializes() {
    let m = LocalModel::from_ints(&[(1, &[])]);
    let r = oracle_membership(&BiPoly::one(), &m, 1.0, &params()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["annuli"].as_array().unwrap().len(), 11);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn conjugation_symmetry(c in -2i64..=2, k in 0u32..3, l in 1u32..3) {
        let m = LocalModel::from_ints(&[(l, &[c])]);
        let q = parse_halfplane(&format!("x^{k} + i*y")).unwrap();
        let p = m.build_p();
        let a = integrate_local(&LocalIntegrand::from_polynomial(&q, &p, 1.5).unwrap(), &params());
        let b = integrate_local(&LocalIntegrand::with_geometry(&q.reflect(), &p.reflect(), &m, 1.5), &params());
        for (x, y) in a.annuli.iter().zip(&b.annuli) {
            let (x, y) = (x.log2_value.unwrap(), y.log2_value.unwrap());
            // equal integrals within 1e-6 relative
            prop_assert!(((x - y) * std::f64::consts::LN_2).abs() < 1e-6);
        }
    }
}
