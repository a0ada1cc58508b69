mod common;

use common::{exponents, model_strategy, numerator_strategy};
use proptest::prelude::*;
use stablefrac_core::branches::{find_proper_t_with, membership_via_branches, BranchError};
use stablefrac_core::integrability::{dim_ip_quotient, is_in_linfty, is_in_lp, product_ideal_membership};
use stablefrac_core::quotient::{
    integrability_basis, membership_via_coordinates, quotient_basis, reduce_mod_ideal, reduction_truncation, relabel_for_p,
    QuotientError,
};
use stablefrac_core::{BiPoly, Exponent, LocalModel, Series};

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn dim_at_two_is_half_the_multiplicity(m in model_strategy(4, 4)) {
        prop_assert_eq!(2 * dim_ip_quotient(&m, &Exponent::int(2)), m.intersection_multiplicity() as u64);
    }

    #[test]
    fn dim_is_monotone_and_stabilizes(m in model_strategy(4, 4)) {
        let ps = exponents();
        for w in ps.windows(2) {
            prop_assert!(dim_ip_quotient(&m, &w[0]) >= dim_ip_quotient(&m, &w[1]));
        }
        let k1 = Exponent::int(m.k_max() as i64 + 1);
        prop_assert_eq!(dim_ip_quotient(&m, &k1), dim_ip_quotient(&m, &Exponent::Infinity));
    }

    #[test]
    fn dim_matches_rank_oracle(m in model_strategy(3, 3), pi in 0usize..6) {
        let p = &exponents()[pi];
        prop_assert_eq!(dim_ip_quotient(&m, p), common::dim_by_rank(&m, p));
    }

    #[test]
    fn membership_is_monotone((m, q) in model_strategy(3, 3).prop_flat_map(numerator_strategy)) {
        let ps = exponents();
        for w in ps.windows(2) {
            if is_in_lp(&q, &m, &w[1]) {
                prop_assert!(is_in_lp(&q, &m, &w[0]));
            }
        }
    }

    #[test]
    fn relabel_is_a_permutation(m in model_strategy(4, 4), pi in 0usize..6) {
        let mut s = relabel_for_p(&m, &exponents()[pi]);
        s.sort();
        prop_assert_eq!(s, (0..m.len()).collect::<Vec<_>>());
    }

    #[test]
    fn product_ideal_matches_boundedness((m, q) in model_strategy(3, 3).prop_flat_map(numerator_strategy)) {
        prop_assert_eq!(product_ideal_membership(&q, &m), is_in_linfty(&q, &m));
    }
}

fn three_way(m: &LocalModel, q: &stablefrac_core::BiPoly, p: &Exponent) -> Result<(bool, bool, bool), String> {
    let mut n = reduction_truncation(m);
    for _ in 0..3 {
        let direct = is_in_lp(q, m, p);
        let cert = match find_proper_t_with(m, 0, 32, n) {
            Ok(c) => c,
            Err(e) => return Err(e.to_string()),
        };
        let via_b = membership_via_branches(q, m, p, &cert);
        let via_c = membership_via_coordinates(q, m, p, None, n);
        match (via_b, via_c) {
            (Ok(b), Ok(c)) => return Ok((direct, b, c)),
            (Err(BranchError::Inconclusive(_)), _) | (_, Err(QuotientError::Inconclusive(_))) => n *= 2,
            (Err(e), _) => return Err(e.to_string()),
            (_, Err(e)) => return Err(e.to_string()),
        }
    }
    Err("still inconclusive".into())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn three_way_equivalence((m, q) in model_strategy(3, 2).prop_flat_map(numerator_strategy), pi in 0usize..6) {
        let p = &exponents()[pi];
        let (a, b, c) = three_way(&m, &q, p).map_err(TestCaseError::fail)?;
        prop_assert_eq!(a, b);
        prop_assert_eq!(a, c);
    }

    #[test]
    fn basis_cardinality_and_dimension(m in model_strategy(3, 2), pi in 0usize..6) {
        let p = &exponents()[pi];
        let n = reduction_truncation(&m);
        let ib = integrability_basis(&m, p, None, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(ib.basis.dim() as u32, m.intersection_multiplicity());
        prop_assert_eq!(ib.len() as u64, dim_ip_quotient(&m, p));
        for k in 0..ib.lower.len() {
            prop_assert!(ib.lower[k] <= ib.upper[k]);
        }
    }

    #[test]
    fn basis_elements_reduce_to_unit_vectors(m in model_strategy(3, 2)) {
        let n = reduction_truncation(&m);
        let cert = find_proper_t_with(&m, 0, 32, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let qb = quotient_basis(&m, &cert.t, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for k in 1..=m.len() {
            // Truncations of F_k differ from F_k by a multiple of x^n, which lies in (P, P̄).
            let Some(fk) = qb.f_exact(k) else { return Ok(()) };
            let mut poly = BiPoly::zero();
            for (yb, c) in fk.coeffs().iter().enumerate() {
                for (xa, v) in c.coeffs().iter().enumerate() {
                    poly.add_term(xa as u32, yb as u32, v);
                }
            }
            let c = reduce_mod_ideal(&poly, &qb).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let c = c.exact().unwrap();
            for (j, cj) in c.iter().enumerate() {
                let want = if j + 1 == k { Series::one(cj.prec()) } else { Series::zero(cj.prec()) };
                prop_assert_eq!(cj, &want);
            }
        }
    }
}
