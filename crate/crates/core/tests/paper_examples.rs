mod common;

use stablefrac_core::algebra::rat;
use stablefrac_core::branches::{find_proper_t, is_proper, verify_bvanish, BranchError};
use stablefrac_core::integrability::{dim_ip_quotient, is_in_lp, lp_threshold, order_on_datum, Order};
use stablefrac_core::parse::parse_halfplane;
use stablefrac_core::quotient::{integrability_basis, membership_via_coordinates, quotient_basis, reduction_truncation};
use stablefrac_core::{Exponent, LocalModel};

fn pexample() -> LocalModel {
    LocalModel::from_ints(&[(1, &[]), (4, &[1]), (2, &[])])
}

#[test]
fn single_branch_thresholds() {
    let m = LocalModel::from_ints(&[(1, &[1])]);
    let one = parse_halfplane("1").unwrap();
    let x = parse_halfplane("x").unwrap();
    for (q, p, want) in [
        (&one, "1", true),
        (&one, "7/5", true),
        (&one, "3/2", false),
        (&one, "2", false),
        (&x, "3/2", true),
        (&x, "29/10", true),
        (&x, "3", false),
        (&x, "10", false),
    ] {
        assert_eq!(is_in_lp(q, &m, &p.parse().unwrap()), want, "Q={} p={}", q, p);
    }
    assert_eq!(lp_threshold(&one, &m).p_star, Some(rat(3, 2)));
    assert_eq!(lp_threshold(&x, &m).p_star, Some(rat(3, 1)));
}

#[test]
fn order_golden_values() {
    let q = parse_halfplane("(y+x+x^2+i*x^4)*(y+x+i*x^4)").unwrap();
    let xq = [rat(1, 1)];
    let got: Vec<Order> = [3, 4, 2, 1].iter().map(|&n| order_on_datum(n, &xq, &q)).collect();
    assert_eq!(got, vec![Order::Finite(5), Order::Finite(6), Order::Finite(4), Order::Finite(2)]);
}

#[test]
fn pexample_dimensions() {
    let m = pexample();
    assert_eq!(m.intersection_multiplicity(), 22);
    assert_eq!(dim_ip_quotient(&m, &Exponent::int(3)), 7);
    assert_eq!(dim_ip_quotient(&m, &Exponent::Infinity), 4);
    assert_eq!(dim_ip_quotient(&m, &Exponent::int(2)), 11);
    // The sum formula gives 5 + 8 + 3 at p = 5/4 and the rank oracle agrees.
    assert_eq!(dim_ip_quotient(&m, &Exponent::ratio(5, 4)), 16);
    for p in ["5/4", "3", "2", "inf"] {
        let p: Exponent = p.parse().unwrap();
        assert_eq!(common::dim_by_rank(&m, &p), dim_ip_quotient(&m, &p), "p = {}", p);
    }
}

#[test]
fn pexample_bases() {
    let m = pexample();
    let n = reduction_truncation(&m);
    let ib = integrability_basis(&m, &Exponent::ratio(5, 4), None, n).unwrap();
    assert_eq!(ib.permutation, vec![0, 1, 2]);
    assert_eq!(ib.lower, vec![0, 2, 4]);
    assert_eq!(ib.upper, vec![5, 10, 7]);
    let ib = integrability_basis(&m, &Exponent::int(3), None, n).unwrap();
    assert_eq!(ib.permutation, vec![0, 2, 1]);
    assert_eq!(ib.len(), 7);
}

#[test]
fn easy2branch_conditions() {
    let m = LocalModel::from_ints(&[(1, &[1]), (1, &[2])]);
    assert_eq!(m.intersection_multiplicity(), 6);
    let n = reduction_truncation(&m);
    let t = rat(0, 1);
    assert_eq!(quotient_basis(&m, &t, n).unwrap().m(), &[3, 3]);
    let p2 = Exponent::int(2);
    let ib = integrability_basis(&m, &p2, Some(&t), n).unwrap();
    assert_eq!(ib.lower, vec![1, 2]);
    // c_1 = 1 violates Ord c_1 >= 1; c_2 = x violates Ord c_2 >= 2.
    for (q, want) in [("x*(y+2*x)", true), ("y+2*x", false), ("x^2", true), ("x", false)] {
        let qp = parse_halfplane(q).unwrap();
        assert_eq!(membership_via_coordinates(&qp, &m, &p2, Some(&t), n).unwrap(), want, "{}", q);
        assert_eq!(is_in_lp(&qp, &m, &p2), want, "{}", q);
    }
}

#[test]
fn exex_proper_parameter() {
    let m = LocalModel::from_ints(&[(1, &[1]), (2, &[1])]);
    assert!(matches!(is_proper(&m, &rat(0, 1), 8), Err(BranchError::NotProper { .. })));
    let cert = is_proper(&m, &rat(1, 1), 8).unwrap();
    let a = cert.branches.exact().unwrap();
    // (y + x + t x^2 + (t + 1/t) x^4)(y + x - x^4/t) at t = 1
    assert_eq!(a[0][..5], [rat(0, 1), rat(-1, 1), rat(-1, 1), rat(0, 1), rat(-2, 1)]);
    assert_eq!(a[1][..5], [rat(0, 1), rat(-1, 1), rat(0, 1), rat(0, 1), rat(1, 1)]);
}

#[test]
fn b_orders_along_branches() {
    let m = LocalModel::from_ints(&[(1, &[]), (2, &[])]);
    let cert = find_proper_t(&m, 0, 32).unwrap();
    let o = verify_bvanish(&m, &cert).unwrap();
    assert_eq!(o, vec![(4, 2), (6, 2)]);
    let m = LocalModel::from_ints(&[(1, &[1]), (1, &[2])]);
    let cert = is_proper(&m, &rat(0, 1), 10).unwrap();
    assert_eq!(verify_bvanish(&m, &cert).unwrap(), vec![(3, 1), (3, 1)]);
}
