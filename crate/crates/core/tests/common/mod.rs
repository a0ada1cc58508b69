#![allow(dead_code)]

use num_traits::{One, Zero};
use proptest::prelude::*;
use stablefrac_core::algebra::rat;
use stablefrac_core::integrability::required_order;
use stablefrac_core::{BiPoly, BranchDatum, Exponent, GaussianRational, LocalModel, Rational};

pub fn model_strategy(max_m: usize, max_l: u32) -> impl Strategy<Value = LocalModel> {
    let datum = (1..=max_l, prop::collection::vec((-2i64..=2, 1i64..=2), 0..6)).prop_map(|(l, q)| {
        let q: Vec<Rational> = q.into_iter().take(2 * l as usize - 1).map(|(n, d)| rat(n, d)).collect();
        BranchDatum::new(l, q)
    });
    prop::collection::vec(datum, 1..=max_m).prop_map(|b| LocalModel::new(b).unwrap())
}

/// Numerators mixing products of model factors, powers of `x` and noise, so
/// that both verdicts occur.
pub fn numerator_strategy(m: LocalModel) -> impl Strategy<Value = (LocalModel, BiPoly)> {
    let n = m.len();
    (
        prop::collection::vec(any::<bool>(), n),
        0u32..6,
        prop::collection::vec(((0u32..4, 0u32..3), -2i64..=2), 0..3),
    )
        .prop_map(move |(mask, k, noise)| {
            let mut q = BiPoly::monomial(GaussianRational::one(), k, 0);
            for (j, b) in m.branches().iter().enumerate() {
                if mask[j] {
                    q = q.mul(&BiPoly::y().add(&b.q_poly()));
                }
            }
            for ((a, b), c) in noise {
                q.add_term(a + k + 2, b, &GaussianRational::from_int(c));
            }
            (m.clone(), q)
        })
}

pub fn exponents() -> Vec<Exponent> {
    ["1", "5/4", "3/2", "2", "3", "5"].iter().map(|s| s.parse().unwrap()).collect()
}

/// Rank over `Q(i)` by Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<GaussianRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, piv);
        let inv = rows[r][c].inv().unwrap();
        let prow: Vec<GaussianRational> = rows[r].iter().map(|v| v * &inv).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (k, pv) in prow.iter().enumerate() {
                    row[k] = &row[k] - &(&f * pv);
                }
            }
        }
        rows[r] = prow;
        r += 1;
    }
    r
}

/// `dim I^p/(P, P̄)` as `Σ O_ij` minus the rank of the vanishing conditions
/// `coeff_{x^s y^b} Q(x, x^{2L_j} y - q_j) = 0` for `s < r_j`, imposed on
/// monomials `x^a y^b` with `a + b` below the largest `r_j`.
pub fn dim_by_rank(m: &LocalModel, p: &Exponent) -> u64 {
    let pe = p.effective(m);
    let req: Vec<i64> = (0..m.len()).map(|j| required_order(m, j, &pe)).collect();
    let big = req.iter().copied().max().unwrap_or(0).max(0) as u32;
    let monos: Vec<(u32, u32)> = (0..big).flat_map(|d| (0..=d).map(move |a| (a, d - a))).collect();
    let mut keys: Vec<(usize, u32, u32)> = Vec::new();
    let mut cols: Vec<std::collections::HashMap<(usize, u32, u32), GaussianRational>> = Vec::new();
    for &(a, b) in &monos {
        let mono = BiPoly::monomial(GaussianRational::one(), a, b);
        let mut col = std::collections::HashMap::new();
        for (j, d) in m.branches().iter().enumerate() {
            let sub = mono.substitute_datum(d.two_l(), &d.q);
            for (&(s, yb), c) in sub.terms() {
                if (s as i64) < req[j] {
                    let key = (j, s, yb);
                    if !keys.contains(&key) {
                        keys.push(key);
                    }
                    col.insert(key, c.clone());
                }
            }
        }
        cols.push(col);
    }
    let rows: Vec<Vec<GaussianRational>> = keys
        .iter()
        .map(|k| cols.iter().map(|c| c.get(k).cloned().unwrap_or_else(GaussianRational::zero)).collect())
        .collect();
    m.intersection_multiplicity() as u64 - rank(rows) as u64
}

pub fn is_one(g: &GaussianRational) -> bool {
    g.re.is_one() && g.im.is_zero()
}
