//! Seeded random instances shared by `selftest` and the acceptance tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use stablefrac_core::algebra::rat;
use stablefrac_core::integrability::{is_in_lp, lp_threshold};
use stablefrac_core::{BiPoly, BranchDatum, Exponent, GaussianRational, LocalModel, Rational};
use stablefrac_numeric::numverify::{oracle_membership, NumVerdict, Params};

pub const EXPONENTS: [(i64, i64); 6] = [(1, 1), (5, 4), (3, 2), (2, 1), (3, 1), (5, 1)];

pub fn random_model(rng: &mut ChaCha8Rng, max_m: usize, max_l: u32) -> LocalModel {
    let n = rng.random_range(1..=max_m);
    let branches = (0..n)
        .map(|_| {
            let l = rng.random_range(1..=max_l);
            let len = rng.random_range(0..2 * l as usize);
            let q = (0..len).map(|_| rat(rng.random_range(-2..=2), rng.random_range(1..=2))).collect();
            BranchDatum::new(l, q)
        })
        .collect();
    LocalModel::new(branches).expect("random data are valid")
}

/// `x^k` times a subset of the factors `y + q_j`, plus higher-order noise.
pub fn random_numerator(rng: &mut ChaCha8Rng, m: &LocalModel) -> BiPoly {
    let k = rng.random_range(0..4);
    let mut q = BiPoly::monomial(GaussianRational::one(), k, 0);
    for b in m.branches() {
        if rng.random_bool(0.5) {
            q = q.mul(&BiPoly::y().add(&b.q_poly()));
        }
    }
    for _ in 0..rng.random_range(0..3) {
        let c = GaussianRational::from_int(rng.random_range(-2..=2));
        q.add_term(k + 2 + rng.random_range(0..4), rng.random_range(0..3), &c);
    }
    q
}

fn to_f64(r: &Rational) -> f64 {
    GaussianRational::real(r.clone()).to_f64().0
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCase {
    pub model: LocalModel,
    pub q: String,
    pub p: Exponent,
    pub p_star: Option<String>,
    pub symbolic: bool,
    pub numeric: NumVerdict,
    pub slope: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleSummary {
    pub cases: Vec<OracleCase>,
    pub agree: usize,
    pub disagree: usize,
    pub inconclusive: usize,
}

impl OracleSummary {
    pub fn inconclusive_rate(&self) -> f64 {
        self.inconclusive as f64 / self.cases.len().max(1) as f64
    }

    pub fn pass(&self) -> bool {
        self.disagree == 0 && self.inconclusive_rate() < 0.1
    }
}

/// Triples with `|p - p*| >= gap`, drawn from the fixed exponent list.
pub fn oracle_triples(seed: u64, count: usize, gap: f64) -> Vec<(LocalModel, BiPoly, Exponent)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m = random_model(&mut rng, 3, 2);
        let q = random_numerator(&mut rng, &m);
        let ps = lp_threshold(&q, &m).p_star.as_ref().map(to_f64);
        let ok: Vec<Exponent> = EXPONENTS
            .iter()
            .filter(|&&(n, d)| ps.is_none_or(|s| (n as f64 / d as f64 - s).abs() >= gap))
            .map(|&(n, d)| Exponent::ratio(n, d))
            .collect();
        if ok.is_empty() {
            continue;
        }
        let p = ok[rng.random_range(0..ok.len())].clone();
        out.push((m, q, p));
    }
    out
}

pub fn oracle_suite(seed: u64, count: usize, params: &Params) -> OracleSummary {
    let mut cases = Vec::new();
    let (mut agree, mut disagree, mut inconclusive) = (0, 0, 0);
    for (m, q, p) in oracle_triples(seed, count, 0.1) {
        let Exponent::Finite(pr) = &p else { unreachable!() };
        let symbolic = is_in_lp(&q, &m, &p);
        let r = oracle_membership(&q, &m, to_f64(pr), params).expect("finite exponent");
        match (r.verdict, symbolic) {
            (NumVerdict::Inconclusive, _) => inconclusive += 1,
            (NumVerdict::Converges, true) | (NumVerdict::Diverges, false) => agree += 1,
            _ => disagree += 1,
        }
        let p_star = lp_threshold(&q, &m).p_star.as_ref().map(stablefrac_core::algebra::format_rational);
        cases.push(OracleCase { model: m, q: q.to_string(), p, p_star, symbolic, numeric: r.verdict, slope: r.slope });
    }
    OracleSummary { cases, agree, disagree, inconclusive }
}
