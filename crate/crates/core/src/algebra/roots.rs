//! Exact real-root isolation for rational polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ball::{precision_bits, RealBall};
use super::rational::{abs_rat, limit_denominator, Rational};
use super::upoly::UPoly;

type P = UPoly<Rational>;

/// A real algebraic number: either rational or isolated by an interval
/// `(lo, hi]` containing exactly one root of a square-free `poly`.
#[derive(Clone, Debug, PartialEq)]
pub enum RealRoot {
    Rational(Rational),
    Algebraic { poly: P, lo: Rational, hi: Rational },
}

impl RealRoot {
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            RealRoot::Rational(r) => Some(r),
            RealRoot::Algebraic { .. } => None,
        }
    }

    pub fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self {
            RealRoot::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            RealRoot::Algebraic { lo, hi, .. } => ((lo + hi) / Rational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Enclosing ball at the working precision.
    pub fn to_ball(&self) -> RealBall {
        match self {
            RealRoot::Rational(r) => RealBall::from_rational(r),
            RealRoot::Algebraic { poly, lo, hi } => {
                let target = Rational::new(BigInt::one(), BigInt::one() << (precision_bits() as usize + 8));
                let (lo, hi) = refine_by_sign(poly, lo.clone(), hi.clone(), &target);
                RealBall::from_interval(&lo, &hi)
            }
        }
    }
}

fn sign(v: &Rational) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

fn refine_by_sign(poly: &P, mut lo: Rational, mut hi: Rational, width: &Rational) -> (Rational, Rational) {
    let two = Rational::from_integer(2.into());
    let slo = sign(&poly.eval(&lo));
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        let sm = sign(&poly.eval(&mid));
        if sm == 0 {
            return (mid.clone(), mid);
        }
        if sm == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Square-free decomposition `f = c * prod g_k^k`; returns `(g_k, k)` for non-constant `g_k`.
pub fn squarefree_decomposition(f: &P) -> Vec<(P, usize)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let f = f.monic();
    let df = f.derivative();
    let b = f.gcd(&df);
    let mut c = f.divrem(&b).0;
    let mut d = df.divrem(&b).0.sub(&c.derivative());
    let mut k = 1;
    while c.degree().unwrap_or(0) > 0 {
        let a = c.gcd(&d);
        c = c.divrem(&a).0;
        d = d.divrem(&a).0.sub(&c.derivative());
        if a.degree().unwrap_or(0) > 0 {
            out.push((a, k));
        }
        k += 1;
    }
    out
}

struct Sturm(Vec<P>);

impl Sturm {
    fn new(g: &P) -> Self {
        let mut seq = vec![g.clone(), g.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        Sturm(seq)
    }

    fn variations(&self, v: &Rational) -> usize {
        let signs: Vec<i8> = self.0.iter().map(|p| sign(&p.eval(v))).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct roots in `(lo, hi]`.
    fn count(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations(lo) - self.variations(hi)
    }
}

/// Integer leading coefficient of the primitive integer multiple of `g`.
fn integer_leading_coefficient(g: &P) -> BigInt {
    let l = g.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = g.coeffs().iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    (ints.last().unwrap() / content).abs()
}

fn isolate(g: &P) -> Vec<(Rational, Rational)> {
    let lc = g.lc().unwrap().clone();
    let bound = g
        .coeffs()
        .iter()
        .map(|c| abs_rat(&(c / &lc)))
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
        + Rational::one();
    let sturm = Sturm::new(g);
    let two = Rational::from_integer(2.into());
    let mut stack = vec![(-bound.clone(), bound)];
    let mut out = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        match sturm.count(&lo, &hi) {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / &two;
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn classify(g: &P, lo: Rational, hi: Rational) -> RealRoot {
    if g.eval(&hi).is_zero() {
        return RealRoot::Rational(hi);
    }
    let an = integer_leading_coefficient(g);
    let width = Rational::new(BigInt::one(), (&an * &an * BigInt::from(2)).max(BigInt::one() << 40));
    let sturm = Sturm::new(g);
    let two = Rational::from_integer(2.into());
    let (mut lo, mut hi) = (lo, hi);
    while &hi - &lo > width {
        let mid = (&lo + &hi) / &two;
        if g.eval(&mid).is_zero() {
            return RealRoot::Rational(mid);
        }
        if sturm.count(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mid = (&lo + &hi) / &two;
    let cand = limit_denominator(&mid, &an);
    if cand > lo && cand <= hi && g.eval(&cand).is_zero() {
        RealRoot::Rational(cand)
    } else {
        RealRoot::Algebraic { poly: g.clone(), lo, hi }
    }
}

/// Real roots of `f` with multiplicities, in increasing order.
pub fn real_roots(f: &P) -> Vec<(RealRoot, usize)> {
    let mut out: Vec<(RealRoot, usize, f64)> = Vec::new();
    for (g, k) in squarefree_decomposition(f) {
        for (lo, hi) in isolate(&g) {
            let r = classify(&g, lo, hi);
            let a = r.approx();
            out.push((r, k, a));
        }
    }
    out.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap_or(std::cmp::Ordering::Equal));
    out.into_iter().map(|(r, k, _)| (r, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn p(cs: &[i64]) -> P {
        UPoly::new(cs.iter().map(|&c| rat(c, 1)).collect())
    }

    #[test]
    fn rational_and_irrational_roots_with_multiplicity() {
        // (x - 1/2)^2 (x^2 - 2) (x + 3)
        let f = UPoly::new(vec![rat(-1, 2), rat(1, 1)]).pow(2).mul(&p(&[-2, 0, 1])).mul(&p(&[3, 1]));
        let roots = real_roots(&f);
        assert_eq!(roots.len(), 4);
        assert_eq!(roots[0], (RealRoot::Rational(rat(-3, 1)), 1));
        assert!(matches!(roots[1].0, RealRoot::Algebraic { .. }));
        assert!((roots[1].0.approx() + 2f64.sqrt()).abs() < 1e-3);
        assert_eq!(roots[2], (RealRoot::Rational(rat(1, 2)), 2));
        let b = roots[3].0.to_ball();
        assert!((b.mid_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert!(b.rad() < 1e-60);
    }

    #[test]
    fn no_real_roots() {
        assert!(real_roots(&p(&[1, 0, 1])).is_empty());
        assert_eq!(real_roots(&p(&[0, 0, 1])), vec![(RealRoot::Rational(rat(0, 1)), 2)]);
    }

    #[test]
    fn rational_root_with_large_denominator() {
        let f = UPoly::new(vec![rat(-7, 1), rat(1000, 1)]).mul(&p(&[1, 0, 1]));
        assert_eq!(real_roots(&f), vec![(RealRoot::Rational(rat(7, 1000)), 1)]);
    }
}
