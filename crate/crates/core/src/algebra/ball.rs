use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::gaussian::GaussianRational;
use super::rational::Rational;
use super::scalar::{Scalar, Undecided, ZeroTest};

/// Magnitudes at or below this bound are treated as zero.
pub const ZERO_THRESHOLD: f64 = 1e-30;

const F64_SLACK: f64 = 1.0 + 8.0 * f64::EPSILON;

/// Working precision in bits, from `STABLEFRAC_PRECISION` decimal digits
/// (default 50) plus 64 guard bits.
pub fn precision_bits() -> u32 {
    static BITS: OnceLock<u32> = OnceLock::new();
    *BITS.get_or_init(|| {
        let digits: u32 = std::env::var("STABLEFRAC_PRECISION")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(50)
            .clamp(20, 250);
        (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 64
    })
}

fn unit() -> f64 {
    2f64.powi(-(precision_bits() as i32))
}

fn scaled_to_f64(m: &BigInt) -> f64 {
    let bits = precision_bits() as i32;
    let nb = m.bits() as i32;
    if nb > 900 {
        let shift = nb - 900;
        let head = (m >> shift as usize).to_f64().unwrap_or(f64::NAN);
        head * 2f64.powi(shift - bits)
    } else {
        m.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-bits)
    }
}

/// Real interval `mid ± rad` with `mid` a fixed-point number with
/// `precision_bits()` fractional bits.
#[derive(Clone, Debug, PartialEq)]
pub struct RealBall {
    mid: BigInt,
    rad: f64,
}

impl RealBall {
    pub fn zero() -> Self {
        RealBall { mid: BigInt::zero(), rad: 0.0 }
    }

    pub fn from_rational(q: &Rational) -> Self {
        let shifted = q.numer() << precision_bits() as usize;
        let (m, r) = num_integer::Integer::div_rem(&shifted, q.denom());
        let rad = if r.is_zero() { 0.0 } else { unit() };
        RealBall { mid: m, rad }
    }

    /// Ball containing the closed interval `[lo, hi]`.
    pub fn from_interval(lo: &Rational, hi: &Rational) -> Self {
        let mid = (lo + hi) / Rational::from_integer(2.into());
        let half = (hi - lo) / Rational::from_integer(2.into());
        let mut b = Self::from_rational(&mid);
        b.rad = (b.rad + half.to_f64().unwrap_or(f64::INFINITY) + unit()) * F64_SLACK;
        b
    }

    pub fn mid_f64(&self) -> f64 {
        scaled_to_f64(&self.mid)
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    fn abs_upper(&self) -> f64 {
        (self.mid_f64().abs() + self.rad) * F64_SLACK
    }

    pub fn add(&self, o: &Self) -> Self {
        RealBall { mid: &self.mid + &o.mid, rad: (self.rad + o.rad) * F64_SLACK }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RealBall { mid: &self.mid - &o.mid, rad: (self.rad + o.rad) * F64_SLACK }
    }

    pub fn neg(&self) -> Self {
        RealBall { mid: -&self.mid, rad: self.rad }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.mid.is_zero() && self.rad == 0.0 || o.mid.is_zero() && o.rad == 0.0 {
            return Self::zero();
        }
        let mid = (&self.mid * &o.mid) >> precision_bits() as usize;
        let a = self.mid_f64().abs();
        let b = o.mid_f64().abs();
        let rad = (a * o.rad + b * self.rad + self.rad * o.rad + unit()) * F64_SLACK;
        RealBall { mid, rad }
    }

    pub fn inv(&self) -> Result<Self, Undecided> {
        let v = self.mid_f64().abs();
        if self.mid.is_zero() || v <= self.rad * F64_SLACK {
            return Err(Undecided);
        }
        let one = BigInt::from(1) << (2 * precision_bits() as usize);
        let mid = one / &self.mid;
        let lower = v / F64_SLACK - self.rad * F64_SLACK;
        let rad = (self.rad / (v * lower) + unit()) * F64_SLACK * F64_SLACK;
        Ok(RealBall { mid, rad })
    }

    pub fn zero_test(&self) -> ZeroTest {
        let v = self.mid_f64().abs();
        if self.abs_upper() <= ZERO_THRESHOLD {
            ZeroTest::Zero
        } else if v > self.rad * F64_SLACK && !self.mid.is_zero() {
            ZeroTest::NonZero
        } else {
            ZeroTest::Unknown
        }
    }

    pub fn is_positive(&self) -> Option<bool> {
        match self.zero_test() {
            ZeroTest::NonZero => Some(self.mid.is_positive()),
            _ => None,
        }
    }
}

/// Complex ball: independent real and imaginary balls.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBall {
    pub re: RealBall,
    pub im: RealBall,
}

impl ComplexBall {
    pub fn from_real(re: RealBall) -> Self {
        ComplexBall { re, im: RealBall::zero() }
    }

    pub fn max_rad(&self) -> f64 {
        self.re.rad.max(self.im.rad)
    }
}

impl Scalar for ComplexBall {
    const EXACT: bool = false;

    fn zero() -> Self {
        ComplexBall { re: RealBall::zero(), im: RealBall::zero() }
    }
    fn one() -> Self {
        Self::from_gaussian(&GaussianRational::one())
    }
    fn from_gaussian(g: &GaussianRational) -> Self {
        ComplexBall { re: RealBall::from_rational(&g.re), im: RealBall::from_rational(&g.im) }
    }
    fn add(&self, o: &Self) -> Self {
        ComplexBall { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }
    fn sub(&self, o: &Self) -> Self {
        ComplexBall { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }
    fn mul(&self, o: &Self) -> Self {
        ComplexBall {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
    fn neg(&self) -> Self {
        ComplexBall { re: self.re.neg(), im: self.im.neg() }
    }
    fn inv(&self) -> Result<Self, Undecided> {
        let n = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let ninv = n.inv()?;
        Ok(ComplexBall { re: self.re.mul(&ninv), im: self.im.neg().mul(&ninv) })
    }
    fn zero_test(&self) -> ZeroTest {
        match (self.re.zero_test(), self.im.zero_test()) {
            (ZeroTest::Zero, ZeroTest::Zero) => ZeroTest::Zero,
            (ZeroTest::NonZero, _) | (_, ZeroTest::NonZero) => ZeroTest::NonZero,
            _ => ZeroTest::Unknown,
        }
    }
    fn conj(&self) -> Self {
        ComplexBall { re: self.re.clone(), im: self.im.neg() }
    }
    fn to_c64(&self) -> (f64, f64) {
        (self.re.mid_f64(), self.im.mid_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn arithmetic_encloses_exact_values() {
        let a = ComplexBall::from_gaussian(&GaussianRational::new(rat(1, 3), rat(2, 7)));
        let b = ComplexBall::from_gaussian(&GaussianRational::new(rat(-5, 11), rat(1, 1)));
        let exact = &GaussianRational::new(rat(1, 3), rat(2, 7)) / &GaussianRational::new(rat(-5, 11), rat(1, 1));
        let q = a.mul(&b.inv().unwrap());
        let (re, im) = exact.to_f64();
        assert!((q.re.mid_f64() - re).abs() <= q.re.rad() + 1e-300);
        assert!((q.im.mid_f64() - im).abs() <= q.im.rad() + 1e-300);
        assert!(q.max_rad() < 1e-60);
        let z = a.sub(&a);
        assert_eq!(z.zero_test(), ZeroTest::Zero);
        assert_eq!(a.zero_test(), ZeroTest::NonZero);
    }

    #[test]
    fn wide_ball_is_undecided() {
        let b = RealBall::from_interval(&rat(-1, 10), &rat(1, 10));
        assert_eq!(b.zero_test(), ZeroTest::Unknown);
        assert!(b.inv().is_err());
    }
}
