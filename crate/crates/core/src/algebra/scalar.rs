use std::fmt::Debug;

use super::gaussian::GaussianRational;
use super::rational::Rational;

/// Outcome of asking whether a coefficient vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroTest {
    Zero,
    NonZero,
    Unknown,
}

/// A numeric coefficient could not be certified zero or nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Undecided;

/// Complex coefficient domain used by series and polynomial code: exact
/// `Q[i]` or complex balls.
pub trait Scalar: Clone + Debug + Send + Sync + 'static {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_gaussian(g: &GaussianRational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Inverse; fails when the value is zero or cannot be separated from zero.
    fn inv(&self) -> Result<Self, Undecided>;
    fn zero_test(&self) -> ZeroTest;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> (f64, f64);

    fn from_rational(r: &Rational) -> Self {
        Self::from_gaussian(&GaussianRational::real(r.clone()))
    }

    fn from_int(n: i64) -> Self {
        Self::from_gaussian(&GaussianRational::from_int(n))
    }

    /// Cheap structural test used to skip work; never claims a nonzero value is zero.
    fn is_negligible(&self) -> bool {
        self.zero_test() == ZeroTest::Zero
    }

    fn scale_rational(&self, r: &Rational) -> Self {
        self.mul(&Self::from_rational(r))
    }
}

impl Scalar for GaussianRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        GaussianRational::zero()
    }
    fn one() -> Self {
        GaussianRational::one()
    }
    fn from_gaussian(g: &GaussianRational) -> Self {
        g.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self, Undecided> {
        GaussianRational::inv(self).ok_or(Undecided)
    }
    fn zero_test(&self) -> ZeroTest {
        if self.is_zero() {
            ZeroTest::Zero
        } else {
            ZeroTest::NonZero
        }
    }
    fn conj(&self) -> Self {
        GaussianRational::conj(self)
    }
    fn to_c64(&self) -> (f64, f64) {
        self.to_f64()
    }
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(r)
    }
}
