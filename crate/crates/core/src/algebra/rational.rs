use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"a"`, `"-a"` or `"a/b"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// `"3/2"`, `"-1/4"` or `"5"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `⌈a / p⌉` for integer `a` and positive rational `p`.
pub fn ceil_div(a: i64, p: &Rational) -> i64 {
    let v = Rational::from_integer(BigInt::from(a)) / p;
    let c = v.ceil().to_integer();
    i64::try_from(c).expect("ceiling out of range")
}

pub(crate) fn abs_rat(v: &Rational) -> Rational {
    v.abs()
}

/// Closest fraction to `v` with denominator at most `max_den`.
pub(crate) fn limit_denominator(v: &Rational, max_den: &BigInt) -> Rational {
    if v.denom() <= max_den {
        return v.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let (mut n, mut d) = (v.numer().clone(), v.denom().clone());
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        if d.is_zero() {
            break;
        }
    }
    let k = (max_den - &q0).div_floor(&q1);
    let b1 = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let b2 = Rational::new(p1, q1);
    if (&b2 - v).abs() <= (&b1 - v).abs() {
        b2
    } else {
        b1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/2", "-1/4", "5", "0", "-7"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn ceiling_division() {
        assert_eq!(ceil_div(3, &rat(5, 4)), 3);
        assert_eq!(ceil_div(9, &rat(5, 4)), 8);
        assert_eq!(ceil_div(5, &rat(5, 4)), 4);
        assert_eq!(ceil_div(3, &rat(3, 1)), 1);
    }

    #[test]
    fn limit_denominator_finds_nearby_fraction() {
        let v = rat(314159, 100000);
        assert_eq!(limit_denominator(&v, &BigInt::from(7)), rat(22, 7));
        assert_eq!(limit_denominator(&v, &BigInt::from(113)), rat(355, 113));
        assert_eq!(limit_denominator(&rat(1, 3), &BigInt::from(10)), rat(1, 3));
    }
}
