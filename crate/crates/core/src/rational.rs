//! Small helpers around [`num::BigRational`].

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Rational = BigRational;

/// `num / den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Clamp into the unit interval.
pub fn clamp_unit(x: Rational) -> Rational {
    if x.is_negative() {
        zero()
    } else if x > one() {
        one()
    } else {
        x
    }
}

pub fn max_of<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> Option<Rational> {
    values.into_iter().max().cloned()
}

/// Parse `"p/q"`, `"p"` or `"-p/q"`. Whitespace around the parts is tolerated.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Lossy conversion used only for plotting.
pub fn to_f64(x: &Rational) -> f64 {
    use num::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}
