use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not an exact rational: {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Parses an availability probability given as an exact `p/q` string.
/// Decimal notation is rejected.
pub fn parse_tau(text: &str) -> Result<Rational> {
    if text.contains('.') || text.contains('e') || text.contains('E') {
        return Err(Error::Parse(format!(
            "tau must be an exact rational p/q, got {text:?}"
        )));
    }
    let tau = parse_rational(text)?;
    check_probability(&tau)?;
    Ok(tau)
}

pub(crate) fn check_probability(tau: &Rational) -> Result<()> {
    if tau.is_negative() || *tau > Rational::one() {
        return Err(Error::Domain(format!("tau = {tau} is outside [0, 1]")));
    }
    Ok(())
}

/// Serde adapter writing a rational as its `p/q` string.
pub(crate) mod as_string {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use super::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), rat(-4, 1));
        assert_eq!(parse_rational(" 2/-4 ").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn tau_is_exact_and_bounded() {
        assert_eq!(parse_tau("1/1").unwrap(), rat(1, 1));
        assert_eq!(parse_tau("0/1").unwrap(), rat(0, 1));
        assert!(parse_tau("0.5").is_err());
        assert!(parse_tau("3/2").is_err());
        assert!(parse_tau("-1/2").is_err());
    }
}
