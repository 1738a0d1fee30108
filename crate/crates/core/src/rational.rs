//! Exact rational literals.
//!
//! Instance files, flow files, and certificates accept numbers either as
//! native JSON numbers (taken as the exact binary value of the f64) or as
//! strings in one of two exact forms: `"p/q"` and plain decimals such as
//! `"3"` or `"-2.5"`. Certificates and report lower/upper sides use only
//! the exact string forms so they round-trip losslessly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("cannot parse {0:?} as an integer, decimal, or p/q rational")]
    BadLiteral(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("non-finite number")]
    NotFinite,
}

/// Parses `"p/q"`, integer, or decimal literals into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, NumberError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(NumberError::BadLiteral(text.to_string()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let p = BigInt::from_str(num.trim())
            .map_err(|_| NumberError::BadLiteral(text.to_string()))?;
        let q = BigInt::from_str(den.trim())
            .map_err(|_| NumberError::BadLiteral(text.to_string()))?;
        if q.is_zero() {
            return Err(NumberError::ZeroDenominator(text.to_string()));
        }
        return Ok(BigRational::new(p, q));
    }
    match s.split_once('.') {
        None => {
            let p = BigInt::from_str(s).map_err(|_| NumberError::BadLiteral(text.to_string()))?;
            Ok(BigRational::from_integer(p))
        }
        Some((int_part, frac_part)) => {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(NumberError::BadLiteral(text.to_string()));
            }
            let negative = int_part.trim_start().starts_with('-');
            let joined = format!("{}{}", int_part, frac_part);
            let p =
                BigInt::from_str(&joined).map_err(|_| NumberError::BadLiteral(text.to_string()))?;
            let q = BigInt::from(10u32).pow(frac_part.len() as u32);
            let r = BigRational::new(p, q);
            // "-0.5" parses its integer part as "-0", which loses the sign.
            if negative && !r.is_negative() && !r.is_zero() {
                Ok(-r)
            } else {
                Ok(r)
            }
        }
    }
}

/// Exact rational value of a finite f64.
pub fn rational_from_f64(x: f64) -> Result<BigRational, NumberError> {
    BigRational::from_float(x).ok_or(NumberError::NotFinite)
}

pub fn rational_to_f64(r: &BigRational) -> Option<f64> {
    r.to_f64().filter(|x| x.is_finite())
}

/// `"p"` when the denominator is one, `"p/q"` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal with 17 significant digits; round-trips any f64.
pub fn format_sig17(x: f64) -> String {
    format!("{:.16e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("-3/6").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("4").unwrap(), BigRational::from_integer(4.into()));
        assert_eq!(parse_rational("2.5").unwrap(), BigRational::new(5.into(), 2.into()));
        assert_eq!(parse_rational("-0.5").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational(" 7/2 ").unwrap(), BigRational::new(7.into(), 2.into()));
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1e-3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn integers_format_without_denominator() {
        assert_eq!(format_rational(&BigRational::from_integer(3.into())), "3");
        assert_eq!(format_rational(&BigRational::new(3.into(), 2.into())), "3/2");
        assert_eq!(format_rational(&BigRational::new(4.into(), 2.into())), "2");
    }

    #[test]
    fn f64_round_trip_is_exact() {
        for x in [0.0, 1.0, 0.5, 0.1, 3.0, 1e-9] {
            let r = rational_from_f64(x).unwrap();
            assert_eq!(rational_to_f64(&r), Some(x));
        }
        assert!(rational_from_f64(f64::INFINITY).is_err());
    }

    #[test]
    fn sig17_has_full_precision() {
        let x = 2.000_000_000_000_000_4_f64;
        assert_eq!(format_sig17(x).parse::<f64>().unwrap(), x);
        assert_eq!(format_sig17(0.5), "5.0000000000000000e-1");
    }
}
