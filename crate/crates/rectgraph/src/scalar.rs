//! Exact rational scalars and their text form.
//!
//! Every quantity in this crate is an exact rational; there is no floating
//! point anywhere. Genericity tests are polynomial `!= 0` tests and would be
//! meaningless under rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Exact rational number, always kept in reduced form with positive denominator.
pub type Scalar = BigRational;

/// Shorthand for an integer scalar.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Scalar {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn is_integer(x: &Scalar) -> bool {
    x.denom().is_one()
}

/// Renders `p` for integers and `p/q` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    if is_integer(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `p/q`, or a plain decimal like `-1.25` (read exactly as written).
pub fn parse_scalar(s: &str) -> Result<Scalar, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator {p:?}")))?;
        let den: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator {q:?}")))?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.trim_start().starts_with('-');
        let whole_part: BigInt = if whole == "-" || whole.is_empty() {
            BigInt::zero()
        } else {
            whole
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {s:?}")));
        }
        let frac_num: BigInt = frac
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let abs = BigRational::new(whole_part.abs() * &den + frac_num, den);
        return Ok(if neg { -abs } else { abs });
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {s:?}")))?;
    Ok(BigRational::from_integer(n))
}

/// Parses a JSON value that is either a number literal or a `"p/q"` string.
pub fn scalar_from_json(v: &serde_json::Value) -> Result<Scalar, Error> {
    match v {
        serde_json::Value::Number(n) => parse_scalar(&n.to_string()),
        serde_json::Value::String(s) => parse_scalar(s),
        other => Err(Error::Parse(format!("expected number or \"p/q\", got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trips() {
        for s in ["0", "7", "-3", "2/4", "-10/6", "1.5", "-0.25", ".5"] {
            let x = parse_scalar(s).unwrap();
            let again = parse_scalar(&format_scalar(&x)).unwrap();
            assert_eq!(x, again, "{s}");
        }
        assert_eq!(parse_scalar("2/4").unwrap(), ratio(1, 2));
        assert_eq!(parse_scalar("1.5").unwrap(), ratio(3, 2));
        assert_eq!(parse_scalar("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_scalar("-1.5").unwrap(), ratio(-3, 2));
    }

    #[test]
    fn parse_rejects_junk() {
        for s in ["", "a", "1/0", "1.2.3", "1/", "--2", "1.x"] {
            assert!(parse_scalar(s).is_err(), "{s} should not parse");
        }
    }

    #[test]
    fn negative_denominator_is_normalised() {
        let x = parse_scalar("3/-6").unwrap();
        assert_eq!(x, ratio(-1, 2));
        assert_eq!(format_scalar(&x), "-1/2");
    }
}
