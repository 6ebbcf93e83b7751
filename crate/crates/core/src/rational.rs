//! Exact rational numbers and their textual forms.

use std::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

/// Exact rational used for every utility, welfare and ratio.
pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, `"p"`, or a terminating decimal such as `"0.6"`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| err())?;
        let q: i128 = q.trim().parse().map_err(|_| err())?;
        if q == 0 {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 18 {
            return Err(err());
        }
        let negative = int.starts_with('-');
        let int: i128 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| err())? };
        let den = 10i128.pow(frac.len() as u32);
        let frac: i128 = frac.parse().map_err(|_| err())?;
        let magnitude = int.abs() * den + frac;
        return Ok(Rational::new(if negative { -magnitude } else { magnitude }, den));
    }
    s.parse::<i128>().map(Rational::from_integer).map_err(|_| err())
}

/// `"p/q"` or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal approximation with six significant digits, trailing zeros trimmed.
pub fn format_decimal(r: &Rational) -> String {
    let value = r.to_f64().unwrap_or(f64::NAN);
    if value.is_zero() {
        return "0".to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let mut text = format!("{value:.decimals$}");
    if text.contains('.') {
        while text.ends_with('0') {
            text.pop();
        }
        if text.ends_with('.') {
            text.pop();
        }
    }
    text
}

/// `"p/q (decimal)"`, the form used for every number shown to a user.
pub struct Exact<'a>(pub &'a Rational);

impl fmt::Display for Exact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", format_rational(self.0), format_decimal(self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("3/5").unwrap(), Rational::new(3, 5));
        assert_eq!(parse_rational(" 2 ").unwrap(), Rational::from_integer(2));
        assert_eq!(parse_rational("0.6").unwrap(), Rational::new(3, 5));
        assert_eq!(parse_rational("-1/2").unwrap(), Rational::new(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(&Rational::new(7, 2)), "3.5");
        assert_eq!(format_decimal(&Rational::new(2, 3)), "0.666667");
        assert_eq!(format_decimal(&Rational::new(11, 15)), "0.733333");
        assert_eq!(format_decimal(&Rational::from_integer(21)), "21");
        assert_eq!(Exact(&Rational::new(7, 2)).to_string(), "7/2 (3.5)");
    }
}
