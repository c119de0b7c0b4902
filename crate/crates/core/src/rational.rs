//! Exact rational helpers: parsing, canonical formatting, float conversion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("decimal literal `{0}` not accepted here")]
    DecimalRejected(String),
}

pub fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qvec(values: &[(i64, i64)]) -> Vec<Q> {
    values.iter().map(|&(n, d)| frac(n, d)).collect()
}

pub fn ivec(values: &[i64]) -> Vec<Q> {
    values.iter().map(|&v| int(v)).collect()
}

/// Parses `"p/q"` or `"p"`; decimals are rejected.
pub fn parse_exact(s: &str) -> Result<Q, ParseRationalError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if t.contains('.') || t.contains('e') || t.contains('E') {
        return Err(ParseRationalError::DecimalRejected(t.to_string()));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| ParseRationalError::Malformed(t.to_string()))?;
    let den = BigInt::from_str(den).map_err(|_| ParseRationalError::Malformed(t.to_string()))?;
    if den.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(t.to_string()));
    }
    Ok(Q::new(num, den))
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"-0.4"` exactly.
pub fn parse_lenient(s: &str) -> Result<Q, ParseRationalError> {
    let t = s.trim();
    match parse_exact(t) {
        Err(ParseRationalError::DecimalRejected(_)) => parse_decimal(t),
        other => other,
    }
}

fn parse_decimal(t: &str) -> Result<Q, ParseRationalError> {
    let bad = || ParseRationalError::Malformed(t.to_string());
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fraction) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && fraction.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(fraction.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{fraction}");
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - fraction.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Q::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Canonical `p/q` with `gcd(p, q) = 1` and `q > 0`; integers keep the `/1`.
pub fn format_q(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn format_vec(v: &[Q]) -> Vec<String> {
    v.iter().map(format_q).collect()
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn to_f64_vec(v: &[Q]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Exact value of a finite double.
pub fn from_f64_exact(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// by continued-fraction convergents and the final semiconvergent.
pub fn rationalize(x: f64, max_den: u64) -> Q {
    assert!(x.is_finite(), "cannot rationalize a non-finite value");
    assert!(max_den >= 1);
    let neg = x < 0.0;
    let target = from_f64_exact(x.abs()).expect("finite");
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let bound = BigInt::from(max_den);
    let mut rem = target.clone();
    let best = loop {
        let a = rem.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > bound {
            // largest semiconvergent still within the bound
            let k = (&bound - &q0) / &q1;
            let ps = &k * &p1 + &p0;
            let qs = &k * &q1 + &q0;
            let conv = Q::new(p1.clone(), q1.clone());
            let semi = Q::new(ps, qs);
            let dc = (&conv - &target).abs();
            let ds = (&semi - &target).abs();
            break if ds < dc { semi } else { conv };
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac_part = &rem - Q::from_integer(a);
        if frac_part.is_zero() {
            break Q::new(p1.clone(), q1.clone());
        }
        rem = frac_part.recip();
    };
    if neg {
        -best
    } else {
        best
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
