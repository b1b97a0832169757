//! Exact scalar arithmetic shared by every module.
//!
//! All quantities are arbitrary-precision rationals. Square roots are never
//! taken in floating point: comparisons of areas go through perfect-square
//! tests and integer square roots with explicit rounding direction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p`, or `p/q` (whitespace tolerated around the slash).
pub fn parse_rational(text: &str) -> Option<Q> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(Q::new(num, den))
    } else {
        let num: BigInt = text.parse().ok()?;
        Some(Q::from_integer(num))
    }
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal rendering for human consumption. Truncates toward zero.
pub fn display_decimal(x: &Q, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (x.abs() * Q::from_integer(scale.clone()))
        .trunc()
        .to_integer();
    let (int_part, frac_part) = scaled.div_rem(&scale);
    let sign = if x.is_negative() && !scaled.is_zero() {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    format!(
        "{sign}{int_part}.{:0>width$}",
        frac_part.to_string(),
        width = digits as usize
    )
}

/// Floor of the square root of a non-negative rational.
pub fn floor_sqrt(x: &Q) -> BigInt {
    assert!(!x.is_negative(), "floor_sqrt of negative value");
    x.floor().to_integer().sqrt()
}

/// Exact square root when `x` is the square of a rational.
pub fn exact_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// Rational enclosure `lo ≤ √x ≤ hi` with width at most `2^-bits`.
pub fn sqrt_enclosure(x: &Q, bits: u32) -> (Q, Q) {
    if let Some(r) = exact_sqrt(x) {
        return (r.clone(), r);
    }
    // √(p/q) = √(p q)/q; scale by 2^bits before the integer root.
    let scale = BigInt::one() << bits;
    let radicand = x.numer() * x.denom() * &scale * &scale;
    let root = radicand.sqrt();
    let denom = x.denom() * &scale;
    (
        Q::new(root.clone(), denom.clone()),
        Q::new(root + BigInt::one(), denom),
    )
}

/// Decides `Σ √terms < √bound` exactly.
///
/// A tie `Σ √aᵢ = √B` with positive terms forces every `aᵢ/B` to be a
/// rational square (square roots of distinct squarefree integers are linearly
/// independent over ℚ). That case is decided in ℚ; otherwise the sum differs
/// from `√B` and interval refinement terminates.
pub fn sqrt_sum_lt(terms: &[Q], bound: &Q) -> bool {
    if !bound.is_positive() {
        return false;
    }
    let terms: Vec<&Q> = terms.iter().filter(|a| !a.is_zero()).collect();
    if terms.is_empty() {
        return true;
    }
    let ratios: Option<Vec<Q>> = terms.iter().map(|a| exact_sqrt(&(*a / bound))).collect();
    if let Some(ratios) = ratios {
        let total: Q = ratios.iter().sum();
        return total < Q::one();
    }
    let mut bits = 16;
    loop {
        let (mut lo, mut hi) = (Q::zero(), Q::zero());
        for a in &terms {
            let (l, h) = sqrt_enclosure(a, bits);
            lo += l;
            hi += h;
        }
        let (blo, bhi) = sqrt_enclosure(bound, bits);
        if hi < blo {
            return true;
        }
        if lo > bhi {
            return false;
        }
        bits *= 2;
    }
}

/// `x` as an `i64`, when it is an integer in range.
pub fn to_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

/// Serde adapter: a single rational as the string `p/q`.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).ok_or_else(|| D::Error::custom(format!("bad rational {text:?}")))
    }
}

/// Serde adapter: a list of rationals as `p/q` strings.
pub mod rational_vec_str {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| {
                parse_rational(t).ok_or_else(|| D::Error::custom(format!("bad rational {t:?}")))
            })
            .collect()
    }
}

/// One integer as a JSON number when it fits in 64 bits, as a decimal string
/// otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(JsonInt(BigInt::from(v))),
            Repr::Text(t) => t
                .parse()
                .map(JsonInt)
                .map_err(|_| D::Error::custom(format!("bad integer {t:?}"))),
        }
    }
}

/// Human-readable decimal approximation. Never used in any comparison.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Approx {
    pub value: String,
    pub display_only: bool,
}

impl Approx {
    pub fn of(x: &Q) -> Self {
        Approx {
            value: display_decimal(x, 6),
            display_only: true,
        }
    }

    /// Decimal rendering of `√x` from a rational enclosure.
    pub fn of_sqrt(x: &Q) -> Self {
        let (lo, _) = sqrt_enclosure(x, 40);
        Approx {
            value: display_decimal(&lo, 6),
            display_only: true,
        }
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "≈{}", self.value)
    }
}
