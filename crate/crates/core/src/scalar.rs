//! Exact scalar fields.
//!
//! Structural computations (ranks, kernels, holonomy) run over [`Q`], the
//! arbitrary precision rationals. The cube-root gauge needs the cyclotomic
//! field `Q(ζ)`, `ζ³ = 1`, which is provided by [`Zeta3`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

/// A commutative field with exact equality.
///
/// Elimination routines rely on `is_zero` being exact, so only exact types
/// should implement this.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `p` or `p/q`.
pub fn format_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("cannot parse `{0}` as an exact rational")]
pub struct ParseRationalError(pub String);

/// Parses `p`, `p/q`, or a terminating decimal such as `-1.25` exactly.
pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let t = s.trim();
    let err = || ParseRationalError(s.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| err())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigInt::from_str(frac).map_err(|_| err())?;
        let magnitude = int_part.abs() * &scale + frac_part;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Q::new(numer, scale));
    }
    BigInt::from_str(t).map(Q::from_integer).map_err(|_| err())
}

pub fn q_to_f64(v: &Q) -> f64 {
    // BigRational::to_f64 handles huge numerators and denominators.
    v.to_f64().unwrap_or(f64::NAN)
}

/// Element `a + b·ζ` of the cyclotomic field `Q(ζ)` with `ζ² + ζ + 1 = 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Zeta3 {
    pub a: Q,
    pub b: Q,
}

impl Zeta3 {
    pub fn new(a: Q, b: Q) -> Self {
        Self { a, b }
    }

    pub fn rational(a: Q) -> Self {
        Self { a, b: <Q as Zero>::zero() }
    }

    /// The primitive cube root of unity `ζ`.
    pub fn zeta() -> Self {
        Self { a: <Q as Zero>::zero(), b: <Q as One>::one() }
    }

    /// `ζ^k` for any integer `k`.
    pub fn zeta_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => <Self as Field>::one(),
            1 => Self::zeta(),
            // ζ² = -1 - ζ
            _ => Self { a: -<Q as One>::one(), b: -<Q as One>::one() },
        }
    }

    /// Galois conjugate `ζ ↦ ζ²`.
    pub fn conj(&self) -> Self {
        Self { a: &self.a - &self.b, b: -self.b.clone() }
    }

    /// Field norm `a² − ab + b²`, a nonnegative rational.
    pub fn norm(&self) -> Q {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }
}

impl fmt::Debug for Zeta3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Zeta3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Zero::is_zero(&self.b) {
            write!(f, "{}", format_q(&self.a))
        } else {
            write!(f, "{}+{}ζ", format_q(&self.a), format_q(&self.b))
        }
    }
}

impl From<Q> for Zeta3 {
    fn from(a: Q) -> Self {
        Self::rational(a)
    }
}

impl Add for Zeta3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { a: self.a + rhs.a, b: self.b + rhs.b }
    }
}

impl Sub for Zeta3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { a: self.a - rhs.a, b: self.b - rhs.b }
    }
}

impl Neg for Zeta3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self { a: -self.a, b: -self.b }
    }
}

impl Mul for Zeta3 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        // (a + bζ)(c + dζ) = ac − bd + (ad + bc − bd)ζ
        let bd = &self.b * &rhs.b;
        Self {
            a: &self.a * &rhs.a - &bd,
            b: &self.a * &rhs.b + &self.b * &rhs.a - bd,
        }
    }
}

impl Div for Zeta3 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        let n = rhs.norm();
        assert!(!Zero::is_zero(&n), "division by zero in Q(ζ)");
        let c = self * rhs.conj();
        Self { a: c.a / &n, b: c.b / n }
    }
}

impl Field for Zeta3 {
    fn zero() -> Self {
        Self { a: <Q as Zero>::zero(), b: <Q as Zero>::zero() }
    }
    fn one() -> Self {
        Self { a: <Q as One>::one(), b: <Q as Zero>::zero() }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn from_i64(v: i64) -> Self {
        Self::rational(q(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_is_a_primitive_cube_root() {
        let z = Zeta3::zeta();
        let one = <Zeta3 as Field>::one();
        assert_eq!(z.clone() * z.clone() * z.clone(), one);
        assert!(Field::is_zero(&(one + z.clone() + z.clone() * z)));
    }

    #[test]
    fn zeta_inverse_and_norm() {
        let x = Zeta3::new(q(3), q(-2));
        assert_eq!(x.norm(), q(9 + 6 + 4));
        let y = x.clone() / x.clone();
        assert!(Field::is_one(&y));
        assert_eq!(Zeta3::zeta_pow(-1), Zeta3::zeta_pow(2));
    }

    #[test]
    fn rational_round_trip_formats() {
        for s in ["0", "-7", "3/4", "-22/7"] {
            assert_eq!(format_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("1.25").unwrap(), q_frac(5, 4));
        assert_eq!(parse_q("-0.5").unwrap(), q_frac(-1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }
}
