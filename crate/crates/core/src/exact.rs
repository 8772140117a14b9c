//! Big-integer lags and exact rational angles.
//!
//! Every trigonometric value with a huge integer multiplier goes through the
//! same two steps: the multiple of π is reduced modulo a full turn with integer
//! arithmetic, and only the small reduced fraction is handed to `f64::sin`.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision nonnegative integer used for lags, degrees and spacings.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigLag(BigUint);

impl BigLag {
    pub fn new(value: BigUint) -> Self {
        BigLag(value)
    }

    pub fn zero() -> Self {
        BigLag(BigUint::zero())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Number of decimal digits (1 for zero).
    pub fn digits(&self) -> usize {
        decimal_digits(&self.0)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl From<u64> for BigLag {
    fn from(v: u64) -> Self {
        BigLag(BigUint::from(v))
    }
}

impl From<BigUint> for BigLag {
    fn from(v: BigUint) -> Self {
        BigLag(v)
    }
}

impl fmt::Display for BigLag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for BigLag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::ParseInt(s.to_string()));
        }
        BigUint::parse_bytes(t.as_bytes(), 10)
            .map(BigLag)
            .ok_or_else(|| Error::ParseInt(s.to_string()))
    }
}

impl Serialize for BigLag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for BigLag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn decimal_digits(x: &BigUint) -> usize {
    if x.is_zero() {
        1
    } else {
        x.to_str_radix(10).len()
    }
}

/// The angle θ = π·p/q with p, q integers and q > 0.
///
/// Canonical form: p/q lies in (−1, 1] (one full turn, with θ = −π mapped to
/// +π) and gcd(|p|, q) = 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalAngle {
    p: BigInt,
    q: BigUint,
}

impl RationalAngle {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigUint>) -> Result<Self> {
        let q = q.into();
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::canonical(p.into(), q))
    }

    pub fn from_ratio(p: i64, q: u64) -> Result<Self> {
        Self::new(BigInt::from(p), BigUint::from(q))
    }

    pub fn zero() -> Self {
        RationalAngle {
            p: BigInt::zero(),
            q: BigUint::one(),
        }
    }

    pub fn pi() -> Self {
        RationalAngle {
            p: BigInt::one(),
            q: BigUint::one(),
        }
    }

    /// The level angle 4πl/(4n+1).
    pub fn level_angle(l: u64, modulus: u64) -> Self {
        Self::canonical(BigInt::from(4 * l), BigUint::from(modulus))
    }

    /// Nearest angle of the form π·k/2^bits to a floating-point angle.
    pub fn from_radians(theta: f64, bits: u32) -> Self {
        assert!(theta.is_finite(), "angle must be finite");
        assert!(bits <= 100);
        let scaled = theta / PI * 2f64.powi(bits as i32);
        let k = BigInt::from(scaled.round() as i128);
        Self::canonical(k, BigUint::one() << bits)
    }

    fn canonical(p: BigInt, q: BigUint) -> Self {
        let turn = BigInt::from_biguint(Sign::Plus, &q << 1u32);
        let qi = BigInt::from_biguint(Sign::Plus, q.clone());
        let mut r = p.mod_floor(&turn);
        if r > qi {
            r -= &turn;
        }
        let g = BigInt::from_biguint(Sign::Plus, r.magnitude().gcd(&q));
        if r.is_zero() {
            return RationalAngle {
                p: BigInt::zero(),
                q: BigUint::one(),
            };
        }
        let p = &r / &g;
        let q = (&qi / &g).into_parts().1;
        RationalAngle { p, q }
    }

    pub fn numer(&self) -> &BigInt {
        &self.p
    }

    pub fn denom(&self) -> &BigUint {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.p.is_negative()
    }

    pub fn to_radians(&self) -> f64 {
        let mag = ratio_to_f64(self.p.magnitude(), &self.q) * PI;
        if self.p.is_negative() {
            -mag
        } else {
            mag
        }
    }

    pub fn neg(&self) -> Self {
        Self::canonical(-self.p.clone(), self.q.clone())
    }

    pub fn abs(&self) -> Self {
        if self.p.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &RationalAngle) -> Self {
        let p = &self.p * BigInt::from(other.q.clone()) + &other.p * BigInt::from(self.q.clone());
        Self::canonical(p, &self.q * &other.q)
    }

    pub fn sub(&self, other: &RationalAngle) -> Self {
        self.add(&other.neg())
    }

    /// Integer multiple k·θ, reduced modulo 2π.
    pub fn scale(&self, k: &BigUint) -> Self {
        Self::canonical(&self.p * BigInt::from(k.clone()), self.q.clone())
    }

    /// sin(k·θ/2) for an integer k of any size.
    pub fn sin_half_multiple(&self, k: &BigUint) -> f64 {
        let num = &self.p * BigInt::from(k.clone());
        sin_pi_frac(&num, &(&self.q << 1u32))
    }

    /// cos(k·θ) for an integer k of any size.
    pub fn cos_multiple(&self, k: &BigUint) -> f64 {
        let num = &self.p * BigInt::from(k.clone());
        cos_pi_frac(&num, &self.q)
    }

    pub fn sin_half(&self) -> f64 {
        sin_pi_frac(&self.p, &(&self.q << 1u32))
    }

    /// Exact comparison of the absolute values of two angles.
    pub fn cmp_abs(&self, other: &RationalAngle) -> Ordering {
        let lhs = self.p.magnitude() * &other.q;
        let rhs = other.p.magnitude() * &self.q;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi*{}/{}", self.p, self.q)
    }
}

/// a/b as f64 for nonnegative big integers, accurate to a few ulps even when
/// both operands overflow f64.
pub fn ratio_to_f64(a: &BigUint, b: &BigUint) -> f64 {
    assert!(!b.is_zero());
    if a.is_zero() {
        return 0.0;
    }
    let (abits, bbits) = (a.bits(), b.bits());
    if abits <= 1000 && bbits <= 1000 {
        let (af, bf) = (a.to_f64().unwrap(), b.to_f64().unwrap());
        if af.is_finite() && bf.is_finite() {
            return af / bf;
        }
    }
    // keep 64 significant bits of each operand and carry the exponent separately
    let ashift = abits.saturating_sub(64);
    let bshift = bbits.saturating_sub(64);
    let af = (a >> ashift).to_f64().unwrap();
    let bf = (b >> bshift).to_f64().unwrap();
    let exp = ashift as i64 - bshift as i64;
    (af / bf) * 2f64.powi(exp.clamp(-2000, 2000) as i32)
}

/// Remainder of a big integer by a machine word.
pub fn mod_u64(x: &BigUint, m: u64) -> u64 {
    debug_assert!(m > 0);
    let m128 = m as u128;
    let mut r: u128 = 0;
    for d in x.iter_u64_digits().rev() {
        r = ((r << 64) | d as u128) % m128;
    }
    r as u64
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// sin(π·r/den) for a residue r in [0, 2·den).
#[inline]
pub fn sin_pi_residue(r: u64, den: u64) -> f64 {
    debug_assert!((r as u128) < 2 * den as u128);
    let (mut s, neg) = if r >= den { (r - den, true) } else { (r, false) };
    // fold onto [0, den/2] so that the f64 argument never exceeds π/2
    if s > den - s {
        s = den - s;
    }
    let v = (PI * (s as f64 / den as f64)).sin();
    if neg {
        -v
    } else {
        v
    }
}

/// cos(π·r/den) for a residue r in [0, 2·den).
#[inline]
pub fn cos_pi_residue(r: u64, den: u64) -> f64 {
    // cos(πr/den) = sin(π(den − 2r)/(2den))
    let m = 4 * den as u128;
    let num = (den as u128 + m - 2 * r as u128) % m;
    sin_pi_residue(num as u64, 2 * den)
}

/// sin(π·num/den) with the reduction modulo 2·den done exactly.
pub fn sin_pi_frac(num: &BigInt, den: &BigUint) -> f64 {
    let turn = den << 1u32;
    let r = reduce(num, &turn);
    if let (Some(r), Some(d)) = (r.to_u64(), den.to_u64()) {
        if d <= u64::MAX / 4 {
            return sin_pi_residue(r, d);
        }
    }
    // (−den, den] window, then fold for precision
    let (mut s, neg) = if r >= *den { (&r - den, true) } else { (r, false) };
    let rest = den - &s;
    if s > rest {
        s = rest;
    }
    let v = (PI * ratio_to_f64(&s, den)).sin();
    if neg {
        -v
    } else {
        v
    }
}

/// cos(π·num/den) with exact reduction.
pub fn cos_pi_frac(num: &BigInt, den: &BigUint) -> f64 {
    let turn = den << 1u32;
    let r = reduce(num, &turn);
    let four = BigInt::from_biguint(Sign::Plus, den << 2u32);
    let shifted: BigInt = BigInt::from_biguint(Sign::Plus, den.clone()) - BigInt::from(r) * BigInt::from(2u8);
    let shifted = shifted.mod_floor(&four);
    sin_pi_frac(&shifted, &(den << 1u32))
}

fn reduce(num: &BigInt, modulus: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    num.mod_floor(&m).into_parts().1
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn canonical_window_and_ties() {
        let a = RationalAngle::from_ratio(-1, 1).unwrap();
        assert_eq!(a, RationalAngle::pi());
        let b = RationalAngle::from_ratio(7, 4).unwrap();
        assert_eq!(b, RationalAngle::from_ratio(-1, 4).unwrap());
        let c = RationalAngle::from_ratio(6, 4).unwrap();
        assert_eq!(c.numer(), &BigInt::from(-1));
        assert_eq!(c.denom(), &BigUint::from(2u32));
        assert!(RationalAngle::from_ratio(4, 2).unwrap().is_zero());
        assert!(RationalAngle::new(BigInt::from(1), BigUint::zero()).is_err());
    }

    #[test]
    fn huge_multiples_reduce_exactly() {
        // θ = π/3 and k = 6·10^60 + 1: kθ ≡ π/3 (mod 2π)
        let theta = RationalAngle::from_ratio(1, 3).unwrap();
        let k: BigUint = BigUint::from(10u32).pow(60) * 6u32 + 1u32;
        assert_abs_diff_eq!(theta.cos_multiple(&k), 0.5, epsilon = 1e-15);
        // sin(kθ/2) with k = 12·10^60 + 1 → sin(π/6 + 2π·10^60) = 1/2
        let k2: BigUint = BigUint::from(10u32).pow(60) * 12u32 + 1u32;
        assert_abs_diff_eq!(theta.sin_half_multiple(&k2), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn residue_trig_matches_std() {
        for den in [1u64, 3, 7, 2001, 40001, 1 << 40] {
            for r in [0u64, 1, den / 3, den - 1, den, den + 1, 2 * den - 1] {
                if r >= 2 * den {
                    continue;
                }
                let x = PI * r as f64 / den as f64;
                assert_abs_diff_eq!(sin_pi_residue(r, den), x.sin(), epsilon = 1e-12);
                assert_abs_diff_eq!(cos_pi_residue(r, den), x.cos(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn big_denominator_path() {
        let den = BigUint::from(10u32).pow(40);
        let num = BigInt::from(BigUint::from(10u32).pow(40) / 6u32);
        assert_abs_diff_eq!(sin_pi_frac(&num, &den), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(cos_pi_frac(&(num * 2), &den), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn ratio_handles_overflowing_operands() {
        let a = BigUint::from(10u32).pow(400) * 3u32;
        let b = BigUint::from(10u32).pow(400) * 4u32;
        assert_abs_diff_eq!(ratio_to_f64(&a, &b), 0.75, epsilon = 1e-15);
        let c = BigUint::from(10u32).pow(330);
        assert_abs_diff_eq!(ratio_to_f64(&c, &BigUint::from(10u32).pow(320)), 1e10, epsilon = 1e-3);
    }

    #[test]
    fn mod_u64_matches_bigint() {
        let x = BigUint::from(3u32).pow(500) + 17u32;
        for m in [2u64, 2001, 40001 * 4 * 2048, u64::MAX - 58] {
            assert_eq!(mod_u64(&x, m), (&x % m).to_u64().unwrap());
        }
    }

    #[test]
    fn biglag_parsing() {
        let lag: BigLag = "0012345678901234567890123456789".parse().unwrap();
        assert_eq!(lag.to_string(), "12345678901234567890123456789");
        assert_eq!(lag.digits(), 29);
        assert!("-1".parse::<BigLag>().is_err());
        assert!("".parse::<BigLag>().is_err());
        assert!("12a".parse::<BigLag>().is_err());
    }
}
