//! Exact scalars over ℚ or a prime field.
//!
//! A [`Scalar`] is either an arbitrary-precision rational in lowest terms or a
//! canonical residue `0..p`. Integer literals are created as rationals and are
//! coerced into a prime field the first time they meet a residue, so code that
//! builds coefficients from small integers works unchanged over any field.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum FieldSpec {
    #[default]
    Rationals,
    Prime(u64),
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(FieldSpec::Prime(p))
        } else {
            Err(Error::Parse(format!("{p} is not prime")))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::from(v),
            FieldSpec::Prime(p) => Scalar::Mod {
                v: v.rem_euclid(*p as i64) as u64,
                p: *p,
            },
        }
    }

    /// Brings any scalar into this field (rationals are reduced mod p).
    pub fn coerce(&self, s: &Scalar) -> Scalar {
        match (self, s) {
            (FieldSpec::Rationals, Scalar::Mod { .. }) => {
                panic!("cannot lift a prime-field residue to the rationals")
            }
            (FieldSpec::Rationals, _) => s.clone(),
            (FieldSpec::Prime(p), _) => Scalar::Mod {
                v: s.residue(*p),
                p: *p,
            },
        }
    }

    /// Parses `"p/q"`, `"n"` (rationals) or a decimal residue (prime field).
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        match self {
            FieldSpec::Rationals => {
                let r = if let Some((n, d)) = s.split_once('/') {
                    let n = BigInt::from_str(n.trim())
                        .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
                    let d = BigInt::from_str(d.trim())
                        .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
                    if d.is_zero() {
                        return Err(Error::Parse(format!("zero denominator in {s:?}")));
                    }
                    BigRational::new(n, d)
                } else {
                    let n = BigInt::from_str(s)
                        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
                    BigRational::from_integer(n)
                };
                Ok(Scalar::rational(r))
            }
            FieldSpec::Prime(p) => {
                if s.contains('/') {
                    return self.parse_rational_as_residue(s);
                }
                let n = BigInt::from_str(s)
                    .map_err(|_| Error::Parse(format!("bad residue {s:?}")))?;
                let v = n.mod_floor(&BigInt::from(*p)).to_u64().unwrap();
                Ok(Scalar::Mod { v, p: *p })
            }
        }
    }

    fn parse_rational_as_residue(&self, s: &str) -> Result<Scalar> {
        let r = FieldSpec::Rationals.parse_scalar(s)?;
        let p = self.characteristic();
        if let Some(q) = r.to_rational() {
            if (q.denom() % BigInt::from(p)).is_zero() {
                return Err(Error::Parse(format!("{s:?} has denominator divisible by {p}")));
            }
        }
        Ok(self.coerce(&r))
    }

    /// Canonical string form: `"p/q"` over ℚ, the residue over 𝔽_p.
    pub fn format_scalar(&self, s: &Scalar) -> String {
        match self.coerce(s) {
            Scalar::Small { n, d } => format!("{n}/{d}"),
            Scalar::Big(r) => format!("{}/{}", r.numer(), r.denom()),
            Scalar::Mod { v, .. } => v.to_string(),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" || s == "QQ" || s.eq_ignore_ascii_case("rationals") {
            return Ok(FieldSpec::Rationals);
        }
        if let Some(p) = s.strip_prefix("Fp:").or_else(|| s.strip_prefix("GF:")) {
            let p: u64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad characteristic in {s:?}")))?;
            return FieldSpec::prime(p);
        }
        Err(Error::Parse(format!("unknown field {s:?} (expected Q or Fp:<p>)")))
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn rat_mod(r: &BigRational, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let n = r.numer().mod_floor(&pb).to_u64().unwrap();
    let d = r.denom().mod_floor(&pb).to_u64().unwrap();
    assert!(d != 0, "denominator not invertible mod {p}");
    mul_mod(n, inv_mod(d, p), p)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // extended Euclid on i128 to stay clear of overflow
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert_eq!(r0, 1, "{a} is not invertible mod {p}");
    t0.rem_euclid(p as i128) as u64
}

/// An exact field element. Rationals whose numerator and denominator fit in
/// an `i64` are kept inline; the representation is canonical, so derived
/// equality and hashing are value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    /// `n/d` in lowest terms with `d > 0`.
    Small { n: i64, d: i64 },
    /// A rational that does not fit the inline form.
    Big(BigRational),
    Mod { v: u64, p: u64 },
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Small { n: 0, d: 1 }
    }

    pub fn one() -> Self {
        Scalar::Small { n: 1, d: 1 }
    }

    fn from_parts(n: i128, d: i128) -> Self {
        debug_assert!(d != 0);
        let g = gcd_i128(n, d).max(1);
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Scalar::Small { n, d },
            _ => Scalar::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))),
        }
    }

    /// Canonical form of an arbitrary rational.
    pub fn rational(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Scalar::Small { n, d },
            _ => Scalar::Big(r),
        }
    }

    /// The value as a rational, `None` for prime-field residues.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Small { n, d } => Some(BigRational::new_raw(BigInt::from(*n), BigInt::from(*d))),
            Scalar::Big(r) => Some(r.clone()),
            Scalar::Mod { .. } => None,
        }
    }

    fn is_rational(&self) -> bool {
        !matches!(self, Scalar::Mod { .. })
    }

    /// `(-1)^e`.
    pub fn sign(e: i64) -> Self {
        if e.rem_euclid(2) == 0 {
            Scalar::one()
        } else {
            Scalar::Small { n: -1, d: 1 }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Small { n, .. } => *n == 0,
            Scalar::Big(r) => r.is_zero(),
            Scalar::Mod { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Small { n, d } => *n == 1 && *d == 1,
            Scalar::Big(r) => r.is_one(),
            Scalar::Mod { v, .. } => *v == 1,
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        match self {
            Scalar::Small { n, d } => Scalar::from_parts(*d as i128, *n as i128),
            Scalar::Big(r) => Scalar::rational(r.recip()),
            Scalar::Mod { v, p } => Scalar::Mod {
                v: inv_mod(*v, *p),
                p: *p,
            },
        }
    }

    /// Sum of absolute values of numerator and denominator; used as a size
    /// measure in reports, never in arithmetic.
    pub fn height(&self) -> BigInt {
        match self {
            Scalar::Small { n, d } => BigInt::from(n.unsigned_abs()) + BigInt::from(*d),
            Scalar::Big(r) => r.numer().abs() + r.denom(),
            Scalar::Mod { v, .. } => BigInt::from(*v),
        }
    }

    fn residue(&self, p: u64) -> u64 {
        match self {
            Scalar::Mod { v, p: q } => {
                assert_eq!(p, *q, "mixed prime fields");
                *v
            }
            other => rat_mod(&other.to_rational().unwrap(), p),
        }
    }

    fn binop(
        &self,
        rhs: &Scalar,
        small: impl Fn(i128, i128, i128, i128) -> (i128, i128),
        rat: impl Fn(&BigRational, &BigRational) -> BigRational,
        md: impl Fn(u64, u64, u64) -> u64,
    ) -> Scalar {
        match (self, rhs) {
            (Scalar::Small { n: a, d: b }, Scalar::Small { n: c, d }) => {
                let (n, d) = small(*a as i128, *b as i128, *c as i128, *d as i128);
                Scalar::from_parts(n, d)
            }
            (x, y) if x.is_rational() && y.is_rational() => {
                Scalar::rational(rat(&x.to_rational().unwrap(), &y.to_rational().unwrap()))
            }
            (Scalar::Mod { v, p }, y) | (y, Scalar::Mod { v, p }) => {
                let (a, b) = if self.is_rational() { (y.residue(*p), *v) } else { (*v, y.residue(*p)) };
                Scalar::Mod { v: md(a, b, *p), p: *p }
            }
            _ => unreachable!(),
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Small { n: v, d: 1 }
    }
}

impl From<i32> for Scalar {
    fn from(v: i32) -> Self {
        Scalar::from(v as i64)
    }
}

impl From<BigRational> for Scalar {
    fn from(v: BigRational) -> Self {
        Scalar::rational(v)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Small { n, d: 1 } => write!(f, "{n}"),
            Scalar::Small { n, d } => write!(f, "{n}/{d}"),
            Scalar::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Mod { v, .. } => write!(f, "{v}"),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.binop(
            rhs,
            |a, b, c, d| if b == d { (a + c, b) } else { (a * d + c * b, b * d) },
            |a, b| a + b,
            |a, b, p| ((a as u128 + b as u128) % p as u128) as u64,
        )
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.binop(
            rhs,
            |a, b, c, d| if b == d { (a - c, b) } else { (a * d - c * b, b * d) },
            |a, b| a - b,
            |a, b, p| ((a as u128 + p as u128 - b as u128) % p as u128) as u64,
        )
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b, c, d| (a * c, b * d), |a, b| a * b, mul_mod)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Small { n, d } => Scalar::from_parts(-(n as i128), d as i128),
            Scalar::Big(r) => Scalar::rational(-r),
            Scalar::Mod { v, p } => Scalar::Mod {
                v: if v == 0 { 0 } else { p - v },
                p,
            },
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let f = FieldSpec::Rationals;
        let a = f.parse_scalar("6/4").unwrap();
        assert_eq!(f.format_scalar(&a), "3/2");
        let b = f.parse_scalar("-2").unwrap();
        assert_eq!(f.format_scalar(&(a * b)), "-3/1");
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = FieldSpec::prime(7).unwrap();
        let a = f.from_i64(3);
        let b = f.from_i64(5);
        assert_eq!(f.format_scalar(&(&a * &b)), "1");
        assert_eq!(f.format_scalar(&(&a / &b)), "2");
        assert_eq!(f.format_scalar(&(-a.clone())), "4");
        // integer literal meets a residue
        assert_eq!(f.format_scalar(&(Scalar::from(-1) * a)), "4");
        assert_eq!(f.format_scalar(&f.parse_scalar("1/2").unwrap()), "4");
    }

    #[test]
    fn field_spec_parses() {
        assert_eq!("Q".parse::<FieldSpec>().unwrap(), FieldSpec::Rationals);
        assert_eq!("Fp:11".parse::<FieldSpec>().unwrap(), FieldSpec::Prime(11));
        assert!("Fp:12".parse::<FieldSpec>().is_err());
        assert!("R".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn inline_and_big_forms_agree() {
        let big = Scalar::from(i64::MAX) * Scalar::from(4);
        assert!(matches!(big, Scalar::Big(_)));
        let back = &big / &Scalar::from(3);
        assert!(matches!(back, Scalar::Big(_)));
        let small = &big / &Scalar::from(i64::MAX);
        assert_eq!(small, Scalar::from(4));
        assert!(matches!(small, Scalar::Small { .. }));
        assert_eq!(-Scalar::from(i64::MIN), Scalar::rational(BigRational::from_integer(BigInt::from(i64::MIN)) * BigRational::from_integer(BigInt::from(-1))));
        let third = Scalar::one() / Scalar::from(3);
        assert_eq!(&third + &third + third, Scalar::one());
    }

    #[test]
    fn zero_detection_across_representations() {
        let f = FieldSpec::prime(5).unwrap();
        assert!((f.from_i64(5)).is_zero());
        assert!((Scalar::from(10) * f.one()).is_zero());
        assert!(Scalar::sign(3) == -Scalar::one());
    }
}
