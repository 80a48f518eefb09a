//! Exact scalars over the rationals or a prime field.
//!
//! Every number in the engine is a [`Scalar`]. Arithmetic is exact: rationals
//! are kept as reduced fractions of big integers, prime-field elements as the
//! least nonnegative residue. There is no floating point anywhere.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// The ground field of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    Rationals,
    PrimeField { p: u64 },
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec::Rationals
    }

    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec::PrimeField { p })
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField { p } => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::zero()),
            FieldSpec::PrimeField { p } => Scalar::Mod { value: 0, p: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::one()),
            FieldSpec::PrimeField { p } => Scalar::Mod { value: 1 % *p, p: *p },
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::PrimeField { p } => {
                let m = n.rem_euclid(*p as i64) as u64;
                Scalar::Mod { value: m, p: *p }
            }
        }
    }

    /// Parses a canonical scalar string: `"n"` or `"n/d"` over the rationals,
    /// an integer (reduced mod p) over a prime field.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let bad = |m: &str| Error::Parse {
            location: format!("scalar {s:?}"),
            message: m.to_string(),
        };
        match self {
            FieldSpec::Rationals => {
                let (num, den) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let n: BigInt = num.trim().parse().map_err(|_| bad("bad numerator"))?;
                let d: BigInt = den.trim().parse().map_err(|_| bad("bad denominator"))?;
                if d.is_zero() {
                    return Err(bad("zero denominator"));
                }
                Ok(Scalar::Rat(BigRational::new(n, d)))
            }
            FieldSpec::PrimeField { p } => {
                let n: i128 = s.trim().parse().map_err(|_| bad("bad integer"))?;
                let m = n.rem_euclid(*p as i128) as u64;
                Ok(Scalar::Mod { value: m, p: *p })
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField { p } => write!(f, "F{p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact field element: a reduced fraction or a least nonnegative residue.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod { value: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rat(_) => FieldSpec::Rationals,
            Scalar::Mod { p, .. } => FieldSpec::PrimeField { p: *p },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Mod { value, p } => *value == 1 % *p,
        }
    }

    pub fn inverse(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::Invalid("division by zero".into()));
        }
        match self {
            Scalar::Rat(r) => Ok(Scalar::Rat(r.recip())),
            Scalar::Mod { value, p } => Ok(Scalar::Mod {
                value: mod_inverse(*value, *p),
                p: *p,
            }),
        }
    }

    fn check_same(&self, other: &Scalar) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(format!(
                "{} vs {}",
                self.field(),
                other.field()
            )));
        }
        Ok(())
    }

    /// Canonical text form: `n` or `n/d` over Q (fraction fully reduced,
    /// denominator positive), the least nonnegative residue over F_p.
    pub fn canonical_string(&self) -> String {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    format!("{}", r.numer())
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod { value, .. } => format!("{value}"),
        }
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // extended Euclid on signed 128-bit; p is prime and a != 0 mod p
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "not invertible mod p");
    t.rem_euclid(p as i128) as u64
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.check_same(rhs).expect("mixed-field arithmetic");
                match (self, rhs) {
                    (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a $op b),
                    (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, .. }) => {
                        let v = ((*a as i128) $op (*b as i128)).rem_euclid(*p as i128) as u64;
                        Scalar::Mod { value: v, p: *p }
                    }
                    _ => unreachable!(),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

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

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Mod { value, p } => Scalar::Mod {
                value: if *value == 0 { 0 } else { p - value },
                p: *p,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

/// Reduces a rational scalar to F_p. Fails when the denominator vanishes mod p.
pub fn reduce_mod_p(s: &Scalar, p: u64) -> Result<Scalar> {
    match s {
        Scalar::Mod { value, p: q } if *q == p => Ok(Scalar::Mod { value: *value, p }),
        Scalar::Mod { .. } => Err(Error::FieldMismatch(
            "cannot reduce between distinct prime fields".into(),
        )),
        Scalar::Rat(r) => {
            let pp = BigInt::from(p);
            let den = r.denom() % &pp;
            if den.is_zero() {
                return Err(Error::FieldMismatch(format!(
                    "denominator of {} vanishes mod {p}",
                    s
                )));
            }
            let num = ((r.numer() % &pp) + &pp) % &pp;
            let num_u: u64 = num.try_into().unwrap();
            let den_u: u64 = (((r.denom() % &pp) + &pp) % &pp).try_into().unwrap();
            let v = (num_u as u128 * mod_inverse(den_u, p) as u128 % p as u128) as u64;
            Ok(Scalar::Mod { value: v, p })
        }
    }
}

/// `(-1)^{ab}` as a sign without leaving parity arithmetic.
pub fn sign_pow(parity: i64) -> i64 {
    if parity.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl Scalar {
    pub fn abs_num_size(&self) -> usize {
        match self {
            Scalar::Rat(r) => r.numer().abs().bits() as usize + r.denom().bits() as usize,
            Scalar::Mod { .. } => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_canonical_form() {
        let f = FieldSpec::Rationals;
        let x = f.parse("6/4").unwrap();
        assert_eq!(x.canonical_string(), "3/2");
        let y = f.parse("-3/-6").unwrap();
        assert_eq!(y.canonical_string(), "1/2");
        let z = f.parse("-3/7").unwrap();
        assert_eq!(z.canonical_string(), "-3/7");
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = FieldSpec::prime(7).unwrap();
        let a = f.from_i64(5);
        let b = f.from_i64(4);
        assert_eq!((&a * &b).canonical_string(), "6");
        assert_eq!((&a + &b).canonical_string(), "2");
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_one());
    }

    #[test]
    fn rejects_non_prime() {
        assert!(FieldSpec::prime(6).is_err());
        assert!(FieldSpec::prime(1).is_err());
        assert!(FieldSpec::prime(2).is_ok());
    }

    #[test]
    fn reduction_mod_p() {
        let f = FieldSpec::Rationals;
        let x = f.parse("1/2").unwrap();
        let r = reduce_mod_p(&x, 5).unwrap();
        // 1/2 = 3 mod 5
        assert_eq!(r.canonical_string(), "3");
        let y = f.parse("1/5").unwrap();
        assert!(reduce_mod_p(&y, 5).is_err());
    }

    #[test]
    #[should_panic(expected = "mixed-field")]
    fn mixed_fields_panic() {
        let a = FieldSpec::Rationals.one();
        let b = FieldSpec::prime(3).unwrap().one();
        let _ = &a + &b;
    }
}
