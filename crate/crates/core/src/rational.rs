//! Exact rational arithmetic used by every probability, reward, and value in
//! this workspace. Realizability ("non-zero probability") and argmax ties are
//! decided with zero tolerance, so floats are banned outside the Monte Carlo
//! harness.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
///
/// Serialized as a two-element `[numerator, denominator]` array. Components
/// are plain JSON integers when they fit in an `i64` and decimal strings
/// otherwise, and the loader accepts either form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational denominator must be non-zero");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "rational denominator must be non-zero");
        Rational(BigRational::new(num, den))
    }

    pub fn int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    /// Nearest f64; only the statistics layer should use this.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

fn bigint_to_json<S: Serializer>(n: &BigInt, seq: &mut S::SerializeSeq) -> Result<(), S::Error> {
    match n.to_i64() {
        Some(v) => seq.serialize_element(&v),
        None => seq.serialize_element(&n.to_string()),
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        bigint_to_json::<S>(self.numer(), &mut seq)?;
        bigint_to_json::<S>(self.denom(), &mut seq)?;
        seq.end()
    }
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a [numerator, denominator] pair of integers or integer strings")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Rational, A::Error> {
        let num: IntOrString = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(0, &self))?;
        let den: IntOrString = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(1, &self))?;
        if seq.next_element::<serde_json::Value>()?.is_some() {
            return Err(de::Error::custom("rational must have exactly two components"));
        }
        let den = den.into_bigint().map_err(de::Error::custom)?;
        if den.is_zero() {
            return Err(de::Error::custom("rational denominator must be non-zero"));
        }
        let num = num.into_bigint().map_err(de::Error::custom)?;
        Ok(Rational::from_big(num, den))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
        Ok(Rational::int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
        Ok(Rational(BigRational::from_integer(BigInt::from(v))))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntOrString {
    Int(i64),
    Str(String),
}

impl IntOrString {
    fn into_bigint(self) -> Result<BigInt, String> {
        match self {
            IntOrString::Int(v) => Ok(BigInt::from(v)),
            IntOrString::Str(s) => {
                BigInt::from_str(&s).map_err(|e| format!("invalid integer string {s:?}: {e}"))
            }
        }
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

/// Shorthand used throughout tests and builders.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lowest_terms_and_sign() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(-2, -4), rat(1, 2));
        assert_eq!(rat(2, -4), rat(-1, 2));
        assert!(rat(2, -4).denom() > &BigInt::from(0));
    }

    #[test]
    fn exact_comparison() {
        assert!(rat(1, 3) < rat(34, 100));
        assert!(rat(1, 3) > rat(33, 100));
        assert_eq!(rat(1, 3) + rat(1, 3) + rat(1, 3), Rational::one());
    }

    #[test]
    fn json_round_trip_small_and_big() {
        let r = rat(-7, 12);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "[-7,12]");
        assert_eq!(serde_json::from_str::<Rational>(&s).unwrap(), r);

        let big = Rational::from_big(
            BigInt::from_str("123456789012345678901234567890").unwrap(),
            BigInt::from(7),
        );
        let s = serde_json::to_string(&big).unwrap();
        assert_eq!(serde_json::from_str::<Rational>(&s).unwrap(), big);
        assert!(s.contains('"'), "oversized components serialize as strings");
    }

    #[test]
    fn bare_integer_accepted() {
        assert_eq!(serde_json::from_str::<Rational>("3").unwrap(), rat(3, 1));
    }

    proptest! {
        #[test]
        fn field_laws(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
            let x = rat(a, b);
            let y = rat(c, d);
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!((x.clone() - y.clone()) + y.clone(), x.clone());
            if !y.is_zero() {
                prop_assert_eq!((x.clone() / y.clone()) * y.clone(), x);
            }
        }
    }
}
