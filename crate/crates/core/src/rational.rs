//! Rational scalars for the exact engine.
//!
//! Backed by `num-rational`, whose constructors reduce to lowest terms with a
//! positive denominator, so `==` is structural equality of canonical forms.

use std::str::FromStr;

pub use num_bigint::BigInt;
use num_integer::Integer;
pub use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_add(a: &BigRational, b: &BigRational) -> BigRational {
    a + b
}

pub fn rat_mul(a: &BigRational, b: &BigRational) -> BigRational {
    a * b
}

pub fn rat_neg(a: &BigRational) -> BigRational {
    -a
}

pub fn rat_inv(a: &BigRational) -> Result<BigRational> {
    if a.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a.recip())
}

pub fn rat_div(a: &BigRational, b: &BigRational) -> Result<BigRational> {
    Ok(a * rat_inv(b)?)
}

/// Integer power with `0^0 = 1`.
pub fn rat_pow(a: &BigRational, e: i64) -> Result<BigRational> {
    if e == 0 {
        return Ok(BigRational::one());
    }
    if a.is_zero() {
        return if e < 0 {
            Err(Error::ZeroToNegativePower(e))
        } else {
            Ok(BigRational::zero())
        };
    }
    let magnitude = usize::try_from(e.unsigned_abs()).expect("exponent fits in usize");
    let numer = num_traits::pow(a.numer().clone(), magnitude);
    let denom = num_traits::pow(a.denom().clone(), magnitude);
    Ok(if e > 0 {
        BigRational::new(numer, denom)
    } else {
        BigRational::new(denom, numer)
    })
}

/// Power of a value already known to be nonzero.
pub(crate) fn pow_nonzero(a: &BigRational, e: i64) -> BigRational {
    rat_pow(a, e).expect("base is nonzero")
}

/// Binomial coefficient, `0` when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Re-reduces a possibly non-canonical ratio.
pub fn normalize(a: &BigRational) -> BigRational {
    BigRational::new(a.numer().clone(), a.denom().clone())
}

pub fn is_canonical(a: &BigRational) -> bool {
    a.denom().is_positive() && a.numer().gcd(a.denom()).is_one()
}

/// Renders `num/den`, omitting `/den` when the denominator is 1.
pub fn format_rational(a: &BigRational) -> String {
    if a.denom().is_one() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

/// Parses `num/den` or `num`; the result is reduced.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let err = || Error::ParseRational(text.to_string());
    let trimmed = text.trim();
    let (numer, denom) = match trimmed.split_once('/') {
        Some((n, d)) => (n, d),
        None => (trimmed, "1"),
    };
    let numer = BigInt::from_str(numer).map_err(|_| err())?;
    let denom = BigInt::from_str(denom).map_err(|_| err())?;
    if denom.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(numer, denom))
}

/// Serde adapter storing a rational as its `num/den` text.
pub mod serde_text {
    use super::{format_rational, parse_rational, BigRational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            value: &Option<BigRational>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            match value {
                Some(v) => s.serialize_some(&format_rational(v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<BigRational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| parse_rational(&t).map_err(D::Error::custom))
                .transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn field_examples() {
        assert_eq!(rat_add(&ratio(1, 3), &ratio(1, 6)), ratio(1, 2));
        assert_eq!(rat_mul(&ratio(2, 3), &ratio(3, 2)), int(1));
        let inv = rat_inv(&ratio(-7, 4)).unwrap();
        assert_eq!(inv, ratio(-4, 7));
        assert!(inv.denom().is_positive());
        assert_eq!(rat_neg(&ratio(5, 2)), ratio(-5, 2));
        assert_eq!(rat_inv(&int(0)), Err(Error::DivisionByZero));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(rat_pow(&int(2), -1).unwrap(), ratio(1, 2));
        assert_eq!(rat_pow(&ratio(3, 5), 0).unwrap(), int(1));
        assert_eq!(rat_pow(&int(-2), 3).unwrap(), int(-8));
        assert_eq!(rat_pow(&int(0), 0).unwrap(), int(1));
        assert_eq!(rat_pow(&int(0), 4).unwrap(), int(0));
        assert_eq!(rat_pow(&int(0), -2), Err(Error::ZeroToNegativePower(-2)));
        assert_eq!(rat_pow(&ratio(-2, 3), -3).unwrap(), ratio(-27, 8));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        for n in 0..10 {
            assert_eq!(binomial(n, 0), BigInt::one());
        }
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(64, 32), BigInt::from(1_832_624_140_942_590_534u64));
    }

    #[test]
    fn pascal_rule() {
        for n in 1..=64u64 {
            for k in 1..n {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
            assert_eq!(binomial(n, n), BigInt::one());
        }
    }

    #[test]
    fn text_format() {
        assert_eq!(format_rational(&ratio(-1, 3)), "-1/3");
        assert_eq!(format_rational(&int(7)), "7");
        assert_eq!(parse_rational("6/-4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational(" 3/5 ").unwrap(), ratio(3, 5));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("").is_err());
    }

    fn small_rational() -> impl Strategy<Value = BigRational> {
        (-1000i64..1000, 1i64..500).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn field_axioms(a in small_rational(), b in small_rational(), c in small_rational()) {
            prop_assert_eq!(rat_add(&rat_add(&a, &b), &c), rat_add(&a, &rat_add(&b, &c)));
            prop_assert_eq!(rat_mul(&rat_mul(&a, &b), &c), rat_mul(&a, &rat_mul(&b, &c)));
            prop_assert_eq!(
                rat_mul(&a, &rat_add(&b, &c)),
                rat_add(&rat_mul(&a, &b), &rat_mul(&a, &c))
            );
            prop_assert_eq!(rat_add(&a, &rat_neg(&a)), int(0));
            if !a.is_zero() {
                prop_assert_eq!(rat_mul(&a, &rat_inv(&a).unwrap()), int(1));
            }
            prop_assert!(is_canonical(&rat_mul(&a, &b)));
        }

        #[test]
        fn normalize_is_idempotent(n in -10_000i64..10_000, d in 1i64..10_000, s in 1i64..50) {
            let raw = BigRational::new_raw(BigInt::from(n * s), BigInt::from(d * s));
            let once = normalize(&raw);
            prop_assert!(is_canonical(&once));
            prop_assert_eq!(normalize(&once), once);
        }

        #[test]
        fn text_round_trip(a in small_rational()) {
            let text = format_rational(&a);
            prop_assert_eq!(parse_rational(&text).unwrap(), a);
        }
    }
}
