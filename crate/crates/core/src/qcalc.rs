//! q-numbers and the two splitting rules used to rewrite brackets:
//! the base change `[ab]_q = [a]_q [b]_{q^a}` and the additive split
//! `[c + d]_q = [c]_q + q^c [d]_q`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, parse_rational, pow_nonzero, BigRational};

/// A rational `q` outside `{0, 1, -1}`.
///
/// For rational `q` this rules out every root of unity, so `q^k != 1` for all
/// `k >= 1` and no q-number `[k]_q` with `k != 0` vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QParam(BigRational);

impl QParam {
    pub fn new(q: BigRational) -> Result<Self> {
        if q.is_zero() || q.is_one() || q == -BigRational::one() {
            return Err(Error::InvalidQ(format_rational(&q)));
        }
        Ok(Self(q))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn pow(&self, e: i64) -> BigRational {
        pow_nonzero(&self.0, e)
    }

    /// `q^e` as a new parameter; stays valid for every `e >= 1`.
    pub fn power(&self, e: u64) -> QParam {
        assert!(e >= 1, "base change exponent must be positive");
        QParam(self.pow(i64::try_from(e).expect("exponent fits in i64")))
    }

    /// `[x]_q` for integer `x`.
    pub fn bracket(&self, x: i64) -> BigRational {
        (BigRational::one() - self.pow(x)) / (BigRational::one() - &self.0)
    }
}

impl fmt::Display for QParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl FromStr for QParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QParam::new(parse_rational(s)?)
    }
}

impl TryFrom<BigRational> for QParam {
    type Error = Error;

    fn try_from(q: BigRational) -> Result<Self> {
        QParam::new(q)
    }
}

impl Serialize for QParam {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for QParam {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// `[x]_q = (1 - q^x) / (1 - q)`, with the limit value `x` at `q = 1`.
pub fn q_number(x: i64, q: &BigRational) -> Result<BigRational> {
    if q.is_zero() {
        return Err(Error::InvalidQ(format_rational(q)));
    }
    if q.is_one() {
        return Ok(int(x));
    }
    Ok((BigRational::one() - pow_nonzero(q, x)) / (BigRational::one() - q))
}

/// `[numer / denom]_{q^denom} = (1 - q^numer) / (1 - q^denom)`.
///
/// Evaluates a bracket with a fractional argument in a base-changed q-number
/// while keeping every exponent of `q` an integer.
pub fn q_number_fractional(numer: i64, denom: u64, q: &QParam) -> BigRational {
    assert!(denom >= 1);
    let d = i64::try_from(denom).expect("exponent fits in i64");
    (BigRational::one() - q.pow(numer)) / (BigRational::one() - q.pow(d))
}

/// Returns `([a]_q, [b]_{q^a})`, whose product is `[ab]_q`.
pub fn q_base_change_split(a: u64, b: u64, q: &QParam) -> (BigRational, BigRational) {
    assert!(a >= 1 && b >= 1, "base change needs positive integers");
    let b = i64::try_from(b).expect("b fits in i64");
    let outer = q.bracket(i64::try_from(a).expect("a fits in i64"));
    let inner = q.power(a).bracket(b);
    (outer, inner)
}

/// Returns `([c]_q, q^c, [d]_q)` with `[c]_q + q^c [d]_q = [c + d]_q`.
pub fn q_shift_split(c: u64, d: i64, q: &QParam) -> (BigRational, BigRational, BigRational) {
    let c = i64::try_from(c).expect("c fits in i64");
    (q.bracket(c), q.pow(c), q.bracket(d))
}
