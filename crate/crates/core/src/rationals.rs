//! Exact rational arithmetic and the geometric-series identities built on it.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    /// Panics if `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Rat(BigRational::new(num.into(), den.into()))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Rat {
        Rat(self.0.recip())
    }

    /// Integer power; negative exponents invert. Panics on `0^-k`.
    pub fn pow(&self, exp: i32) -> Rat {
        Rat(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat(r)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl<'a> Neg for &'a Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

/// Always `num/den`, including integers (`2/1`).
impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rat({self})")
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `a/b` or a bare integer `a`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::domain(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(Error::domain("zero denominator"));
                }
                Ok(Rat::new(n, d))
            }
            None => Ok(Rat::from_int(s.parse::<BigInt>().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `Σ_{i=0}^{n-1} r·xⁱ`.
pub fn geom_sum_finite(r: &Rat, x: &Rat, n: u32) -> Rat {
    if n == 0 {
        return Rat::zero();
    }
    let one = Rat::one();
    if *x == one {
        return r * &Rat::from_int(n);
    }
    let n = i32::try_from(n).expect("term count fits in i32");
    r * &((&one - &x.pow(n)) / (&one - x))
}

/// `Σ_{n=0}^∞ r·xⁿ = r/(1−x)`, defined for `|x| < 1`.
pub fn geom_sum_infinite(r: &Rat, x: &Rat) -> Result<Rat> {
    if x.abs() >= Rat::one() {
        return Err(Error::domain(format!("series diverges: |x| = |{x}| >= 1")));
    }
    Ok(r / &(Rat::one() - x))
}

/// Both sides of Bernoulli's inequality `(1+h)ⁿ ≥ 1+hn`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BernoulliCheck {
    pub lhs: Rat,
    pub rhs: Rat,
    pub holds: bool,
}

pub fn bernoulli_holds(h: &Rat, n: u32) -> Result<BernoulliCheck> {
    if *h < Rat::from_int(-1) {
        return Err(Error::domain(format!("Bernoulli needs h >= -1, got {h}")));
    }
    let base = Rat::one() + h;
    let lhs = base.pow(i32::try_from(n).expect("exponent fits in i32"));
    let rhs = Rat::one() + h * &Rat::from_int(n);
    let holds = lhs >= rhs;
    Ok(BernoulliCheck { lhs, rhs, holds })
}

/// Ternary digits after the radix point: `0.(preperiod)(period)(period)...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TernaryExpansion {
    pub preperiod: Vec<u8>,
    pub period: Vec<u8>,
}

/// Terminating expansions are canonical (empty period). `1` has no
/// terminating fractional form and expands as `0.(2)`.
pub fn ternary_expand(q: &Rat) -> Result<TernaryExpansion> {
    if q.is_negative() || *q > Rat::one() {
        return Err(Error::domain(format!("ternary expansion needs 0 <= q <= 1, got {q}")));
    }
    if *q == Rat::one() {
        return Ok(TernaryExpansion {
            preperiod: vec![],
            period: vec![2],
        });
    }
    if q.is_zero() {
        return Ok(TernaryExpansion {
            preperiod: vec![0],
            period: vec![],
        });
    }
    let den = q.denom().clone();
    let three = BigInt::from(3);
    let mut rem = q.numer().clone();
    let mut seen: HashMap<BigInt, usize> = HashMap::new();
    let mut digits = Vec::new();
    loop {
        if rem.is_zero() {
            return Ok(TernaryExpansion {
                preperiod: digits,
                period: vec![],
            });
        }
        if let Some(&start) = seen.get(&rem) {
            let period = digits.split_off(start);
            return Ok(TernaryExpansion {
                preperiod: digits,
                period,
            });
        }
        seen.insert(rem.clone(), digits.len());
        let (d, r) = (&rem * &three).div_rem(&den);
        digits.push(d.to_u8().expect("ternary digit"));
        rem = r;
    }
}
