use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Exact dyadic rational `num / 2^exp`, kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        let mut num = num.into();
        let mut exp = exp;
        if num.is_zero() {
            return Self { num, exp: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(u64::from(exp)) as u32;
        num >>= tz;
        exp -= tz;
        Self { num, exp }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn half() -> Self {
        Self::new(1, 1)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    /// Numerators of `self` and `other` over the common denominator `2^e`.
    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let e = self.exp.max(other.exp);
        (&self.num << (e - self.exp), &other.num << (e - other.exp), e)
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        Self::new(a + b, e + 1)
    }

    /// `self + sign · 2^{−k}`.
    pub fn add_pow2(&self, sign: i8, k: u32) -> Self {
        let e = self.exp.max(k);
        let a = &self.num << (e - self.exp);
        let b = BigInt::from(sign) << (e - k);
        Self::new(a + b, e)
    }

    pub fn to_f64(&self) -> f64 {
        // Drop low bits beyond f64 precision so huge numerators stay finite.
        let shift = (self.num.bits().saturating_sub(64)).min(u64::from(self.exp)) as u32;
        let mut value = (&self.num >> shift).to_f64().unwrap_or(f64::NAN);
        let mut e = self.exp - shift;
        while e > 0 {
            let step = e.min(1000);
            value *= 2f64.powi(-(step as i32));
            e -= step;
        }
        value
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}
