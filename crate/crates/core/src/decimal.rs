//! Fixed-point decimal numbers backed by a big integer mantissa.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// `mantissa / 10^scale`. Arithmetic truncates toward zero at the larger scale
/// of the operands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal {
    mantissa: BigInt,
    scale: u32,
}

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

impl Decimal {
    pub fn zero(scale: u32) -> Self {
        Decimal { mantissa: BigInt::zero(), scale }
    }

    pub fn one(scale: u32) -> Self {
        Decimal { mantissa: pow10(scale), scale }
    }

    pub fn from_mantissa(mantissa: BigInt, scale: u32) -> Self {
        Decimal { mantissa, scale }
    }

    /// Rounds to nearest at the requested scale.
    pub fn from_ratio(r: &BigRational, scale: u32) -> Self {
        let num: BigInt = r.numer() * pow10(scale) * 2 + r.denom();
        let den: BigInt = r.denom() * 2;
        Decimal { mantissa: num.div_floor(&den), scale }
    }

    pub fn from_int(n: i64, scale: u32) -> Self {
        Decimal { mantissa: BigInt::from(n) * pow10(scale), scale }
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn rescale(&self, scale: u32) -> Self {
        match scale.cmp(&self.scale) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => Decimal { mantissa: &self.mantissa * pow10(scale - self.scale), scale },
            Ordering::Less => Decimal { mantissa: &self.mantissa / pow10(self.scale - scale), scale },
        }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let s = self.scale.max(other.scale);
        (self.rescale(s).mantissa, other.rescale(s).mantissa, s)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, s) = self.aligned(other);
        Decimal { mantissa: a + b, scale: s }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b, s) = self.aligned(other);
        Decimal { mantissa: a - b, scale: s }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b, s) = self.aligned(other);
        Decimal { mantissa: a * b / pow10(s), scale: s }
    }

    pub fn div(&self, other: &Self) -> Self {
        let (a, b, s) = self.aligned(other);
        assert!(!b.is_zero(), "decimal division by zero");
        Decimal { mantissa: a * pow10(s) / b, scale: s }
    }

    pub fn mul_ratio(&self, r: &BigRational) -> Self {
        Decimal { mantissa: &self.mantissa * r.numer() / r.denom(), scale: self.scale }
    }

    pub fn abs(&self) -> Self {
        Decimal { mantissa: self.mantissa.abs(), scale: self.scale }
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(self.mantissa.clone(), pow10(self.scale))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_ratio().to_f64().unwrap_or(f64::NAN)
    }

    /// Number of leading decimal digits (after the point) on which two values agree,
    /// measured as `floor(-log10 |a - b|)`, capped at the common scale.
    pub fn agreement_digits(&self, other: &Self) -> u32 {
        let d = self.sub(other).abs();
        if d.mantissa.is_zero() {
            return d.scale;
        }
        let digits = d.mantissa.to_str_radix(10).len() as u32;
        d.scale.saturating_sub(digits)
    }

    /// Truncated to `digits` places after the point.
    pub fn to_string_digits(&self, digits: u32) -> String {
        let d = self.rescale(digits);
        let neg = d.mantissa.is_negative();
        let s = d.mantissa.abs().to_str_radix(10);
        let body = if digits == 0 {
            s
        } else {
            let padded = if s.len() <= digits as usize {
                format!("{}{}", "0".repeat(digits as usize + 1 - s.len()), s)
            } else {
                s
            };
            let cut = padded.len() - digits as usize;
            format!("{}.{}", &padded[..cut], &padded[cut..])
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    pub fn one_like(&self) -> Self {
        Decimal::one(self.scale)
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_digits(self.scale))
    }
}

/// `exp(x)` for small `|x|` by Taylor series at the scale of `x`.
pub fn exp_small(x: &Decimal) -> Decimal {
    let one = x.one_like();
    let mut term = one.clone();
    let mut sum = one;
    for k in 1..200i64 {
        term = term.mul(x).div(&Decimal::from_int(k, x.scale()));
        if term.mantissa().is_zero() {
            break;
        }
        sum = sum.add(&term);
    }
    sum
}

impl Decimal {
    pub fn is_one(&self) -> bool {
        self.mantissa == pow10(self.scale)
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut r = self.one_like();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }
}

impl From<&Decimal> for BigRational {
    fn from(d: &Decimal) -> Self {
        d.to_ratio()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn formatting() {
        let d = Decimal::from_ratio(&rat(1, 3), 5);
        assert_eq!(d.to_string(), "0.33333");
        assert_eq!(Decimal::from_ratio(&rat(2, 3), 3).to_string(), "0.667");
        assert_eq!(Decimal::from_ratio(&rat(-5, 4), 2).to_string(), "-1.25");
        assert_eq!(Decimal::from_int(7, 0).to_string(), "7");
    }

    #[test]
    fn arithmetic() {
        let a = Decimal::from_ratio(&rat(1, 7), 30);
        let b = Decimal::from_int(7, 30);
        let p = a.mul(&b);
        assert!(p.agreement_digits(&Decimal::one(30)) >= 28);
        let q = Decimal::one(30).div(&b);
        assert!(q.agreement_digits(&a) >= 29);
    }

    #[test]
    fn exp_series() {
        let x = Decimal::from_ratio(&rat(1, 1000), 30);
        let e = exp_small(&x);
        // e^{0.001} = 1.001000500166708341668055753993...
        assert_eq!(e.to_string_digits(20), "1.00100050016670834166");
    }
}
