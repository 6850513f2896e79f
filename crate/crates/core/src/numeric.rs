//! Scalar abstraction shared by the exact (rational) and floating-point modes,
//! plus compensated summation.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

/// Arbitrary-precision rational used for exact identity checks.
pub type Rational = BigRational;

/// Field of mass values a [`crate::measures::CylinderMeasure`] can carry.
pub trait Scalar: Clone + PartialOrd + Debug + Send + Sync + Signed + 'static {
    fn from_u64(v: u64) -> Self;

    fn from_ratio(num: i64, den: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// 2^{-j}
    fn pow2_inv(j: u32) -> Self;
}

impl Scalar for f64 {
    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn pow2_inv(j: u32) -> Self {
        (-(j as f64)).exp2()
    }
}

impl Scalar for Rational {
    fn from_u64(v: u64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: u64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn pow2_inv(j: u32) -> Self {
        Rational::new(BigInt::from(1), BigInt::from(1u8) << j)
    }
}

/// Kahan–Babuška (Neumaier) compensated sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &KahanSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Harmonic number H_n = 1 + 1/2 + ... + 1/n, summed with compensation.
pub fn harmonic(n: u64) -> f64 {
    let mut acc = KahanSum::new();
    for j in 1..=n {
        acc.add(1.0 / j as f64);
    }
    acc.value()
}

/// Exact H_n for small n.
pub fn harmonic_exact(n: u64) -> Rational {
    let mut acc = Rational::from_u64(0);
    for j in 1..=n {
        acc += Rational::from_ratio(1, j);
    }
    acc
}
