//! Scalar abstraction shared by every module.
//!
//! All of the numerical code is written against [`Scalar`], which is
//! implemented for `f32` and `f64`. Comparisons go through [`Tolerance`],
//! a mixed absolute/relative slack whose defaults depend on the precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar usable by the norm oracles and the algorithms.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Default absolute comparison slack.
    fn default_abs_tol() -> Self;
    /// Default relative comparison slack.
    fn default_rel_tol() -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn default_abs_tol() -> Self {
        1e-12
    }
    fn default_rel_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn default_abs_tol() -> Self {
        1e-6
    }
    fn default_rel_tol() -> Self {
        1e-5
    }
}

/// Mixed absolute + relative comparison slack: `abs + rel * |reference|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
}

impl<T: Scalar> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            abs: T::default_abs_tol(),
            rel: T::default_rel_tol(),
        }
    }
}

impl<T: Scalar> Tolerance<T> {
    pub fn new(abs: T, rel: T) -> Self {
        Self { abs, rel }
    }

    #[inline]
    pub fn slack(&self, reference: T) -> T {
        self.abs + self.rel * reference.abs()
    }

    /// `a <= b` up to slack measured against `b`.
    #[inline]
    pub fn le(&self, a: T, b: T) -> bool {
        a <= b + self.slack(b.abs().max(a.abs()))
    }

    /// `a >= b` up to slack measured against `b`.
    #[inline]
    pub fn ge(&self, a: T, b: T) -> bool {
        self.le(b, a)
    }

    #[inline]
    pub fn eq(&self, a: T, b: T) -> bool {
        (a - b).abs() <= self.slack(a.abs().max(b.abs()))
    }
}

/// Kahan–Babuška compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Scalar> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn kahan_sum<T: Scalar, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().collect::<CompensatedSum<T>>().value()
}

/// Largest integer `j >= 0` with `2^j <= x` (up to tolerance). Returns 0 for `x < 2`.
pub fn floor_log2<T: Scalar>(x: T, tol: &Tolerance<T>) -> u32 {
    let two = T::of(2.0);
    let mut j = 0u32;
    let mut pow = two;
    while tol.le(pow, x) && j < 1024 {
        j += 1;
        pow = pow * two;
    }
    j
}

/// Smallest integer `j >= 0` with `2^j >= x` (up to tolerance).
pub fn ceil_log2<T: Scalar>(x: T, tol: &Tolerance<T>) -> u32 {
    let two = T::of(2.0);
    let mut j = 0u32;
    let mut pow = T::one();
    while !tol.ge(pow, x) && j < 1024 {
        j += 1;
        pow = pow * two;
    }
    j
}
