//! Floating-point scalar abstraction shared by the analysis modules.
//!
//! Exact geometry lives in [`crate::polytope`] and never touches this trait;
//! everything downstream of the moment map is generic over [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Stopping tolerance for Newton iterations on the decay objective.
    fn newton_tol() -> Self;
    /// Width of the numerical band around transition sets.
    fn transition_tol() -> Self;
    /// Slack allowed when testing membership of a computed point in a face.
    fn feasibility_tol() -> Self;
}

impl Real for f64 {
    fn newton_tol() -> Self {
        1e-13
    }
    fn transition_tol() -> Self {
        1e-7
    }
    fn feasibility_tol() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn newton_tol() -> Self {
        1e-5
    }
    fn transition_tol() -> Self {
        1e-3
    }
    fn feasibility_tol() -> Self {
        1e-4
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable")
}

#[inline]
pub fn from_i64<T: Real>(x: i64) -> T {
    T::from_i64(x).expect("integer representable")
}

/// `log(Σ exp(x_i))` with a running maximum; `-∞` for an empty slice.
pub fn log_sum_exp<T: Real>(values: &[T]) -> T {
    let max = values
        .iter()
        .copied()
        .fold(T::neg_infinity(), |acc, x| acc.max(x));
    if max == T::neg_infinity() {
        return max;
    }
    let sum: T = values.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// Streaming log-sum-exp accumulator.
#[derive(Clone, Copy, Debug)]
pub struct LogSumExp<T> {
    max: T,
    scaled: T,
}

impl<T: Real> Default for LogSumExp<T> {
    fn default() -> Self {
        Self {
            max: T::neg_infinity(),
            scaled: T::zero(),
        }
    }
}

impl<T: Real> LogSumExp<T> {
    pub fn push(&mut self, x: T) {
        if x == T::neg_infinity() {
            return;
        }
        if x <= self.max {
            self.scaled = self.scaled + (x - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - x).exp() + T::one();
            self.max = x;
        }
    }

    pub fn value(&self) -> T {
        if self.max == T::neg_infinity() {
            self.max
        } else {
            self.max + self.scaled.ln()
        }
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma<T: Real>(x: T) -> T {
    if x < lit(0.5) {
        // reflection
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = lit::<T>(LANCZOS_COEF[0]);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc = acc + lit::<T>(c) / (x + from_i64(i as i64));
    }
    let t = x + lit(LANCZOS_G + 0.5);
    lit::<T>(0.5) * (T::PI() + T::PI()).ln() + (x + lit(0.5)) * t.ln() - t + acc.ln()
}

/// `log(n!)` for small non-negative integers.
pub fn ln_factorial<T: Real>(n: i64) -> T {
    debug_assert!(n >= 0);
    if n < 2 {
        T::zero()
    } else {
        ln_gamma(from_i64::<T>(n + 1))
    }
}

/// Log of the multinomial coefficient `total! / (α_1!⋯α_m! (total-|α|)!)`.
pub fn ln_multinomial<T: Real>(total: i64, alpha: &[i64]) -> T {
    let rest = total - alpha.iter().sum::<i64>();
    debug_assert!(rest >= 0 && alpha.iter().all(|&a| a >= 0));
    let mut v = ln_factorial::<T>(total) - ln_factorial::<T>(rest);
    for &a in alpha {
        v = v - ln_factorial::<T>(a);
    }
    v
}

/// `x log x` with the convention `0 log 0 = 0`.
#[inline]
pub fn xlogx<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x * x.ln()
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
