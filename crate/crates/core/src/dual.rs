//! Forward-mode dual numbers.
//!
//! `Dual<T>` is generic over its component type, so second and third
//! derivatives come from nesting (`Dual<Dual<f64>>`, ...). Every field in
//! this crate is written once against [`Scalar`] and evaluated at whatever
//! nesting depth the caller needs.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Arithmetic needed by field formulas: a field evaluated on `f64` gives
/// values, on `Dual<f64>` a first directional derivative, and so on.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    /// Embeds a constant.
    fn cst(x: f64) -> Self;
    /// The underlying real part, stripping every infinitesimal.
    fn real(&self) -> f64;
    fn sqrt(self) -> Self;
    fn scale(self, k: f64) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
}

impl Scalar for f64 {
    #[inline]
    fn cst(x: f64) -> Self {
        x
    }
    #[inline]
    fn real(&self) -> f64 {
        *self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn scale(self, k: f64) -> Self {
        self * k
    }
}

/// `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    #[inline]
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    #[inline]
    pub fn constant(re: T) -> Self {
        Dual { re, eps: T::zero() }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Dual::new(self.re + rhs.re, self.eps + rhs.eps)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Dual::new(self.re - rhs.re, self.eps - rhs.eps)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Dual::new(self.re * rhs.re, self.re * rhs.eps + self.eps * rhs.re)
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let re = self.re / rhs.re;
        Dual::new(re, (self.eps - re * rhs.eps) / rhs.re)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<T: Scalar> AddAssign for Dual<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.re += rhs.re;
        self.eps += rhs.eps;
    }
}

impl<T: Scalar> SubAssign for Dual<T> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.re -= rhs.re;
        self.eps -= rhs.eps;
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    #[inline]
    fn cst(x: f64) -> Self {
        Dual::constant(T::cst(x))
    }
    #[inline]
    fn real(&self) -> f64 {
        self.re.real()
    }
    #[inline]
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.eps / s.scale(2.0))
    }
    #[inline]
    fn scale(self, k: f64) -> Self {
        Dual::new(self.re.scale(k), self.eps.scale(k))
    }
}

/// Seeds `x + t·dir` as dual numbers.
pub fn seed<S: Scalar>(x: &[S], dir: &[S]) -> Vec<Dual<S>> {
    x.iter().zip(dir).map(|(&a, &b)| Dual::new(a, b)).collect()
}

/// Lifts constants into the dual layer.
pub fn lift<S: Scalar>(x: &[S]) -> Vec<Dual<S>> {
    x.iter().map(|&a| Dual::constant(a)).collect()
}

pub fn to_scalar<S: Scalar>(x: &[f64]) -> Vec<S> {
    x.iter().map(|&a| S::cst(a)).collect()
}

pub fn reals<S: Scalar>(x: &[S]) -> Vec<f64> {
    x.iter().map(Scalar::real).collect()
}
