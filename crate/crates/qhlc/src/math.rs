//! f64 math shims so the crate builds without `std`.
//!
//! With `std` enabled the inherent methods win and this trait is unused.

#![cfg_attr(feature = "std", allow(dead_code))]

#[cfg(not(feature = "std"))]
pub(crate) trait FloatExt {
    fn sqrt(self) -> Self;
    fn cos(self) -> Self;
    fn acos(self) -> Self;
    fn hypot(self, other: Self) -> Self;
}

#[cfg(not(feature = "std"))]
impl FloatExt for f64 {
    fn sqrt(self) -> f64 {
        libm::sqrt(self)
    }
    fn cos(self) -> f64 {
        libm::cos(self)
    }
    fn acos(self) -> f64 {
        libm::acos(self)
    }
    fn hypot(self, other: f64) -> f64 {
        libm::hypot(self, other)
    }
}
