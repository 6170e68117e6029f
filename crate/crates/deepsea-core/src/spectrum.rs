//! Per-channel (R, G, B) radiometric triple.
//!
//! Wavelength dependence is sampled at the three color channels; all values
//! are linear relative irradiance.

use std::ops::{Add, AddAssign, Div, Mul, Sub};

use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectrum<T> {
    pub r: T,
    pub g: T,
    pub b: T,
}

impl<T: Real> Spectrum<T> {
    #[inline]
    pub fn new(r: T, g: T, b: T) -> Self {
        Self { r, g, b }
    }

    #[inline]
    pub fn splat(v: T) -> Self {
        Self::new(v, v, v)
    }

    #[inline]
    pub fn zero() -> Self {
        Self::splat(T::zero())
    }

    #[inline]
    pub fn channels(self) -> [T; 3] {
        [self.r, self.g, self.b]
    }

    #[inline]
    pub fn map(self, f: impl Fn(T) -> T) -> Self {
        Self::new(f(self.r), f(self.g), f(self.b))
    }

    #[inline]
    pub fn max_component(self) -> T {
        self.r.max(self.g).max(self.b)
    }

    #[inline]
    pub fn min_component(self) -> T {
        self.r.min(self.g).min(self.b)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.r.is_finite() && self.g.is_finite() && self.b.is_finite()
    }

    /// Per-channel transmittance `exp(-self * distance)` when `self` holds
    /// attenuation coefficients in 1/m.
    #[inline]
    pub fn transmittance(self, distance: T) -> Self {
        self.map(|eta| (-eta * distance).exp())
    }
}

impl<T: Real> Add for Spectrum<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.r + o.r, self.g + o.g, self.b + o.b)
    }
}

impl<T: Real> AddAssign for Spectrum<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        self.r += o.r;
        self.g += o.g;
        self.b += o.b;
    }
}

impl<T: Real> Sub for Spectrum<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.r - o.r, self.g - o.g, self.b - o.b)
    }
}

/// Component-wise product.
impl<T: Real> Mul for Spectrum<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(self.r * o.r, self.g * o.g, self.b * o.b)
    }
}

impl<T: Real> Mul<T> for Spectrum<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.r * s, self.g * s, self.b * s)
    }
}

impl<T: Real> Div<T> for Spectrum<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.r / s, self.g / s, self.b / s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transmittance_is_unity_at_zero_distance() {
        let eta = Spectrum::new(0.37, 0.044, 0.035);
        assert_eq!(eta.transmittance(0.0), Spectrum::splat(1.0));
    }

    #[test]
    fn component_ops() {
        let a = Spectrum::new(1.0, 2.0, 3.0);
        let b = Spectrum::new(0.5, 0.5, 2.0);
        assert_eq!(a * b, Spectrum::new(0.5, 1.0, 6.0));
        assert_eq!(a + b, Spectrum::new(1.5, 2.5, 5.0));
        assert_eq!((a * 2.0).max_component(), 6.0);
    }
}
