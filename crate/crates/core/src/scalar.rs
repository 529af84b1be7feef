use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the math modules are written against.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute tolerance for geometric predicates, in meters.
    fn geom_tolerance() -> Self;

    /// Converts an `f64` literal. Every `f64` has an `f32` approximation, so
    /// this never fails for the two implementors.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn geom_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    #[inline]
    fn geom_tolerance() -> Self {
        1e-4
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle<T: Scalar>(angle: T) -> T {
    let pi = T::lit(std::f64::consts::PI);
    let two_pi = pi + pi;
    let mut r = angle % two_pi;
    if r < T::zero() {
        r = r + two_pi;
    }
    if r > pi {
        r - two_pi
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
        assert!((wrap_angle(7.0 * PI / 2.0) - (-PI / 2.0)).abs() < 1e-12);
        assert!((wrap_angle(-0.3f32) + 0.3).abs() < 1e-6);
    }
}
