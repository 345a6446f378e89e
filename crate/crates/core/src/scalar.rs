//! Scalar abstraction shared by the whole engine.

use nalgebra as na;
use num_complex::Complex;
use num_traits as nt;

/// Real field the coefficient machinery is generic over (`f32`, `f64`).
pub trait Scalar:
    na::RealField + Copy + nt::FloatConst + nt::FromPrimitive + nt::ToPrimitive
{
    /// Machine epsilon of the type.
    const EPS: f64;

    /// Converts a literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(x).expect("literal representable in scalar type")
    }

    /// Lossy conversion used for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        nt::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn eps() -> Self {
        Self::lit(Self::EPS)
    }
}

macro_rules! impl_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            const EPS: f64 = <$f>::EPSILON as f64;
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);

/// Complex number over a [`Scalar`].
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cmod<T: Scalar>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}

/// `n!` as a scalar.
pub fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::lit(k as f64))
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
