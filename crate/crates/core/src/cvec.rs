use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::scalar::{cmod, Scalar, C};

/// Vector in `C^n`.
///
/// The inner product is conjugate-linear in the first slot,
/// `<p, q> = sum conj(p_i) q_i`.
#[derive(Clone, PartialEq)]
pub struct ComplexVec<T: Scalar>(pub Vec<C<T>>);

impl<T: Scalar> ComplexVec<T> {
    pub fn zeros(n: usize) -> Self {
        Self(vec![C::new(T::zero(), T::zero()); n])
    }

    pub fn from_real(v: &[T]) -> Self {
        Self(v.iter().map(|&x| C::new(x, T::zero())).collect())
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = C::new(T::one(), T::zero());
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    /// `<self, other> = sum conj(self_i) other_i`.
    pub fn inner(&self, other: &Self) -> C<T> {
        assert_eq!(
            self.dim(),
            other.dim(),
            "inner product of mismatched vectors"
        );
        self.0
            .iter()
            .zip(&other.0)
            .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            })
    }

    pub fn norm(&self) -> T {
        self.0
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &z| acc.max(cmod(z)))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self(self.0.iter().map(|&z| z * s).collect())
    }

    pub fn re(&self) -> Vec<T> {
        self.0.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<T> {
        self.0.iter().map(|z| z.im).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C<T>> {
        self.0.iter()
    }

    /// `max_i |self_i - other_i| / max(|other|_inf, floor)`.
    pub fn rel_diff(&self, other: &Self, floor: T) -> T {
        let diff = (self - other).max_abs();
        diff / other.max_abs().max(floor)
    }
}

impl<T: Scalar> Index<usize> for ComplexVec<T> {
    type Output = C<T>;
    fn index(&self, i: usize) -> &C<T> {
        &self.0[i]
    }
}

impl<T: Scalar> IndexMut<usize> for ComplexVec<T> {
    fn index_mut(&mut self, i: usize) -> &mut C<T> {
        &mut self.0[i]
    }
}

impl<T: Scalar> Add for &ComplexVec<T> {
    type Output = ComplexVec<T>;
    fn add(self, rhs: Self) -> ComplexVec<T> {
        ComplexVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<T: Scalar> Sub for &ComplexVec<T> {
    type Output = ComplexVec<T>;
    fn sub(self, rhs: Self) -> ComplexVec<T> {
        ComplexVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl<T: Scalar> Neg for &ComplexVec<T> {
    type Output = ComplexVec<T>;
    fn neg(self) -> ComplexVec<T> {
        ComplexVec(self.0.iter().map(|a| -a).collect())
    }
}

impl<T: Scalar> Mul<C<T>> for &ComplexVec<T> {
    type Output = ComplexVec<T>;
    fn mul(self, s: C<T>) -> ComplexVec<T> {
        self.scale(s)
    }
}

impl<T: Scalar> fmt::Debug for ComplexVec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, z) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}{:+}i", z.re, z.im)?;
        }
        f.write_str(")")
    }
}
