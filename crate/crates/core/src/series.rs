//! Truncated power series in `(w, w̄)`, stored by total-degree slices.

use crate::scalar::{Scalar, C};

/// `sum c_{jk} w^j w̄^k` for `j + k <= max_degree`.
///
/// `slices[d][j]` is the coefficient of `w^j w̄^(d-j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariateSeries<T: Scalar> {
    slices: Vec<Vec<C<T>>>,
}

#[inline]
fn zero<T: Scalar>() -> C<T> {
    C::new(T::zero(), T::zero())
}

/// `out[a + b] += p[a] * q[b]`: product of two homogeneous slices.
pub(crate) fn convolve_into<T: Scalar>(out: &mut [C<T>], p: &[C<T>], q: &[C<T>]) {
    debug_assert_eq!(out.len() + 1, p.len() + q.len());
    for (a, &pa) in p.iter().enumerate() {
        if pa.re.is_zero() && pa.im.is_zero() {
            continue;
        }
        for (b, &qb) in q.iter().enumerate() {
            out[a + b] += pa * qb;
        }
    }
}

impl<T: Scalar> BivariateSeries<T> {
    pub fn zeros(max_degree: usize) -> Self {
        Self {
            slices: (0..=max_degree).map(|d| vec![zero(); d + 1]).collect(),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn coeff(&self, j: usize, k: usize) -> C<T> {
        self.slices.get(j + k).map_or(zero(), |s| s[j])
    }

    pub fn set(&mut self, j: usize, k: usize, v: C<T>) {
        self.slices[j + k][j] = v;
    }

    pub fn slice(&self, d: usize) -> &[C<T>] {
        &self.slices[d]
    }

    pub fn slice_mut(&mut self, d: usize) -> &mut [C<T>] {
        &mut self.slices[d]
    }

    /// Truncated product; the result keeps the smaller truncation order.
    pub fn mul(&self, other: &Self) -> Self {
        let dmax = self.max_degree().min(other.max_degree());
        let mut out = Self::zeros(dmax);
        for d in 0..=dmax {
            for e in 0..=d {
                convolve_into(&mut out.slices[d], &self.slices[e], &other.slices[d - e]);
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Self, s: C<T>) {
        for (a, b) in self.slices.iter_mut().zip(&other.slices) {
            for (x, &y) in a.iter_mut().zip(b) {
                *x += y * s;
            }
        }
    }

    /// `d/dw`; the top slice of the result is zero.
    pub fn d_w(&self) -> Self {
        let mut out = Self::zeros(self.max_degree());
        for d in 1..=self.max_degree() {
            for j in 1..=d {
                out.slices[d - 1][j - 1] = self.slices[d][j] * T::lit(j as f64);
            }
        }
        out
    }

    /// `d/dw̄`; the top slice of the result is zero.
    pub fn d_wbar(&self) -> Self {
        let mut out = Self::zeros(self.max_degree());
        for d in 1..=self.max_degree() {
            for j in 0..d {
                out.slices[d - 1][j] = self.slices[d][j] * T::lit((d - j) as f64);
            }
        }
        out
    }

    /// Series of `conj(S(w, w̄))`: conjugate coefficients with `j`, `k` swapped.
    pub fn conj_swap(&self) -> Self {
        Self {
            slices: self
                .slices
                .iter()
                .map(|s| s.iter().rev().map(|z| z.conj()).collect())
                .collect(),
        }
    }

    pub fn eval(&self, w: C<T>) -> C<T> {
        let wb = w.conj();
        let mut acc = zero();
        for (d, s) in self.slices.iter().enumerate() {
            for (j, &c) in s.iter().enumerate() {
                acc += c * w.powu(j as u32) * wb.powu((d - j) as u32);
            }
        }
        acc
    }
}
