//! Critical eigendata at a Hopf point.

use nalgebra::{DMatrix, DVector, Schur};

use crate::cvec::ComplexVec;
use crate::error::{HopfError, Result};
use crate::scalar::{cmod, Scalar, C};
use crate::tensor::VectorFieldJet;

/// How the right eigenvector `q` is scaled. `p` always follows from `<p,q> = 1`.
///
/// Magnitudes of `G_{k+1,k}` and `l_k` depend on this choice, their signs do not.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EigenvectorConvention<T: Scalar> {
    /// `q[index] = value`.
    ComponentEquals { index: usize, value: C<T> },
    /// `|q| = 1` with the largest component real and positive.
    UnitNorm,
}

impl<T: Scalar> Default for EigenvectorConvention<T> {
    fn default() -> Self {
        Self::ComponentEquals {
            index: 0,
            value: C::new(T::zero(), -T::one()),
        }
    }
}

impl<T: Scalar> EigenvectorConvention<T> {
    pub fn describe(&self) -> String {
        match self {
            Self::ComponentEquals { index, value } => {
                format!("q[{index}] = {}{:+}i", value.re.as_f64(), value.im.as_f64())
            }
            Self::UnitNorm => "|q| = 1".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HopfFrame<T: Scalar> {
    pub jet: VectorFieldJet<T>,
    pub jacobian: DMatrix<T>,
    pub omega0: T,
    /// `A q = i omega0 q`.
    pub q: ComplexVec<T>,
    /// `A^T p = -i omega0 p`, `<p, q> = 1`.
    pub p: ComplexVec<T>,
    /// Real part of the critical pair as computed (ideally zero).
    pub real_part: T,
    pub eigenvalues: Vec<C<T>>,
    pub convention: EigenvectorConvention<T>,
}

pub(crate) fn to_complex<T: Scalar>(m: &DMatrix<T>) -> DMatrix<C<T>> {
    m.map(|v| C::new(v, T::zero()))
}

/// Dense LU solve with partial pivoting; `None` when singular or non-finite.
pub(crate) fn complex_solve<T: Scalar>(m: DMatrix<C<T>>, b: &[C<T>]) -> Option<Vec<C<T>>> {
    let rhs = DVector::from_column_slice(b);
    let x = m.lu().solve(&rhs)?;
    x.iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        .then(|| x.iter().copied().collect())
}

fn inverse_iteration<T: Scalar>(m: &DMatrix<T>, mu: C<T>) -> Option<ComplexVec<T>> {
    let n = m.nrows();
    let mut shifted = to_complex(m);
    for i in 0..n {
        shifted[(i, i)] -= mu;
    }
    let lu = shifted.lu();
    let mut v = DVector::from_fn(n, |i, _| C::new(T::one(), T::lit(0.37 * (i as f64 + 1.0))));
    for _ in 0..4 {
        v = lu.solve(&v)?;
        let s = v.iter().fold(T::zero(), |acc, &z| acc.max(cmod(z)));
        if !(s.is_finite() && s > T::zero()) {
            return None;
        }
        v /= C::new(s, T::zero());
    }
    Some(ComplexVec(v.iter().copied().collect()))
}

fn mat_vec<T: Scalar>(m: &DMatrix<T>, v: &ComplexVec<T>) -> ComplexVec<T> {
    let n = m.nrows();
    ComplexVec(
        (0..n)
            .map(|i| {
                (0..n).fold(C::new(T::zero(), T::zero()), |acc, j| {
                    acc + v[j] * m[(i, j)]
                })
            })
            .collect(),
    )
}

pub fn make_frame<T: Scalar>(
    jet: &VectorFieldJet<T>,
    convention: EigenvectorConvention<T>,
) -> Result<HopfFrame<T>> {
    let a = jet.jacobian();
    let n = a.nrows();
    if a.iter().any(|v| !v.is_finite()) {
        return Err(HopfError::NonFinite {
            what: "Jacobian".into(),
        });
    }
    let scale = a.norm().max(T::one());
    let schur = Schur::try_new(a.clone(), T::eps(), 1000 * n).ok_or_else(|| {
        HopfError::DegenerateSpectrum("eigenvalue iteration did not converge".into())
    })?;
    let eigenvalues: Vec<C<T>> = schur.complex_eigenvalues().iter().copied().collect();

    let tol = T::lit(1e-8).max(T::lit(100.0) * T::eps()) * scale;
    let critical: Vec<C<T>> = eigenvalues
        .iter()
        .copied()
        .filter(|z| z.re.abs() <= tol)
        .collect();
    if critical.is_empty() {
        let nearest = eigenvalues
            .iter()
            .map(|z| z.re.abs())
            .fold(T::max_value().unwrap(), |m, v| m.min(v));
        return Err(HopfError::NotHopf(format!(
            "no eigenvalue on the imaginary axis (closest real part {:e})",
            nearest.as_f64()
        )));
    }
    let pair = critical.iter().copied().find(|z| z.im > tol);
    let lambda = match (critical.len(), pair) {
        (2, Some(l)) => l,
        (_, None) => {
            return Err(HopfError::NotHopf(
                "critical eigenvalues are real (no imaginary pair)".into(),
            ))
        }
        (c, Some(_)) => {
            return Err(HopfError::DegenerateSpectrum(format!(
                "{c} eigenvalues on the imaginary axis, expected one conjugate pair"
            )))
        }
    };
    let omega0 = lambda.im;

    let delta = T::lit(1e3) * T::eps() * scale;
    let mu = lambda + C::new(delta, delta);
    let mut q = inverse_iteration(&a, mu).ok_or_else(|| {
        HopfError::DegenerateSpectrum("right eigenvector iteration failed".into())
    })?;
    match convention {
        EigenvectorConvention::ComponentEquals { index, value } => {
            if index >= n {
                return Err(HopfError::Normalization(format!(
                    "component {index} out of range"
                )));
            }
            if cmod(q[index]) < T::lit(1e-8) * q.norm() {
                return Err(HopfError::Normalization(format!("q[{index}] vanishes")));
            }
            q = q.scale(value / q[index]);
        }
        EigenvectorConvention::UnitNorm => {
            let (imax, _) = q
                .iter()
                .enumerate()
                .fold((0, T::zero()), |(bi, bm), (i, &z)| {
                    if cmod(z) > bm {
                        (i, cmod(z))
                    } else {
                        (bi, bm)
                    }
                });
            let phase = q[imax].conj() / C::new(cmod(q[imax]), T::zero());
            q = q.scale(phase);
            q = q.scale(C::new(T::one() / q.norm(), T::zero()));
        }
    }

    let at = a.transpose();
    let p = inverse_iteration(&at, mu.conj())
        .ok_or_else(|| HopfError::DegenerateSpectrum("left eigenvector iteration failed".into()))?;
    let pq = p.inner(&q);
    if cmod(pq) < T::lit(1e-12) * p.norm() * q.norm() {
        return Err(HopfError::DegenerateSpectrum(
            "left and right eigenvectors are orthogonal".into(),
        ));
    }
    let p = p.scale(C::new(T::one(), T::zero()) / pq.conj());

    Ok(HopfFrame {
        jet: jet.clone(),
        jacobian: a,
        omega0,
        q,
        p,
        real_part: lambda.re,
        eigenvalues,
        convention,
    })
}

impl<T: Scalar> HopfFrame<T> {
    pub fn dim(&self) -> usize {
        self.jacobian.nrows()
    }

    /// `q <- c q`, `p <- p / conj(c)`; keeps `<p, q> = 1`.
    pub fn rescaled(&self, c: C<T>) -> Self {
        let mut f = self.clone();
        f.q = self.q.scale(c);
        f.p = self.p.scale(C::new(T::one(), T::zero()) / c.conj());
        f.convention = EigenvectorConvention::ComponentEquals {
            index: 0,
            value: f.q[0],
        };
        f
    }

    /// Relative residuals of `A q = i w q`, `A^T p = -i w p` and `|<p,q> - 1|`.
    pub fn residuals(&self) -> (T, T, T) {
        let iw = C::new(T::zero(), self.omega0);
        let scale = self.jacobian.norm().max(T::one());
        let rq = (&mat_vec(&self.jacobian, &self.q) - &self.q.scale(iw)).norm()
            / (scale * self.q.norm());
        let at = self.jacobian.transpose();
        let rp = (&mat_vec(&at, &self.p) + &self.p.scale(iw)).norm() / (scale * self.p.norm());
        let one = C::new(T::one(), T::zero());
        (rq, rp, cmod(self.p.inner(&self.q) - one))
    }

    /// `A v` in complex arithmetic.
    pub fn apply_jacobian(&self, v: &ComplexVec<T>) -> ComplexVec<T> {
        mat_vec(&self.jacobian, v)
    }
}
