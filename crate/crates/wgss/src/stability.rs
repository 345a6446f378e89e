//! Linear stability of the equilibrium.

use hopf_core::C;
use nalgebra::Matrix3;

use crate::model::{epsilon_critical, jacobian_at, omega0, Equilibrium};
use crate::params::WgssParams;

/// Routh–Hurwitz test for `l^3 + p1 l^2 + p2 l + p3`.
pub fn routh_hurwitz_stable(p1: f64, p2: f64, p3: f64) -> bool {
    p1 > 0.0 && p2 > 0.0 && p3 > 0.0 && p1 * p2 > p3
}

/// `(p1, p2, p3) = (epsilon, omega0^2, epsilon_c omega0^2)`.
pub fn characteristic_coefficients(p: &WgssParams) -> (f64, f64, f64) {
    let w2 = omega0(p.beta).powi(2);
    (
        p.epsilon,
        w2,
        epsilon_critical(p.beta, p.alpha, p.kappa) * w2,
    )
}

pub fn jacobian_at_equilibrium(p: &WgssParams) -> Matrix3<f64> {
    let j = jacobian_at(Equilibrium::of(p).state(), p);
    Matrix3::from_fn(|r, c| j[r][c])
}

pub fn eigenvalues(p: &WgssParams) -> [C<f64>; 3] {
    let e = jacobian_at_equilibrium(p).complex_eigenvalues();
    [e[0], e[1], e[2]]
}

/// Verdict from the spectrum: every eigenvalue strictly in the left half-plane.
pub fn stable_by_eigenvalues(p: &WgssParams) -> bool {
    eigenvalues(p).iter().all(|l| l.re < 0.0)
}

pub fn stable_by_routh_hurwitz(p: &WgssParams) -> bool {
    let (p1, p2, p3) = characteristic_coefficients(p);
    routh_hurwitz_stable(p1, p2, p3)
}
