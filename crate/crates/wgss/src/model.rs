//! The governor vector field, its equilibrium and closed-form quantities.

use std::f64::consts::FRAC_PI_2;

use hopf_core::{
    jet_from_callable, make_frame, run_ladder, CoefficientLadder, DerivativeMethod,
    EigenvectorConvention, HopfFrame, LadderOptions, Scalar, SmoothField, VectorFieldJet, C,
};

use crate::error::Result;
use crate::params::WgssParams;

/// `f(x, y, z) = (y, (z^2 + kappa) sin x cos x - sin x - eps y, alpha (cos x - beta))`.
pub fn vector_field(s: [f64; 3], p: &WgssParams) -> [f64; 3] {
    let [x, y, z] = s;
    let (sx, cx) = x.sin_cos();
    [
        y,
        (z * z + p.kappa) * sx * cx - sx - p.epsilon * y,
        p.alpha * (cx - p.beta),
    ]
}

/// Jacobian of [`vector_field`] at an arbitrary state.
pub fn jacobian_at(s: [f64; 3], p: &WgssParams) -> [[f64; 3]; 3] {
    let [x, _, z] = s;
    let (sx, cx) = x.sin_cos();
    let c2 = (2.0 * x).cos();
    [
        [0.0, 1.0, 0.0],
        [(z * z + p.kappa) * c2 - cx, -p.epsilon, 2.0 * z * sx * cx],
        [-p.alpha * sx, 0.0, 0.0],
    ]
}

/// The governor without spring, written in the classical form with
/// `g/l`-type constants already scaled out.
pub fn standard_field(s: [f64; 3], beta: f64, alpha: f64, epsilon: f64) -> [f64; 3] {
    let [x, y, z] = s;
    [
        y,
        z * z * x.sin() * x.cos() - x.sin() - epsilon * y,
        alpha * (x.cos() - beta),
    ]
}

/// The unique admissible equilibrium `(arccos beta, 0, sqrt(1/beta - kappa))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Equilibrium {
    pub x0: f64,
    pub y0: f64,
    pub z0: f64,
}

impl Equilibrium {
    pub fn of(p: &WgssParams) -> Self {
        Self {
            x0: p.beta.acos(),
            y0: 0.0,
            z0: (1.0 / p.beta - p.kappa).sqrt(),
        }
    }

    pub fn state(&self) -> [f64; 3] {
        [self.x0, self.y0, self.z0]
    }
}

pub fn epsilon_critical(beta: f64, alpha: f64, kappa: f64) -> f64 {
    2.0 * alpha * beta.powf(1.5) * (1.0 - kappa * beta).sqrt()
}

/// `omega0 = sqrt((1 - beta^2) / beta)`.
pub fn omega0(beta: f64) -> f64 {
    ((1.0 - beta * beta) / beta).sqrt()
}

/// Nondimensional non-uniformity `1 / (2 beta^{3/2} sqrt(1 - kappa beta))`.
pub fn nonuniformity(beta: f64, kappa: f64) -> f64 {
    1.0 / (2.0 * beta.powf(1.5) * (1.0 - kappa * beta).sqrt())
}

/// `Df(P0)[1][2] = z0 sin 2x0`.
pub fn xi(beta: f64, kappa: f64) -> f64 {
    2.0 * beta.sqrt() * (1.0 - beta * beta).sqrt() * (1.0 - kappa * beta).sqrt()
}

/// Polynomial carrying the sign of `l1` on the critical hypersurface.
pub fn g1(beta: f64, alpha: f64, kappa: f64) -> f64 {
    let (b, a2, k) = (beta, alpha * alpha, kappa);
    let a4 = a2 * a2;
    -3.0 + 5.0 * k * b - (a2 - 5.0) * b.powi(2) + k * (a2 - 7.0) * b.powi(3)
        - 2.0 * a2 * k * k * b.powi(4)
        - (a4 - 2.0 * a2 * k * k) * b.powi(6)
        + a4 * k * b.powi(7)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: f64) -> Self {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// `sign(l1) = sign(G1)` on `epsilon = epsilon_c`.
pub fn l1_closed_form_sign(beta: f64, alpha: f64, kappa: f64) -> Sign {
    Sign::of(g1(beta, alpha, kappa))
}

/// The vector field as a [`SmoothField`] with closed-form partials.
#[derive(Clone, Copy, Debug)]
pub struct WgssField<T: Scalar> {
    pub beta: T,
    pub alpha: T,
    pub epsilon: T,
    pub kappa: T,
}

impl<T: Scalar> WgssField<T> {
    pub fn new(p: &WgssParams) -> Self {
        Self {
            beta: T::lit(p.beta),
            alpha: T::lit(p.alpha),
            epsilon: T::lit(p.epsilon),
            kappa: T::lit(p.kappa),
        }
    }
}

impl<T: Scalar> SmoothField<T> for WgssField<T> {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, s: &[T], out: &mut [T]) {
        let (x, y, z) = (s[0], s[1], s[2]);
        let (sx, cx) = (x.sin(), x.cos());
        out[0] = y;
        out[1] = (z * z + self.kappa) * sx * cx - sx - self.epsilon * y;
        out[2] = self.alpha * (cx - self.beta);
    }

    fn partial(&self, s: &[T], component: usize, multi: &[usize]) -> Option<T> {
        let mut cnt = [0usize; 3];
        for &i in multi {
            cnt[i] += 1;
        }
        let [a, ay, c] = cnt;
        let (x, y, z) = (s[0], s[1], s[2]);
        let half_pi = T::lit(FRAC_PI_2);
        let shifted = |arg: T, n: usize| arg + half_pi * T::lit(n as f64);
        Some(match component {
            0 => {
                if a == 0 && ay == 1 && c == 0 {
                    T::one()
                } else if multi.is_empty() {
                    y
                } else {
                    T::zero()
                }
            }
            1 => {
                if ay > 0 {
                    return Some(if ay == 1 && a == 0 && c == 0 {
                        -self.epsilon
                    } else {
                        T::zero()
                    });
                }
                let zf = match c {
                    0 => z * z + self.kappa,
                    1 => T::lit(2.0) * z,
                    2 => T::lit(2.0),
                    _ => T::zero(),
                };
                // (z^2 + kappa) sin x cos x = (z^2 + kappa) sin(2x) / 2
                let mut v = zf
                    * T::lit(0.5)
                    * T::lit(2f64.powi(a as i32))
                    * shifted(T::lit(2.0) * x, a).sin();
                if c == 0 {
                    v -= shifted(x, a).sin();
                }
                if a == 0 && c == 0 {
                    v -= self.epsilon * y;
                }
                v
            }
            2 => {
                if ay > 0 || c > 0 {
                    T::zero()
                } else if a == 0 {
                    self.alpha * (x.cos() - self.beta)
                } else {
                    self.alpha * shifted(x, a).cos()
                }
            }
            _ => return None,
        })
    }
}

/// Jet of orders `1..=order` at `P0` from closed-form derivatives.
pub fn analytic_jet<T: Scalar>(p: &WgssParams, order: usize) -> Result<VectorFieldJet<T>> {
    let e = Equilibrium::of(p);
    let x0 = [T::lit(e.x0), T::lit(e.y0), T::lit(e.z0)];
    Ok(jet_from_callable(
        &WgssField::<T>::new(p),
        &x0,
        order,
        DerivativeMethod::Analytic,
    )?)
}

/// Finite-difference jet (orders <= 4), for cross-checks.
pub fn finite_difference_jet(p: &WgssParams, order: usize) -> Result<VectorFieldJet<f64>> {
    let e = Equilibrium::of(p);
    Ok(jet_from_callable(
        &WgssField::<f64>::new(p),
        &e.state(),
        order,
        DerivativeMethod::FiniteDifference,
    )?)
}

/// Frame with the default `q[0] = -i` convention.
pub fn frame(p: &WgssParams, order: usize) -> Result<HopfFrame<f64>> {
    Ok(make_frame(
        &analytic_jet::<f64>(p, order)?,
        EigenvectorConvention::default(),
    )?)
}

/// Jet, frame and ladder in one call.
pub fn ladder(p: &WgssParams, opts: LadderOptions) -> Result<CoefficientLadder<f64>> {
    let f = frame(p, 2 * opts.up_to + 1)?;
    Ok(run_ladder(&f, opts)?)
}

/// Exact right eigenvector for `q[0] = -i`: `(-i, omega0, alpha sqrt(1-beta^2)/omega0)`.
pub fn exact_q(beta: f64, alpha: f64) -> [C<f64>; 3] {
    let w = omega0(beta);
    [
        C::new(0.0, -1.0),
        C::new(w, 0.0),
        C::new(alpha * (1.0 - beta * beta).sqrt() / w, 0.0),
    ]
}
