//! Search for parameters with a stable equilibrium and two stable cycles.
//!
//! Near the codimension-4 point the reduced displacement behaves like
//! `D(y) ~ y T (eta + l1 u + l2 u^2 + l3 u^3 + l4 u^4)` with `u ~ (y / 2 omega0)^2`.
//! With `l4 < 0`, four simple positive roots `u = a, 2a, 3a, 4a` and `eta < 0`
//! give, from the inside out, an unstable, a stable, an unstable and a stable
//! cycle around a stable equilibrium. The roots are placed on the actual
//! return map by a quasi-Newton iteration in `(beta, alpha, kappa, epsilon)`.

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use crate::error::{Result, WgssError};
use hopf_core::Transport;

use crate::locus::{
    critical_real_part, crossing_speed, lyapunov_at, newton, trace_l2_zero_curve, CriticalPoint,
    Curve, LocusOptions,
};
use crate::model::{epsilon_critical, omega0};
use crate::orbit::{
    poincare_census, settle_returns, slow_manifold_point, IcGrid, OrbitCensus, Stability,
    Tolerances,
};
use crate::params::WgssParams;

pub const TONGUE_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TongueOptions {
    /// Spacing `a` of the designed roots in `u = r^2`.
    pub spacing: f64,
    pub max_corrections: usize,
    /// Stop once every `|D / (y T)|` is below this fraction of `|l4| a^4`.
    pub rel_tol: f64,
    /// Number of seeds in the verifying census.
    pub census_seeds: usize,
}

impl Default for TongueOptions {
    fn default() -> Self {
        Self {
            spacing: 0.005,
            max_corrections: 12,
            rel_tol: 1e-3,
            census_seeds: 120,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TongueResult {
    pub schema_version: u32,
    pub params: WgssParams,
    pub codim4_point: CriticalPoint,
    /// A point of `C2` near the codimension-4 point with `l3 < 0`.
    pub h_representative: CriticalPoint,
    /// Euclidean distance in `(beta, alpha, kappa)` to the H representative.
    pub distance_to_h: f64,
    pub spacing: f64,
    /// Section amplitudes where the designed cycles sit.
    pub design_amplitudes: [f64; 4],
    /// `max |D / (y T)|` after each correction.
    pub history: Vec<f64>,
    pub census: OrbitCensus,
}

impl TongueResult {
    /// Stable equilibrium together with at least two stable cycles.
    pub fn three_stable_regimes(&self) -> bool {
        self.census.equilibrium_stability == Stability::Stable && self.census.stable_cycles() >= 2
    }
}

/// H representative on `C2` at `kappa` (above the codimension-4 point `l3 < 0`).
pub fn h_representative(kappa: f64, opts: &LocusOptions) -> Result<CriticalPoint> {
    let pts = trace_l2_zero_curve(Curve::C2, &[kappa], opts)?;
    Ok(pts[0])
}

fn scaled_displacements(p: &WgssParams, ys: &[f64; 4], tol: &Tolerances) -> Result<[f64; 4]> {
    let settle = settle_returns(p);
    let mut out = [0.0; 4];
    for (o, &y) in out.iter_mut().zip(ys) {
        let s = slow_manifold_point(p, y, settle, tol)?;
        *o = s.displacement / (s.y * s.period);
    }
    Ok(out)
}

/// Parameters whose `(eta, l1, l2, l3)` equal `t`, by Newton from `warm`.
fn realize(t: &Vector4<f64>, warm: [f64; 3], speed: f64) -> Result<WgssParams> {
    let opts = LocusOptions {
        newton_tol: 1e-11,
        ..LocusOptions::default()
    };
    let f = |x: &[f64; 3]| -> Result<[f64; 3]> {
        let l = lyapunov_at(x[0], x[1], x[2], 3, Transport::Full)?;
        Ok([l[0] - t[1], l[1] - t[2], l[2] - t[3]])
    };
    let [b, a, k] = newton(f, warm, &opts)?.x;
    let mut eps = epsilon_critical(b, a, k) + t[0] / speed;
    for _ in 0..2 {
        eps += (t[0] - critical_real_part(b, a, k, eps)?) / speed;
    }
    WgssParams::new(b, a, eps, k)
}

/// Runs the root-placement iteration from the codimension-4 point `q`
/// (full-transport coefficients) and verifies the result with a census.
pub fn search_tongue(
    q: &CriticalPoint,
    h: &CriticalPoint,
    opts: &TongueOptions,
    tol: &Tolerances,
) -> Result<TongueResult> {
    if !(q.l4 < 0.0) {
        return Err(WgssError::Argument(format!(
            "root design needs l4 < 0, got {}",
            q.l4
        )));
    }
    let speed = crossing_speed(q.beta, q.alpha, q.kappa)?;
    let a = opts.spacing;
    let l4 = q.l4;
    let mut target = Vector4::new(
        24.0 * l4 * a.powi(4),
        -50.0 * l4 * a.powi(3),
        35.0 * l4 * a * a,
        -10.0 * l4 * a,
    );
    let w = omega0(q.beta);
    let us = [a, 2.0 * a, 3.0 * a, 4.0 * a];
    let ys = us.map(|u| 2.0 * w * u.sqrt());
    let vand = Matrix4::from_fn(|i, k| us[i].powi(k as i32)).lu();

    let scale = l4.abs() * a.powi(4);
    let mut history = Vec::new();
    let mut params = realize(&target, [q.beta, q.alpha, q.kappa], speed)?;
    for _ in 0..opts.max_corrections {
        let f = scaled_displacements(&params, &ys, tol)?;
        let worst = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        history.push(worst);
        if worst < opts.rel_tol * scale {
            break;
        }
        target -= vand
            .solve(&Vector4::from(f))
            .ok_or_else(|| WgssError::Argument("singular root design".into()))?;
        params = realize(&target, [params.beta, params.alpha, params.kappa], speed)?;
    }

    let grid = IcGrid {
        s_min: 0.2 * ys[0],
        s_max: 3.0 * ys[3],
        count: opts.census_seeds,
    };
    let census = poincare_census(&params, &grid, tol)?;
    let distance_to_h = ((params.beta - h.beta).powi(2)
        + (params.alpha - h.alpha).powi(2)
        + (params.kappa - h.kappa).powi(2))
    .sqrt();
    Ok(TongueResult {
        schema_version: TONGUE_SCHEMA_VERSION,
        params,
        codim4_point: *q,
        h_representative: *h,
        distance_to_h,
        spacing: a,
        design_amplitudes: ys,
        history,
        census,
    })
}
