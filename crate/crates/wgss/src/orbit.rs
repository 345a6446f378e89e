//! Direct integration, Poincaré returns on `x = x0` and the cycle census.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WgssError};
use crate::model::{jacobian_at, omega0, vector_field, Equilibrium};
use crate::params::WgssParams;
use crate::stability::stable_by_routh_hurwitz;

pub const CENSUS_SCHEMA_VERSION: u32 = 1;
pub const TRAJECTORY_SCHEMA_VERSION: u32 = 1;

// Fehlberg 7(8) tableau; the field is autonomous so the nodes are not needed.
const A: [[f64; 12]; 13] = [
    [0.0; 12],
    [
        2.0 / 27.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        1.0 / 36.0,
        1.0 / 12.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        1.0 / 24.0,
        0.0,
        1.0 / 8.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        5.0 / 12.0,
        0.0,
        -25.0 / 16.0,
        25.0 / 16.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        1.0 / 20.0,
        0.0,
        0.0,
        0.25,
        0.2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        -25.0 / 108.0,
        0.0,
        0.0,
        125.0 / 108.0,
        -65.0 / 27.0,
        125.0 / 54.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        31.0 / 300.0,
        0.0,
        0.0,
        0.0,
        61.0 / 225.0,
        -2.0 / 9.0,
        13.0 / 900.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.0,
        0.0,
        0.0,
        -53.0 / 6.0,
        704.0 / 45.0,
        -107.0 / 9.0,
        67.0 / 90.0,
        3.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        -91.0 / 108.0,
        0.0,
        0.0,
        23.0 / 108.0,
        -976.0 / 135.0,
        311.0 / 54.0,
        -19.0 / 60.0,
        17.0 / 6.0,
        -1.0 / 12.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2383.0 / 4100.0,
        0.0,
        0.0,
        -341.0 / 164.0,
        4496.0 / 1025.0,
        -301.0 / 82.0,
        2133.0 / 4100.0,
        45.0 / 82.0,
        45.0 / 164.0,
        18.0 / 41.0,
        0.0,
        0.0,
    ],
    [
        3.0 / 205.0,
        0.0,
        0.0,
        0.0,
        0.0,
        -6.0 / 41.0,
        -3.0 / 205.0,
        -3.0 / 41.0,
        3.0 / 41.0,
        6.0 / 41.0,
        0.0,
        0.0,
    ],
    [
        -1777.0 / 4100.0,
        0.0,
        0.0,
        -341.0 / 164.0,
        4496.0 / 1025.0,
        -289.0 / 82.0,
        2193.0 / 4100.0,
        51.0 / 82.0,
        33.0 / 164.0,
        12.0 / 41.0,
        0.0,
        1.0,
    ],
];
const B: [f64; 13] = [
    41.0 / 840.0,
    0.0,
    0.0,
    0.0,
    0.0,
    34.0 / 105.0,
    9.0 / 35.0,
    9.0 / 35.0,
    9.0 / 280.0,
    9.0 / 280.0,
    41.0 / 840.0,
    0.0,
    0.0,
];
const ERR: f64 = 41.0 / 840.0;

/// Step-size control for the embedded 7(8) pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            h_init: 1e-2,
            h_min: 1e-12,
            h_max: 0.5,
            max_steps: 5_000_000,
        }
    }
}

impl Tolerances {
    pub fn with_rtol(self, rtol: f64) -> Self {
        Self {
            rtol,
            atol: rtol * 1e-2,
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.rtol <= 1e-10) {
            return Err(WgssError::Argument(format!(
                "rtol must lie in (0, 1e-10], got {}",
                self.rtol
            )));
        }
        if !(self.atol > 0.0 && self.h_min > 0.0 && self.h_max >= self.h_min && self.h_init > 0.0) {
            return Err(WgssError::Argument(
                "atol and step bounds must be positive".into(),
            ));
        }
        Ok(())
    }
}

struct Stepper {
    k: Vec<Vec<f64>>,
    tmp: Vec<f64>,
}

impl Stepper {
    fn new(n: usize) -> Self {
        Self {
            k: vec![vec![0.0; n]; 13],
            tmp: vec![0.0; n],
        }
    }

    /// One step of size `h`; writes the 7th-order solution and returns the scaled error.
    fn step<F: Fn(&[f64], &mut [f64])>(
        &mut self,
        f: &F,
        y: &[f64],
        h: f64,
        out: &mut [f64],
        tol: &Tolerances,
    ) -> f64 {
        let n = y.len();
        for s in 0..13 {
            for i in 0..n {
                let mut acc = y[i];
                for (r, a) in A[s].iter().enumerate().take(s) {
                    if *a != 0.0 {
                        acc += h * a * self.k[r][i];
                    }
                }
                self.tmp[i] = acc;
            }
            f(&self.tmp, &mut self.k[s]);
        }
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut acc = y[i];
            for s in 0..13 {
                if B[s] != 0.0 {
                    acc += h * B[s] * self.k[s][i];
                }
            }
            out[i] = acc;
            let e =
                (ERR * h * (self.k[0][i] + self.k[10][i] - self.k[11][i] - self.k[12][i])).abs();
            let sc = tol.atol + tol.rtol * y[i].abs().max(acc.abs());
            err = err.max(e / sc);
        }
        if out.iter().all(|v| v.is_finite()) {
            err
        } else {
            f64::INFINITY
        }
    }
}

enum Flow {
    Continue,
    Stop,
}

/// Adaptive driver over `|t| <= |t_end|`; `t_end < 0` integrates backwards.
/// The observer sees every accepted step `(t0, y0, t1, y1)`.
fn drive<F, O>(
    f: &F,
    y0: &[f64],
    t_end: f64,
    tol: &Tolerances,
    mut obs: O,
) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64], &mut [f64]),
    O: FnMut(f64, &[f64], f64, &[f64]) -> Result<Flow>,
{
    tol.validate()?;
    let dir = if t_end < 0.0 { -1.0 } else { 1.0 };
    let mut st = Stepper::new(y0.len());
    let mut y = y0.to_vec();
    let mut next = vec![0.0; y0.len()];
    let mut t = 0.0;
    let mut h = tol.h_init.min(tol.h_max);
    let mut steps = 0;
    while dir * (t_end - t) > 0.0 {
        if steps >= tol.max_steps {
            return Err(WgssError::Integration(format!(
                "step budget {} exhausted at t = {t}",
                tol.max_steps
            )));
        }
        let hs = h.min(dir * (t_end - t));
        let err = st.step(f, &y, dir * hs, &mut next, tol);
        if err <= 1.0 {
            let t1 = t + dir * hs;
            steps += 1;
            let flow = obs(t, &y, t1, &next)?;
            std::mem::swap(&mut y, &mut next);
            t = t1;
            if let Flow::Stop = flow {
                break;
            }
        }
        let fac = if err == 0.0 {
            4.0
        } else {
            (0.9 * err.powf(-1.0 / 8.0)).clamp(0.1, 4.0)
        };
        h = (hs * fac).min(tol.h_max);
        if h < tol.h_min {
            return Err(WgssError::Integration(format!(
                "step size underflow (h = {h:e}) at t = {t}; stiff or singular"
            )));
        }
    }
    Ok((t, y))
}

fn field(p: WgssParams) -> impl Fn(&[f64], &mut [f64]) {
    move |y: &[f64], out: &mut [f64]| out.copy_from_slice(&vector_field([y[0], y[1], y[2]], &p))
}

/// Phase domain `(0, pi/2) x R x [0, inf)`.
pub fn in_domain(s: &[f64]) -> bool {
    s.iter().all(|v| v.is_finite()) && s[0] > 0.0 && s[0] < FRAC_PI_2 && s[2] >= 0.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExitFlag {
    Completed,
    LeftDomain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub states: Vec<[f64; 3]>,
    pub exit: ExitFlag,
}

impl Trajectory {
    pub fn last(&self) -> [f64; 3] {
        *self
            .states
            .last()
            .expect("trajectory holds the initial state")
    }

    /// `t,x,y,z` with a header row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x,y,z\n");
        for (t, [x, y, z]) in self.t.iter().zip(&self.states) {
            s.push_str(&format!("{t:.12e},{x:.12e},{y:.12e},{z:.12e}\n"));
        }
        s
    }
}

fn check_start(s: [f64; 3]) -> Result<()> {
    if in_domain(&s) {
        Ok(())
    } else {
        Err(WgssError::Domain(format!(
            "initial state {s:?} outside (0,pi/2) x R x [0,inf)"
        )))
    }
}

/// Records every accepted step; stops early with [`ExitFlag::LeftDomain`].
pub fn integrate(p: &WgssParams, s0: [f64; 3], t_end: f64, tol: &Tolerances) -> Result<Trajectory> {
    check_start(s0)?;
    let mut tr = Trajectory {
        t: vec![0.0],
        states: vec![s0],
        exit: ExitFlag::Completed,
    };
    drive(&field(*p), &s0, t_end, tol, |_, _, t1, y1| {
        if !in_domain(y1) {
            tr.exit = ExitFlag::LeftDomain;
            return Ok(Flow::Stop);
        }
        tr.t.push(t1);
        tr.states.push([y1[0], y1[1], y1[2]]);
        Ok(Flow::Continue)
    })?;
    Ok(tr)
}

/// State and fundamental matrix `Phi(t)` with `Phi(0) = I`.
pub fn flow_with_variations(
    p: &WgssParams,
    s0: [f64; 3],
    t: f64,
    tol: &Tolerances,
) -> Result<([f64; 3], [[f64; 3]; 3])> {
    let p = *p;
    let f = move |y: &[f64], out: &mut [f64]| {
        let s = [y[0], y[1], y[2]];
        let v = vector_field(s, &p);
        out[..3].copy_from_slice(&v);
        let j = jacobian_at(s, &p);
        for r in 0..3 {
            for c in 0..3 {
                out[3 + 3 * r + c] = (0..3).map(|m| j[r][m] * y[3 + 3 * m + c]).sum();
            }
        }
    };
    let mut y0 = vec![0.0; 12];
    y0[..3].copy_from_slice(&s0);
    for i in 0..3 {
        y0[3 + 4 * i] = 1.0;
    }
    let (_, y) = drive(&f, &y0, t, tol, |_, _, _, _| Ok(Flow::Continue))?;
    let mut m = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            m[r][c] = y[3 + 3 * r + c];
        }
    }
    Ok(([y[0], y[1], y[2]], m))
}

/// `det Phi(t)`; equals `exp(-epsilon t)` since the divergence is `-epsilon`.
pub fn volume_ratio(p: &WgssParams, s0: [f64; 3], t: f64, tol: &Tolerances) -> Result<f64> {
    let (_, m) = flow_with_variations(p, s0, t, tol)?;
    Ok(nalgebra::Matrix3::from_fn(|r, c| m[r][c]).determinant())
}

/// A point of `x = x0` crossed with `y > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub t: f64,
    pub state: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReturnExit {
    Complete,
    LeftDomain,
    Budget,
}

/// Lands exactly on `x = x0` by one step in `x` as independent variable.
fn henon_step(p: &WgssParams, y: &[f64], t: f64, x0: f64, tol: &Tolerances) -> Option<Crossing> {
    let p = *p;
    let g = move |u: &[f64], out: &mut [f64]| {
        let v = vector_field([u[0], u[1], u[2]], &p);
        let inv = 1.0 / v[0];
        out[0] = 1.0;
        out[1] = v[1] * inv;
        out[2] = v[2] * inv;
        out[3] = inv;
    };
    let mut st = Stepper::new(4);
    let u = [y[0], y[1], y[2], t];
    let mut out = [0.0; 4];
    st.step(&g, &u, x0 - y[0], &mut out, tol);
    (out.iter().all(|v| v.is_finite()) && out[1] > 0.0).then_some(Crossing {
        t: out[3],
        state: [x0, out[1], out[2]],
    })
}

/// First `n` crossings of `x = x0` with `y > 0`, forward or (for `t_budget < 0`) backward in time.
pub fn section_returns(
    p: &WgssParams,
    s0: [f64; 3],
    n: usize,
    t_budget: f64,
    tol: &Tolerances,
) -> Result<(Vec<Crossing>, ReturnExit)> {
    check_start(s0)?;
    let x0 = Equilibrium::of(p).x0;
    let mut hits = Vec::with_capacity(n);
    let mut exit = ReturnExit::Budget;
    if n == 0 {
        return Ok((hits, ReturnExit::Complete));
    }
    drive(&field(*p), &s0, t_budget, tol, |_, y0, t1, y1| {
        if !in_domain(y1) {
            exit = ReturnExit::LeftDomain;
            return Ok(Flow::Stop);
        }
        let (g0, g1) = (y0[0] - x0, y1[0] - x0);
        let crossed = (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0);
        if crossed && y1[1] > 0.0 {
            if let Some(c) = henon_step(p, y1, t1, x0, tol) {
                hits.push(c);
                if hits.len() == n {
                    exit = ReturnExit::Complete;
                    return Ok(Flow::Stop);
                }
            }
        }
        Ok(Flow::Continue)
    })?;
    Ok((hits, exit))
}

/// Linear period `2 pi / omega0`.
pub fn linear_period(p: &WgssParams) -> f64 {
    2.0 * PI / omega0(p.beta)
}

/// Returns needed before a seed lies on the slow manifold to ~1e-12.
pub fn settle_returns(p: &WgssParams) -> usize {
    let per = p.epsilon * linear_period(p);
    ((27.6 / per).ceil() as usize).clamp(2, 40)
}

/// One sample of the reduced return map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReturnSample {
    pub seed: f64,
    /// Section coordinate `y` after settling.
    pub y: f64,
    /// `y_{n+1} - y_n` on the slow manifold.
    pub displacement: f64,
    pub period: f64,
    pub state: [f64; 3],
}

/// Seeds `(x0, s, z0)` and measures the displacement after `settle` returns.
pub fn reduced_return(
    p: &WgssParams,
    s: f64,
    settle: usize,
    tol: &Tolerances,
) -> Result<std::result::Result<ReturnSample, ReturnExit>> {
    let e = Equilibrium::of(p);
    let budget = (settle as f64 + 1.0) * 4.0 * linear_period(p);
    let (hits, exit) = section_returns(p, [e.x0, s, e.z0], settle + 1, budget, tol)?;
    if exit != ReturnExit::Complete {
        return Ok(Err(exit));
    }
    let (a, b) = (hits[settle - 1], hits[settle]);
    Ok(Ok(ReturnSample {
        seed: s,
        y: a.state[1],
        displacement: b.state[1] - a.state[1],
        period: b.t - a.t,
        state: a.state,
    }))
}

/// Seed grid `s_min..=s_max` on the line `(x0, s, z0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcGrid {
    pub s_min: f64,
    pub s_max: f64,
    pub count: usize,
}

impl IcGrid {
    pub fn seeds(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.s_min];
        }
        (0..self.count)
            .map(|i| self.s_min + (self.s_max - self.s_min) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CycleReport {
    /// Section coordinate `y` where the cycle crosses `x = x0`.
    pub amplitude: f64,
    pub period: f64,
    pub stability: Stability,
    /// Moduli of the two nontrivial Floquet multipliers (Poincaré map eigenvalues).
    pub multipliers: [f64; 2],
    /// Slope of the reduced return map `y -> y_next`.
    pub return_map_derivative: f64,
    pub state: [f64; 3],
}

impl CycleReport {
    /// Floquet verdict and return-map slope verdict coincide.
    pub fn flags_agree(&self) -> bool {
        (self.return_map_derivative.abs() < 1.0) == (self.stability == Stability::Stable)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitCensus {
    pub schema_version: u32,
    pub params: WgssParams,
    pub equilibrium_stability: Stability,
    pub cycles: Vec<CycleReport>,
    pub grid: IcGrid,
    pub settle_returns: usize,
    pub rtol: f64,
    /// Seeds without enough section crossings inside the time budget.
    pub inconclusive: usize,
    pub left_domain: usize,
}

impl OrbitCensus {
    pub fn stable_cycles(&self) -> usize {
        self.cycles
            .iter()
            .filter(|c| c.stability == Stability::Stable)
            .count()
    }

    pub fn unstable_cycles(&self) -> usize {
        self.cycles.len() - self.stable_cycles()
    }
}

/// Moduli of the eigenvalues of the Poincaré map at a point of the section.
pub fn section_multipliers(
    p: &WgssParams,
    state: [f64; 3],
    period: f64,
    tol: &Tolerances,
) -> Result<[f64; 2]> {
    let (_, m) = flow_with_variations(p, state, period, tol)?;
    let f = vector_field(state, p);
    // DP = (I - f e0^T / f0) M, restricted to (y, z)
    let dp = |r: usize, c: usize| m[r][c] - f[r] / f[0] * m[0][c];
    let (a, b, c, d) = (dp(1, 1), dp(1, 2), dp(2, 1), dp(2, 2));
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr / 4.0 - det;
    let mut mu = if disc >= 0.0 {
        let r = disc.sqrt();
        let big = tr / 2.0 + r.copysign(tr);
        let small = if big != 0.0 {
            det / big
        } else {
            tr / 2.0 - r.copysign(tr)
        };
        [big.abs(), small.abs()]
    } else {
        [det.abs().sqrt(); 2]
    };
    mu.sort_by(|x, y| y.total_cmp(x));
    Ok(mu)
}

fn bisect_cycle(
    p: &WgssParams,
    mut lo: ReturnSample,
    mut hi: ReturnSample,
    settle: usize,
    tol: &Tolerances,
) -> Result<ReturnSample> {
    for _ in 0..80 {
        if lo.displacement == 0.0 {
            return Ok(lo);
        }
        if hi.displacement == 0.0 || (hi.seed - lo.seed).abs() <= 1e-14 * hi.seed.abs().max(1e-300)
        {
            return Ok(hi);
        }
        let mid = 0.5 * (lo.seed + hi.seed);
        match reduced_return(p, mid, settle, tol)? {
            Ok(m) => {
                if (m.displacement < 0.0) == (lo.displacement < 0.0) {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            Err(e) => {
                return Err(WgssError::Integration(format!(
                    "cycle bisection lost the section ({e:?})"
                )))
            }
        }
    }
    Ok(if lo.displacement.abs() < hi.displacement.abs() {
        lo
    } else {
        hi
    })
}

fn return_map_slope(
    p: &WgssParams,
    at: &ReturnSample,
    settle: usize,
    tol: &Tolerances,
) -> Result<f64> {
    let d = 1e-3 * at.seed;
    let a = reduced_return(p, at.seed - d, settle, tol)?;
    let b = reduced_return(p, at.seed + d, settle, tol)?;
    match (a, b) {
        (Ok(a), Ok(b)) if b.y != a.y => Ok(1.0 + (b.displacement - a.displacement) / (b.y - a.y)),
        _ => Err(WgssError::Integration(
            "return-map slope probe failed".into(),
        )),
    }
}

/// Cycle data at a point of the section lying on the cycle.
pub fn describe_cycle(
    p: &WgssParams,
    at: &ReturnSample,
    settle: usize,
    tol: &Tolerances,
) -> Result<CycleReport> {
    let multipliers = section_multipliers(p, at.state, at.period, tol)?;
    Ok(CycleReport {
        amplitude: at.y,
        period: at.period,
        stability: if multipliers[0] < 1.0 {
            Stability::Stable
        } else {
            Stability::Unstable
        },
        multipliers,
        return_map_derivative: return_map_slope(p, at, settle, tol)?,
        state: at.state,
    })
}

/// Returns within this distance in section coordinates are one cycle.
pub const CLUSTER_TOL: f64 = 1e-5;

/// Fixed points of the reduced return map over a line of seeds.
pub fn poincare_census(p: &WgssParams, grid: &IcGrid, tol: &Tolerances) -> Result<OrbitCensus> {
    if grid.count == 0 || !(grid.s_min >= 0.0) || grid.s_max < grid.s_min {
        return Err(WgssError::Argument(format!("invalid seed grid {grid:?}")));
    }
    let settle = settle_returns(p);
    let samples: Vec<_> = grid
        .seeds()
        .into_par_iter()
        .map(|s| reduced_return(p, s, settle, tol))
        .collect::<Result<_>>()?;
    let mut inconclusive = 0;
    let mut left_domain = 0;
    for s in &samples {
        match s {
            Err(ReturnExit::LeftDomain) => left_domain += 1,
            Err(_) => inconclusive += 1,
            Ok(_) => {}
        }
    }
    let brackets: Vec<(ReturnSample, ReturnSample)> = samples
        .windows(2)
        .filter_map(|w| match (&w[0], &w[1]) {
            (Ok(a), Ok(b))
                if a.displacement == 0.0 || (a.displacement < 0.0) != (b.displacement < 0.0) =>
            {
                Some((*a, *b))
            }
            _ => None,
        })
        .collect();
    let mut cycles: Vec<CycleReport> = brackets
        .into_par_iter()
        .map(|(a, b)| {
            let at = bisect_cycle(p, a, b, settle, tol)?;
            describe_cycle(p, &at, settle, tol)
        })
        .collect::<Result<_>>()?;
    cycles.sort_by(|a, b| a.amplitude.total_cmp(&b.amplitude));
    cycles.dedup_by(|b, a| {
        ((a.state[1] - b.state[1]).powi(2) + (a.state[2] - b.state[2]).powi(2)).sqrt() < CLUSTER_TOL
    });
    Ok(OrbitCensus {
        schema_version: CENSUS_SCHEMA_VERSION,
        params: *p,
        equilibrium_stability: if stable_by_routh_hurwitz(p) {
            Stability::Stable
        } else {
            Stability::Unstable
        },
        cycles,
        grid: *grid,
        settle_returns: settle,
        rtol: tol.rtol,
        inconclusive,
        left_domain,
    })
}

/// Point of the slow manifold on the section with coordinate `y`, found by
/// adjusting the seed so that the settled return lands on `y`.
pub fn slow_manifold_point(
    p: &WgssParams,
    y: f64,
    settle: usize,
    tol: &Tolerances,
) -> Result<ReturnSample> {
    let eval = |s: f64| -> Result<ReturnSample> {
        reduced_return(p, s, settle, tol)?.map_err(|e| {
            WgssError::Integration(format!(
                "slow-manifold projection failed at seed {s} ({e:?})"
            ))
        })
    };
    let (mut s0, mut s1) = (y, y * 1.001);
    let (mut f0, mut f1) = (eval(s0)?, eval(s1)?);
    for _ in 0..40 {
        let r1 = f1.y - y;
        if r1.abs() <= 1e-14 * y.abs() {
            return Ok(f1);
        }
        let r0 = f0.y - y;
        if r1 == r0 {
            break;
        }
        let s2 = s1 - r1 * (s1 - s0) / (r1 - r0);
        s0 = s1;
        f0 = f1;
        s1 = s2;
        f1 = eval(s1)?;
    }
    if (f1.y - y).abs() <= 1e-10 * y.abs() {
        Ok(f1)
    } else {
        Err(WgssError::NoConvergence {
            iterations: 40,
            history: vec![(f1.y - y).abs()],
        })
    }
}

/// Outcome of [`reverse_time_cycle`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReverseSearch {
    pub cycle: CycleReport,
    pub iterations: usize,
    /// `|y_{n-1} - y_n|` per backward return.
    pub history: Vec<f64>,
}

/// Locates a repelling cycle by integrating backwards in time from the
/// section to the previous crossing, projecting each landing point onto the
/// slow manifold so the strongly contracting direction does not blow up.
/// Backward integration amplifies round-off along that direction, so the
/// limit is polished by a forward secant on the reduced displacement.
pub fn reverse_time_cycle(
    p: &WgssParams,
    y_start: f64,
    max_iter: usize,
    tol: &Tolerances,
) -> Result<ReverseSearch> {
    let settle = settle_returns(p);
    let budget = -4.0 * linear_period(p);
    let mut cur = slow_manifold_point(p, y_start, settle, tol)?;
    let mut history = Vec::new();
    for it in 1..=max_iter {
        let (hits, exit) = section_returns(p, cur.state, 1, budget, tol)?;
        if exit != ReturnExit::Complete {
            return Err(WgssError::Integration(format!(
                "backward return failed ({exit:?}) at y = {}",
                cur.state[1]
            )));
        }
        let y_prev = hits[0].state[1];
        let step = (y_prev - cur.state[1]).abs();
        history.push(step);
        cur = slow_manifold_point(p, y_prev, settle, tol)?;
        if step <= 1e-9 * y_prev.abs() {
            let at = polish(p, cur, settle, tol)?;
            return Ok(ReverseSearch {
                cycle: describe_cycle(p, &at, settle, tol)?,
                iterations: it,
                history,
            });
        }
    }
    Err(WgssError::NoConvergence {
        iterations: max_iter,
        history,
    })
}

fn polish(
    p: &WgssParams,
    start: ReturnSample,
    settle: usize,
    tol: &Tolerances,
) -> Result<ReturnSample> {
    let eval = |s: f64| -> Result<ReturnSample> {
        reduced_return(p, s, settle, tol)?
            .map_err(|e| WgssError::Integration(format!("polish lost the section ({e:?})")))
    };
    let mut a = start;
    let mut b = eval(start.seed * (1.0 + 1e-6))?;
    for _ in 0..30 {
        if b.displacement == 0.0
            || b.displacement == a.displacement
            || (b.seed - a.seed).abs() <= 1e-15 * b.seed
        {
            break;
        }
        let s = b.seed - b.displacement * (b.seed - a.seed) / (b.displacement - a.displacement);
        a = b;
        b = eval(s)?;
    }
    Ok(if b.displacement.abs() <= a.displacement.abs() {
        b
    } else {
        a
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn power_law_exponent(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Amplitude of the attracting cycle reached from one seed after `returns` crossings.
pub fn attracting_amplitude(
    p: &WgssParams,
    seed: f64,
    returns: usize,
    tol: &Tolerances,
) -> Result<f64> {
    let e = Equilibrium::of(p);
    let (hits, exit) = section_returns(
        p,
        [e.x0, seed, e.z0],
        returns,
        returns as f64 * 4.0 * linear_period(p),
        tol,
    )?;
    match (exit, hits.last()) {
        (ReturnExit::Complete, Some(h)) => Ok(h.state[1]),
        _ => Err(WgssError::Integration(format!(
            "no attracting cycle reached ({exit:?})"
        ))),
    }
}

/// Amplitude scaling `y ~ (epsilon_c - epsilon)^e` from cycles located at each offset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplitudeFit {
    pub offsets: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub exponent: f64,
}

pub fn amplitude_exponent(
    p: &WgssParams,
    rel_offsets: &[f64],
    tol: &Tolerances,
) -> Result<AmplitudeFit> {
    let ec = p.epsilon_c();
    let mut amps = Vec::new();
    let mut offs = Vec::new();
    for &d in rel_offsets {
        let q = p.with_epsilon(ec * (1.0 - d))?;
        let guess = 2.0 * omega0(p.beta) * d.sqrt();
        let grid = IcGrid {
            s_min: 0.05 * guess,
            s_max: 4.0 * guess,
            count: 24,
        };
        let c = poincare_census(&q, &grid, tol)?;
        let cyc = c
            .cycles
            .iter()
            .find(|c| c.stability == Stability::Stable)
            .ok_or_else(|| WgssError::Integration(format!("no stable cycle at offset {d}")))?;
        amps.push(cyc.amplitude);
        offs.push(ec * d);
    }
    Ok(AmplitudeFit {
        exponent: power_law_exponent(&offs, &amps),
        offsets: offs,
        amplitudes: amps,
    })
}
