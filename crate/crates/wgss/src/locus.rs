//! Degenerate Hopf loci on the critical hypersurface `epsilon = epsilon_c`.

use hopf_core::{LadderOptions, Transport};
use nalgebra::{DMatrix, DVector, Matrix3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, WgssError};
use crate::model::{self, epsilon_critical, g1, l1_closed_form_sign, Sign};
use crate::params::WgssParams;
use crate::stability;

pub const LOCUS_SCHEMA_VERSION: u32 = 1;

/// Seed rows `(kappa, beta, alpha)` near the curve `C1` (`l1 = l2 = 0`, `l3 < 0` branch).
pub const C1_SEEDS: [(f64, f64, f64); 11] = [
    (0.45, 0.72216, 0.33319),
    (0.5, 0.71770, 0.42968),
    (0.55, 0.71257, 0.50934),
    (0.6, 0.70665, 0.57913),
    (0.65, 0.69983, 0.64241),
    (0.7, 0.69201, 0.70113),
    (0.75, 0.68309, 0.75659),
    (0.8, 0.67302, 0.80972),
    (0.85, 0.66177, 0.86120),
    (0.9, 0.64940, 0.91154),
    (0.95, 0.63600, 0.96114),
];

/// Seed rows `(kappa, beta, alpha)` near the curve `C2`, which contains `Q`.
pub const C2_SEEDS: [(f64, f64, f64); 11] = [
    (0.0, 0.86828, 0.85050),
    (0.2, 0.87760, 0.90524),
    (0.3, 0.88397, 0.93123),
    (0.4, 0.89159, 0.95511),
    (0.5, 0.90042, 0.97602),
    (0.6, 0.91029, 0.99330),
    (0.7, 0.92071, 1.00674),
    (0.8, 0.93045, 1.01697),
    (0.9, 0.93592, 1.02731),
    (0.92, 0.93585, 1.03020),
    (0.98, 0.93201, 1.04319),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Curve {
    C1,
    C2,
}

impl Curve {
    pub fn seeds(&self) -> &'static [(f64, f64, f64)] {
        match self {
            Curve::C1 => &C1_SEEDS,
            Curve::C2 => &C2_SEEDS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocusOptions {
    /// Relative step of central differences.
    pub fd_step: f64,
    /// Newton stops once `|residual|_inf` falls below this.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Step halvings tried when a Newton step increases the residual.
    pub max_halvings: usize,
    /// `|l_j|` below this counts as zero when classifying codimension.
    pub zero_tol: f64,
    pub transport: Transport,
}

impl Default for LocusOptions {
    fn default() -> Self {
        Self {
            fd_step: 1e-5,
            newton_tol: 1e-8,
            max_iter: 50,
            max_halvings: 8,
            zero_tol: 1e-6,
            transport: Transport::Full,
        }
    }
}

/// `(l1, .., l_up_to)` at the critical point `(beta, alpha, kappa)`.
pub fn lyapunov_at(
    beta: f64,
    alpha: f64,
    kappa: f64,
    up_to: usize,
    transport: Transport,
) -> Result<Vec<f64>> {
    let p = WgssParams::critical(beta, alpha, kappa)?;
    Ok(model::ladder(&p, LadderOptions { up_to, transport })?.lyapunov())
}

/// A point of the critical hypersurface with its Lyapunov coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub beta: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub epsilon_c: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    /// Index of the first Lyapunov coefficient above the zero tolerance;
    /// `None` when all four vanish.
    pub codim: Option<u8>,
}

pub fn classify(l: &[f64], zero_tol: f64) -> Option<u8> {
    l.iter()
        .position(|v| v.abs() >= zero_tol)
        .map(|i| i as u8 + 1)
}

impl CriticalPoint {
    pub fn evaluate(beta: f64, alpha: f64, kappa: f64, opts: &LocusOptions) -> Result<Self> {
        let l = lyapunov_at(beta, alpha, kappa, 4, opts.transport)?;
        Ok(Self {
            beta,
            alpha,
            kappa,
            epsilon_c: epsilon_critical(beta, alpha, kappa),
            l1: l[0],
            l2: l[1],
            l3: l[2],
            l4: l[3],
            codim: classify(&l, opts.zero_tol),
        })
    }

    pub fn l(&self) -> [f64; 4] {
        [self.l1, self.l2, self.l3, self.l4]
    }

    pub fn params(&self) -> Result<WgssParams> {
        WgssParams::new(self.beta, self.alpha, self.epsilon_c, self.kappa)
    }
}

/// Outcome of a damped Newton solve.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonResult<const N: usize> {
    pub x: [f64; N],
    pub residual: [f64; N],
    pub history: Vec<f64>,
    pub jacobian: [[f64; N]; N],
}

fn inf_norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Central-difference Jacobian, `jac[i][j] = d f_i / d x_j`, relative step `h`.
pub fn fd_jacobian<const N: usize, F>(f: &F, x: &[f64; N], h: f64) -> Result<[[f64; N]; N]>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    let mut jac = [[0.0; N]; N];
    for j in 0..N {
        let d = h * x[j].abs().max(1e-3);
        let (mut xp, mut xm) = (*x, *x);
        xp[j] += d;
        xm[j] -= d;
        let (fp, fm) = (f(&xp)?, f(&xm)?);
        for i in 0..N {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * d);
        }
    }
    Ok(jac)
}

/// Damped Newton with finite-difference Jacobians.
pub fn newton<const N: usize, F>(f: F, x0: [f64; N], opts: &LocusOptions) -> Result<NewtonResult<N>>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    let mut x = x0;
    let mut r = f(&x)?;
    let mut history = vec![inf_norm(&r)];
    for _ in 0..opts.max_iter {
        let jac = fd_jacobian(&f, &x, opts.fd_step)?;
        if inf_norm(&r) < opts.newton_tol {
            return Ok(NewtonResult {
                x,
                residual: r,
                history,
                jacobian: jac,
            });
        }
        let m = DMatrix::from_fn(N, N, |i, j| jac[i][j]);
        let rhs = DVector::from_column_slice(&r);
        let step = m.lu().solve(&rhs).ok_or_else(|| WgssError::NoConvergence {
            iterations: history.len(),
            history: history.clone(),
        })?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let mut xn = x;
            for i in 0..N {
                xn[i] -= lambda * step[i];
            }
            if let Ok(rn) = f(&xn) {
                if inf_norm(&rn) < inf_norm(&r) {
                    accepted = Some((xn, rn));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((xn, rn)) => {
                let stalled = (0..N).all(|i| (xn[i] - x[i]).abs() <= 1e-15 * x[i].abs().max(1.0));
                x = xn;
                r = rn;
                history.push(inf_norm(&r));
                if stalled && inf_norm(&r) < opts.newton_tol {
                    break;
                }
            }
            None => break,
        }
    }
    if inf_norm(&r) < opts.newton_tol {
        let jac = fd_jacobian(&f, &x, opts.fd_step)?;
        return Ok(NewtonResult {
            x,
            residual: r,
            history,
            jacobian: jac,
        });
    }
    Err(WgssError::NoConvergence {
        iterations: history.len() - 1,
        history,
    })
}

/// Solves `l1 = l2 = 0` for `(beta, alpha)` at fixed `kappa`.
pub fn solve_curve_point(
    kappa: f64,
    beta: f64,
    alpha: f64,
    opts: &LocusOptions,
) -> Result<CriticalPoint> {
    let f = |x: &[f64; 2]| -> Result<[f64; 2]> {
        let l = lyapunov_at(x[0], x[1], kappa, 2, opts.transport)?;
        Ok([l[0], l[1]])
    };
    let sol = newton(f, [beta, alpha], opts)?;
    CriticalPoint::evaluate(sol.x[0], sol.x[1], kappa, opts)
}

fn interpolate_seed(seeds: &[(f64, f64, f64)], kappa: f64) -> (f64, f64) {
    let i = seeds
        .partition_point(|s| s.0 < kappa)
        .clamp(1, seeds.len() - 1);
    let (a, b) = (seeds[i - 1], seeds[i]);
    let t = (kappa - a.0) / (b.0 - a.0);
    (a.1 + t * (b.1 - a.1), a.2 + t * (b.2 - a.2))
}

/// Points of `C1` or `C2` at the requested `kappa` values (ascending).
///
/// Each point is corrected by Newton from a secant predictor through the two
/// previous points (or the interpolated seed table for the first ones). A
/// failed correction is retried from the seed table before giving up.
pub fn trace_l2_zero_curve(
    curve: Curve,
    kappas: &[f64],
    opts: &LocusOptions,
) -> Result<Vec<CriticalPoint>> {
    if kappas.is_empty() {
        return Err(WgssError::Argument("no kappa values to trace".into()));
    }
    let seeds = curve.seeds();
    let mut out: Vec<CriticalPoint> = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let seed = interpolate_seed(seeds, kappa);
        let predictor = match out.as_slice() {
            [.., a, b] if b.kappa != a.kappa => {
                let t = (kappa - b.kappa) / (b.kappa - a.kappa);
                Some((
                    b.beta + t * (b.beta - a.beta),
                    b.alpha + t * (b.alpha - a.alpha),
                ))
            }
            [.., b] => {
                let s = interpolate_seed(seeds, b.kappa);
                Some((b.beta + seed.0 - s.0, b.alpha + seed.1 - s.1))
            }
            [] => None,
        };
        let attempt = predictor
            .map(|(b, a)| solve_curve_point(kappa, b, a, opts))
            .filter(|r| r.is_ok())
            .unwrap_or_else(|| solve_curve_point(kappa, seed.0, seed.1, opts));
        match attempt {
            Ok(p) => out.push(p),
            Err(_) => {
                return Err(WgssError::Continuation {
                    kappa,
                    last: out.last().map(|p| (p.beta, p.alpha, p.kappa)),
                })
            }
        }
    }
    Ok(out)
}

/// Gradients and crossing speed at a critical point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransversalityReport {
    pub beta: f64,
    pub alpha: f64,
    pub kappa: f64,
    /// `d l_k / d(beta, alpha, kappa)`.
    pub grad_l1: [f64; 3],
    pub grad_l2: [f64; 3],
    pub grad_l3: [f64; 3],
    /// Determinant of the matrix whose columns are the gradients written in
    /// `(beta, kappa, alpha)` component order.
    pub determinant: f64,
    /// `d Re(lambda) / d epsilon` of the critical pair.
    pub crossing_speed: f64,
    pub transport: &'static str,
}

impl TransversalityReport {
    pub fn regular(&self) -> bool {
        self.determinant != 0.0 && self.determinant.is_finite() && self.crossing_speed != 0.0
    }

    /// Gradient `k` (1..=3) in `(beta, kappa, alpha)` order.
    pub fn grad_bka(&self, k: usize) -> [f64; 3] {
        let g = [self.grad_l1, self.grad_l2, self.grad_l3][k - 1];
        [g[0], g[2], g[1]]
    }
}

pub fn transversality(
    beta: f64,
    alpha: f64,
    kappa: f64,
    opts: &LocusOptions,
) -> Result<TransversalityReport> {
    let f = |x: &[f64; 3]| -> Result<[f64; 3]> {
        let l = lyapunov_at(x[0], x[1], x[2], 3, opts.transport)?;
        Ok([l[0], l[1], l[2]])
    };
    let jac = fd_jacobian(&f, &[beta, alpha, kappa], opts.fd_step)?;
    // columns = gradients, rows = (beta, kappa, alpha)
    let m = Matrix3::from_fn(|r, c| jac[c][[0, 2, 1][r]]);
    Ok(TransversalityReport {
        beta,
        alpha,
        kappa,
        grad_l1: jac[0],
        grad_l2: jac[1],
        grad_l3: jac[2],
        determinant: m.determinant(),
        crossing_speed: crossing_speed(beta, alpha, kappa)?,
        transport: opts.transport.name(),
    })
}

/// 3-D Newton on `(l1, l2, l3)(beta, alpha, kappa)` from `seed`, followed by
/// the transversality data at the solution. Gradients use `report_transport`.
pub fn find_codim4_point(
    seed: (f64, f64, f64),
    opts: &LocusOptions,
    report_transport: Transport,
) -> Result<(CriticalPoint, TransversalityReport, Vec<f64>)> {
    let f = |x: &[f64; 3]| -> Result<[f64; 3]> {
        let l = lyapunov_at(x[0], x[1], x[2], 3, opts.transport)?;
        Ok([l[0], l[1], l[2]])
    };
    let sol = newton(f, [seed.0, seed.1, seed.2], opts)?;
    let [b, a, k] = sol.x;
    let point = CriticalPoint::evaluate(b, a, k, opts)?;
    let report = transversality(
        b,
        a,
        k,
        &LocusOptions {
            transport: report_transport,
            ..*opts
        },
    )?;
    Ok((point, report, sol.history))
}

/// Real part of the eigenvalue pair nearest `i omega0` at `epsilon`.
pub fn critical_real_part(beta: f64, alpha: f64, kappa: f64, epsilon: f64) -> Result<f64> {
    let p = WgssParams::new(beta, alpha, epsilon, kappa)?;
    let w = model::omega0(beta);
    let ev = stability::eigenvalues(&p);
    let best = ev
        .iter()
        .filter(|l| l.im > 0.0)
        .min_by(|a, b| (a.im - w).abs().total_cmp(&(b.im - w).abs()))
        .ok_or_else(|| WgssError::Tracking(format!("no complex pair at epsilon = {epsilon}")))?;
    if best.im < 1e-3 * w {
        return Err(WgssError::Tracking(
            "eigenvalue pair collided on the real axis".into(),
        ));
    }
    Ok(best.re)
}

/// `d Re(lambda)/d epsilon` at `epsilon_c` by central differences.
pub fn crossing_speed(beta: f64, alpha: f64, kappa: f64) -> Result<f64> {
    let ec = epsilon_critical(beta, alpha, kappa);
    let d = 1e-6 * ec;
    Ok((critical_real_part(beta, alpha, kappa, ec + d)?
        - critical_real_part(beta, alpha, kappa, ec - d)?)
        / (2.0 * d))
}

/// Inclusive uniform axis `lo..=hi` with `n` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        Self { lo, hi, n }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.n {
            0 => vec![],
            1 => vec![self.lo],
            n => (0..n)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanGrid {
    pub beta: Axis,
    pub alpha: Axis,
    pub kappa: Axis,
}

/// One grid point of a surface scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub beta: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub epsilon_c: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub g1: f64,
    /// `S` (l1 < 0) or `U` (l1 > 0) from the sign of `G1`; `0` on the surface.
    pub region: char,
    /// Ladder `sign(l1)` equals `sign(G1)` (always true when `|G1|` is below the cross-check floor).
    pub ladder_agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub schema_version: u32,
    pub grid: ScanGrid,
    pub rows: Vec<ScanRow>,
    /// Points of `l1 = 0` found between sign-changing neighbours along `beta`,
    /// as `[beta, alpha, kappa]`.
    pub zero_set: Vec<[f64; 3]>,
}

/// Root of `G1(., alpha, kappa)` in `[lo, hi]` by bisection to `|G1| < 1e-10`.
pub fn l1_zero_beta(alpha: f64, kappa: f64, lo: f64, hi: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (g1(a, alpha, kappa), g1(b, alpha, kappa));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = g1(m, alpha, kappa);
        if fm.abs() < 1e-10 || b - a < 1e-16 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Sign field of `l1` over a grid plus the refined zero set.
pub fn scan_l1_surface(grid: &ScanGrid, opts: &LocusOptions) -> Result<ScanResult> {
    let (bs, als, ks) = (grid.beta.values(), grid.alpha.values(), grid.kappa.values());
    if bs.is_empty() || als.is_empty() || ks.is_empty() {
        return Err(WgssError::Argument("empty scan grid".into()));
    }
    let mut pts = Vec::with_capacity(bs.len() * als.len() * ks.len());
    for &k in &ks {
        for &a in &als {
            for &b in &bs {
                pts.push((b, a, k));
            }
        }
    }
    let rows = pts
        .par_iter()
        .map(|&(b, a, k)| -> Result<ScanRow> {
            let cp = CriticalPoint::evaluate(b, a, k, opts)?;
            let g = g1(b, a, k);
            let closed = l1_closed_form_sign(b, a, k);
            let ladder_agrees = g.abs() <= 1e-6 || Sign::of(cp.l1) == closed;
            let region = match closed {
                Sign::Negative => 'S',
                Sign::Positive => 'U',
                Sign::Zero => '0',
            };
            Ok(ScanRow {
                beta: b,
                alpha: a,
                kappa: k,
                epsilon_c: cp.epsilon_c,
                l1: cp.l1,
                l2: cp.l2,
                l3: cp.l3,
                l4: cp.l4,
                g1: g,
                region,
                ladder_agrees,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut zero_set = Vec::new();
    for &k in &ks {
        for &a in &als {
            for w in bs.windows(2) {
                if Sign::of(g1(w[0], a, k)) != Sign::of(g1(w[1], a, k)) {
                    if let Some(b) = l1_zero_beta(a, k, w[0], w[1]) {
                        zero_set.push([b, a, k]);
                    }
                }
            }
        }
    }
    Ok(ScanResult {
        schema_version: LOCUS_SCHEMA_VERSION,
        grid: *grid,
        rows,
        zero_set,
    })
}
