//! The homological-equation ladder.
//!
//! The center manifold is written as `x = H(w, w̄)` with
//! `H = sum h_jk w^j w̄^k / (j! k!)`, `h_10 = q`, and the reduced dynamics
//! `w' = i omega0 w + sum_m G_{m+1,m} w^{m+1} w̄^m / ((m+1)! m!)`.
//! Matching coefficients of `H_w w' + H_w̄ w̄' = F(H)` degree by degree
//! gives linear systems for the `h_jk`; at `j = k + 1` the system is
//! singular and its solvability condition yields `G_{k+1,k}`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use crate::cvec::ComplexVec;
use crate::error::{HopfError, Result};
use crate::frame::{complex_solve, to_complex, EigenvectorConvention, HopfFrame};
use crate::scalar::{cmod, factorial, Scalar, C};
use crate::series::{convolve_into, BivariateSeries};
use crate::tensor::VectorFieldJet;

pub const LADDER_SCHEMA_VERSION: u32 = 1;

/// Which `G` values enter the transport terms `H_w g + H_w̄ ḡ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Transport {
    /// Literal coefficient matching with the complete lower `G`.
    #[default]
    Full,
    /// Lower `G` replaced by `i Im G`. Agrees with `Full` wherever the lower
    /// Lyapunov coefficients vanish; differs off that set.
    ImaginaryLower,
}

impl Transport {
    pub fn name(&self) -> &'static str {
        match self {
            Transport::Full => "full",
            Transport::ImaginaryLower => "imaginary-lower",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LadderOptions {
    /// Highest Lyapunov coefficient index, 1..=4.
    pub up_to: usize,
    pub transport: Transport,
}

impl Default for LadderOptions {
    fn default() -> Self {
        Self {
            up_to: 4,
            transport: Transport::Full,
        }
    }
}

impl LadderOptions {
    pub fn up_to(up_to: usize) -> Self {
        Self {
            up_to,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoefficientLadder<T: Scalar> {
    pub up_to: usize,
    pub transport: Transport,
    pub convention: EigenvectorConvention<T>,
    pub omega0: T,
    pub q: ComplexVec<T>,
    pub p: ComplexVec<T>,
    h: BTreeMap<(usize, usize), ComplexVec<T>>,
    g: Vec<C<T>>,
}

impl<T: Scalar> CoefficientLadder<T> {
    /// `h_jk`; `h_10 = q`, `h_01 = conj(q)`.
    pub fn h(&self, j: usize, k: usize) -> Option<&ComplexVec<T>> {
        self.h.get(&(j, k))
    }

    /// Every stored `h_jk` with `j + k >= 2`, in `(j, k)` order.
    pub fn h_entries(&self) -> impl Iterator<Item = ((usize, usize), &ComplexVec<T>)> {
        self.h
            .iter()
            .filter(|(k, _)| k.0 + k.1 >= 2)
            .map(|(k, v)| (*k, v))
    }

    /// `G_{m+1,m}` for `m` in `1..=up_to`.
    pub fn g(&self, m: usize) -> Option<C<T>> {
        m.checked_sub(1).and_then(|i| self.g.get(i)).copied()
    }

    /// `l_m = Re G_{m+1,m} / ((m+1)! m!)`.
    pub fn l(&self, m: usize) -> Option<T> {
        self.g(m)
            .map(|g| g.re / (factorial::<T>(m + 1) * factorial::<T>(m)))
    }

    pub fn lyapunov(&self) -> Vec<T> {
        (1..=self.up_to).filter_map(|m| self.l(m)).collect()
    }

    /// Machine-readable dump; keys sort deterministically.
    pub fn to_json(&self) -> Value {
        let cv = |v: &ComplexVec<T>| -> Value {
            Value::Array(
                v.iter()
                    .map(|z| json!([z.re.as_f64(), z.im.as_f64()]))
                    .collect(),
            )
        };
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(LADDER_SCHEMA_VERSION));
        m.insert(
            "convention".into(),
            json!({"eigenvector": self.convention.describe(), "transport": self.transport.name()}),
        );
        m.insert("omega0".into(), json!(self.omega0.as_f64()));
        m.insert("q".into(), cv(&self.q));
        m.insert("p".into(), cv(&self.p));
        let mut hs = Map::new();
        for ((j, k), v) in self.h_entries() {
            hs.insert(format!("h_{j}{k}"), cv(v));
        }
        m.insert("h_jk".into(), Value::Object(hs));
        for mm in 1..=self.up_to {
            if let Some(g) = self.g(mm) {
                m.insert(
                    format!("G{}{}", mm + 1, mm),
                    json!([g.re.as_f64(), g.im.as_f64()]),
                );
                m.insert(format!("l{mm}"), json!(self.l(mm).unwrap().as_f64()));
            }
        }
        Value::Object(m)
    }
}

struct Node {
    parent: usize,
    var: usize,
}

/// Lazy composition `F_nl(H)`: degree-`d` slices of every needed product
/// `H^alpha` are produced from lower slices only, so level `d` can be
/// computed before `H`'s own degree-`d` slice is known.
struct Composer<T: Scalar> {
    n: usize,
    dmax: usize,
    h: Vec<BivariateSeries<T>>,
    nodes: Vec<Node>,
    node_series: Vec<BivariateSeries<T>>,
    terms: Vec<(usize, usize, T)>,
}

impl<T: Scalar> Composer<T> {
    fn new(jet: &VectorFieldJet<T>, dmax: usize) -> Self {
        let n = jet.dim();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut nodes = Vec::new();
        for v in 0..n {
            let mut e = vec![0; n];
            e[v] = 1;
            index.insert(e, v);
            nodes.push(Node {
                parent: usize::MAX,
                var: v,
            });
        }
        let mut terms = Vec::new();
        for mono in jet.nonlinear_monomials() {
            if mono.exponents.iter().sum::<usize>() > dmax {
                continue;
            }
            let id = Self::node_for(&mono.exponents, &mut index, &mut nodes);
            terms.push((mono.component, id, mono.coeff));
        }
        let node_series = (0..nodes.len())
            .map(|_| BivariateSeries::zeros(dmax))
            .collect();
        Self {
            n,
            dmax,
            h: (0..n).map(|_| BivariateSeries::zeros(dmax)).collect(),
            nodes,
            node_series,
            terms,
        }
    }

    fn node_for(
        e: &[usize],
        index: &mut HashMap<Vec<usize>, usize>,
        nodes: &mut Vec<Node>,
    ) -> usize {
        if let Some(&i) = index.get(e) {
            return i;
        }
        let var = e
            .iter()
            .rposition(|&a| a > 0)
            .expect("monomial of positive degree");
        let mut pe = e.to_vec();
        pe[var] -= 1;
        let parent = Self::node_for(&pe, index, nodes);
        nodes.push(Node { parent, var });
        index.insert(e.to_vec(), nodes.len() - 1);
        nodes.len() - 1
    }

    fn series(&self, node: usize) -> &BivariateSeries<T> {
        if node < self.n {
            &self.h[node]
        } else {
            &self.node_series[node]
        }
    }

    /// Degree-`d` slice of the nonlinear part, per output component.
    /// Requires `H` slices `1..d` to be set.
    fn level(&mut self, d: usize) -> Vec<Vec<C<T>>> {
        let zero = C::new(T::zero(), T::zero());
        for id in self.n..self.nodes.len() {
            let (parent, var) = (self.nodes[id].parent, self.nodes[id].var);
            let mut out = vec![zero; d + 1];
            for e in 1..d {
                convolve_into(
                    &mut out,
                    self.series(parent).slice(d - e),
                    self.h[var].slice(e),
                );
            }
            self.node_series[id].slice_mut(d).copy_from_slice(&out);
        }
        let mut nl = vec![vec![zero; d + 1]; self.n];
        for &(i, id, c) in &self.terms {
            let s = self.series(id).slice(d);
            for (acc, &v) in nl[i].iter_mut().zip(s) {
                *acc += v * c;
            }
        }
        nl
    }

    fn set_h(&mut self, j: usize, k: usize, h: &ComplexVec<T>) {
        let s = factorial::<T>(j) * factorial::<T>(k);
        for (m, &v) in h.iter().enumerate() {
            self.h[m].set(j, k, v / s);
        }
    }

    /// `j! k! (N_jk - T_jk)` with transport from the supplied lower `G`.
    fn rhs(&self, nl: &[Vec<C<T>>], j: usize, k: usize, gammas: &[C<T>]) -> ComplexVec<T> {
        let scale = factorial::<T>(j) * factorial::<T>(k);
        let mut out = ComplexVec::zeros(self.n);
        for i in 0..self.n {
            let mut t = C::new(T::zero(), T::zero());
            for (mi, &gam) in gammas.iter().enumerate() {
                let m = mi + 1;
                if j < m || k < m || j + k - 2 * m == 0 {
                    continue;
                }
                let (a, b) = (j - m, k - m);
                let c = self.h[i].coeff(a, b);
                t += c * (gam * T::lit(a as f64) + gam.conj() * T::lit(b as f64));
            }
            out[i] = (nl[i][j] - t) * scale;
        }
        debug_assert!(j + k <= self.dmax);
        out
    }
}

fn gammas<T: Scalar>(g: &[C<T>], transport: Transport) -> Vec<C<T>> {
    g.iter()
        .enumerate()
        .map(|(mi, &gv)| {
            let m = mi + 1;
            let gv = match transport {
                Transport::Full => gv,
                Transport::ImaginaryLower => C::new(T::zero(), gv.im),
            };
            gv / (factorial::<T>(m + 1) * factorial::<T>(m))
        })
        .collect()
}

fn check_resonance<T: Scalar>(frame: &HopfFrame<T>, j: usize, k: usize) -> Result<()> {
    let target = C::new(T::zero(), T::lit(j as f64 - k as f64) * frame.omega0);
    let tol = T::eps().sqrt() * frame.jacobian.norm().max(T::one());
    let mut hits = frame
        .eigenvalues
        .iter()
        .filter(|&&l| cmod(l - target) <= tol);
    let allowed = if j == k + 1 { 1 } else { 0 };
    if hits.by_ref().count() > allowed {
        return Err(HopfError::Resonance {
            j,
            k,
            detail: format!(
                "eigenvalue at {}i omega0 makes the homological system singular",
                j as i64 - k as i64
            ),
        });
    }
    Ok(())
}

fn solve_level<T: Scalar>(
    frame: &HopfFrame<T>,
    a_c: &DMatrix<C<T>>,
    j: usize,
    k: usize,
    rhs: &ComplexVec<T>,
) -> Result<ComplexVec<T>> {
    let n = frame.dim();
    check_resonance(frame, j, k)?;
    let singular = || HopfError::Resonance {
        j,
        k,
        detail: "singular homological matrix".into(),
    };
    if j == k {
        let tol = T::lit(1e-9).max(T::lit(1e4) * T::eps());
        let big = rhs.max_abs();
        let im = rhs.im().iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if big > T::zero() && im > tol * big {
            return Err(HopfError::ComplexDiagonal {
                j,
                rel: (im / big).as_f64(),
            });
        }
        let m = -frame.jacobian.clone();
        let b = nalgebra::DVector::from_vec(rhs.re());
        let x = m.lu().solve(&b).ok_or_else(singular)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(singular());
        }
        return Ok(ComplexVec::from_real(x.as_slice()));
    }
    let iw = C::new(T::zero(), frame.omega0);
    if j == k + 1 {
        let g = frame.p.inner(rhs);
        let r = rhs - &frame.q.scale(g);
        let mut m = DMatrix::from_element(n + 1, n + 1, C::new(T::zero(), T::zero()));
        for r_ in 0..n {
            for c in 0..n {
                m[(r_, c)] = -a_c[(r_, c)];
            }
            m[(r_, r_)] += iw;
            m[(r_, n)] = frame.q[r_];
            m[(n, r_)] = frame.p[r_].conj();
        }
        let mut b = r.0;
        b.push(C::new(T::zero(), T::zero()));
        let x = complex_solve(m, &b).ok_or_else(singular)?;
        return Ok(ComplexVec(x[..n].to_vec()));
    }
    let mut m = -a_c.clone();
    let shift = iw * T::lit(j as f64 - k as f64);
    for i in 0..n {
        m[(i, i)] += shift;
    }
    Ok(ComplexVec(complex_solve(m, &rhs.0).ok_or_else(singular)?))
}

/// Runs the ladder through `G_{up_to+1, up_to}`.
///
/// Every `h_jk` with `j + k <= 2 up_to` is stored; the top level only
/// contributes its resonant scalar.
pub fn run_ladder<T: Scalar>(
    frame: &HopfFrame<T>,
    opts: LadderOptions,
) -> Result<CoefficientLadder<T>> {
    if !(1..=4).contains(&opts.up_to) {
        return Err(HopfError::LadderIndex(opts.up_to));
    }
    let top = 2 * opts.up_to + 1;
    if frame.jet.max_order() < top {
        return Err(HopfError::JetTooShallow {
            have: frame.jet.max_order(),
            need: top,
            up_to: opts.up_to,
        });
    }
    let a_c = to_complex(&frame.jacobian);
    let mut comp = Composer::new(&frame.jet, top);
    let mut h = BTreeMap::new();
    let mut g: Vec<C<T>> = Vec::new();
    comp.set_h(1, 0, &frame.q);
    comp.set_h(0, 1, &frame.q.conj());
    h.insert((1, 0), frame.q.clone());
    h.insert((0, 1), frame.q.conj());

    for d in 2..=top {
        let nl = comp.level(d);
        let gam = gammas(&g, opts.transport);
        for j in (d.div_ceil(2)..=d).rev() {
            let k = d - j;
            let rhs = comp.rhs(&nl, j, k, &gam);
            if rhs.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(HopfError::NonFinite {
                    what: format!("right-hand side at ({j},{k})"),
                });
            }
            if j == k + 1 {
                g.push(frame.p.inner(&rhs));
            }
            if d == top {
                continue;
            }
            let hv = solve_level(frame, &a_c, j, k, &rhs)?;
            comp.set_h(j, k, &hv);
            if j != k {
                comp.set_h(k, j, &hv.conj());
                h.insert((k, j), hv.conj());
            }
            h.insert((j, k), hv);
        }
    }

    Ok(CoefficientLadder {
        up_to: opts.up_to,
        transport: opts.transport,
        convention: frame.convention,
        omega0: frame.omega0,
        q: frame.q.clone(),
        p: frame.p.clone(),
        h,
        g,
    })
}

/// Right-hand side at `(j, k)` recomputed from a finished or partial ladder:
/// `j! k!` times the `w^j w̄^k` coefficient of `F(H) - H_w g - H_w̄ ḡ` with
/// `H` truncated below degree `j + k` and only the `G` already known at that
/// level. For `j = k + 1` the unknown `-G_{j,k} q` is not included.
pub fn assemble_rhs<T: Scalar>(
    frame: &HopfFrame<T>,
    ladder: &CoefficientLadder<T>,
    j: usize,
    k: usize,
) -> Result<ComplexVec<T>> {
    let d = j + k;
    if d < 2 {
        return Err(HopfError::OrderOutOfRange {
            order: d,
            max: frame.jet.max_order(),
        });
    }
    if frame.jet.max_order() < d {
        return Err(HopfError::JetTooShallow {
            have: frame.jet.max_order(),
            need: d,
            up_to: ladder.up_to,
        });
    }
    let mut comp = Composer::new(&frame.jet, d);
    for e in 1..d {
        if e >= 2 {
            comp.level(e);
        }
        for a in 0..=e {
            let hv = ladder
                .h(a, e - a)
                .ok_or(HopfError::MissingPrerequisite { j: a, k: e - a })?;
            comp.set_h(a, e - a, hv);
        }
    }
    let nl = comp.level(d);
    let known: Vec<C<T>> = (1..)
        .take_while(|m| 2 * m + 1 < d)
        .map(|m| {
            ladder
                .g(m)
                .ok_or(HopfError::MissingPrerequisite { j: m + 1, k: m })
        })
        .collect::<Result<_>>()?;
    Ok(comp.rhs(&nl, j, k, &gammas(&known, ladder.transport)))
}

/// One coefficient of the invariance defect.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual<T: Scalar> {
    pub j: usize,
    pub k: usize,
    /// `j! k!` times the max-norm of the `w^j w̄^k` defect, or the modulus of
    /// its `p`-projection when `projected`.
    pub residual: T,
    /// Largest `|h_ab|_inf` with `a + b = j + k` (or `|G|` when projected).
    pub scale: T,
    pub projected: bool,
}

impl<T: Scalar> Residual<T> {
    pub fn relative(&self) -> T {
        self.residual / self.scale.max(T::eps() * T::eps())
    }
}

/// Substitutes the truncated `H` and reduced dynamics back into
/// `H_w w' + H_w̄ w̄' = F(H)` using eager series products.
///
/// Levels `<= 2 up_to` report full vector defects; the top level reports the
/// `p`-projection of the resonant coefficient only, since its `h` are not
/// computed.
pub fn homological_residuals<T: Scalar>(
    frame: &HopfFrame<T>,
    ladder: &CoefficientLadder<T>,
) -> Vec<Residual<T>> {
    let n = frame.dim();
    let top = 2 * ladder.up_to + 1;
    let zero = C::new(T::zero(), T::zero());
    let mut hs: Vec<BivariateSeries<T>> = (0..n).map(|_| BivariateSeries::zeros(top)).collect();
    for (&(j, k), v) in &ladder.h {
        let s = factorial::<T>(j) * factorial::<T>(k);
        for i in 0..n {
            hs[i].set(j, k, v[i] / s);
        }
    }
    let mut one = BivariateSeries::zeros(top);
    one.set(0, 0, C::new(T::one(), T::zero()));
    let powers: Vec<Vec<BivariateSeries<T>>> = hs
        .iter()
        .map(|hm| {
            let mut ps = vec![one.clone()];
            for e in 1..=top {
                let next = ps[e - 1].mul(hm);
                ps.push(next);
            }
            ps
        })
        .collect();
    let mut rhs: Vec<BivariateSeries<T>> = (0..n).map(|_| BivariateSeries::zeros(top)).collect();
    for i in 0..n {
        for c in 0..n {
            rhs[i].add_scaled(&hs[c], C::new(frame.jacobian[(i, c)], T::zero()));
        }
    }
    for mono in frame.jet.nonlinear_monomials() {
        if mono.exponents.iter().sum::<usize>() > top {
            continue;
        }
        let mut prod = one.clone();
        for (v, &e) in mono.exponents.iter().enumerate() {
            if e > 0 {
                prod = prod.mul(&powers[v][e]);
            }
        }
        rhs[mono.component].add_scaled(&prod, C::new(mono.coeff, T::zero()));
    }
    let gam = gammas(&ladder.g, ladder.transport);
    let mut wdot = BivariateSeries::zeros(top);
    wdot.set(1, 0, C::new(T::zero(), frame.omega0));
    for (mi, &gv) in gam.iter().enumerate() {
        let m = mi + 1;
        if 2 * m < top {
            wdot.set(m + 1, m, gv);
        }
    }
    let wbdot = wdot.conj_swap();
    let lhs: Vec<BivariateSeries<T>> = hs
        .iter()
        .map(|hm| {
            let mut l = hm.d_w().mul(&wdot);
            l.add_scaled(&hm.d_wbar().mul(&wbdot), C::new(T::one(), T::zero()));
            l
        })
        .collect();
    let mut out = Vec::new();
    for d in 2..=top {
        let scale = ladder
            .h
            .iter()
            .filter(|(key, _)| key.0 + key.1 == d)
            .fold(T::zero(), |m, (_, v)| m.max(v.max_abs()));
        for j in 0..=d {
            let k = d - j;
            let f = factorial::<T>(j) * factorial::<T>(k);
            let defect = ComplexVec(
                (0..n)
                    .map(|i| (rhs[i].coeff(j, k) - lhs[i].coeff(j, k)) * f)
                    .collect(),
            );
            if d < top {
                out.push(Residual {
                    j,
                    k,
                    residual: defect.max_abs(),
                    scale,
                    projected: false,
                });
            } else if j == ladder.up_to + 1 && k == ladder.up_to {
                let gtop = ladder.g(ladder.up_to).unwrap_or(zero);
                let r = frame.p.inner(&defect);
                out.push(Residual {
                    j,
                    k,
                    residual: cmod(r),
                    scale: cmod(gtop),
                    projected: true,
                });
            }
        }
    }
    out
}
