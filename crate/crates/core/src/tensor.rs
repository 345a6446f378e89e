//! Symmetric derivative tensors and the vector-field jet.

use nalgebra::DMatrix;

use crate::cvec::ComplexVec;
use crate::error::{HopfError, Result};
use crate::scalar::{binomial, factorial, Scalar, C};

/// Highest derivative order a jet may carry.
pub const MAX_ORDER: usize = 9;

// Colex rank of a sorted multiset: shifting the k-th entry by k turns it into
// a strictly increasing combination.
fn rank(sorted: &[usize]) -> usize {
    sorted
        .iter()
        .enumerate()
        .map(|(k, &i)| binomial(i + k, k + 1))
        .sum()
}

fn multisets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let count = binomial(n + r - 1, r);
    let mut out = vec![Vec::new(); count];
    let mut cur = vec![0usize; r];
    loop {
        out[rank(&cur)] = cur.clone();
        // next nondecreasing sequence
        let mut pos = r;
        while pos > 0 && cur[pos - 1] == n - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        let v = cur[pos - 1] + 1;
        for c in &mut cur[pos - 1..] {
            *c = v;
        }
    }
    out
}

fn insert_sorted(m: &[usize], j: usize, buf: &mut Vec<usize>) {
    buf.clear();
    let at = m.partition_point(|&x| x <= j);
    buf.extend_from_slice(&m[..at]);
    buf.push(j);
    buf.extend_from_slice(&m[at..]);
}

/// Order-`r` symmetric tensor with `dim` output components.
///
/// Only the sorted representative of each index multiset is stored; entry
/// values are the full partial derivatives `d^r F_i / dx_{j1}...dx_{jr}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTensor<T: Scalar> {
    dim: usize,
    order: usize,
    reps: Vec<Vec<usize>>,
    data: Vec<T>,
}

impl<T: Scalar> SymmetricTensor<T> {
    pub fn zeros(dim: usize, order: usize) -> Self {
        assert!(dim > 0 && order > 0);
        let reps = multisets(dim, order);
        let data = vec![T::zero(); dim * reps.len()];
        Self {
            dim,
            order,
            reps,
            data,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored multisets per output component.
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// Sorted index multisets in storage order.
    pub fn representatives(&self) -> &[Vec<usize>] {
        &self.reps
    }

    fn slot(&self, component: usize, idx: &[usize]) -> usize {
        assert_eq!(
            idx.len(),
            self.order,
            "index length must equal tensor order"
        );
        assert!(component < self.dim && idx.iter().all(|&i| i < self.dim));
        let mut s = idx.to_vec();
        s.sort_unstable();
        component * self.reps.len() + rank(&s)
    }

    /// Entry for any ordering of `idx`.
    pub fn get(&self, component: usize, idx: &[usize]) -> T {
        self.data[self.slot(component, idx)]
    }

    pub fn set(&mut self, component: usize, idx: &[usize], value: T) {
        let s = self.slot(component, idx);
        self.data[s] = value;
    }

    /// Contracts every input slot with `args` (complex arithmetic).
    pub fn eval(&self, args: &[&ComplexVec<T>]) -> Result<ComplexVec<T>> {
        if args.len() != self.order {
            return Err(HopfError::ArityMismatch {
                order: self.order,
                got: args.len(),
            });
        }
        for a in args {
            if a.dim() != self.dim {
                return Err(HopfError::DimensionMismatch {
                    expected: self.dim,
                    got: a.dim(),
                });
            }
        }
        let zero = C::new(T::zero(), T::zero());
        let n = self.dim;
        let mut cur: Vec<C<T>> = self.data.iter().map(|&v| C::new(v, T::zero())).collect();
        let mut buf = Vec::with_capacity(self.order);
        // Contract the last argument first; each step leaves a symmetric
        // tensor of one lower order over the remaining arguments.
        for r in (1..=self.order).rev() {
            let v = args[r - 1];
            let lower = if r > 1 {
                multisets(n, r - 1)
            } else {
                vec![Vec::new()]
            };
            let cnt_hi = binomial(n + r - 1, r);
            let mut next = vec![zero; n * lower.len()];
            for (lr, m) in lower.iter().enumerate() {
                for j in 0..n {
                    if v[j] == zero {
                        continue;
                    }
                    insert_sorted(m, j, &mut buf);
                    let hr = rank(&buf);
                    for i in 0..n {
                        next[i * lower.len() + lr] += cur[i * cnt_hi + hr] * v[j];
                    }
                }
            }
            cur = next;
        }
        Ok(ComplexVec(cur))
    }
}

/// Taylor monomial `coeff * x^alpha` of output `component`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial<T: Scalar> {
    pub component: usize,
    pub exponents: Vec<usize>,
    pub coeff: T,
}

/// Taylor jet of an `n`-dimensional vector field at an equilibrium.
///
/// `tensor(1)` is the Jacobian; `tensor(r)` holds the order-`r` derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldJet<T: Scalar> {
    dim: usize,
    tensors: Vec<SymmetricTensor<T>>,
}

impl<T: Scalar> VectorFieldJet<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.tensors.len()
    }

    pub fn tensor(&self, order: usize) -> Result<&SymmetricTensor<T>> {
        if order == 0 || order > self.tensors.len() {
            return Err(HopfError::OrderOutOfRange {
                order,
                max: self.tensors.len(),
            });
        }
        Ok(&self.tensors[order - 1])
    }

    pub fn jacobian(&self) -> DMatrix<T> {
        let a = &self.tensors[0];
        DMatrix::from_fn(self.dim, self.dim, |i, j| a.get(i, &[j]))
    }

    /// Applies the order-`order` multilinear form to `args`.
    pub fn eval_form(&self, order: usize, args: &[&ComplexVec<T>]) -> Result<ComplexVec<T>> {
        if order == 0 || order > MAX_ORDER {
            return Err(HopfError::OrderOutOfRange {
                order,
                max: MAX_ORDER,
            });
        }
        self.tensor(order)?.eval(args)
    }

    /// Nonzero Taylor monomials of order >= 2, ordered by degree.
    pub fn nonlinear_monomials(&self) -> Vec<Monomial<T>> {
        let mut out = Vec::new();
        for t in self.tensors.iter().skip(1) {
            for (r, rep) in t.reps.iter().enumerate() {
                let mut exponents = vec![0usize; self.dim];
                for &i in rep {
                    exponents[i] += 1;
                }
                let denom = exponents
                    .iter()
                    .fold(T::one(), |acc, &a| acc * factorial::<T>(a));
                for component in 0..self.dim {
                    let v = t.data[component * t.reps.len() + r];
                    if !v.is_zero() {
                        out.push(Monomial {
                            component,
                            exponents: exponents.clone(),
                            coeff: v / denom,
                        });
                    }
                }
            }
        }
        out
    }

    /// Drops tensors above `order`.
    pub fn truncated(&self, order: usize) -> Self {
        Self {
            dim: self.dim,
            tensors: self.tensors[..order.min(self.tensors.len())].to_vec(),
        }
    }

    pub fn cast<U: Scalar>(&self) -> VectorFieldJet<U> {
        VectorFieldJet {
            dim: self.dim,
            tensors: self
                .tensors
                .iter()
                .map(|t| SymmetricTensor {
                    dim: t.dim,
                    order: t.order,
                    reps: t.reps.clone(),
                    data: t.data.iter().map(|v| U::lit(v.as_f64())).collect(),
                })
                .collect(),
        }
    }
}

/// Incremental constructor; symmetry holds by construction since only
/// sorted representatives are addressable.
#[derive(Clone, Debug)]
pub struct JetBuilder<T: Scalar> {
    dim: usize,
    tensors: Vec<SymmetricTensor<T>>,
}

impl<T: Scalar> JetBuilder<T> {
    pub fn new(dim: usize, max_order: usize) -> Result<Self> {
        if dim == 0 {
            return Err(HopfError::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if max_order == 0 || max_order > MAX_ORDER {
            return Err(HopfError::OrderOutOfRange {
                order: max_order,
                max: MAX_ORDER,
            });
        }
        let tensors = (1..=max_order)
            .map(|r| SymmetricTensor::zeros(dim, r))
            .collect();
        Ok(Self { dim, tensors })
    }

    /// Sets `d^r F_component / dx_idx` (any index order).
    pub fn set(&mut self, component: usize, idx: &[usize], value: T) -> &mut Self {
        self.tensors[idx.len() - 1].set(component, idx, value);
        self
    }

    pub fn jacobian(&mut self, a: &DMatrix<T>) -> &mut Self {
        assert_eq!(a.shape(), (self.dim, self.dim));
        for i in 0..self.dim {
            for j in 0..self.dim {
                self.tensors[0].set(i, &[j], a[(i, j)]);
            }
        }
        self
    }

    /// Fills every entry from `f(component, sorted multiset)`.
    pub fn fill<F>(&mut self, mut f: F) -> Result<&mut Self>
    where
        F: FnMut(usize, &[usize]) -> Result<T>,
    {
        for t in &mut self.tensors {
            let cnt = t.reps.len();
            for (r, rep) in t.reps.iter().enumerate() {
                for i in 0..self.dim {
                    let v = f(i, rep)?;
                    if !v.is_finite() {
                        return Err(HopfError::NonFinite {
                            what: format!("derivative of component {i} along {rep:?}"),
                        });
                    }
                    t.data[i * cnt + r] = v;
                }
            }
        }
        Ok(self)
    }

    pub fn build(&self) -> VectorFieldJet<T> {
        VectorFieldJet {
            dim: self.dim,
            tensors: self.tensors.clone(),
        }
    }
}

/// A smooth map `R^n -> R^n`.
pub trait SmoothField<T: Scalar> {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[T], out: &mut [T]);

    /// Closed-form `d^|multi| F_component / dx_multi` at `x`, when available.
    fn partial(&self, _x: &[T], _component: usize, _multi: &[usize]) -> Option<T> {
        None
    }
}

/// How [`jet_from_callable`] obtains derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMethod {
    Analytic,
    /// Central differences with one Richardson step; orders <= 4 only.
    FiniteDifference,
}

pub fn jet_from_callable<T, F>(
    f: &F,
    x0: &[T],
    max_order: usize,
    method: DerivativeMethod,
) -> Result<VectorFieldJet<T>>
where
    T: Scalar,
    F: SmoothField<T> + ?Sized,
{
    let n = f.dim();
    if x0.len() != n {
        return Err(HopfError::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    let mut b = JetBuilder::new(n, max_order)?;
    match method {
        DerivativeMethod::Analytic => {
            b.fill(|i, rep| {
                f.partial(x0, i, rep)
                    .ok_or_else(|| HopfError::NoAnalyticPartial {
                        component: i,
                        multi: rep.to_vec(),
                    })
            })?;
        }
        DerivativeMethod::FiniteDifference => {
            if max_order > 4 {
                return Err(HopfError::FiniteDifferenceOrder(max_order));
            }
            let mut cache: Option<(Vec<usize>, Vec<T>)> = None;
            b.fill(|i, rep| {
                if cache.as_ref().map(|c| c.0.as_slice()) != Some(rep) {
                    cache = Some((rep.to_vec(), fd_partial(f, x0, rep)));
                }
                Ok(cache.as_ref().unwrap().1[i])
            })?;
        }
    }
    Ok(b.build())
}

fn fd_partial<T: Scalar, F: SmoothField<T> + ?Sized>(f: &F, x0: &[T], rep: &[usize]) -> Vec<T> {
    let r = rep.len();
    let h = T::lit(2f64.powf(r as f64 / 2.0)) * T::eps().powf(T::lit(1.0 / (r as f64 + 4.0)));
    let coarse = stencil(f, x0, rep, h);
    let fine = stencil(f, x0, rep, h / T::lit(2.0));
    let three = T::lit(3.0);
    coarse
        .iter()
        .zip(&fine)
        .map(|(&c, &d)| (T::lit(4.0) * d - c) / three)
        .collect()
}

// Tensor product of one-dimensional central difference operators.
fn stencil<T: Scalar, F: SmoothField<T> + ?Sized>(f: &F, x0: &[T], rep: &[usize], h: T) -> Vec<T> {
    let n = x0.len();
    let mut counts = vec![0usize; n];
    for &i in rep {
        counts[i] += 1;
    }
    let axes: Vec<(usize, usize)> = counts
        .iter()
        .copied()
        .enumerate()
        .filter(|c| c.1 > 0)
        .collect();
    let mut acc = vec![T::zero(); n];
    let mut out = vec![T::zero(); n];
    let mut x = x0.to_vec();
    let mut ks = vec![0usize; axes.len()];
    loop {
        let mut w = T::one();
        x.copy_from_slice(x0);
        for (&(axis, a), &k) in axes.iter().zip(&ks) {
            let sign = if k % 2 == 0 { T::one() } else { -T::one() };
            w *= sign * T::lit(binomial(a, k) as f64);
            x[axis] += (T::lit(a as f64) / T::lit(2.0) - T::lit(k as f64)) * h;
        }
        f.eval(&x, &mut out);
        for (s, &o) in acc.iter_mut().zip(&out) {
            *s += w * o;
        }
        let mut p = 0;
        loop {
            if p == ks.len() {
                let hr = h.powi(rep.len() as i32);
                return acc.into_iter().map(|s| s / hr).collect();
            }
            ks[p] += 1;
            if ks[p] <= axes[p].1 {
                break;
            }
            ks[p] = 0;
            p += 1;
        }
    }
}

/// Adapts a closure to [`SmoothField`].
pub struct FnField<F> {
    pub dim: usize,
    pub f: F,
}

impl<T: Scalar, F: Fn(&[T], &mut [T])> SmoothField<T> for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[T], out: &mut [T]) {
        (self.f)(x, out)
    }
}
