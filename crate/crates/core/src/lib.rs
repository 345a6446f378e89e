//! Center-manifold coefficient ladder for Hopf points.
//!
//! A [`VectorFieldJet`] stores the Taylor jet of a vector field at an
//! equilibrium as symmetric tensors. [`make_frame`] extracts the critical
//! eigendata and [`run_ladder`] solves the homological equations level by
//! level, producing the coefficients `h_jk`, the resonant scalars
//! `G21..G54` and the Lyapunov coefficients `l1..l4`.
//!
//! Everything is generic over [`Scalar`] (`f32`, `f64`); the aliases below
//! fix the common `f64` case.

mod cvec;
mod error;
mod frame;
mod ladder;
mod scalar;
mod series;
mod tensor;

pub use cvec::ComplexVec;
pub use error::{HopfError, Result};
pub use frame::{make_frame, EigenvectorConvention, HopfFrame};
pub use ladder::{
    assemble_rhs, homological_residuals, run_ladder, CoefficientLadder, LadderOptions, Residual,
    Transport, LADDER_SCHEMA_VERSION,
};
pub use scalar::{factorial, Scalar, C};
pub use series::BivariateSeries;
pub use tensor::{
    jet_from_callable, DerivativeMethod, FnField, JetBuilder, Monomial, SmoothField,
    SymmetricTensor, VectorFieldJet, MAX_ORDER,
};

pub type Jet = VectorFieldJet<f64>;
pub type Frame = HopfFrame<f64>;
pub type Ladder = CoefficientLadder<f64>;
pub type CVec = ComplexVec<f64>;
pub type Series = BivariateSeries<f64>;

pub type Jet32 = VectorFieldJet<f32>;
pub type Frame32 = HopfFrame<f32>;
pub type Ladder32 = CoefficientLadder<f32>;
pub type CVec32 = ComplexVec<f32>;
