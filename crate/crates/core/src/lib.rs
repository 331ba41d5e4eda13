//! Discontinuous Galerkin solver for the 1-D linear advection equation
//! `u_t + u_x = 0` on `[0, 2pi]`, with periodic or inflow boundary data.
//!
//! The scheme uses a modal Legendre basis per cell and upwind fluxes.  On
//! top of the solver proper, the crate provides the pieces needed to study
//! superconvergence at downwind and Radau points:
//!
//! * [`basis`] - Legendre polynomials, Gauss rules, Radau point sets.
//! * [`mesh`] - 1-D meshes (uniform and the 1:3 split mesh used in the
//!   benchmark studies).
//! * [`field`] - modal fields, smooth reference functions with derivative
//!   jets, L2 and Gauss-Radau projections, the DG bilinear form.
//! * [`operator`] - the semidiscrete DG operator and energy diagnostics.
//! * [`correction`] - the correction-function construction `F_i`, `w^l`,
//!   the corrected interpolant, and the four initialization strategies.
//! * [`timestep`] - explicit Runge-Kutta integration.
//! * [`metrics`] - the six error functionals `e1..e6` and refinement-rate
//!   reports.
//! * [`harness`] - benchmark problems, experiment configs, CSV/plain-text
//!   report emission.
//! * [`acceptance`] - the end-to-end acceptance suite behind `dg1d check`.

pub mod acceptance;
pub mod basis;
pub mod correction;
pub mod field;
pub mod harness;
pub mod jet;
pub mod mesh;
pub mod metrics;
pub mod operator;
pub mod timestep;

/// Errors produced by solver construction and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("Newton refinement for degree-{degree} Radau points stalled (residual {residual:e})")]
    RootRefinement { degree: usize, residual: f64 },
    #[error("mesh breakpoints must be strictly increasing")]
    NonMonotoneBreakpoints,
    #[error("a split mesh needs an even cell count, got {0}")]
    OddSplitCount(usize),
    #[error("x = {x} lies outside cell {cell} = [{lo}, {hi}]")]
    OutOfCell { x: f64, cell: usize, lo: f64, hi: f64 },
    #[error("correction depth l = {l} must satisfy 1 <= l <= k = {k}")]
    CorrectionDepth { k: usize, l: usize },
    #[error("unknown initialization method id {0} (valid ids: 1..=4)")]
    UnknownMethod(u8),
    #[error("invalid Butcher tableau: {0}")]
    InvalidTableau(String),
    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("cell counts must double at each refinement")]
    NonDoublingSequence,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
