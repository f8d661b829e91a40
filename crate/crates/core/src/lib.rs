//! Decides pure point dynamical spectrum of self-affine substitution tilings
//! by the overlap-coincidence graph: the potential-overlap multigraph is
//! split into the part that reaches a coincidence and the residual part, and
//! the spectrum is pure point iff the first has the larger spectral radius.

pub mod export;
pub mod fixtures;
pub mod format;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod overlap;
pub mod pipeline;
pub mod spectral;

pub use numeric::{FMatrix, FVec, NumberField, NumericError, Realization, Scalar};
