//! Orthogonal vector measures for measures on the projection lattice of a
//! finite type-I₂ algebra `M ⊗ M₂`, with `M` the functions on a finite atomic
//! measure space.
//!
//! Given a (possibly non-linear) measure `m` on projections, [`constructor`]
//! builds `μ` with values in `L² ⊕ L²` such that `‖μ(p)‖² = m(p)`, orthogonal
//! projections go to orthogonal vectors, and orthogonal sums go to sums.
//! [`verify`] checks those laws against independent oracles.

pub mod algebra;
pub mod cli;
pub mod constructor;
pub mod error;
pub mod io;
pub mod measure;
pub mod space;
pub mod tolerance;
pub mod verify;

pub use algebra::{Block, CanonicalProjection, Mat2, MatrixRealization};
pub use constructor::{
    build_vector_measure, coincidence, solve_split, AtomSolutionQuadruple, Coincidence, Direction,
    DirectionRegistry, HVector, Sign, VectorMeasure,
};
pub use error::{Error, Result};
pub use measure::{DensityPair, FrameFunction, ProjectionMeasure};
pub use space::{AtomicMeasureSpace, BaseProjection, ScalarField, Space, UnimodularField};
