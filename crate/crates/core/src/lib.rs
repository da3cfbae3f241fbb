//! Weighted Bergman, Cauchy and square-function machinery on the unit circle
//! and disk, with the extremal families that witness sharp norm growth.

pub mod arcs;
pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod extremal;
pub mod fit;
pub mod fourier;
pub mod geometry;
pub mod norms;
pub mod operators;
pub mod quad;
pub mod weights;

pub use error::{Error, Result};
pub use geometry::{arc_ball, rho, Arc, CarlesonSquare, GridCircle, NodeArc, PolarGrid};
pub use num_complex::Complex64;
pub use dyadic::{DyadicCube, DyadicSystem, SparseFamily, WhitneyCover};
pub use experiments::{ExperimentReport, RunConfig};
pub use extremal::{FDelta, PhiDelta};
pub use norms::{MixedNorm, NormSpec, NormValue};
pub use operators::{BoundaryFunction, DiskFunction, HoloFunction};
pub use weights::{ApReport, Weight};
