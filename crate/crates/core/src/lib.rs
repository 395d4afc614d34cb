//! Exact-arithmetic engine for operator-valued bi-free combinatorics with
//! Boolean faces: bi-non-crossing partitions, LR diagrams, reduced free
//! products of bimodules with Boolean projections, and the moment and
//! cumulant functionals built on them.

pub mod algebra;
pub mod bnc;
pub mod error;
pub mod faces;
pub mod ffb;
pub mod fixtures;
pub mod freeprod;
pub mod linalg;
pub mod lr;
pub mod moments;
pub mod render;
pub mod rational;
mod reduce;
pub mod report;
pub mod space;

pub use algebra::{AlgebraElement, BBProbSpace, StructuredAlgebra};
pub use bnc::{lr_replacement, BncContext, ChiMap, EpsilonMap, FfbContext, SetPartition, Side};
pub use error::{Error, Result};
pub use faces::{FaceAssignment, Faces};
pub use rational::Q;
pub use report::{Claim, Report, Status};
pub use space::{Letter, MomentSpace};
