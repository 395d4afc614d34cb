//! Bimodules, their reduced free product, and operators acting on it.

pub mod bimodule;
pub mod lrdecomp;
pub mod operators;
pub mod product;

pub use bimodule::{build_bimodule_from_space, doubled_ops, Bimodule, SpaceModule, SparseCols};
pub use operators::{OpRef, OperatorModel, Prim};
pub use product::{FpVector, FreeProduct, Word};
