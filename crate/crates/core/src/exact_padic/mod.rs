//! Exact rational arithmetic with p-adic valuations, and local normal forms
//! for 2x2 matrices and order lattices over Z localized at p.

pub mod lattice;
pub mod mat2;
pub mod rat;
pub mod squares;

pub use lattice::{module_hnf, module_intersect, module_intersect_all, Module4};
pub use mat2::{smith_local, smith_local_with_transforms, Mat2, SmithForm};
pub use rat::{valuation, Rat, Valuation};
