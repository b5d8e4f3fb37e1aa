//! Spinor class fields and representation fields over Q and quadratic fields.

pub mod classfield;
pub mod field;
pub mod forms;
pub mod local;
pub mod units;

pub use classfield::{
    narrow_ray_class_group, prime_ideal_class, rep_field, rep_field_comm_quadratic, rep_field_rank3, rep_field_rank4,
    selectivity_ratio, spinor_class_field, FieldDescriptor, GenusSpec, Ideal, QuatAlgebra, RayClassGroup, SuborderGlobal,
};
pub use field::{BaseField, PrimeIdeal, QuadElem, Splitting};
pub use local::{local_behaviour, square_class_local, LocalBehaviour};
pub use units::fundamental_unit;
