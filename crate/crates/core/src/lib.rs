//! Exact computations on Bruhat-Tits trees of quaternion orders over Q_p,
//! local spinor images, and spinor class fields and representation fields
//! of genera of orders over Q and quadratic fields.

pub mod branches;
pub mod bt_tree;
pub mod error;
pub mod exact_padic;
pub mod global_classfield;
pub mod local_orders;
pub mod sampling;
pub mod spinor_local;

pub use error::{Error, Result};
