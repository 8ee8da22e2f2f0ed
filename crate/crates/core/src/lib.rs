//! Continuous first-order logic over finite carriers.
//!
//! Truth values live in `[0,1]` with `0` as truth. Predicates are compared by
//! the uniform-continuity preorder, which on finite carriers is inclusion of
//! zero sets, and every judgment comes with an explicit modulus.

pub mod carrier;
pub mod connective;
pub mod doctrine;
pub mod dsl;
pub mod error;
pub mod gen;
pub mod laws;
pub mod metric;
pub mod order;
pub mod per;
pub mod predicate;
pub mod value;

pub use carrier::{Carrier, Elem};
pub use error::{Error, Result};
pub use order::{leq, LeqVerdict, Modulus};
pub use predicate::{MapArrow, Predicate};
pub use value::{Rational, Value};
