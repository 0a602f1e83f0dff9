//! Concrete Lawvere theories and their low-degree K-theoretic invariants.

pub mod abelian;
pub mod error;
pub mod kernel;
pub mod kinv;
pub mod morita;
pub mod perm;
pub mod zoo;

pub use error::{Error, Result};
