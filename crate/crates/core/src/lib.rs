//! Exact arithmetic in the Hecke algebras of finite abelian p-groups.

pub mod error;
pub mod hecke;
pub mod memo;
pub mod modring;
pub mod pgroups;
pub mod subgroups;
pub mod transchromatic;
pub mod verify;

pub use error::{Error, Result};
pub use hecke::{GeneratorPoly, HeckeContext, HeckeElement};
pub use memo::Memo;
pub use modring::ModMatrix;
pub use pgroups::Partition;
pub use transchromatic::{OmegaContext, Truncation};
