//! Exact association-scheme machinery for certifying that the supports of
//! codewords form combinatorial t-designs.

pub mod alphabet;
pub mod amt;
pub mod codes;
pub mod cyclotomic;
pub mod design;
pub mod error;
pub mod extension;
pub mod interpolation;
pub mod linalg;
pub mod scheme;
pub mod snf;

pub use error::{Error, Result};
