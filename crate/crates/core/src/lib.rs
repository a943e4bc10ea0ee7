//! Exact encodings, oracle names, metered oracle computations and the
//! representations of compact metric spaces and Banach spaces built on them.

pub mod baire;
pub mod banach;
pub mod compact;
pub mod entropy;
pub mod error;
pub mod machine;
pub mod num;
pub mod reprs;
pub mod strings;

pub use error::{Error, Result};
