#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod extension;
pub mod lie;
pub mod metric;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod soliton;

pub use error::{Error, Result};
pub use lie::{parse_structure, LieAlgebra};
pub use linalg::{Matrix, Signature, SymMatrix, Vector};
pub use poly::Poly;
pub use scalar::{Rational, Scalar, DEFAULT_TOL};
