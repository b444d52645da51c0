//! Lie algebras in a fixed basis: notation, structure, derivations, semidirect products.

pub mod algebra;
pub mod derivation;
pub mod notation;
pub mod semidirect;
pub mod structure;

pub use algebra::LieAlgebra;
pub use derivation::{derivations, DerivationBasis};
pub use notation::{parse_structure, to_notation};
pub use semidirect::{nilradical, semidirect, SemidirectSpec};
pub use structure::{is_nice, structural_report, StructuralReport};
