//! Command-line support for nilsol-core: expression evaluation, JSON
//! formats and the example corpus runner.

pub mod corpus;
pub mod expr;
pub mod format;
