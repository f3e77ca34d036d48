pub mod corpus;
mod error;
mod function;
pub mod diagnostics;
pub mod interpolation;
pub mod kernels;
pub mod numerics;
mod report;
pub mod special;
pub mod structure;

pub use error::{Error, Result};
pub use function::{cauchy_derivatives, sinc, EntireFunction, FnEntire};
pub use report::{DiagnosticReport, Relation};
pub use structure::{StructureFunction, ZeroSet};
