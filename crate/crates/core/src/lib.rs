pub mod bethe;
pub mod cli;
pub mod error;
pub mod field;
pub mod functional;
pub mod halfint;
mod kernel;
pub mod linalg;
pub mod poly;
pub mod qsolver;

pub use error::{Error, Result};
pub use field::{CycloField, CycloNum};
pub use halfint::HalfInt;
pub use poly::{FieldPoly, LaurentShift, VarKind};
