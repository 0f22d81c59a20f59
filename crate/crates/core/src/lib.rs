pub mod airfoil;
pub mod cheb;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod function;
pub mod norms;
pub mod operators;
pub mod point;
pub mod quad;
pub mod verify;

pub use error::{FhtError, Result};
pub use function::{FunctionHandle, SingularityTag, TagKind};
pub use point::Abscissa;
