//! Non-orthogonal spreading sequence sets from quadratic extended Boolean
//! functions over F_p: construction, exact verification and PAPR analysis.

pub mod analysis;
pub mod constructions;
pub mod ebf;
pub mod error;
pub mod export;
pub mod fp;
pub mod quadform;
pub mod random;
pub mod report;

pub use error::{Error, Result};
