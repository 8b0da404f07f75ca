//! Exact arithmetic and experiments for smooth plane quartics over finite
//! fields.

pub mod error;
pub mod field;
pub mod forms;
pub mod incidence;
pub mod lab;
pub mod quartic;
pub mod special;
pub mod tangential;

pub use error::{Error, Result};
pub use field::{FieldCtx, FieldElement};
