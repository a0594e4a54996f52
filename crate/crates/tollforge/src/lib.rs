//! Files, reports and the command-line front end around `tollforge-core`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod instance;
pub mod oracle;
pub mod report;
pub mod tntp;
pub mod tolls;

pub use error::{Error, Result};
pub use instance::Instance;
