//! File formats, the verification suite and the command line front end for
//! [`opnorm_core`].

pub mod error;
pub mod harness;
pub mod json;

pub use error::{Error, Result};
