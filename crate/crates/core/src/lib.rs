//! Building blocks for multi-protocol secure computation.

pub mod algebra;
pub mod auth;
pub mod conversion;
pub mod engine;
pub mod error;
pub mod kernels;
pub mod preprocessing;
pub mod sharing;
pub mod transport;

pub use error::{Error, Result};
