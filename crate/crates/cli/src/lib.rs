//! Command-line driver and HTTP JSON service for periodlab.

#![allow(clippy::result_large_err)]

pub mod api;
pub mod cli;
pub mod error;
pub mod render;
pub mod server;
pub mod session;

pub use error::ApiError;
pub use session::Session;
