//! HTTP service and command line for the decision-support engine.

pub mod api;
pub mod cli;
pub mod error;

pub use api::{router, AppState};
pub use error::ApiError;
