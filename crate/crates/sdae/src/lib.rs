//! Experiment pipelines, file formats and the `sdae` command-line tool built
//! on [`sdae_core`].
//!
//! - [`config`]: TOML experiment configs with strict validation.
//! - [`format`]: binary model/dataset files and CSV exports.
//! - [`ensemble`]: weighted combination of window-based denoisers.
//! - [`experiment`]: generate, train, denoise, evaluate and export-plots steps.

pub mod config;
pub mod ensemble;
mod error;
pub mod experiment;
pub mod format;

pub use error::{Error, Result};
pub use sdae_core as core;
