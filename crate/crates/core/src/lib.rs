//! Reconstruction of missing entries in multichannel time series with
//! expanded-window denoising autoencoders and baseline methods.

pub mod error;
pub mod eval;
pub mod io;
pub mod models;
pub mod nn;
pub mod rng;
pub mod series;
pub mod synthetic;

pub use error::{Error, Result};
