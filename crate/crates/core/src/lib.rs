pub mod comm;
pub mod driver;
pub mod error;
pub mod experiments;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod precoder;
pub mod radar;
pub mod scenario;
pub mod validation;
pub mod waveform;

pub use error::{Error, Result};
