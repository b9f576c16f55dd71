pub mod channel;
pub mod error;
pub mod experiment;
pub mod link;
pub mod linalg;
pub mod precoder;
pub mod rates;
pub mod region;
pub mod seed;
pub mod waveform;

pub use error::{Error, Result};
