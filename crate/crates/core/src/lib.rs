//! Staircase codes with extended BCH component codes, decoded by a sliding window of
//! bounded-distance decoders, optionally assisted by per-bit reliability marks.

pub mod bch;
pub mod channel;
pub mod error;
pub mod frame;
pub mod gf;
pub mod montecarlo;
pub mod serde_float;
pub mod window;

pub use bch::{BchCode, ComponentCodeSpec, DecodeOutcome, ErrorPattern, Syndrome};
pub use channel::{MarkPlane, Pam, Quantization};
pub use error::{Error, Result};
pub use frame::{BitLocation, Block, CodewordAddress, StaircaseEncoder};
pub use gf::FieldTable;
pub use montecarlo::{run_point, run_sweep, SimPoint, StopRule, SweepConfig};
pub use window::{DecoderConfig, DecodingWindow, Mode};
