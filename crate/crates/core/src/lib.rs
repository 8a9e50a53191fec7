//! Link-level simulator of a full-duplex multi-UAV aerial network with
//! directional antennas and a two-ray ground-reflection channel.

// negated comparisons reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod apf;
pub mod channel;
pub mod efficiency;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod geometry;
pub mod radio;
pub mod scenario;
pub mod units;

pub use error::{Error, Result};
