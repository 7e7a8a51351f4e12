//! Pauli-frame Monte Carlo simulation of the four-block protocol.
//!
//! Every fault's effect on the measurement records and on the output block is
//! precomputed once ([`frame`]); a shot is the XOR of the effects of its
//! sampled faults. Shots with no faults are skipped in bulk.

pub mod estimate;
pub mod exhaustive;
pub mod frame;
pub mod lut;
pub mod noise;

pub use estimate::{
    estimate_both, estimate_x_logical, estimate_z_logical, loglog_slope, to_csv, wilson, Estimator, SimResult,
};
pub use exhaustive::{exhaustive_inject, replay_witness, InjectConfig, InjectReport};
pub use frame::{FrameSim, Location, LocationKind, ShotRecord};
pub use lut::LutDecoder;
pub use noise::NoiseModel;
