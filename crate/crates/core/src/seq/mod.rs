//! Waterman sequences, Schramm families and gauge ladders.
//!
//! All types are immutable after construction; caches are filled eagerly so
//! shared references can be read from any number of threads.

mod gauge;
mod schramm;
mod weights;

pub use gauge::{min_cells, DeltaLadder, GaugePair, QLadder, QLimit, DEFAULT_N_MAX, DELTA_CEILING};
pub use schramm::{sample_points, BaseConvex, PowerTerm, SchrammFamily, SchrammSpec};
pub use weights::{Divergence, WeightKind, WeightSequence, WeightSpec, DEFAULT_K_MAX};
