//! Shared numerical kernels: Pfaffians of skew matrices, central finite
//! differences with Richardson extrapolation, and reproducible Brownian
//! increments keyed by `(seed, stream_id, position)`.

mod diff;
mod pfaffian;
mod rng;

pub use diff::{central_diff, central_diff_default, default_step};
pub use pfaffian::{pfaffian, pfaffian_oracle, SkewMatrix, ORACLE_MAX_DIM};
pub use rng::{brownian_increments, RngStream};
