//! Three-level partition of unity of the frequency space (joint norm, ratio
//! of norms, angle), the multiplier pieces m_{i,j,k}, their support volumes
//! and the norm-bound arithmetic.

mod bounds;
mod cutoffs;
mod hull;
mod pieces;

pub use bounds::{
    critical_exponent, norm_table, parse_reciprocal, piece_norm_bound, region_contains,
    summability_threshold, NormBoundTable, NormRow,
};
pub use cutoffs::{smooth_step, CutoffProfile};
pub use hull::hull_contains;
pub use pieces::{
    angular_fraction, ball_volume, cutoff_weight, m_piece, support_volume, DyadicIndex,
    VolumeEstimate,
};
