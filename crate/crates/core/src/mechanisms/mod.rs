//! Online fixed-price mechanisms: the profit-accumulating bandit phase, the
//! one-bit elimination subroutine, their three-phase composition and simple
//! baselines.

mod baselines;
mod exp3p;
pub mod fractal;
mod gbb;
mod params;
mod profit_max;
mod spec;

pub use baselines::{EtcTwoBit, FixedPrice};
pub use exp3p::Exp3P;
pub use fractal::{
    clipped_ratio, eliminate, estimate_gft, schedule_segment_queries, split_and_calibrate, EstimateTable,
    FractalElimination, PendingChild, QueryBlock, Segment,
};
pub use gbb::GbbOneBit;
pub use params::{params_for_horizon, GbbParams};
pub use profit_max::{profit_max_actions, ProfitMax};
pub use spec::{BoxedMechanism, MechanismSpec};
