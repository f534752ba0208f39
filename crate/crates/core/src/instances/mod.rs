//! Lower-bound instance families, their numeric verification, and
//! information-theoretic utilities.

mod families;
mod info;
mod region;
mod verify;

pub use families::{
    correlated_continuous_family, correlated_discrete_family, correlated_k, dirac_family, dirac_wbb_instance,
    independent_lb_family, snap_action, FamilyKind, LbFamily, ELL,
};
pub use info::{gpb_audit, kl_bernoulli, kl_bernoulli_bound_check, kl_divergence, pinsker_check, total_variation};
pub use region::{ActionRegion, Interval, POINT_TOL};
pub use verify::{component_masses, verify_family, verify_per_round_regret, Claim, VerificationReport, SLACK_TOL};
