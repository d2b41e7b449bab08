//! Exact brute-force solvers, the ground truth for every approximation in
//! this crate. Each one refuses inputs above its cap in [`OracleLimits`].

mod deterministic;
mod stochastic;
pub(crate) mod subset;
mod windows;

pub use deterministic::{
    enumerate_p2p_orienteering, oracle_knap_orient, oracle_min_excess, oracle_p2p_orienteering,
};
pub use stochastic::{oracle_adaptive_stoch, oracle_nonadaptive_stoch, NonAdaptiveOptimum};
pub use windows::{oracle_time_windows, oracle_time_windows_slack, TimeWindowOptimum};

use crate::error::{Error, Result};

/// Size caps for the exact solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_n_subset_dp: usize,
    pub max_n_permutation: usize,
    pub max_state_budget: i64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_n_subset_dp: 14, max_n_permutation: 9, max_state_budget: 30 }
    }
}

pub(crate) fn check_cap(what: &'static str, value: usize, limit: usize) -> Result<()> {
    if value > limit {
        Err(Error::CapExceeded { what, value, limit })
    } else {
        Ok(())
    }
}
