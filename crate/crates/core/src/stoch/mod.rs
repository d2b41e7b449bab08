//! Non-adaptive stochastic P2P orienteering.

mod distribution;
mod eval;
mod instance;
mod policy;
mod simulate;

pub use distribution::{truncated_mean, SizeDistribution};
pub use eval::{
    exact_policy_value, execute_order, randomized_policy_value, Execution, JobOutcome, PolicyValue,
    EXACT_SAMPLING_LIMIT,
};
pub use instance::{build_valid_knap_instance, single_vertex_reward, StochOrientInstance};
pub use policy::{ceil_log2, solve_p2p_stoch, truncation_scales, NonAdaptivePolicy, ScaleCandidate};
pub use simulate::{realise_policy, replicate_rng, simulate_policy, Realisation, SimulationSummary};
