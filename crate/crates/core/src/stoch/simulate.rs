//! Seeded Monte Carlo execution of non-adaptive policies.
//!
//! Random numbers come from ChaCha8 (the `rand_chacha` crate). Replicate `k`
//! of a run with seed `s` uses `ChaCha8Rng::seed_from_u64(s)` switched to
//! stream `k`, so replicates are independent of each other and of execution
//! order. Within a replicate, `f64` uniforms in `[0, 1)` are drawn in this
//! order:
//!
//! 1. one for the branch (single vertex iff `u < branch_probability`);
//! 2. on the path branch, one per path job in path order (kept iff
//!    `u < inclusion_probability`);
//! 3. one per job reached during execution, in visiting order, mapped to a
//!    size by inverse CDF over the support sorted by size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::{execute_order, Execution};
use super::instance::StochOrientInstance;
use super::policy::NonAdaptivePolicy;
use crate::scalar::Reward;

pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// One sampled run of a policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Realisation<F> {
    pub single_branch: bool,
    pub order: Vec<usize>,
    pub execution: Execution<F>,
}

pub fn realise_policy<F: Reward>(
    instance: &StochOrientInstance<F>,
    policy: &NonAdaptivePolicy<F>,
    rng: &mut impl Rng,
) -> Realisation<F> {
    let single_branch = rng.gen::<f64>() < policy.branch_probability.to_f64();
    let order = if single_branch {
        vec![policy.single_vertex]
    } else {
        sample_subsequence(&policy.path, policy.inclusion_probability.to_f64(), rng)
    };
    let execution = execute_order(instance, &order, |v| instance.sizes[v].sample(rng.gen::<f64>()));
    Realisation { single_branch, order, execution }
}

fn sample_subsequence(path: &[usize], keep: f64, rng: &mut impl Rng) -> Vec<usize> {
    path.iter().copied().filter(|_| rng.gen::<f64>() < keep).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSummary {
    pub replicates: u64,
    pub mean: f64,
    pub std_error: f64,
}

impl SimulationSummary {
    pub fn from_samples(samples: impl IntoIterator<Item = f64>) -> Self {
        let mut n = 0u64;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        // Welford
        for x in samples {
            n += 1;
            let delta = x - mean;
            mean += delta / n as f64;
            m2 += delta * (x - mean);
        }
        let std_error = if n > 1 { (m2 / (n - 1) as f64 / n as f64).sqrt() } else { 0.0 };
        SimulationSummary { replicates: n, mean, std_error }
    }
}

/// Mean collected reward of `policy` over `replicates` seeded runs.
pub fn simulate_policy<F: Reward>(
    instance: &StochOrientInstance<F>,
    policy: &NonAdaptivePolicy<F>,
    replicates: u64,
    seed: u64,
) -> SimulationSummary {
    assert!(replicates >= 1, "at least one replicate");
    SimulationSummary::from_samples((0..replicates).map(|k| {
        let mut rng = replicate_rng(seed, k);
        realise_policy(instance, policy, &mut rng).execution.reward.to_f64()
    }))
}

/// Mean of the path branch alone. Used when a path is too long for exact
/// enumeration of inclusion patterns.
pub(crate) fn simulate_order_mean<F: Reward>(
    instance: &StochOrientInstance<F>,
    path: &[usize],
    keep: &F,
    replicates: u64,
    seed: u64,
) -> (f64, f64) {
    let keep = keep.to_f64();
    let s = SimulationSummary::from_samples((0..replicates.max(1)).map(|k| {
        let mut rng = replicate_rng(seed, k);
        let order = sample_subsequence(path, keep, &mut rng);
        execute_order(instance, &order, |v| instance.sizes[v].sample(rng.gen::<f64>())).reward.to_f64()
    }));
    (s.mean, s.std_error)
}
