use super::distribution::{truncated_mean, SizeDistribution};
use crate::error::{Error, Result};
use crate::knap::KnapOrientInstance;
use crate::metric::MetricSpace;
use crate::scalar::{Field, Reward};

/// Stochastic P2P orienteering: every vertex holds one job with a fixed reward
/// and a random processing time. Travel plus processing must fit in `budget`,
/// starting at `start` and finishing at `terminal`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochOrientInstance<F> {
    pub space: MetricSpace,
    pub rewards: Vec<F>,
    pub sizes: Vec<SizeDistribution<F>>,
    pub budget: i64,
    pub start: usize,
    pub terminal: usize,
}

impl<F: Reward> StochOrientInstance<F> {
    pub fn new(
        space: MetricSpace,
        rewards: Vec<F>,
        sizes: Vec<SizeDistribution<F>>,
        budget: i64,
        start: usize,
        terminal: usize,
    ) -> Result<Self> {
        space.check_vertex(start)?;
        space.check_vertex(terminal)?;
        let n = space.len();
        if rewards.len() != n || sizes.len() != n {
            return Err(Error::InvalidInstance(format!(
                "expected {n} rewards and distributions, got {} and {}",
                rewards.len(),
                sizes.len()
            )));
        }
        if let Some(i) = rewards.iter().position(|r| *r < F::zero()) {
            return Err(Error::InvalidInstance(format!("negative reward on vertex {i}")));
        }
        if budget < 0 {
            return Err(Error::InvalidInstance(format!("negative budget {budget}")));
        }
        Ok(StochOrientInstance { space, rewards, sizes, budget, start, terminal })
    }

    pub fn check_feasible(&self) -> Result<()> {
        let d = self.space.dist(self.start, self.terminal);
        if self.budget < d {
            return Err(Error::Infeasible(format!("budget {} below dist(start, terminal) = {d}", self.budget)));
        }
        Ok(())
    }

    /// Time left for processing job `v` on the single-vertex tour
    /// `start -> v -> terminal`.
    pub fn single_vertex_slack(&self, v: usize) -> i64 {
        self.budget - self.space.dist(self.start, v) - self.space.dist(v, self.terminal)
    }
}

/// Expected reward of the tour `start -> v -> terminal`:
/// `r_v * Pr[S_v <= B - d(start, v) - d(v, terminal)]`.
pub fn single_vertex_reward<F: Reward>(instance: &StochOrientInstance<F>, v: usize) -> F {
    let slack = instance.single_vertex_slack(v);
    if slack < 0 {
        return F::zero();
    }
    instance.rewards[v].clone() * instance.sizes[v].prob_at_most(slack)
}

/// Deterministic surrogate at truncation scale `w`: travel budget
/// `floor(B - w)`, knapsack budget `w`, sizes `E[min(S_v, w)]`.
pub fn build_valid_knap_instance<F: Field>(instance: &StochOrientInstance<F>, w: &F) -> KnapOrientInstance<F> {
    let travel = (F::from_int(instance.budget) - w.clone()).floor_int();
    KnapOrientInstance {
        space: instance.space.clone(),
        rewards: instance.rewards.clone(),
        sizes: instance.sizes.iter().map(|d| truncated_mean(d, w)).collect(),
        travel_budget: travel,
        knapsack_budget: w.clone(),
        u: instance.start,
        v: instance.terminal,
    }
}
