//! Orienteering with time windows, deterministic or with random waiting times.
//!
//! The solver is bi-criteria: it may finish a vertex up to a factor `1 + eps`
//! past its deadline. See [`solve_time_windows`] for the construction.

mod margin;
mod solver;
mod stochastic;

pub use margin::{compute_margin_params, partition_groups, GroupPartition, MarginParameters};
pub use solver::{
    checkpoint_grid, plan_time_windows, solve_time_windows, P2PSubroutine, PlannedSegment, Segment,
    SegmentSubroutine, TWPlan, TWSolution, Visit,
};
pub use stochastic::{
    realise_tw_policy, simulate_tw_policy, solve_time_windows_stochastic, StochSegmentPlan, StochSubroutine,
    TWSimulation,
};

use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::scalar::Reward;
use crate::stoch::SizeDistribution;
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct TWInstance<R> {
    pub space: MetricSpace,
    pub root: usize,
    pub rewards: Vec<R>,
    pub release: Vec<i64>,
    pub deadline: Vec<i64>,
    /// Random waiting time at each vertex; `None` means no waiting.
    pub waiting: Option<Vec<SizeDistribution<R>>>,
}

impl<R: Reward> TWInstance<R> {
    pub fn new(
        space: MetricSpace,
        root: usize,
        rewards: Vec<R>,
        release: Vec<i64>,
        deadline: Vec<i64>,
        waiting: Option<Vec<SizeDistribution<R>>>,
    ) -> Result<Self> {
        space.check_vertex(root)?;
        let n = space.len();
        let lens = [rewards.len(), release.len(), deadline.len()];
        if lens.iter().any(|&l| l != n) || waiting.as_ref().is_some_and(|w| w.len() != n) {
            return Err(Error::InvalidInstance(format!("per-vertex data does not match {n} vertices")));
        }
        for v in 0..n {
            if rewards[v] < R::zero() {
                return Err(Error::InvalidInstance(format!("negative reward on vertex {v}")));
            }
            if release[v] < 0 {
                return Err(Error::InvalidInstance(format!("negative release date on vertex {v}")));
            }
            if deadline[v] < release[v] {
                return Err(Error::InvalidInstance(format!("deadline before release date on vertex {v}")));
            }
            if deadline[v] < space.dist(root, v) {
                return Err(Error::InvalidInstance(format!(
                    "deadline of vertex {v} is below its distance from the root"
                )));
            }
        }
        Ok(TWInstance { space, root, rewards, release, deadline, waiting })
    }

    pub fn max_deadline(&self) -> i64 {
        self.deadline.iter().copied().max().unwrap_or(0)
    }
}

/// A vertex finishing its visit (arrival plus waiting) at `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub vertex: usize,
    pub time: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub vertex: usize,
    pub time: Rational,
    pub counted: bool,
}

/// A completion counts iff it lies in `[R(v), slack * D(v)]`.
pub fn check_tw_feasibility<R>(trace: &[Completion], instance: &TWInstance<R>, slack: &Rational) -> Vec<Verdict> {
    trace
        .iter()
        .map(|c| {
            let v = c.vertex;
            let open = Rational::from_integer(instance.release[v].into());
            let close = slack * Rational::from_integer(instance.deadline[v].into());
            Verdict { vertex: v, time: c.time.clone(), counted: c.time >= open && c.time <= close }
        })
        .collect()
}
