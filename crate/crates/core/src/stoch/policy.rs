//! Non-adaptive policy construction for stochastic P2P orienteering.
//!
//! Two branches are prepared. The single-vertex branch visits the job with
//! the best single-vertex tour reward. The path branch solves the
//! deterministic surrogate `I_KO(W)` for every truncation scale
//! `W = B, B/2, ..., B/2^ceil(log2 B), 0`, keeps the walk with the largest
//! surrogate reward, and at run time keeps each of its jobs independently.
//! By default the branches are taken with probability 1/2 each and jobs are
//! kept with probability 1/4.

use super::instance::{build_valid_knap_instance, single_vertex_reward, StochOrientInstance};
use crate::error::Result;
use crate::knap::solve_p2p_knap;
use crate::metric::Walk;
use crate::min_excess::MinExcessSolver;
use crate::scalar::Field;

/// One truncation scale tried by [`solve_p2p_stoch`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleCandidate<F> {
    pub index: u32,
    pub knapsack_budget: F,
    /// `None` when the surrogate's travel budget cannot reach the terminal.
    pub reward: Option<F>,
    pub walk: Option<Walk>,
    pub jobs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonAdaptivePolicy<F> {
    /// Vertex with the highest single-vertex tour reward.
    pub single_vertex: usize,
    /// Jobs of the chosen surrogate walk, in walk order.
    pub path: Vec<usize>,
    /// The chosen surrogate walk from start to terminal.
    pub path_walk: Walk,
    /// Probability of taking the single-vertex branch.
    pub branch_probability: F,
    /// Probability each path job is kept.
    pub inclusion_probability: F,
    pub scales: Vec<ScaleCandidate<F>>,
    pub chosen_scale: Option<u32>,
}

impl<F: Field> NonAdaptivePolicy<F> {
    /// Policy with explicit branches and the default probabilities.
    pub fn new(single_vertex: usize, path: Vec<usize>, path_walk: Walk) -> Self {
        NonAdaptivePolicy {
            single_vertex,
            path,
            path_walk,
            branch_probability: F::from_ratio(1, 2),
            inclusion_probability: F::from_ratio(1, 4),
            scales: Vec::new(),
            chosen_scale: None,
        }
    }

    pub fn with_probabilities(mut self, branch: F, inclusion: F) -> Self {
        self.branch_probability = branch;
        self.inclusion_probability = inclusion;
        self
    }
}

/// Smallest `k` with `2^k >= budget` (0 for budgets of 0 or 1).
pub fn ceil_log2(budget: i64) -> u32 {
    let mut k = 0;
    while (1i64 << k) < budget {
        k += 1;
    }
    k
}

/// Truncation scales `(i, W)` visited by the path branch.
pub fn truncation_scales<F: Field>(budget: i64) -> Vec<(u32, F)> {
    let top = ceil_log2(budget);
    let b = F::from_int(budget);
    let mut out: Vec<(u32, F)> = (0..=top).map(|i| (i, b.clone() / F::from_int(1i64 << i))).collect();
    out.push((top + 1, F::zero()));
    out
}

pub fn solve_p2p_stoch<F: Field, S: MinExcessSolver<F> + ?Sized>(
    instance: &StochOrientInstance<F>,
    solver: &S,
) -> Result<NonAdaptivePolicy<F>> {
    instance.check_feasible()?;
    let n = instance.space.len();
    let mut single_vertex = 0;
    let mut single_best = single_vertex_reward(instance, 0);
    for v in 1..n {
        let r = single_vertex_reward(instance, v);
        if r > single_best {
            single_best = r;
            single_vertex = v;
        }
    }

    let mut scales = Vec::new();
    let mut chosen: Option<(u32, F)> = None;
    for (index, w) in truncation_scales::<F>(instance.budget) {
        let surrogate = build_valid_knap_instance(instance, &w);
        let (start, terminal) = (instance.start, instance.terminal);
        if surrogate.travel_budget < surrogate.space.dist(start, terminal) {
            scales.push(ScaleCandidate { index, knapsack_budget: w, reward: None, walk: None, jobs: Vec::new() });
            continue;
        }
        let sol = solve_p2p_knap(&surrogate, solver)?;
        let reward = sol.route.reward.clone();
        if chosen.as_ref().is_none_or(|(_, best)| reward > *best) {
            chosen = Some((index, reward.clone()));
        }
        scales.push(ScaleCandidate {
            index,
            knapsack_budget: w,
            reward: Some(reward),
            walk: Some(sol.route.walk),
            jobs: sol.route.collected,
        });
    }

    let chosen_scale = chosen.map(|(i, _)| i);
    let (path, path_walk) = chosen_scale
        .and_then(|i| scales.iter().find(|s| s.index == i))
        .map(|s| (s.jobs.clone(), s.walk.clone().expect("feasible scale has a walk")))
        .unwrap_or_else(|| (Vec::new(), Walk::direct(instance.start, instance.terminal)));
    let mut policy = NonAdaptivePolicy::new(single_vertex, path, path_walk);
    policy.scales = scales;
    policy.chosen_scale = chosen_scale;
    Ok(policy)
}
