//! Time windows with random waiting times: the same checkpoint DP, with each
//! segment filled by a non-adaptive stochastic policy instead of a fixed walk.
//!
//! At run time a segment starts when the vehicle is at its first vertex and
//! the checkpoint has passed, executes the segment policy with the segment
//! budget, then travels to the segment's last vertex. A vertex counts iff its
//! waiting ends inside `[R(v), (1 + eps) D(v)]`. Segment policies only claim
//! jobs that end within the segment, so when a segment starts on time every
//! claim is in window; a late start (after an overrunning job) can push a
//! claim out, and such claims are reported as `late_claims`.

use rand::Rng;

use super::solver::{plan_time_windows, Segment, SegmentSubroutine, TWPlan};
use super::{check_tw_feasibility, Completion, TWInstance};
use crate::error::{Error, Result};
use crate::metric::Walk;
use crate::min_excess::MinExcessSolver;
use crate::scalar::Field;
use crate::stoch::{
    randomized_policy_value, realise_policy, replicate_rng, solve_p2p_stoch, NonAdaptivePolicy, SimulationSummary,
    SizeDistribution, StochOrientInstance,
};
use crate::Rational;

/// A segment's stochastic sub-instance (restricted ids) and its policy.
#[derive(Debug, Clone, PartialEq)]
pub enum StochSegmentPlan<F> {
    Travel { from: usize, to: usize },
    Policy { instance: StochOrientInstance<F>, policy: NonAdaptivePolicy<F>, vertices: Vec<usize> },
}

/// Segments through [`solve_p2p_stoch`], valued exactly by
/// [`randomized_policy_value`].
#[derive(Debug, Clone, Copy, Default)]
pub struct StochSubroutine<S> {
    pub solver: S,
    /// Seed for the Monte Carlo fallback on very long segment paths.
    pub seed: u64,
}

impl<F: Field, S: MinExcessSolver<F>> SegmentSubroutine<F> for StochSubroutine<S> {
    type Plan = StochSegmentPlan<F>;

    fn plan(&self, instance: &TWInstance<F>, seg: &Segment<F>) -> Result<(F, StochSegmentPlan<F>)> {
        let sizes = seg
            .vertices
            .iter()
            .map(|&v| match &instance.waiting {
                Some(w) => w[v].clone(),
                None => SizeDistribution::deterministic(0),
            })
            .collect();
        let sub = StochOrientInstance::new(seg.space.clone(), seg.rewards.clone(), sizes, seg.budget, seg.from, seg.to)?;
        let policy = solve_p2p_stoch(&sub, &self.solver)?;
        let value = randomized_policy_value(&sub, &policy, 10_000, self.seed)?.value;
        Ok((value, StochSegmentPlan::Policy { instance: sub, policy, vertices: seg.vertices.clone() }))
    }

    fn travel(&self, from: usize, to: usize) -> StochSegmentPlan<F> {
        StochSegmentPlan::Travel { from, to }
    }
}

pub fn solve_time_windows_stochastic<F: Field, S: MinExcessSolver<F>>(
    instance: &TWInstance<F>,
    epsilon: &Rational,
    solver: S,
    seed: u64,
) -> Result<TWPlan<F, StochSegmentPlan<F>>> {
    if instance.waiting.is_none() {
        return Err(Error::InvalidInstance("stochastic solve needs waiting-time distributions".into()));
    }
    plan_time_windows(instance, epsilon, &StochSubroutine { solver, seed })
}

/// One run of a stochastic time-window plan.
#[derive(Debug, Clone, PartialEq)]
pub struct TWRealisation {
    pub walk: Walk,
    /// Completions of the jobs the segment policies claimed.
    pub claims: Vec<Completion>,
    pub counted: Vec<bool>,
    pub reward: f64,
}

fn rational(t: i64) -> Rational {
    Rational::from_integer(t.into())
}

pub fn realise_tw_policy<F: Field>(
    instance: &TWInstance<F>,
    plan: &TWPlan<F, StochSegmentPlan<F>>,
    epsilon: &Rational,
    rng: &mut impl Rng,
) -> TWRealisation {
    let root = instance.root;
    let mut clock = Rational::from_integer(0.into());
    let mut walk = Walk::direct(root, root);
    let mut claims = Vec::new();
    if instance.deadline[root] == 0 && plan.root_bonus > F::zero() {
        claims.push(Completion { vertex: root, time: clock.clone() });
    }
    for seg in &plan.segments {
        let start = if clock > seg.start_time { clock.clone() } else { seg.start_time.clone() };
        match &seg.plan {
            StochSegmentPlan::Travel { from, to } => {
                clock = start + rational(instance.space.dist(*from, *to));
                walk = walk.concat(&Walk::direct(*from, *to));
            }
            StochSegmentPlan::Policy { instance: sub, policy, vertices } => {
                let run = realise_policy(sub, policy, rng);
                let mut hops = vec![vertices[sub.start]];
                for out in &run.execution.outcomes {
                    hops.push(vertices[out.vertex]);
                    if out.collected {
                        claims.push(Completion { vertex: vertices[out.vertex], time: start.clone() + rational(out.completion) });
                    }
                }
                hops.push(vertices[sub.terminal]);
                let stop = run.execution.stop_time + sub.space.dist(run.execution.stop_vertex, sub.terminal);
                clock = start + rational(stop);
                walk = walk.concat(&Walk::new(hops).expect("non-empty"));
            }
        }
    }
    let slack = Rational::from_integer(1.into()) + epsilon;
    let verdicts = check_tw_feasibility(&claims, instance, &slack);
    let counted: Vec<bool> = verdicts.iter().map(|v| v.counted).collect();
    let reward = verdicts.iter().filter(|v| v.counted).map(|v| instance.rewards[v.vertex].to_f64()).sum();
    TWRealisation { walk, claims, counted, reward }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TWSimulation {
    pub summary: SimulationSummary,
    /// Claims that fell outside the slack window across all replicates.
    pub late_claims: u64,
}

pub fn simulate_tw_policy<F: Field>(
    instance: &TWInstance<F>,
    plan: &TWPlan<F, StochSegmentPlan<F>>,
    epsilon: &Rational,
    replicates: u64,
    seed: u64,
) -> TWSimulation {
    let mut late_claims = 0;
    let summary = SimulationSummary::from_samples(
        (0..replicates.max(1))
            .map(|k| {
                let run = realise_tw_policy(instance, plan, epsilon, &mut replicate_rng(seed, k));
                late_claims += run.counted.iter().filter(|c| !**c).count() as u64;
                run.reward
            })
            .collect::<Vec<_>>(),
    );
    TWSimulation { summary, late_claims }
}
