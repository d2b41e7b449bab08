//! Exact values of non-adaptive policies.
//!
//! Semantics shared with the simulator: travel from the start through the
//! listed jobs in order, processing each to completion. A job pays its reward
//! iff its completion time plus the remaining distance to the terminal fits in
//! the budget. Jobs are never cancelled; once the clock passes the budget the
//! policy stops.

use super::instance::{single_vertex_reward, StochOrientInstance};
use super::policy::NonAdaptivePolicy;
use super::simulate::simulate_order_mean;
use crate::error::{Error, Result};
use crate::scalar::{Field, Reward};

/// Outcome of one processed job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobOutcome {
    pub vertex: usize,
    /// Time processing began (arrival).
    pub start: i64,
    pub completion: i64,
    pub collected: bool,
}

/// One realisation of a visiting order.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution<F> {
    pub outcomes: Vec<JobOutcome>,
    pub reward: F,
    /// Clock when the policy stopped at its last job (or the start).
    pub stop_time: i64,
    pub stop_vertex: usize,
}

pub(crate) fn check_distinct(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n {
            return Err(Error::InvalidVertex(v));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::DuplicateVertex(v));
        }
    }
    Ok(())
}

/// Runs `order` with job sizes supplied by `size_of` (called once per job
/// that is reached, in visiting order).
pub fn execute_order<F: Reward>(
    instance: &StochOrientInstance<F>,
    order: &[usize],
    mut size_of: impl FnMut(usize) -> i64,
) -> Execution<F> {
    let space = &instance.space;
    let budget = instance.budget;
    let mut clock = 0;
    let mut at = instance.start;
    let mut outcomes = Vec::new();
    let mut reward = F::zero();
    for &v in order {
        let arrive = clock + space.dist(at, v);
        if arrive > budget {
            break;
        }
        let completion = arrive + size_of(v);
        let collected = completion + space.dist(v, instance.terminal) <= budget;
        if collected {
            reward = reward + instance.rewards[v].clone();
        }
        outcomes.push(JobOutcome { vertex: v, start: arrive, completion, collected });
        clock = completion;
        at = v;
        if clock > budget {
            break;
        }
    }
    Execution { outcomes, reward, stop_time: clock, stop_vertex: at }
}

/// Exact expected reward of visiting `order`, by convolving the size
/// distributions along it. Mass whose clock passes the budget is dropped.
pub fn exact_policy_value<F: Reward>(instance: &StochOrientInstance<F>, order: &[usize]) -> Result<F> {
    check_distinct(order, instance.space.len())?;
    let space = &instance.space;
    let budget = instance.budget;
    let slots = (budget + 1) as usize;
    // clock[t] = probability the policy is still running with clock t
    let mut clock = vec![F::zero(); slots];
    clock[0] = F::one();
    let mut at = instance.start;
    let mut value = F::zero();
    for &v in order {
        let hop = space.dist(at, v);
        let to_terminal = space.dist(v, instance.terminal);
        let mut next = vec![F::zero(); slots];
        let mut alive = false;
        for (t, mass) in clock.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            let arrive = t as i64 + hop;
            if arrive > budget {
                continue;
            }
            for (size, p) in instance.sizes[v].support() {
                let done = arrive + size;
                let weight = mass.clone() * p.clone();
                if done + to_terminal <= budget {
                    value = value + weight.clone() * instance.rewards[v].clone();
                }
                if done <= budget {
                    next[done as usize] = next[done as usize].clone() + weight;
                    alive = true;
                }
            }
        }
        clock = next;
        at = v;
        if !alive {
            break;
        }
    }
    Ok(value)
}

/// Value of a randomized policy plus, when it was estimated rather than
/// computed, the standard error of the estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyValue<F> {
    pub value: F,
    pub std_error: Option<f64>,
}

/// Paths up to this length are evaluated by summing over every inclusion pattern.
pub const EXACT_SAMPLING_LIMIT: usize = 12;

/// Expected reward of `policy`: the single-vertex branch with its
/// probability, otherwise the path with each job kept independently.
///
/// Paths longer than [`EXACT_SAMPLING_LIMIT`] fall back to Monte Carlo with
/// `fallback_replicates` draws seeded by `seed`.
pub fn randomized_policy_value<F: Field>(
    instance: &StochOrientInstance<F>,
    policy: &NonAdaptivePolicy<F>,
    fallback_replicates: u64,
    seed: u64,
) -> Result<PolicyValue<F>> {
    let branch = policy.branch_probability.clone();
    let single = single_vertex_reward(instance, policy.single_vertex);
    let path = &policy.path;
    check_distinct(path, instance.space.len())?;
    let q = policy.inclusion_probability.clone();
    let (inner, std_error) = if path.len() <= EXACT_SAMPLING_LIMIT {
        let m = path.len();
        let mut total = F::zero();
        for mask in 0..1usize << m {
            let mut weight = F::one();
            let mut sub = Vec::with_capacity(m);
            for (i, &v) in path.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    weight = weight * q.clone();
                    sub.push(v);
                } else {
                    weight = weight * (F::one() - q.clone());
                }
            }
            if weight.is_zero() {
                continue;
            }
            total = total + weight * exact_policy_value(instance, &sub)?;
        }
        (total, None)
    } else {
        let (mean, se) = simulate_order_mean(instance, path, &q, fallback_replicates, seed);
        (F::from_f64(mean), Some(se * (1.0 - branch.to_f64())))
    };
    Ok(PolicyValue { value: branch.clone() * single + (F::one() - branch) * inner, std_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricSpace;
    use crate::stoch::distribution::SizeDistribution;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn two_jobs(budget: i64) -> StochOrientInstance<Rational> {
        // start 0, jobs at 1 and 2, terminal 3 on a unit line
        StochOrientInstance::new(
            MetricSpace::line(&[0, 1, 2, 3]),
            vec![q(0, 1), q(4, 1), q(6, 1), q(0, 1)],
            vec![
                SizeDistribution::deterministic(0),
                SizeDistribution::new(vec![(1, q(1, 2)), (3, q(1, 2))]).unwrap(),
                SizeDistribution::new(vec![(0, q(1, 4)), (2, q(3, 4))]).unwrap(),
                SizeDistribution::deterministic(0),
            ],
            budget,
            0,
            3,
        )
        .unwrap()
    }

    #[test]
    fn empty_order_is_worth_nothing() {
        assert_eq!(exact_policy_value(&two_jobs(6), &[]).unwrap(), q(0, 1));
    }

    #[test]
    fn singleton_matches_single_vertex_reward() {
        let inst = two_jobs(6);
        for v in 0..4 {
            assert_eq!(exact_policy_value(&inst, &[v]).unwrap(), single_vertex_reward(&inst, v));
        }
    }

    #[test]
    fn duplicates_rejected() {
        assert_eq!(exact_policy_value(&two_jobs(6), &[1, 1]), Err(Error::DuplicateVertex(1)));
    }

    #[test]
    fn deterministic_sizes_hand_computed() {
        // sizes 2 and 1: job 1 done at 3 (+2 to terminal = 5), job 2 done at 5 (+1 = 6)
        let mut inst = two_jobs(6);
        inst.sizes[1] = SizeDistribution::deterministic(2);
        inst.sizes[2] = SizeDistribution::deterministic(1);
        assert_eq!(exact_policy_value(&inst, &[1, 2]).unwrap(), q(10, 1));
        inst.budget = 5;
        assert_eq!(exact_policy_value(&inst, &[1, 2]).unwrap(), q(4, 1));
    }

    #[test]
    fn two_job_outcome_tree() {
        // S1 in {1, 3}, S2 in {0 (1/4), 2 (3/4)}, B = 6
        // job 1 done at 2 or 4, +2 to terminal: always collected -> 4
        // job 2 arrival 3 or 5; done 3,5 or 5,7; +1 to terminal <= 6 iff done <= 5
        //   S1=1: done 3 or 5 -> always; S1=3: done 5 (1/4) ok, 7 no
        // job 2 collected w.p. 1/2 + 1/2 * 1/4 = 5/8 -> 6 * 5/8 = 15/4
        assert_eq!(exact_policy_value(&two_jobs(6), &[1, 2]).unwrap(), q(4, 1) + q(15, 4));
    }

    #[test]
    fn execute_replays_realisation() {
        let inst = two_jobs(6);
        let sizes = [0, 3, 2, 0];
        let run = execute_order(&inst, &[1, 2], |v| sizes[v]);
        assert_eq!(run.outcomes.len(), 2);
        assert!(run.outcomes[0].collected);
        assert_eq!(run.outcomes[1].completion, 7);
        assert!(!run.outcomes[1].collected);
        assert_eq!(run.reward, q(4, 1));
    }
}
