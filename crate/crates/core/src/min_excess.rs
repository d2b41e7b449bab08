//! Budget-form min-excess subroutine: maximise reward over `u`-`v` walks whose
//! excess stays within a given allowance.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::metric::{sum_over, MetricSpace, Route};
use crate::oracles::subset::SubsetTable;
use crate::scalar::Reward;

#[derive(Debug, Clone, PartialEq)]
pub struct MinExcessSolution<R> {
    pub route: Route<R>,
    /// Fraction of the best reward achievable within the allowance that the
    /// implementation promises to collect.
    pub reward_fraction_guarantee: Rational64,
    /// Factor by which the implementation may overshoot the excess of the
    /// walk it competes against.
    pub excess_factor_guarantee: Rational64,
}

/// Anything that answers budget-form min-excess queries.
pub trait MinExcessSolver<R: Reward> {
    fn solve(
        &self,
        space: &MetricSpace,
        rewards: &[R],
        u: usize,
        v: usize,
        excess_budget: i64,
    ) -> Result<MinExcessSolution<R>>;

    /// `(reward_fraction, excess_factor)` of this implementation.
    fn guarantees(&self) -> (Rational64, Rational64);
}

/// Exact solver: subset DP over the stops that carry reward and fit the
/// allowance. Returns the literal optimum, so both guarantees are 1.
#[derive(Debug, Clone, Copy)]
pub struct ExactMinExcess {
    /// Cap on the number of candidate stops in one query.
    pub max_stops: usize,
}

impl Default for ExactMinExcess {
    fn default() -> Self {
        ExactMinExcess { max_stops: 14 }
    }
}

impl<R: Reward> MinExcessSolver<R> for ExactMinExcess {
    fn solve(
        &self,
        space: &MetricSpace,
        rewards: &[R],
        u: usize,
        v: usize,
        excess_budget: i64,
    ) -> Result<MinExcessSolution<R>> {
        space.check_vertex(u)?;
        space.check_vertex(v)?;
        if excess_budget < 0 {
            return Err(Error::Infeasible(format!("negative excess allowance {excess_budget}")));
        }
        let budget = space.dist(u, v) + excess_budget;
        let stops: Vec<usize> = (0..space.len())
            .filter(|&w| w != u && w != v)
            .filter(|&w| rewards[w] > R::zero())
            .filter(|&w| space.dist(u, w) + space.dist(w, v) <= budget)
            .collect();
        if stops.len() > self.max_stops {
            return Err(Error::CapExceeded {
                what: "min-excess candidate stops",
                value: stops.len(),
                limit: self.max_stops,
            });
        }
        let table = SubsetTable::build(space, u, v, stops, budget);
        let mut best: Option<(R, i64, usize)> = None;
        for mask in 0..table.masks() {
            if !table.reachable(mask, budget) {
                continue;
            }
            let reward = sum_over(&table.members(mask), rewards);
            let len = table.best_len[mask];
            let better = match &best {
                None => true,
                Some((r, l, _)) => reward > *r || (reward == *r && len < *l),
            };
            if better {
                best = Some((reward, len, mask));
            }
        }
        let (_, _, mask) = best.expect("direct walk fits any non-negative allowance");
        Ok(MinExcessSolution {
            route: Route::collect_all(table.walk(mask), rewards),
            reward_fraction_guarantee: Rational64::from_integer(1),
            excess_factor_guarantee: Rational64::from_integer(1),
        })
    }

    fn guarantees(&self) -> (Rational64, Rational64) {
        (Rational64::from_integer(1), Rational64::from_integer(1))
    }
}

/// Wraps a solver and counts how often it is invoked.
#[derive(Debug, Default)]
pub struct CountingMinExcess<S> {
    inner: S,
    calls: AtomicUsize,
}

impl<S> CountingMinExcess<S> {
    pub fn new(inner: S) -> Self {
        CountingMinExcess { inner, calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }
}

impl<R: Reward, S: MinExcessSolver<R>> MinExcessSolver<R> for CountingMinExcess<S> {
    fn solve(
        &self,
        space: &MetricSpace,
        rewards: &[R],
        u: usize,
        v: usize,
        excess_budget: i64,
    ) -> Result<MinExcessSolution<R>> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.solve(space, rewards, u, v, excess_budget)
    }

    fn guarantees(&self) -> (Rational64, Rational64) {
        self.inner.guarantees()
    }
}
