//! Point-to-point orienteering by pivot enumeration.
//!
//! For every pivot `x` the budget leaves `eps_x = D - d(u, x) - d(x, v)` of
//! excess. Two walks are built around `x`: shape A goes straight to `x` and
//! spends the allowance on the `x -> v` leg, shape B spends it on `u -> x` and
//! then goes straight to `v`. The best of all 2n candidates wins. Each
//! candidate is `dist + (dist + excess)` with excess at most `eps_x`, so no
//! candidate can exceed `D`.

use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Route, Walk};
use crate::min_excess::MinExcessSolver;
use crate::scalar::Reward;

#[derive(Debug, Clone, PartialEq)]
pub struct P2PInstance<R> {
    pub space: MetricSpace,
    pub rewards: Vec<R>,
    pub u: usize,
    pub v: usize,
    pub budget: i64,
}

impl<R: Reward> P2PInstance<R> {
    pub fn new(space: MetricSpace, rewards: Vec<R>, u: usize, v: usize, budget: i64) -> Result<Self> {
        space.check_vertex(u)?;
        space.check_vertex(v)?;
        if rewards.len() != space.len() {
            return Err(Error::InvalidInstance(format!(
                "{} rewards for {} vertices",
                rewards.len(),
                space.len()
            )));
        }
        if let Some(i) = rewards.iter().position(|r| *r < R::zero()) {
            return Err(Error::InvalidInstance(format!("negative reward on vertex {i}")));
        }
        Ok(P2PInstance { space, rewards, u, v, budget })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shape {
    /// Direct `u -> x`, then the indirect `x -> v` leg.
    A,
    /// Indirect `u -> x` leg, then direct `x -> v`.
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PivotCandidate<R> {
    pub x: usize,
    pub shape: Shape,
    pub eps_x: i64,
    pub walk: Walk,
    pub reward: R,
}

#[derive(Debug, Clone, PartialEq)]
pub struct P2PSolution<R> {
    pub best: PivotCandidate<R>,
    pub length: i64,
    /// Pivots with a non-negative allowance, i.e. half the number of
    /// min-excess invocations.
    pub feasible_pivots: usize,
}

impl<R: Reward> P2PSolution<R> {
    pub fn route(&self, rewards: &[R]) -> Route<R> {
        Route::collect_all(self.best.walk.clone(), rewards)
    }
}

/// Excess allowance for pivot `x`, or `None` when `x` cannot be reached
/// within the budget on the way from `u` to `v`.
pub fn compute_eps_x<R>(instance: &P2PInstance<R>, x: usize) -> Option<i64> {
    let s = &instance.space;
    let eps = instance.budget - s.dist(instance.u, x) - s.dist(x, instance.v);
    (eps >= 0).then_some(eps)
}

fn beats<R: Reward>(a: &PivotCandidate<R>, a_len: i64, b: &PivotCandidate<R>, b_len: i64) -> bool {
    if a.reward != b.reward {
        return a.reward > b.reward;
    }
    if a_len != b_len {
        return a_len < b_len;
    }
    (a.x, a.shape) < (b.x, b.shape)
}

pub fn solve_p2p<R: Reward, S: MinExcessSolver<R> + ?Sized>(
    instance: &P2PInstance<R>,
    solver: &S,
) -> Result<P2PSolution<R>> {
    let P2PInstance { space, rewards, u, v, budget } = instance;
    let (u, v, budget) = (*u, *v, *budget);
    if budget < space.dist(u, v) {
        return Err(Error::Infeasible(format!(
            "budget {budget} below dist({u}, {v}) = {}",
            space.dist(u, v)
        )));
    }
    let mut best: Option<(PivotCandidate<R>, i64)> = None;
    let mut feasible_pivots = 0;
    for x in 0..space.len() {
        let Some(eps_x) = compute_eps_x(instance, x) else {
            continue;
        };
        feasible_pivots += 1;
        let tail = solver.solve(space, rewards, x, v, eps_x)?;
        let head = solver.solve(space, rewards, u, x, eps_x)?;
        let shapes = [
            (Shape::A, Walk::direct(u, x).concat(&tail.route.walk)),
            (Shape::B, head.route.walk.concat(&Walk::direct(x, v))),
        ];
        for (shape, walk) in shapes {
            let len = walk.length(space);
            // approximate solvers may overshoot; never return an over-budget walk
            if len > budget {
                continue;
            }
            let reward = walk.reward(rewards);
            let cand = PivotCandidate { x, shape, eps_x, walk, reward };
            let replace = match &best {
                None => true,
                Some((b, b_len)) => beats(&cand, len, b, *b_len),
            };
            if replace {
                best = Some((cand, len));
            }
        }
    }
    match best {
        Some((best, length)) => Ok(P2PSolution { best, length, feasible_pivots }),
        None => Err(Error::Infeasible("min-excess solver returned no walk within budget".into())),
    }
}
