//! Point-to-point knapsack orienteering through Lagrangian relaxation.
//!
//! The knapsack constraint is moved into the objective: for a multiplier
//! `theta` every reward becomes `max(r - theta * s, 0)`, the plain P2P solver
//! runs on those rewards, and the resulting walk is cut into knapsack-sized
//! pieces of which the most rewarding one is kept. A fixed geometric grid of
//! multipliers is searched exhaustively.

use crate::error::{Error, Result};
use crate::metric::{sum_over, MetricSpace, Route, Walk};
use crate::min_excess::MinExcessSolver;
use crate::p2p::{solve_p2p, P2PInstance};
use crate::scalar::{Field, Reward};

#[derive(Debug, Clone, PartialEq)]
pub struct KnapOrientInstance<R> {
    pub space: MetricSpace,
    pub rewards: Vec<R>,
    pub sizes: Vec<R>,
    pub travel_budget: i64,
    pub knapsack_budget: R,
    pub u: usize,
    pub v: usize,
}

impl<R: Reward> KnapOrientInstance<R> {
    pub fn new(
        space: MetricSpace,
        rewards: Vec<R>,
        sizes: Vec<R>,
        travel_budget: i64,
        knapsack_budget: R,
        u: usize,
        v: usize,
    ) -> Result<Self> {
        space.check_vertex(u)?;
        space.check_vertex(v)?;
        let n = space.len();
        if rewards.len() != n || sizes.len() != n {
            return Err(Error::InvalidInstance(format!(
                "expected {n} rewards and sizes, got {} and {}",
                rewards.len(),
                sizes.len()
            )));
        }
        if let Some(i) = rewards.iter().position(|r| *r < R::zero()) {
            return Err(Error::InvalidInstance(format!("negative reward on vertex {i}")));
        }
        if let Some(i) = sizes.iter().position(|s| *s < R::zero()) {
            return Err(Error::InvalidInstance(format!("negative size on vertex {i}")));
        }
        if knapsack_budget < R::zero() {
            return Err(Error::InvalidInstance("negative knapsack budget".into()));
        }
        Ok(KnapOrientInstance { space, rewards, sizes, travel_budget, knapsack_budget, u, v })
    }

    /// Size of a set of vertices.
    pub fn size_of(&self, vertices: &[usize]) -> R {
        sum_over(vertices, &self.sizes)
    }

    /// Whether `route` respects both budgets.
    pub fn is_feasible(&self, route: &Route<R>) -> bool {
        let walk = &route.walk;
        walk.first() == self.u
            && walk.last() == self.v
            && walk.length(&self.space) <= self.travel_budget
            && self.size_of(&route.collected) <= self.knapsack_budget
            && route.collected.iter().all(|c| walk.vertices().contains(c))
    }
}

/// Zeroes the reward of every vertex too large to ever fit. Such vertices stay
/// in the metric and may still be travelled through.
pub fn preprocess_oversize<R: Reward>(instance: &KnapOrientInstance<R>) -> KnapOrientInstance<R> {
    let mut out = instance.clone();
    for (r, s) in out.rewards.iter_mut().zip(&instance.sizes) {
        if *s > instance.knapsack_budget {
            *r = R::zero();
        }
    }
    out
}

/// Multipliers searched by [`solve_p2p_knap`]: zero, then a doubling grid from
/// `r_max / (2 W n)` up to the first value at or above `2 * sum(r) / W`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianSchedule<F> {
    pub multipliers: Vec<F>,
}

impl<F: Field> LagrangianSchedule<F> {
    pub fn for_instance(instance: &KnapOrientInstance<F>) -> Self {
        let mut multipliers = vec![F::zero()];
        let w = &instance.knapsack_budget;
        let r_max = instance.rewards.iter().cloned().fold(F::zero(), F::max_of);
        if *w > F::zero() && r_max > F::zero() {
            let n = F::from_int(instance.space.len() as i64);
            let total = instance.rewards.iter().cloned().fold(F::zero(), |a, b| a + b);
            let two = F::from_int(2);
            let lo = r_max / (two.clone() * w.clone() * n);
            let hi = two.clone() * total / w.clone();
            let mut theta = lo;
            loop {
                multipliers.push(theta.clone());
                if theta >= hi {
                    break;
                }
                theta = theta * two.clone();
            }
        }
        LagrangianSchedule { multipliers }
    }
}

/// `max(r_v - theta * s_v, 0)` for every vertex.
pub fn lagrangian_rewards<F: Field>(instance: &KnapOrientInstance<F>, theta: &F) -> Vec<F> {
    instance
        .rewards
        .iter()
        .zip(&instance.sizes)
        .map(|(r, s)| F::max_of(r.clone() - theta.clone() * s.clone(), F::zero()))
        .collect()
}

/// Cuts the rewarded vertices of `walk` (in first-visit order) into maximal
/// runs of total size at most `knapsack_budget` and keeps the most rewarding
/// run, reconnected to `u` and `v` by shortest paths.
///
/// Every rewarded vertex must fit on its own.
pub fn split_best_segment<R: Reward>(
    walk: &Walk,
    rewards: &[R],
    sizes: &[R],
    knapsack_budget: &R,
    u: usize,
    v: usize,
) -> Route<R> {
    let rewarded: Vec<usize> = walk.distinct().into_iter().filter(|&x| rewards[x] > R::zero()).collect();
    let mut segments: Vec<Vec<usize>> = Vec::new();
    let mut load = R::zero();
    for x in rewarded {
        let grown = load.clone() + sizes[x].clone();
        match segments.last_mut() {
            Some(seg) if grown <= *knapsack_budget => {
                seg.push(x);
                load = grown;
            }
            _ => {
                segments.push(vec![x]);
                load = sizes[x].clone();
            }
        }
    }
    let mut best: Option<(R, Vec<usize>)> = None;
    for seg in segments {
        let r = sum_over(&seg, rewards);
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, seg));
        }
    }
    match best {
        None => Route { walk: Walk::direct(u, v), collected: Vec::new(), reward: R::zero() },
        Some((reward, seg)) => {
            let a = seg[0];
            let b = *seg.last().expect("segments are non-empty");
            let pa = walk.position(a).expect("segment vertex on walk");
            let pb = walk.position(b).expect("segment vertex on walk");
            let walk = Walk::direct(u, a).concat(&walk.slice(pa, pb)).concat(&Walk::direct(b, v));
            Route { walk, collected: seg, reward }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnapSolution<F> {
    pub route: Route<F>,
    pub size: F,
    pub theta: F,
    /// `(theta, true reward of its candidate)` for every multiplier tried.
    pub candidates: Vec<(F, F)>,
}

pub fn solve_p2p_knap<F: Field, S: MinExcessSolver<F> + ?Sized>(
    instance: &KnapOrientInstance<F>,
    solver: &S,
) -> Result<KnapSolution<F>> {
    let (u, v) = (instance.u, instance.v);
    if instance.travel_budget < instance.space.dist(u, v) {
        return Err(Error::Infeasible(format!(
            "travel budget {} below dist({u}, {v}) = {}",
            instance.travel_budget,
            instance.space.dist(u, v)
        )));
    }
    let pre = preprocess_oversize(instance);
    let schedule = LagrangianSchedule::for_instance(&pre);
    let mut best: Option<KnapSolution<F>> = None;
    let mut candidates = Vec::with_capacity(schedule.multipliers.len());
    for theta in schedule.multipliers {
        let altered = lagrangian_rewards(&pre, &theta);
        let p2p = P2PInstance { space: pre.space.clone(), rewards: altered, u, v, budget: pre.travel_budget };
        let sol = solve_p2p(&p2p, solver)?;
        let route = split_best_segment(&sol.best.walk, &pre.rewards, &pre.sizes, &pre.knapsack_budget, u, v);
        debug_assert!(pre.is_feasible(&route));
        candidates.push((theta.clone(), route.reward.clone()));
        if best.as_ref().is_none_or(|b| route.reward > b.route.reward) {
            let size = pre.size_of(&route.collected);
            best = Some(KnapSolution { route, size, theta, candidates: Vec::new() });
        }
    }
    let mut best = best.expect("schedule always contains zero");
    best.candidates = candidates;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::min_excess::ExactMinExcess;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn line(w: i64) -> KnapOrientInstance<Rational> {
        KnapOrientInstance::new(
            MetricSpace::line(&[0, 1, 2, 3]),
            vec![q(0, 1), q(5, 1), q(7, 1), q(0, 1)],
            vec![q(0, 1), q(3, 1), q(3, 1), q(0, 1)],
            3,
            q(w, 1),
            0,
            3,
        )
        .unwrap()
    }

    #[test]
    fn oversize_rewards_zeroed() {
        let mut inst = line(5);
        inst.sizes[1] = q(6, 1);
        let pre = preprocess_oversize(&inst);
        assert_eq!(pre.rewards[1], q(0, 1));
        assert_eq!(pre.rewards[2], q(7, 1));
        assert_eq!(preprocess_oversize(&line(6)), line(6));
        let zeroed = preprocess_oversize(&line(0));
        assert!(zeroed.rewards.iter().all(|r| *r == q(0, 1)));
    }

    #[test]
    fn zero_size_items_survive_zero_budget() {
        let mut inst = line(0);
        inst.sizes[1] = q(0, 1);
        assert_eq!(preprocess_oversize(&inst).rewards[1], q(5, 1));
    }

    #[test]
    fn lagrangian_reward_examples() {
        let inst = KnapOrientInstance::new(
            MetricSpace::line(&[0]),
            vec![q(5, 1)],
            vec![q(3, 1)],
            0,
            q(3, 1),
            0,
            0,
        )
        .unwrap();
        assert_eq!(lagrangian_rewards(&inst, &q(0, 1)), vec![q(5, 1)]);
        assert_eq!(lagrangian_rewards(&inst, &q(1, 1)), vec![q(2, 1)]);
        assert_eq!(lagrangian_rewards(&inst, &q(2, 1)), vec![q(0, 1)]);
    }

    #[test]
    fn schedule_spans_range() {
        let sched = LagrangianSchedule::for_instance(&line(5));
        let m = &sched.multipliers;
        assert_eq!(m[0], q(0, 1));
        // r_max / (2 W n) = 7 / 40, upper end 2 * 12 / 5 = 24/5
        assert_eq!(m[1], q(7, 40));
        assert!(*m.last().unwrap() >= q(24, 5));
        assert!(m[m.len() - 2] < q(24, 5));
        assert_eq!(LagrangianSchedule::for_instance(&line(0)).multipliers, vec![q(0, 1)]);
    }

    #[test]
    fn split_examples() {
        let walk = Walk::new(vec![0, 1, 2, 3]).unwrap();
        let r = [q(0, 1), q(5, 1), q(7, 1), q(0, 1)];
        let s = [q(0, 1), q(3, 1), q(3, 1), q(0, 1)];
        let whole = split_best_segment(&walk, &r, &s, &q(6, 1), 0, 3);
        assert_eq!(whole.reward, q(12, 1));
        assert_eq!(whole.collected, vec![1, 2]);
        let cut = split_best_segment(&walk, &r, &s, &q(5, 1), 0, 3);
        assert_eq!(cut.collected, vec![2]);
        assert_eq!(cut.walk.vertices(), &[0, 2, 3]);
        let empty = split_best_segment(&walk, &vec![q(0, 1); 4], &s, &q(5, 1), 0, 3);
        assert_eq!(empty.walk, Walk::direct(0, 3));
        assert!(empty.collected.is_empty());
    }

    #[test]
    fn solve_line_examples() {
        let solver = ExactMinExcess::default();
        let full = solve_p2p_knap(&line(6), &solver).unwrap();
        assert_eq!(full.route.reward, q(12, 1));
        assert_eq!(full.theta, q(0, 1));
        let cut = solve_p2p_knap(&line(5), &solver).unwrap();
        assert_eq!(cut.route.reward, q(7, 1));
        assert!(line(5).is_feasible(&cut.route));
    }

    #[test]
    fn slack_knapsack_matches_plain_p2p() {
        let inst = line(100);
        let sol = solve_p2p_knap(&inst, &ExactMinExcess::default()).unwrap();
        let p2p = P2PInstance::new(inst.space.clone(), inst.rewards.clone(), 0, 3, 3).unwrap();
        let plain = solve_p2p(&p2p, &ExactMinExcess::default()).unwrap();
        assert_eq!(sol.route.reward, plain.best.reward);
    }

    #[test]
    fn infeasible_travel_budget() {
        let mut inst = line(5);
        inst.travel_budget = 2;
        assert!(solve_p2p_knap(&inst, &ExactMinExcess::default()).is_err());
    }
}
