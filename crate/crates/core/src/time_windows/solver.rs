//! Checkpoint dynamic program for time windows.
//!
//! Checkpoints are `0`, the powers `(1 + eps)^j` up to the first one at or
//! past the largest deadline, every release date, and every slacked deadline
//! `(1 + eps) D(v)`. A vertex belongs to the class of the last checkpoint at
//! or before its slacked deadline.
//!
//! A DP state is "standing at vertex `x` at checkpoint `k`". A transition to
//! `(k', y)` is one segment: leave `x` at time `g_k`, reach `y` within
//! `floor(g_k' - g_k)`, and collect only vertices of class `k'` already
//! released by `g_k`. Every visit inside the segment happens in
//! `[g_k, g_k'] ⊆ [R(v), (1 + eps) D(v)]`, and since a class is tied to one
//! segment end no vertex is collected twice. Segment contents come from a
//! pluggable P2P subroutine on the metric restricted to the eligible vertices
//! and the two endpoints.

use num_traits::{One, Zero};

use super::{Completion, TWInstance};
use crate::error::Result;
use crate::metric::{MetricSpace, Walk};
use crate::min_excess::MinExcessSolver;
use crate::p2p::{solve_p2p, P2PInstance};
use crate::scalar::Reward;
use crate::Rational;

/// One P2P query handed to a [`SegmentSubroutine`], in restricted ids.
#[derive(Debug, Clone)]
pub struct Segment<R> {
    pub space: MetricSpace,
    /// Zero for every vertex that is not eligible.
    pub rewards: Vec<R>,
    pub from: usize,
    pub to: usize,
    pub budget: i64,
    /// Restricted id to original id.
    pub vertices: Vec<usize>,
}

/// How a segment is filled. `plan` returns the (expected) reward collected
/// and a plan expressed in original vertex ids.
pub trait SegmentSubroutine<R: Reward> {
    type Plan: Clone;

    fn plan(&self, instance: &TWInstance<R>, segment: &Segment<R>) -> Result<(R, Self::Plan)>;

    /// Plan for a segment that only travels.
    fn travel(&self, from: usize, to: usize) -> Self::Plan;
}

/// Deterministic segments through [`solve_p2p`].
#[derive(Debug, Clone, Copy, Default)]
pub struct P2PSubroutine<S>(pub S);

impl<R: Reward, S: MinExcessSolver<R>> SegmentSubroutine<R> for P2PSubroutine<S> {
    type Plan = Walk;

    fn plan(&self, _instance: &TWInstance<R>, seg: &Segment<R>) -> Result<(R, Walk)> {
        let p2p = P2PInstance {
            space: seg.space.clone(),
            rewards: seg.rewards.clone(),
            u: seg.from,
            v: seg.to,
            budget: seg.budget,
        };
        let sol = solve_p2p(&p2p, &self.0)?;
        Ok((sol.best.reward, sol.best.walk.relabel(&seg.vertices)))
    }

    fn travel(&self, from: usize, to: usize) -> Walk {
        Walk::direct(from, to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannedSegment<P> {
    pub from_checkpoint: usize,
    pub to_checkpoint: usize,
    pub start_time: Rational,
    pub end_time: Rational,
    pub from: usize,
    pub to: usize,
    pub budget: i64,
    pub eligible: Vec<usize>,
    pub plan: P,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TWPlan<R, P> {
    pub grid: Vec<Rational>,
    pub segments: Vec<PlannedSegment<P>>,
    /// Reward of the root when its deadline is 0 and it is taken at time 0.
    pub root_bonus: R,
    /// Planned (expected) reward.
    pub value: R,
}

/// `0`, `(1 + eps)^j` for `j >= 0` until reaching `max_deadline`, and `extra`
/// points; sorted and de-duplicated.
pub fn checkpoint_grid(epsilon: &Rational, max_deadline: i64, extra: &[Rational]) -> Vec<Rational> {
    assert!(*epsilon > Rational::zero(), "epsilon must be positive");
    let growth = Rational::one() + epsilon;
    let top = Rational::from_integer(max_deadline.into());
    let mut grid = vec![Rational::zero()];
    let mut g = Rational::one();
    loop {
        grid.push(g.clone());
        if g >= top {
            break;
        }
        g *= &growth;
    }
    grid.extend(extra.iter().cloned());
    grid.sort();
    grid.dedup();
    grid
}

fn class_of(grid: &[Rational], slacked_deadline: &Rational) -> usize {
    grid.iter().rposition(|g| g <= slacked_deadline).expect("grid starts at 0")
}

struct State<R> {
    value: R,
    back: Option<(usize, usize, usize)>, // (checkpoint, vertex, segment index)
}

/// Runs the checkpoint DP with `sub` filling each segment.
pub fn plan_time_windows<R: Reward, S: SegmentSubroutine<R>>(
    instance: &TWInstance<R>,
    epsilon: &Rational,
    sub: &S,
) -> Result<TWPlan<R, S::Plan>> {
    let n = instance.space.len();
    let growth = Rational::one() + epsilon;
    let slacked: Vec<Rational> =
        instance.deadline.iter().map(|&d| Rational::from_integer(d.into()) * &growth).collect();
    let mut extra: Vec<Rational> = instance.release.iter().map(|&r| Rational::from_integer(r.into())).collect();
    extra.extend(slacked.iter().cloned());
    let grid = checkpoint_grid(epsilon, instance.max_deadline(), &extra);
    let k_count = grid.len();
    let class: Vec<usize> = slacked.iter().map(|d| class_of(&grid, d)).collect();
    let root = instance.root;
    let root_bonus = if instance.deadline[root] == 0 { instance.rewards[root].clone() } else { R::zero() };

    let mut states: Vec<Vec<Option<State<R>>>> = (0..k_count).map(|_| (0..n).map(|_| None).collect()).collect();
    states[0][root] = Some(State { value: root_bonus.clone(), back: None });
    let mut segments: Vec<PlannedSegment<S::Plan>> = Vec::new();

    for k in 0..k_count {
        for x in 0..n {
            let Some(base) = states[k][x].as_ref().map(|s| s.value.clone()) else { continue };
            for k2 in k + 1..k_count {
                let budget = (grid[k2].clone() - &grid[k]).floor().to_integer();
                let budget = i64::try_from(budget).expect("checkpoint gap fits in i64");
                let eligible: Vec<usize> = (0..n)
                    .filter(|&v| class[v] == k2 && instance.rewards[v] > R::zero())
                    .filter(|&v| Rational::from_integer(instance.release[v].into()) <= grid[k])
                    .collect();
                for y in 0..n {
                    if instance.space.dist(x, y) > budget {
                        continue;
                    }
                    let (gain, plan) = if eligible.is_empty() {
                        (R::zero(), sub.travel(x, y))
                    } else {
                        let mut vertices = vec![x];
                        if y != x {
                            vertices.push(y);
                        }
                        vertices.extend(eligible.iter().copied().filter(|&v| v != x && v != y));
                        let rewards = vertices
                            .iter()
                            .map(|v| if eligible.contains(v) { instance.rewards[*v].clone() } else { R::zero() })
                            .collect();
                        let seg = Segment {
                            space: instance.space.restrict(&vertices),
                            rewards,
                            from: 0,
                            to: if y == x { 0 } else { 1 },
                            budget,
                            vertices,
                        };
                        sub.plan(instance, &seg)?
                    };
                    let value = base.clone() + gain;
                    let improves = states[k2][y].as_ref().is_none_or(|s| value > s.value);
                    if improves {
                        segments.push(PlannedSegment {
                            from_checkpoint: k,
                            to_checkpoint: k2,
                            start_time: grid[k].clone(),
                            end_time: grid[k2].clone(),
                            from: x,
                            to: y,
                            budget,
                            eligible: eligible.clone(),
                            plan,
                        });
                        states[k2][y] = Some(State { value, back: Some((k, x, segments.len() - 1)) });
                    }
                }
            }
        }
    }

    let mut best: Option<(usize, usize)> = None;
    for k in 0..k_count {
        for x in 0..n {
            if let Some(s) = &states[k][x] {
                if best.is_none_or(|(bk, bx)| s.value > states[bk][bx].as_ref().expect("set").value) {
                    best = Some((k, x));
                }
            }
        }
    }
    let (mut k, mut x) = best.expect("root state exists");
    let value = states[k][x].as_ref().expect("set").value.clone();
    let mut chain = Vec::new();
    while let Some((pk, px, idx)) = states[k][x].as_ref().expect("set").back {
        chain.push(idx);
        k = pk;
        x = px;
    }
    chain.reverse();
    let mut taken: Vec<Option<PlannedSegment<S::Plan>>> = segments.into_iter().map(Some).collect();
    let segments = chain.into_iter().map(|i| taken[i].take().expect("segment used once")).collect();
    Ok(TWPlan { grid, segments, root_bonus, value })
}

/// A vertex reached by a deterministic solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Visit {
    pub vertex: usize,
    pub time: Rational,
    pub collected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TWSolution<R> {
    pub walk: Walk,
    pub visits: Vec<Visit>,
    pub reward: R,
    pub plan: TWPlan<R, Walk>,
}

impl<R> TWSolution<R> {
    /// Completion times of the collected vertices.
    pub fn trace(&self) -> Vec<Completion> {
        self.visits
            .iter()
            .filter(|v| v.collected)
            .map(|v| Completion { vertex: v.vertex, time: v.time.clone() })
            .collect()
    }
}

/// Deterministic bi-criteria time-window orienteering from the root.
///
/// Every collected vertex is visited within `[R(v), (1 + eps) D(v)]`.
pub fn solve_time_windows<R: Reward, S: MinExcessSolver<R>>(
    instance: &TWInstance<R>,
    epsilon: &Rational,
    solver: S,
) -> Result<TWSolution<R>> {
    let plan = plan_time_windows(instance, epsilon, &P2PSubroutine(solver))?;
    let root = instance.root;
    let mut walk = Walk::direct(root, root);
    let mut visits = Vec::new();
    let mut reward = plan.root_bonus.clone();
    if instance.deadline[root] == 0 {
        visits.push(Visit { vertex: root, time: Rational::zero(), collected: true });
    }
    for seg in &plan.segments {
        let mut clock = seg.start_time.clone();
        let mut prev = seg.from;
        let mut claimed: Vec<usize> = Vec::new();
        for &v in seg.plan.vertices() {
            clock += Rational::from_integer(instance.space.dist(prev, v).into());
            prev = v;
            let collected = seg.eligible.contains(&v) && !claimed.contains(&v);
            if collected {
                claimed.push(v);
                reward = reward + instance.rewards[v].clone();
            }
            visits.push(Visit { vertex: v, time: clock.clone(), collected });
        }
        walk = walk.concat(&seg.plan);
    }
    Ok(TWSolution { walk, visits, reward, plan })
}

#[cfg(test)]
mod tests {
    use super::super::check_tw_feasibility;
    use super::*;
    use crate::min_excess::ExactMinExcess;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn grid_includes_powers_and_releases() {
        let g = checkpoint_grid(&q(1, 1), 5, &[q(3, 1), q(0, 1)]);
        assert_eq!(g, vec![q(0, 1), q(1, 1), q(2, 1), q(3, 1), q(4, 1), q(8, 1)]);
        let g = checkpoint_grid(&q(1, 4), 2, &[]);
        assert_eq!(g, vec![q(0, 1), q(1, 1), q(5, 4), q(25, 16), q(125, 64), q(625, 256)]);
    }

    #[test]
    fn class_checkpoint_within_slack() {
        for eps in [q(1, 4), q(1, 1), q(1, 3)] {
            let grid = checkpoint_grid(&eps, 200, &[]);
            for d in 1..=200 {
                let g = &grid[class_of(&grid, &((q(1, 1) + &eps) * q(d, 1)))];
                assert!(*g >= q(d, 1));
                assert!(*g <= (q(1, 1) + &eps) * q(d, 1), "eps {eps} d {d}");
            }
        }
    }

    #[test]
    fn release_at_deadline_is_collectable() {
        let inst =
            TWInstance::new(MetricSpace::line(&[0, 6]), 0, vec![0i64, 4], vec![0, 6], vec![0, 6], None).unwrap();
        for eps in [q(1, 4), q(1, 1)] {
            let sol = solve_time_windows(&inst, &eps, ExactMinExcess::default()).unwrap();
            assert_eq!(sol.reward, 4, "eps {eps}");
            let slack = q(1, 1) + &eps;
            assert!(check_tw_feasibility(&sol.trace(), &inst, &slack).iter().all(|v| v.counted));
        }
    }

    #[test]
    fn two_node_line() {
        let inst =
            TWInstance::new(MetricSpace::line(&[0, 1, 2]), 0, vec![0i64, 5, 5], vec![0, 0, 0], vec![0, 2, 10], None)
                .unwrap();
        for eps in [q(1, 4), q(1, 1)] {
            let sol = solve_time_windows(&inst, &eps, ExactMinExcess::default()).unwrap();
            assert_eq!(sol.reward, 10, "eps {eps}");
            let slack = q(1, 1) + &eps;
            assert!(check_tw_feasibility(&sol.trace(), &inst, &slack).iter().all(|v| v.counted));
        }
    }

    #[test]
    fn wide_windows_reduce_to_orienteering() {
        let inst = TWInstance::new(
            MetricSpace::line(&[0, 1, 2, 3, 9]),
            0,
            vec![0i64, 2, 3, 4, 50],
            vec![0; 5],
            vec![100; 5],
            None,
        )
        .unwrap();
        let sol = solve_time_windows(&inst, &q(1, 2), ExactMinExcess::default()).unwrap();
        assert_eq!(sol.reward, 59);
    }

    #[test]
    fn tight_deadline_needs_slack() {
        // vertex 1 at distance 4 with deadline 4, released at 0
        let inst =
            TWInstance::new(MetricSpace::line(&[0, 4]), 0, vec![0i64, 7], vec![0, 0], vec![0, 4], None).unwrap();
        let eps = q(1, 4);
        let sol = solve_time_windows(&inst, &eps, ExactMinExcess::default()).unwrap();
        assert_eq!(sol.reward, 7);
        let verdicts = check_tw_feasibility(&sol.trace(), &inst, &(q(1, 1) + &eps));
        assert!(verdicts.iter().all(|v| v.counted));
        assert!(verdicts[0].time <= q(5, 1));
    }

    #[test]
    fn release_dates_force_waiting() {
        let inst =
            TWInstance::new(MetricSpace::line(&[0, 1]), 0, vec![0i64, 3], vec![0, 5], vec![0, 10], None).unwrap();
        let sol = solve_time_windows(&inst, &q(1, 1), ExactMinExcess::default()).unwrap();
        assert_eq!(sol.reward, 3);
        let t = sol.trace();
        let one = t.iter().find(|c| c.vertex == 1).unwrap();
        assert!(one.time >= q(5, 1));
    }

    #[test]
    fn root_with_zero_deadline_collected_at_start() {
        let inst =
            TWInstance::new(MetricSpace::line(&[0, 1]), 0, vec![4i64, 3], vec![0, 0], vec![0, 3], None).unwrap();
        let sol = solve_time_windows(&inst, &q(1, 1), ExactMinExcess::default()).unwrap();
        assert_eq!(sol.reward, 7);
    }
}
