use super::subset::SubsetTable;
use super::{check_cap, OracleLimits};
use crate::error::{Error, Result};
use crate::knap::KnapOrientInstance;
use crate::metric::{sum_over, MetricSpace, Route, Walk};
use crate::scalar::Reward;

const NO_HORIZON: i64 = i64::MAX / 4;

fn others(n: usize, u: usize, v: usize) -> Vec<usize> {
    (0..n).filter(|&w| w != u && w != v).collect()
}

fn endpoints(u: usize, v: usize) -> Vec<usize> {
    if u == v {
        vec![u]
    } else {
        vec![u, v]
    }
}

fn collected_in_walk_order(walk: &Walk, chosen: &[usize]) -> Vec<usize> {
    walk.distinct().into_iter().filter(|v| chosen.contains(v)).collect()
}

/// Maximum-reward `u`-`v` walk of length at most `budget`, by subset DP.
pub fn oracle_p2p_orienteering<R: Reward>(
    space: &MetricSpace,
    rewards: &[R],
    u: usize,
    v: usize,
    budget: i64,
    limits: &OracleLimits,
) -> Result<Route<R>> {
    space.check_vertex(u)?;
    space.check_vertex(v)?;
    check_cap("vertex count", space.len(), limits.max_n_subset_dp)?;
    if budget < space.dist(u, v) {
        return Err(Error::Infeasible(format!(
            "budget {budget} below dist({u}, {v}) = {}",
            space.dist(u, v)
        )));
    }
    let table = SubsetTable::build(space, u, v, others(space.len(), u, v), budget);
    let base = sum_over(&endpoints(u, v), rewards);
    let mut best: Option<(R, i64, usize)> = None;
    for mask in 0..table.masks() {
        if !table.reachable(mask, budget) {
            continue;
        }
        let reward = base.clone() + sum_over(&table.members(mask), rewards);
        let len = table.best_len[mask];
        let better = match &best {
            None => true,
            Some((r, l, _)) => reward > *r || (reward == *r && len < *l),
        };
        if better {
            best = Some((reward, len, mask));
        }
    }
    let (_, _, mask) = best.expect("empty mask is always reachable");
    Ok(Route::collect_all(table.walk(mask), rewards))
}

/// Same optimum as [`oracle_p2p_orienteering`], found by enumerating every
/// ordered sequence of stops. Kept deliberately separate from the subset DP.
pub fn enumerate_p2p_orienteering<R: Reward>(
    space: &MetricSpace,
    rewards: &[R],
    u: usize,
    v: usize,
    budget: i64,
    limits: &OracleLimits,
) -> Result<Route<R>> {
    space.check_vertex(u)?;
    space.check_vertex(v)?;
    check_cap("vertex count", space.len(), limits.max_n_permutation)?;
    if budget < space.dist(u, v) {
        return Err(Error::Infeasible(format!("budget {budget} below dist({u}, {v})")));
    }

    struct Search<'a, R> {
        space: &'a MetricSpace,
        rewards: &'a [R],
        v: usize,
        budget: i64,
        stops: Vec<usize>,
        used: Vec<bool>,
        seq: Vec<usize>,
        best: Option<(R, i64, Vec<usize>)>,
    }

    impl<R: Reward> Search<'_, R> {
        fn go(&mut self, at: usize, len: i64, reward: R) {
            let total = len + self.space.dist(at, self.v);
            if total > self.budget {
                return;
            }
            let better = match &self.best {
                None => true,
                Some((r, l, _)) => reward > *r || (reward == *r && total < *l),
            };
            if better {
                self.best = Some((reward.clone(), total, self.seq.clone()));
            }
            for i in 0..self.stops.len() {
                if self.used[i] {
                    continue;
                }
                let s = self.stops[i];
                self.used[i] = true;
                self.seq.push(s);
                let r = reward.clone() + self.rewards[s].clone();
                self.go(s, len + self.space.dist(at, s), r);
                self.seq.pop();
                self.used[i] = false;
            }
        }
    }

    let stops = others(space.len(), u, v);
    let mut search = Search {
        space,
        rewards,
        v,
        budget,
        used: vec![false; stops.len()],
        stops,
        seq: Vec::new(),
        best: None,
    };
    search.go(u, 0, sum_over(&endpoints(u, v), rewards));
    let (_, _, seq) = search.best.expect("direct walk is feasible");
    let mut vertices = vec![u];
    vertices.extend(seq);
    if v != u || vertices.len() > 1 {
        vertices.push(v);
    }
    Ok(Route::collect_all(Walk::new(vertices)?, rewards))
}

/// Minimum-excess `u`-`v` walk collecting at least `threshold` reward.
pub fn oracle_min_excess<R: Reward>(
    space: &MetricSpace,
    rewards: &[R],
    u: usize,
    v: usize,
    threshold: R,
    limits: &OracleLimits,
) -> Result<Route<R>> {
    space.check_vertex(u)?;
    space.check_vertex(v)?;
    check_cap("vertex count", space.len(), limits.max_n_subset_dp)?;
    let table = SubsetTable::build(space, u, v, others(space.len(), u, v), NO_HORIZON);
    let base = sum_over(&endpoints(u, v), rewards);
    let mut best: Option<(i64, R, usize)> = None;
    for mask in 0..table.masks() {
        let reward = base.clone() + sum_over(&table.members(mask), rewards);
        if reward < threshold {
            continue;
        }
        let len = table.best_len[mask];
        let better = match &best {
            None => true,
            Some((l, r, _)) => len < *l || (len == *l && reward > *r),
        };
        if better {
            best = Some((len, reward, mask));
        }
    }
    match best {
        Some((_, _, mask)) => Ok(Route::collect_all(table.walk(mask), rewards)),
        None => Err(Error::Infeasible(format!("reward threshold {threshold:?} unattainable"))),
    }
}

/// Exact knapsack orienteering: maximum reward over walks of length at most
/// the travel budget whose collected sizes fit the knapsack budget.
///
/// Endpoints are always visited but only claimed when that fits.
pub fn oracle_knap_orient<R: Reward>(
    instance: &KnapOrientInstance<R>,
    limits: &OracleLimits,
) -> Result<Route<R>> {
    let space = &instance.space;
    let (u, v) = (instance.u, instance.v);
    check_cap("vertex count", space.len(), limits.max_n_subset_dp)?;
    let budget = instance.travel_budget;
    if budget < space.dist(u, v) {
        return Err(Error::Infeasible(format!("travel budget {budget} below dist({u}, {v})")));
    }
    let table = SubsetTable::build(space, u, v, others(space.len(), u, v), budget);
    let ends = endpoints(u, v);
    let end_choices: Vec<Vec<usize>> = (0..1usize << ends.len())
        .map(|bits| (0..ends.len()).filter(|i| bits & (1 << i) != 0).map(|i| ends[i]).collect())
        .collect();
    let mut best: Option<(R, i64, usize, usize)> = None;
    for mask in 0..table.masks() {
        if !table.reachable(mask, budget) {
            continue;
        }
        let members = table.members(mask);
        let size = sum_over(&members, &instance.sizes);
        if size > instance.knapsack_budget {
            continue;
        }
        let reward = sum_over(&members, &instance.rewards);
        let len = table.best_len[mask];
        for (ci, choice) in end_choices.iter().enumerate() {
            if size.clone() + sum_over(choice, &instance.sizes) > instance.knapsack_budget {
                continue;
            }
            let total = reward.clone() + sum_over(choice, &instance.rewards);
            let better = match &best {
                None => true,
                Some((r, l, _, _)) => total > *r || (total == *r && len < *l),
            };
            if better {
                best = Some((total, len, mask, ci));
            }
        }
    }
    let (reward, _, mask, ci) = best.expect("empty selection always fits");
    let walk = table.walk(mask);
    let mut chosen = table.members(mask);
    chosen.extend(end_choices[ci].iter().copied());
    let collected = collected_in_walk_order(&walk, &chosen);
    Ok(Route { walk, collected, reward })
}
