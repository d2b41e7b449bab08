use super::{check_cap, OracleLimits};
use crate::error::Result;
use crate::scalar::Reward;
use crate::time_windows::TWInstance;
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeWindowOptimum<R> {
    /// Collected vertices in visiting order.
    pub order: Vec<usize>,
    /// Visit time of each vertex in `order`, after waiting for its release.
    pub times: Vec<i64>,
    pub reward: R,
}

/// Exact time-window orienteering from the root with strict deadlines.
/// Vertices without reward are never listed.
/// Waiting times are ignored (treated as zero).
pub fn oracle_time_windows<R: Reward>(instance: &TWInstance<R>, limits: &OracleLimits) -> Result<TimeWindowOptimum<R>> {
    oracle_time_windows_slack(instance, &Rational::from_integer(1.into()), limits)
}

/// As [`oracle_time_windows`], with every deadline scaled by `slack`.
///
/// Enumerates every order of distinct vertices; arriving before a release
/// date means idling until it.
pub fn oracle_time_windows_slack<R: Reward>(
    instance: &TWInstance<R>,
    slack: &Rational,
    limits: &OracleLimits,
) -> Result<TimeWindowOptimum<R>> {
    let n = instance.space.len();
    check_cap("vertex count", n, limits.max_n_permutation)?;
    // latest integer visit time allowed at each vertex
    let latest: Vec<i64> = instance
        .deadline
        .iter()
        .map(|&d| {
            let t = (slack * Rational::from_integer(d.into())).floor().to_integer();
            i64::try_from(t).expect("deadline fits in i64")
        })
        .collect();

    struct Search<'a, R> {
        instance: &'a TWInstance<R>,
        latest: Vec<i64>,
        used: Vec<bool>,
        order: Vec<usize>,
        times: Vec<i64>,
        best: TimeWindowOptimum<R>,
    }

    impl<R: Reward> Search<'_, R> {
        fn go(&mut self, at: usize, clock: i64, reward: R) {
            if reward > self.best.reward {
                self.best = TimeWindowOptimum { order: self.order.clone(), times: self.times.clone(), reward: reward.clone() };
            }
            for v in 0..self.used.len() {
                if self.used[v] || self.instance.rewards[v] <= R::zero() {
                    continue;
                }
                let arrive = clock + self.instance.space.dist(at, v);
                let visit = arrive.max(self.instance.release[v]);
                if visit > self.latest[v] {
                    continue;
                }
                self.used[v] = true;
                self.order.push(v);
                self.times.push(visit);
                let r = reward.clone() + self.instance.rewards[v].clone();
                self.go(v, visit, r);
                self.times.pop();
                self.order.pop();
                self.used[v] = false;
            }
        }
    }

    let mut search = Search {
        instance,
        latest,
        used: vec![false; n],
        order: Vec::new(),
        times: Vec::new(),
        best: TimeWindowOptimum { order: Vec::new(), times: Vec::new(), reward: R::zero() },
    };
    search.go(instance.root, 0, R::zero());
    Ok(search.best)
}
