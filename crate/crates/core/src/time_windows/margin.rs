//! Node-splitting bookkeeping: the margin parameters `f` and `s` and the
//! grouping of vertices by how early a reference path reaches them relative
//! to their deadlines. Analysis tooling; the solver does not use it.

use super::TWInstance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginParameters {
    pub epsilon: f64,
    /// `1 / sqrt(1 + epsilon)`.
    pub f: f64,
    /// Smallest integer with `f^(1.5^s) <= 1/4`.
    pub s: u32,
}

impl MarginParameters {
    /// `f^(1.5^i)`.
    pub fn threshold(&self, i: u32) -> f64 {
        self.f.powf(1.5f64.powi(i as i32))
    }

    pub fn group_count(&self) -> usize {
        self.s as usize + 2
    }

    /// Reward fraction `1 / (24 (s + 2))` promised for the time-window problem.
    pub fn reward_fraction(&self) -> f64 {
        1.0 / (24.0 * (self.s as f64 + 2.0))
    }
}

pub fn compute_margin_params(epsilon: f64) -> Result<MarginParameters> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidInstance(format!("epsilon must be positive, got {epsilon}")));
    }
    let f = 1.0 / (1.0 + epsilon).sqrt();
    let mut p = MarginParameters { epsilon, f, s: 0 };
    while p.threshold(p.s) > 0.25 {
        p.s += 1;
    }
    debug_assert!(p.s as f64 <= 10.0 * (1.0 + (1.0 + 1.0 / epsilon).log2()));
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPartition {
    /// `groups[i]` is `V_i` for `i` in `0..=s+1`.
    pub groups: Vec<Vec<usize>>,
    /// Vertices visited after their deadline.
    pub late: Vec<usize>,
}

impl GroupPartition {
    pub fn group_of(&self, v: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&v))
    }
}

/// Assigns each vertex with `0 < t(v) <= D(v)` to the first group whose
/// interval `(lower, upper]` contains `t(v) / D(v)`:
/// `V_0 = (f, 1]`, `V_i = (f^(1.5^i), f^(1.5^(i-1))]` for `1 <= i <= s`,
/// `V_{s+1} = (0, 1/4]`.
pub fn partition_groups<R>(
    instance: &TWInstance<R>,
    params: &MarginParameters,
    visit_time: impl Fn(usize) -> Option<f64>,
) -> GroupPartition {
    let s = params.s;
    let mut groups = vec![Vec::new(); params.group_count()];
    let mut late = Vec::new();
    for v in 0..instance.space.len() {
        let Some(t) = visit_time(v) else { continue };
        let d = instance.deadline[v] as f64;
        if t <= 0.0 {
            continue;
        }
        if t > d {
            late.push(v);
            continue;
        }
        let ratio = t / d;
        let slot = (0..=s)
            .find(|&i| {
                let (lo, hi) = if i == 0 { (params.f, 1.0) } else { (params.threshold(i), params.threshold(i - 1)) };
                ratio > lo && ratio <= hi
            })
            .map_or(s as usize + 1, |i| i as usize);
        groups[slot].push(v);
    }
    GroupPartition { groups, late }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricSpace;

    #[test]
    fn margin_examples() {
        let p = compute_margin_params(3.0).unwrap();
        assert_eq!(p.f, 0.5);
        assert_eq!(p.s, 2);
        assert_eq!(compute_margin_params(15.0).unwrap().s, 0);
        assert_eq!(compute_margin_params(1.0).unwrap().s, 4);
        assert_eq!(compute_margin_params(0.25).unwrap().s, 7);
        assert!(compute_margin_params(0.0).is_err());
        assert!(compute_margin_params(-1.0).is_err());
    }

    #[test]
    fn partition_examples() {
        let p = compute_margin_params(3.0).unwrap();
        let inst = super::super::TWInstance::new(
            MetricSpace::line(&[0, 1, 1, 1, 1, 1]),
            0,
            vec![0i64; 6],
            vec![0; 6],
            vec![10; 6],
            None,
        )
        .unwrap();
        let times = [None, Some(9.0), Some(2.0), Some(4.0), Some(12.0), Some(0.0)];
        let part = partition_groups(&inst, &p, |v| times[v]);
        assert_eq!(part.groups.len(), 4);
        assert_eq!(part.group_of(1), Some(0));
        assert_eq!(part.group_of(2), Some(3));
        assert_eq!(part.group_of(3), Some(1));
        assert_eq!(part.late, vec![4]);
        assert_eq!(part.group_of(5), None);
        assert_eq!(part.group_of(0), None);
    }
}
