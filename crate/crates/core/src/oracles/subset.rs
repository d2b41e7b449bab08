//! Held-Karp table over subsets of intermediate stops.
//!
//! `best_len[mask]` is the length of the shortest walk that starts at `u`,
//! visits every stop in `mask` (in some order) and ends at `v`. Walks between
//! stops follow shortest paths, so revisiting a stop is never useful and the
//! table covers every walk up to reward de-duplication.

use crate::metric::{MetricSpace, Walk};

const UNREACHED: i64 = i64::MAX;

pub(crate) struct SubsetTable {
    pub stops: Vec<usize>,
    pub u: usize,
    pub v: usize,
    m: usize,
    parent: Vec<u8>,
    pub best_len: Vec<i64>,
    best_last: Vec<u8>,
}

impl SubsetTable {
    /// Builds the table. Entries longer than `horizon` are dropped early;
    /// pass `i64::MAX / 4` to keep everything.
    pub fn build(space: &MetricSpace, u: usize, v: usize, stops: Vec<usize>, horizon: i64) -> Self {
        let m = stops.len();
        assert!(m < 31, "too many stops for a subset table");
        let full = 1usize << m;
        let mut dp = vec![UNREACHED; full * m];
        let mut parent = vec![u8::MAX; full * m];
        for (i, &s) in stops.iter().enumerate() {
            dp[(1 << i) * m + i] = space.dist(u, s);
        }
        for mask in 1..full {
            for last in 0..m {
                let cur = dp[mask * m + last];
                if cur == UNREACHED || mask & (1 << last) == 0 {
                    continue;
                }
                // a prefix that cannot reach v in time never completes
                if cur + space.dist(stops[last], v) > horizon {
                    continue;
                }
                for next in 0..m {
                    if mask & (1 << next) != 0 {
                        continue;
                    }
                    let cand = cur + space.dist(stops[last], stops[next]);
                    let slot = (mask | 1 << next) * m + next;
                    if cand < dp[slot] {
                        dp[slot] = cand;
                        parent[slot] = last as u8;
                    }
                }
            }
        }
        let mut best_len = vec![UNREACHED; full];
        let mut best_last = vec![u8::MAX; full];
        best_len[0] = space.dist(u, v);
        for mask in 1..full {
            for last in 0..m {
                let cur = dp[mask * m + last];
                if cur == UNREACHED {
                    continue;
                }
                let total = cur + space.dist(stops[last], v);
                if total < best_len[mask] {
                    best_len[mask] = total;
                    best_last[mask] = last as u8;
                }
            }
        }
        SubsetTable { stops, u, v, m, parent, best_len, best_last }
    }

    pub fn masks(&self) -> usize {
        1 << self.m
    }

    pub fn reachable(&self, mask: usize, budget: i64) -> bool {
        self.best_len[mask] <= budget
    }

    /// Stops of `mask` as original vertex ids.
    pub fn members(&self, mask: usize) -> Vec<usize> {
        (0..self.m).filter(|i| mask & (1 << i) != 0).map(|i| self.stops[i]).collect()
    }

    /// Shortest walk for `mask`, endpoints included.
    pub fn walk(&self, mask: usize) -> Walk {
        let mut order = Vec::new();
        let mut cur = mask;
        let mut last = self.best_last[mask];
        while cur != 0 {
            let l = last as usize;
            order.push(self.stops[l]);
            let prev = self.parent[cur * self.m + l];
            cur &= !(1 << l);
            last = prev;
        }
        order.reverse();
        let mut vertices = Vec::with_capacity(order.len() + 2);
        vertices.push(self.u);
        vertices.extend(order);
        if self.v != self.u || vertices.len() > 1 {
            vertices.push(self.v);
        }
        Walk::new(vertices).expect("non-empty")
    }
}
