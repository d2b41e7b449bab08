//! Finite metric spaces, walks, and excess accounting.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Reward;

/// A finite symmetric metric on vertices `0..n` with integer distances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSpace {
    n: usize,
    dist: Vec<i64>,
}

/// First problem found by [`validate_metric`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricViolation {
    NotSquare { rows: usize, row: usize, len: usize },
    NegativeDistance { i: usize, j: usize },
    NonZeroDiagonal { i: usize },
    Asymmetric { i: usize, j: usize },
    /// `dist(i, k) > dist(i, j) + dist(j, k)`.
    Triangle { i: usize, j: usize, k: usize },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MetricViolation::NotSquare { rows, row, len } => {
                write!(f, "matrix is not square: {rows} rows but row {row} has {len} entries")
            }
            MetricViolation::NegativeDistance { i, j } => write!(f, "negative distance at ({i}, {j})"),
            MetricViolation::NonZeroDiagonal { i } => write!(f, "non-zero diagonal entry at ({i}, {i})"),
            MetricViolation::Asymmetric { i, j } => {
                write!(f, "symmetry violated: dist({i}, {j}) != dist({j}, {i})")
            }
            MetricViolation::Triangle { i, j, k } => {
                write!(f, "triangle inequality violated: dist({i}, {k}) > dist({i}, {j}) + dist({j}, {k})")
            }
        }
    }
}

/// Checks a square matrix against the metric axioms, returning the first
/// violation in row-major scan order.
pub fn validate_metric(rows: &[Vec<i64>]) -> std::result::Result<(), MetricViolation> {
    let n = rows.len();
    for (row, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(MetricViolation::NotSquare { rows: n, row, len: r.len() });
        }
    }
    for i in 0..n {
        if rows[i][i] != 0 {
            return Err(MetricViolation::NonZeroDiagonal { i });
        }
        for j in 0..n {
            if rows[i][j] < 0 {
                return Err(MetricViolation::NegativeDistance { i, j });
            }
            if rows[i][j] != rows[j][i] {
                return Err(MetricViolation::Asymmetric { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if rows[i][k] > rows[i][j] + rows[j][k] {
                    return Err(MetricViolation::Triangle { i, j, k });
                }
            }
        }
    }
    Ok(())
}

/// All-pairs shortest paths (Floyd-Warshall) over an undirected edge list.
///
/// Parallel edges keep the lighter weight.
pub fn metric_closure(n: usize, edges: &[(usize, usize, i64)]) -> Result<MetricSpace> {
    const INF: i64 = i64::MAX / 4;
    let mut d = vec![INF; n * n];
    for i in 0..n {
        d[i * n + i] = 0;
    }
    for &(a, b, w) in edges {
        if a >= n {
            return Err(Error::InvalidVertex(a));
        }
        if b >= n {
            return Err(Error::InvalidVertex(b));
        }
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        if w < 0 {
            return Err(Error::NegativeWeight(a, b, w));
        }
        let w = w.min(d[a * n + b]);
        d[a * n + b] = w;
        d[b * n + a] = w;
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik == INF {
                continue;
            }
            for j in 0..n {
                let cand = dik + d[k * n + j];
                if cand < d[i * n + j] {
                    d[i * n + j] = cand;
                }
            }
        }
    }
    if let Some(j) = (0..n).find(|&j| d[j] == INF) {
        return Err(Error::Disconnected(j));
    }
    Ok(MetricSpace { n, dist: d })
}

impl MetricSpace {
    /// Builds a space from a full matrix, rejecting anything that is not a metric.
    pub fn from_matrix(rows: Vec<Vec<i64>>) -> std::result::Result<Self, MetricViolation> {
        validate_metric(&rows)?;
        let n = rows.len();
        Ok(MetricSpace { n, dist: rows.into_iter().flatten().collect() })
    }

    /// Points on a line; distance is the coordinate difference.
    pub fn line(coords: &[i64]) -> Self {
        let n = coords.len();
        let mut dist = Vec::with_capacity(n * n);
        for &a in coords {
            for &b in coords {
                dist.push((a - b).abs());
            }
        }
        MetricSpace { n, dist }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> i64 {
        self.dist[a * self.n + b]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.dist.chunks(self.n.max(1)).take(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    /// Restriction to `keep` (in the given order); vertex `i` of the result
    /// is `keep[i]` of `self`.
    pub fn restrict(&self, keep: &[usize]) -> MetricSpace {
        let n = keep.len();
        let mut dist = Vec::with_capacity(n * n);
        for &a in keep {
            for &b in keep {
                dist.push(self.dist(a, b));
            }
        }
        MetricSpace { n, dist }
    }

    /// Sum of hop distances.
    pub fn walk_length(&self, walk: &Walk) -> Result<i64> {
        for &v in &walk.vertices {
            self.check_vertex(v)?;
        }
        Ok(walk.vertices.windows(2).map(|w| self.dist(w[0], w[1])).sum())
    }

    /// Walk length minus the distance between its endpoints.
    pub fn walk_excess(&self, walk: &Walk) -> Result<i64> {
        let length = self.walk_length(walk)?;
        Ok(length - self.dist(walk.first(), walk.last()))
    }
}

/// Ordered vertex sequence in a [`MetricSpace`]; consecutive hops travel along
/// shortest paths. Revisits are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Walk {
    vertices: Vec<usize>,
}

impl Walk {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyWalk);
        }
        Ok(Walk { vertices })
    }

    /// The two-vertex walk `u -> v` (a single vertex when `u == v`).
    pub fn direct(u: usize, v: usize) -> Self {
        if u == v {
            Walk { vertices: vec![u] }
        } else {
            Walk { vertices: vec![u, v] }
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn first(&self) -> usize {
        self.vertices[0]
    }

    pub fn last(&self) -> usize {
        *self.vertices.last().expect("walks are non-empty")
    }

    pub fn length(&self, space: &MetricSpace) -> i64 {
        self.vertices.windows(2).map(|w| space.dist(w[0], w[1])).sum()
    }

    pub fn excess(&self, space: &MetricSpace) -> i64 {
        self.length(space) - space.dist(self.first(), self.last())
    }

    /// `self` followed by `other`. A shared junction vertex is kept once.
    pub fn concat(&self, other: &Walk) -> Walk {
        let mut vertices = self.vertices.clone();
        let skip = usize::from(self.last() == other.first());
        vertices.extend_from_slice(&other.vertices[skip..]);
        Walk { vertices }
    }

    /// Distinct vertices in order of first visit.
    pub fn distinct(&self) -> Vec<usize> {
        let mut seen = Vec::new();
        for &v in &self.vertices {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
        seen
    }

    /// Reward of the distinct visited vertices; each counts once.
    pub fn reward<R: Reward>(&self, rewards: &[R]) -> R {
        self.distinct().into_iter().fold(R::zero(), |acc, v| acc + rewards[v].clone())
    }

    /// Maps vertex ids through `map` (used to lift walks out of a restricted space).
    pub fn relabel(&self, map: &[usize]) -> Walk {
        Walk { vertices: self.vertices.iter().map(|&v| map[v]).collect() }
    }

    /// Position of the first occurrence of `v`.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }

    /// Sub-walk between two positions, inclusive.
    pub fn slice(&self, from: usize, to: usize) -> Walk {
        Walk { vertices: self.vertices[from..=to].to_vec() }
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" -> "))
    }
}

/// A walk together with the vertices whose rewards it claims.
///
/// `collected` is a subset of the walk's vertices listed in first-visit order;
/// other walk vertices are only passed through.
#[derive(Debug, Clone, PartialEq)]
pub struct Route<R> {
    pub walk: Walk,
    pub collected: Vec<usize>,
    pub reward: R,
}

impl<R: Reward> Route<R> {
    /// Route claiming every distinct vertex of `walk`.
    pub fn collect_all(walk: Walk, rewards: &[R]) -> Self {
        let collected = walk.distinct();
        let reward = sum_over(&collected, rewards);
        Route { walk, collected, reward }
    }
}

/// Sum of `values[v]` over `vertices`.
pub fn sum_over<R: Reward>(vertices: &[usize], values: &[R]) -> R {
    vertices.iter().fold(R::zero(), |acc, &v| acc + values[v].clone())
}
