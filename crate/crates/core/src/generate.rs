//! Seeded random instance generators.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::io::{InstanceFile, MetricRecord, ProblemKind, Scalar, VertexRecord, FORMAT_VERSION};
use crate::metric::{metric_closure, MetricSpace};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Profile {
    /// Points on a line.
    #[serde(rename = "line")]
    Line,
    /// Grid points with rounded-up Euclidean distances.
    #[serde(rename = "random-euclidean-grid")]
    EuclideanGrid,
    /// Shortest-path closure of a random connected graph.
    #[serde(rename = "random-closure")]
    RandomClosure,
}

impl Profile {
    pub const ALL: [Profile; 3] = [Profile::Line, Profile::EuclideanGrid, Profile::RandomClosure];
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Line => "line",
            Profile::EuclideanGrid => "random-euclidean-grid",
            Profile::RandomClosure => "random-closure",
        })
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "line" | "line-metric" => Ok(Profile::Line),
            "grid" | "random-euclidean-grid" => Ok(Profile::EuclideanGrid),
            "closure" | "random-closure" => Ok(Profile::RandomClosure),
            other => Err(format!("unknown profile {other:?} (line, random-euclidean-grid, random-closure)")),
        }
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "p2p" => Ok(ProblemKind::P2p),
            "knap" => Ok(ProblemKind::Knap),
            "stoch" => Ok(ProblemKind::Stoch),
            "tw" => Ok(ProblemKind::Tw),
            other => Err(format!("unknown problem kind {other:?} (p2p, knap, stoch, tw)")),
        }
    }
}

fn stream_of(kind: ProblemKind, profile: Profile) -> u64 {
    let k = match kind {
        ProblemKind::P2p => 0,
        ProblemKind::Knap => 1,
        ProblemKind::Stoch => 2,
        ProblemKind::Tw => 3,
    };
    let p = match profile {
        Profile::Line => 0,
        Profile::EuclideanGrid => 1,
        Profile::RandomClosure => 2,
    };
    k * 3 + p
}

fn ceil_sqrt(x: i64) -> i64 {
    let mut r = (x as f64).sqrt() as i64;
    while r * r > x {
        r -= 1;
    }
    while r * r < x {
        r += 1;
    }
    r
}

/// Builds the metric, returning both the file record and the closed space.
fn random_metric(rng: &mut ChaCha8Rng, n: usize, profile: Profile, span: i64) -> (MetricRecord, MetricSpace) {
    match profile {
        Profile::Line => {
            let coords: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=span)).collect();
            let space = MetricSpace::line(&coords);
            (MetricRecord::Matrix(space.rows()), space)
        }
        Profile::EuclideanGrid => {
            let side = (span * 7 / 10).max(1);
            let pts: Vec<(i64, i64)> = (0..n).map(|_| (rng.gen_range(0..=side), rng.gen_range(0..=side))).collect();
            let rows: Vec<Vec<i64>> = pts
                .iter()
                .map(|&(ax, ay)| pts.iter().map(|&(bx, by)| ceil_sqrt((ax - bx).pow(2) + (ay - by).pow(2))).collect())
                .collect();
            let space = MetricSpace::from_matrix(rows.clone()).expect("rounded-up Euclidean distances form a metric");
            (MetricRecord::Matrix(rows), space)
        }
        Profile::RandomClosure => {
            let max_w = (span / 2).max(1);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut edges = Vec::new();
            for i in 1..n {
                let parent = order[rng.gen_range(0..i)];
                edges.push((parent, order[i], rng.gen_range(1..=max_w)));
            }
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(0.3) {
                        edges.push((a, b, rng.gen_range(1..=max_w)));
                    }
                }
            }
            let space = metric_closure(n, &edges).expect("spanning tree keeps the graph connected");
            let named = edges.into_iter().map(|(a, b, w)| (vertex_name(a), vertex_name(b), w)).collect();
            (MetricRecord::Edges(named), space)
        }
    }
}

pub fn vertex_name(i: usize) -> String {
    format!("v{i}")
}

/// Support of at most three sizes in `0..=max_size` with probabilities in
/// sixteenths.
fn random_distribution(rng: &mut ChaCha8Rng, max_size: i64) -> Vec<(i64, Scalar)> {
    let mut sizes: Vec<i64> = (0..=max_size).collect();
    sizes.shuffle(rng);
    let k = rng.gen_range(1..=3usize).min(sizes.len());
    sizes.truncate(k);
    sizes.sort_unstable();
    let mut cuts: Vec<i64> = (1..16).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<i64> = cuts.into_iter().take(k - 1).collect();
    cuts.push(0);
    cuts.push(16);
    cuts.sort_unstable();
    sizes
        .into_iter()
        .zip(cuts.windows(2))
        .map(|(s, w)| (s, Scalar(Rational::new((w[1] - w[0]).into(), 16.into()))))
        .collect()
}

/// Random instance of the given kind, deterministic in all four arguments.
///
/// Vertices are named `v0, v1, ...`; `v0` is the start or root.
pub fn generate_instance(kind: ProblemKind, n: usize, seed: u64, profile: Profile) -> InstanceFile {
    assert!(n >= 1, "instances need at least one vertex");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_of(kind, profile));
    let span = if kind == ProblemKind::Stoch { 6 } else { 12 };
    let (metric, space) = random_metric(&mut rng, n, profile, span);
    let mut vertices: Vec<VertexRecord> = (0..n)
        .map(|i| VertexRecord { name: vertex_name(i), reward: Scalar::from(rng.gen_range(0..=9i64)), ..Default::default() })
        .collect();
    let mut file = InstanceFile {
        version: FORMAT_VERSION,
        kind,
        vertices: Vec::new(),
        metric,
        budget: None,
        knapsack_budget: None,
        start: None,
        end: None,
        root: None,
        seed: Some(seed),
    };
    let diameter = space.rows().iter().flatten().copied().max().unwrap_or(0);
    let end = if n > 1 && rng.gen_bool(0.75) { rng.gen_range(1..n) } else { 0 };
    match kind {
        ProblemKind::P2p | ProblemKind::Knap => {
            let direct = space.dist(0, end);
            file.budget = Some(direct + rng.gen_range(0..=2 * diameter.max(1)));
            if kind == ProblemKind::Knap {
                let mut total = 0;
                for v in &mut vertices {
                    let s = rng.gen_range(0..=5i64);
                    total += s;
                    v.size = Some(Scalar::from(s));
                }
                file.knapsack_budget = Some(Scalar::from(rng.gen_range(0..=total / 2 + 1)));
            }
            file.start = Some(vertex_name(0));
            file.end = Some(vertex_name(end));
        }
        ProblemKind::Stoch => {
            let direct = space.dist(0, end);
            let budget = (direct + rng.gen_range(0..=12)).min(20).max(direct);
            file.budget = Some(budget);
            for v in &mut vertices {
                v.distribution = Some(random_distribution(&mut rng, (budget / 2).max(1)));
            }
            file.start = Some(vertex_name(0));
            file.end = Some(vertex_name(end));
        }
        ProblemKind::Tw => {
            let horizon = 2 * diameter.max(1);
            for (i, v) in vertices.iter_mut().enumerate() {
                if i == 0 {
                    v.release = Some(0);
                    v.deadline = Some(0);
                    continue;
                }
                let release = rng.gen_range(0..=horizon / 2);
                let earliest = release.max(space.dist(0, i));
                v.release = Some(release);
                v.deadline = Some(earliest + rng.gen_range(0..=horizon));
            }
            file.root = Some(vertex_name(0));
        }
    }
    file.vertices = vertices;
    file
}

/// Adds random waiting-time distributions (sizes `0..=max_wait`) to a
/// time-window instance.
pub fn with_random_waiting(mut file: InstanceFile, seed: u64, max_wait: i64) -> InstanceFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(100);
    for v in &mut file.vertices {
        v.distribution = Some(random_distribution(&mut rng, max_wait));
    }
    file
}
