//! JSON instance and policy files.
//!
//! An instance file lists named vertices, a metric (edge list or full
//! matrix), budgets and endpoints. Scalars such as rewards and probabilities
//! may be written as JSON numbers or as strings like `"3/4"`; serialization
//! always emits the canonical form (integers as numbers, other values as
//! reduced fractions in strings).

use std::collections::HashMap;
use std::fmt;

use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::error::Error;
use crate::knap::KnapOrientInstance;
use crate::metric::{metric_closure, MetricSpace, MetricViolation, Walk};
use crate::p2p::P2PInstance;
use crate::scalar::{format_rational, parse_rational};
use crate::stoch::{NonAdaptivePolicy, SizeDistribution, StochOrientInstance};
use crate::time_windows::TWInstance;
use crate::Rational;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

impl IoError {
    fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        IoError::Field { path: path.into(), message: message.into() }
    }
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

/// Exact scalar read from a JSON number or a fraction string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Scalar(pub Rational);

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar(q)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar(Rational::from_integer(v.into()))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0.is_integer().then(|| self.0.numer().to_i64()).flatten() {
            Some(v) => serializer.serialize_i64(v),
            None => serializer.serialize_str(&format_rational(&self.0)),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ScalarVisitor;

        impl Visitor<'_> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a fraction string such as \"3/4\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
                Ok(Scalar::from(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
                Ok(Scalar(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
                self.visit_str(&v.to_string())
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
                parse_rational(v).map(Scalar).ok_or_else(|| E::custom(format!("not a number: {v:?}")))
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    P2p,
    Knap,
    Stoch,
    Tw,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::P2p => "p2p",
            ProblemKind::Knap => "knap",
            ProblemKind::Stoch => "stoch",
            ProblemKind::Tw => "tw",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub name: String,
    pub reward: Scalar,
    /// Deterministic size (knap only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<Scalar>,
    /// `[[size, probability], ...]`: the job size (stoch) or waiting time (tw).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<(i64, Scalar)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub release: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadline: Option<i64>,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar(Rational::zero())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum MetricRecord {
    /// Undirected weighted edges by vertex name; distances are shortest paths.
    Edges(Vec<(String, String, i64)>),
    /// Full distance matrix in vertex order.
    Matrix(Vec<Vec<i64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub kind: ProblemKind,
    pub vertices: Vec<VertexRecord>,
    pub metric: MetricRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knapsack_budget: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A validated instance of one of the four problem kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    P2p(P2PInstance<Rational>),
    Knap(KnapOrientInstance<Rational>),
    Stoch(StochOrientInstance<Rational>),
    Tw(TWInstance<Rational>),
}

/// Parses and validates an instance file, returning it in canonical form.
pub fn parse_instance(text: &str) -> Result<InstanceFile, IoError> {
    let mut file: InstanceFile = serde_json::from_str(text)?;
    file.canonicalize();
    file.to_problem()?;
    Ok(file)
}

pub fn serialize_instance(file: &InstanceFile) -> String {
    let mut text = serde_json::to_string_pretty(file).expect("instance files always serialize");
    text.push('\n');
    text
}

impl InstanceFile {
    fn canonicalize(&mut self) {
        for v in &mut self.vertices {
            if let Some(d) = &mut v.distribution {
                d.sort_by_key(|(s, _)| *s);
            }
        }
    }

    pub fn names(&self) -> Vec<&str> {
        self.vertices.iter().map(|v| v.name.as_str()).collect()
    }

    fn index_of(&self) -> Result<HashMap<&str, usize>, IoError> {
        let mut map = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if map.insert(v.name.as_str(), i).is_some() {
                return Err(IoError::field(format!("vertices[{i}].name"), format!("duplicate name {:?}", v.name)));
            }
        }
        Ok(map)
    }

    fn metric_space(&self, index: &HashMap<&str, usize>) -> Result<MetricSpace, IoError> {
        let n = self.vertices.len();
        let name = |i: usize| self.vertices[i].name.as_str();
        match &self.metric {
            MetricRecord::Matrix(rows) => MetricSpace::from_matrix(rows.clone()).map_err(|e| {
                let message = match e {
                    MetricViolation::Triangle { i, j, k } => format!(
                        "triangle inequality violated for ({}, {}, {}): d({0}, {2}) = {} > d({0}, {1}) + d({1}, {2}) = {}",
                        name(i),
                        name(j),
                        name(k),
                        rows[i][k],
                        rows[i][j] + rows[j][k]
                    ),
                    MetricViolation::NotSquare { .. } if rows.len() != n => {
                        format!("matrix has {} rows for {n} vertices", rows.len())
                    }
                    other => other.to_string(),
                };
                IoError::field("metric.matrix", message)
            })
            .and_then(|m| {
                if m.len() != n {
                    Err(IoError::field("metric.matrix", format!("matrix has {} rows for {n} vertices", m.len())))
                } else {
                    Ok(m)
                }
            }),
            MetricRecord::Edges(edges) => {
                let mut list = Vec::with_capacity(edges.len());
                for (e, (a, b, w)) in edges.iter().enumerate() {
                    let lookup = |x: &String| {
                        index.get(x.as_str()).copied().ok_or_else(|| {
                            IoError::field(format!("metric.edges[{e}]"), format!("unknown vertex {x:?}"))
                        })
                    };
                    list.push((lookup(a)?, lookup(b)?, *w));
                }
                metric_closure(n, &list).map_err(|e| {
                    let message = match e {
                        Error::Disconnected(j) => format!("vertex {:?} unreachable from {:?}", name(j), name(0)),
                        Error::SelfLoop(a) => format!("self-loop on {:?}", name(a)),
                        Error::NegativeWeight(a, b, w) => {
                            format!("edge ({:?}, {:?}) has negative weight {w}", name(a), name(b))
                        }
                        other => other.to_string(),
                    };
                    IoError::field("metric.edges", message)
                })
            }
        }
    }

    fn endpoint(&self, field: &str, value: &Option<String>, index: &HashMap<&str, usize>) -> Result<usize, IoError> {
        let name = value.as_ref().ok_or_else(|| IoError::field(field, format!("required for kind {}", self.kind)))?;
        index.get(name.as_str()).copied().ok_or_else(|| IoError::field(field, format!("unknown vertex {name:?}")))
    }

    fn required_budget(&self) -> Result<i64, IoError> {
        self.budget.ok_or_else(|| IoError::field("budget", format!("required for kind {}", self.kind)))
    }

    fn distribution(&self, i: usize, default_zero: bool) -> Result<SizeDistribution<Rational>, IoError> {
        let v = &self.vertices[i];
        let path = format!("vertices[{i}] ({:?}).distribution", v.name);
        let Some(support) = &v.distribution else {
            if default_zero {
                return Ok(SizeDistribution::deterministic(0));
            }
            return Err(IoError::field(path, "required for kind stoch"));
        };
        let total = support.iter().fold(Rational::zero(), |acc, (_, p)| acc + &p.0);
        if total != Rational::from_integer(1.into()) {
            return Err(IoError::field(
                path,
                format!("probabilities of vertex {:?} sum to {}, expected 1", v.name, format_rational(&total)),
            ));
        }
        SizeDistribution::new(support.iter().map(|(s, p)| (*s, p.0.clone())).collect())
            .map_err(|e| IoError::field(path, e.to_string()))
    }

    /// Validates the file and builds the typed instance.
    pub fn to_problem(&self) -> Result<Problem, IoError> {
        if self.version != FORMAT_VERSION {
            return Err(IoError::field("version", format!("unsupported version {}", self.version)));
        }
        if self.vertices.is_empty() {
            return Err(IoError::field("vertices", "at least one vertex is required"));
        }
        let index = self.index_of()?;
        let space = self.metric_space(&index)?;
        let n = self.vertices.len();
        let rewards: Vec<Rational> = self.vertices.iter().map(|v| v.reward.0.clone()).collect();
        if let Some(i) = rewards.iter().position(|r| *r < Rational::zero()) {
            return Err(IoError::field(format!("vertices[{i}].reward"), "negative reward"));
        }
        let core = |e: Error| IoError::field("instance", e.to_string());
        match self.kind {
            ProblemKind::P2p => {
                let u = self.endpoint("start", &self.start, &index)?;
                let v = self.endpoint("end", &self.end, &index)?;
                let budget = self.required_budget()?;
                P2PInstance::new(space, rewards, u, v, budget).map(Problem::P2p).map_err(core)
            }
            ProblemKind::Knap => {
                let u = self.endpoint("start", &self.start, &index)?;
                let v = self.endpoint("end", &self.end, &index)?;
                let budget = self.required_budget()?;
                let cap = self
                    .knapsack_budget
                    .as_ref()
                    .ok_or_else(|| IoError::field("knapsack_budget", "required for kind knap"))?;
                let mut sizes = Vec::with_capacity(n);
                for (i, vert) in self.vertices.iter().enumerate() {
                    let s = vert.size.as_ref().map(|s| s.0.clone()).unwrap_or_else(Rational::zero);
                    if s < Rational::zero() {
                        return Err(IoError::field(format!("vertices[{i}].size"), "negative size"));
                    }
                    sizes.push(s);
                }
                KnapOrientInstance::new(space, rewards, sizes, budget, cap.0.clone(), u, v)
                    .map(Problem::Knap)
                    .map_err(core)
            }
            ProblemKind::Stoch => {
                let u = self.endpoint("start", &self.start, &index)?;
                let v = self.endpoint("end", &self.end, &index)?;
                let budget = self.required_budget()?;
                let sizes = (0..n).map(|i| self.distribution(i, false)).collect::<Result<Vec<_>, _>>()?;
                StochOrientInstance::new(space, rewards, sizes, budget, u, v).map(Problem::Stoch).map_err(core)
            }
            ProblemKind::Tw => {
                let root = self.endpoint("root", &self.root, &index)?;
                let mut release = Vec::with_capacity(n);
                let mut deadline = Vec::with_capacity(n);
                for (i, vert) in self.vertices.iter().enumerate() {
                    release.push(vert.release.unwrap_or(0));
                    deadline.push(vert.deadline.ok_or_else(|| {
                        IoError::field(format!("vertices[{i}] ({:?}).deadline", vert.name), "required for kind tw")
                    })?);
                }
                let waiting = if self.vertices.iter().any(|v| v.distribution.is_some()) {
                    Some((0..n).map(|i| self.distribution(i, true)).collect::<Result<Vec<_>, _>>()?)
                } else {
                    None
                };
                TWInstance::new(space, root, rewards, release, deadline, waiting).map(Problem::Tw).map_err(core)
            }
        }
    }
}

/// A non-adaptive stochastic policy written with vertex names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub version: u32,
    pub single_vertex: String,
    /// Jobs of the path branch in visiting order.
    pub path: Vec<String>,
    /// The full surrogate walk the path branch follows.
    pub walk: Vec<String>,
    pub branch_probability: Scalar,
    pub inclusion_probability: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chosen_scale: Option<u32>,
}

impl PolicyFile {
    pub fn from_policy(policy: &NonAdaptivePolicy<Rational>, names: &[&str]) -> Self {
        let name = |v: &usize| names[*v].to_string();
        PolicyFile {
            version: FORMAT_VERSION,
            single_vertex: name(&policy.single_vertex),
            path: policy.path.iter().map(name).collect(),
            walk: policy.path_walk.vertices().iter().map(name).collect(),
            branch_probability: Scalar(policy.branch_probability.clone()),
            inclusion_probability: Scalar(policy.inclusion_probability.clone()),
            chosen_scale: policy.chosen_scale,
        }
    }

    pub fn to_policy(&self, names: &[&str]) -> Result<NonAdaptivePolicy<Rational>, IoError> {
        let lookup = |field: &str, n: &String| {
            names
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| IoError::field(field.to_string(), format!("unknown vertex {n:?}")))
        };
        let single = lookup("single_vertex", &self.single_vertex)?;
        let path = self.path.iter().map(|n| lookup("path", n)).collect::<Result<Vec<_>, _>>()?;
        let walk = self.walk.iter().map(|n| lookup("walk", n)).collect::<Result<Vec<_>, _>>()?;
        let walk = Walk::new(walk).map_err(|e| IoError::field("walk", e.to_string()))?;
        let unit = |field: &str, p: &Scalar| {
            if p.0 < Rational::zero() || p.0 > Rational::from_integer(1.into()) {
                Err(IoError::field(field.to_string(), format!("probability {p} outside [0, 1]")))
            } else {
                Ok(p.0.clone())
            }
        };
        let branch = unit("branch_probability", &self.branch_probability)?;
        let inclusion = unit("inclusion_probability", &self.inclusion_probability)?;
        let mut policy = NonAdaptivePolicy::new(single, path, walk).with_probabilities(branch, inclusion);
        policy.chosen_scale = self.chosen_scale;
        Ok(policy)
    }
}

pub fn parse_policy(text: &str) -> Result<PolicyFile, IoError> {
    let file: PolicyFile = serde_json::from_str(text)?;
    if file.version != FORMAT_VERSION {
        return Err(IoError::field("version", format!("unsupported version {}", file.version)));
    }
    Ok(file)
}

pub fn serialize_policy(file: &PolicyFile) -> String {
    let mut text = serde_json::to_string_pretty(file).expect("policy files always serialize");
    text.push('\n');
    text
}
