//! Ratio benchmarks: run an algorithm and its exact oracle over a seeded
//! suite and collect one row per instance.

use std::fmt::Write as _;
use std::time::Instant;

use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::generate::{generate_instance, Profile};
use crate::io::{ProblemKind, Problem, Scalar};
use crate::knap::solve_p2p_knap;
use crate::min_excess::ExactMinExcess;
use crate::oracles::{
    oracle_knap_orient, oracle_nonadaptive_stoch, oracle_p2p_orienteering, oracle_time_windows, OracleLimits,
};
use crate::p2p::solve_p2p;
use crate::stoch::{randomized_policy_value, solve_p2p_stoch};
use crate::time_windows::{check_tw_feasibility, compute_margin_params, solve_time_windows};
use crate::Rational;

/// Generators, algorithm and oracle for one batch of instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub name: String,
    pub kind: ProblemKind,
    pub count: usize,
    pub n_min: usize,
    pub n_max: usize,
    #[serde(default = "all_profiles")]
    pub profiles: Vec<Profile>,
    #[serde(default)]
    pub seed: u64,
    /// Deadline slack parameter for time-window suites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Scalar>,
    /// Minimum acceptable ratio; defaults to the proven bound of the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_floor: Option<Scalar>,
}

fn all_profiles() -> Vec<Profile> {
    Profile::ALL.to_vec()
}

impl SuiteSpec {
    /// The default suite for `kind` with `count` instances.
    pub fn standard(kind: ProblemKind, count: usize, seed: u64) -> Self {
        let (n_min, n_max) = match kind {
            ProblemKind::P2p => (2, 10),
            ProblemKind::Knap => (2, 9),
            ProblemKind::Stoch => (2, 5),
            ProblemKind::Tw => (2, 8),
        };
        SuiteSpec {
            name: kind.to_string(),
            kind,
            count,
            n_min,
            n_max,
            profiles: all_profiles(),
            seed,
            epsilon: (kind == ProblemKind::Tw).then(|| Scalar(Rational::one())),
            ratio_floor: None,
        }
    }

    fn epsilon(&self) -> Rational {
        self.epsilon.as_ref().map(|e| e.0.clone()).unwrap_or_else(Rational::one)
    }

    /// Ratio floor used to flag violations.
    pub fn floor(&self) -> Result<Rational, Error> {
        if let Some(f) = &self.ratio_floor {
            return Ok(f.0.clone());
        }
        let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
        Ok(match self.kind {
            ProblemKind::P2p => q(1, 2),
            ProblemKind::Knap => q(1, 8),
            ProblemKind::Stoch => q(1, 32),
            ProblemKind::Tw => {
                let eps = self.epsilon().to_f64().unwrap_or(f64::NAN);
                let s = compute_margin_params(eps)?.s as i64;
                q(1, 24 * (s + 2))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Pass,
    Violation,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub suite: String,
    pub id: String,
    pub kind: ProblemKind,
    pub profile: Profile,
    pub n: usize,
    pub seed: u64,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub feasible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RatioReport {
    pub rows: Vec<ReportRow>,
    pub min_ratio: Option<f64>,
    pub median_ratio: Option<f64>,
    pub violations: usize,
    pub skipped: usize,
}

impl RatioReport {
    fn from_rows(mut rows: Vec<ReportRow>) -> Self {
        rows.sort_by(|a, b| (&a.suite, &a.id).cmp(&(&b.suite, &b.id)));
        let mut ratios: Vec<f64> =
            rows.iter().filter(|r| r.status != RowStatus::Skipped).filter_map(|r| r.ratio).collect();
        ratios.sort_by(f64::total_cmp);
        let median_ratio = match ratios.len() {
            0 => None,
            k if k % 2 == 1 => Some(ratios[k / 2]),
            k => Some((ratios[k / 2 - 1] + ratios[k / 2]) / 2.0),
        };
        RatioReport {
            min_ratio: ratios.first().copied(),
            median_ratio,
            violations: rows.iter().filter(|r| r.status == RowStatus::Violation).count(),
            skipped: rows.iter().filter(|r| r.status == RowStatus::Skipped).count(),
            rows,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// One JSON record per line: every row, then a summary record.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&serde_json::to_string(row).expect("rows serialize"));
            out.push('\n');
        }
        let summary = serde_json::json!({
            "summary": true,
            "instances": self.rows.len(),
            "min_ratio": self.min_ratio,
            "median_ratio": self.median_ratio,
            "violations": self.violations,
            "skipped": self.skipped,
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:<14} {:<22} {:>3} {:<9} {:>12} {:>12} {:>8} {:>9}",
            "suite", "id", "profile", "n", "status", "algorithm", "oracle", "ratio", "time_ms"
        );
        let dash = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<8} {:<14} {:<22} {:>3} {:<9} {:>12} {:>12} {:>8} {:>9}",
                r.suite,
                r.id,
                r.profile.to_string(),
                r.n,
                format!("{:?}", r.status).to_lowercase(),
                dash(r.algorithm.as_ref().map(|a| format!("{:.4}", a.0.to_f64().unwrap_or(f64::NAN)))),
                dash(r.oracle.as_ref().map(|a| format!("{:.4}", a.0.to_f64().unwrap_or(f64::NAN)))),
                dash(r.ratio.map(|x| format!("{x:.4}"))),
                dash(r.runtime_ms.map(|x| format!("{x:.1}"))),
            );
            if let Some(note) = &r.note {
                let _ = writeln!(out, "    {note}");
            }
        }
        let fmt = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "instances {}  min ratio {}  median ratio {}  violations {}  skipped {}",
            self.rows.len(),
            fmt(self.min_ratio),
            fmt(self.median_ratio),
            self.violations,
            self.skipped
        );
        out
    }
}

struct Outcome {
    algorithm: Rational,
    oracle: Rational,
    feasible: bool,
    note: Option<String>,
}

fn evaluate(problem: &Problem, suite: &SuiteSpec) -> Result<Outcome, Error> {
    let limits = OracleLimits::default();
    let solver = ExactMinExcess::default();
    match problem {
        Problem::P2p(inst) => {
            let opt = oracle_p2p_orienteering(&inst.space, &inst.rewards, inst.u, inst.v, inst.budget, &limits)?;
            let sol = solve_p2p(inst, &solver)?;
            let route = sol.route(&inst.rewards);
            let w = &route.walk;
            let feasible = w.first() == inst.u && w.last() == inst.v && w.length(&inst.space) <= inst.budget;
            Ok(Outcome { algorithm: route.reward, oracle: opt.reward, feasible, note: None })
        }
        Problem::Knap(inst) => {
            let opt = oracle_knap_orient(inst, &limits)?;
            let sol = solve_p2p_knap(inst, &solver)?;
            let feasible = inst.is_feasible(&sol.route);
            Ok(Outcome { algorithm: sol.route.reward, oracle: opt.reward, feasible, note: None })
        }
        Problem::Stoch(inst) => {
            let opt = oracle_nonadaptive_stoch(inst, &limits)?;
            let policy = solve_p2p_stoch(inst, &solver)?;
            let w = &policy.path_walk;
            let feasible = w.first() == inst.start && w.last() == inst.terminal;
            let value = randomized_policy_value(inst, &policy, 10_000, suite.seed)?;
            Ok(Outcome { algorithm: value.value, oracle: opt.value, feasible, note: None })
        }
        Problem::Tw(inst) => {
            let eps = suite.epsilon();
            let opt = oracle_time_windows(inst, &limits)?;
            let sol = solve_time_windows(inst, &eps, ExactMinExcess::default())?;
            let verdicts = check_tw_feasibility(&sol.trace(), inst, &(Rational::one() + &eps));
            let late: Vec<usize> = verdicts.iter().filter(|v| !v.counted).map(|v| v.vertex).collect();
            let note = (!late.is_empty()).then(|| format!("claimed outside window: {late:?}"));
            Ok(Outcome { algorithm: sol.reward, oracle: opt.reward, feasible: late.is_empty(), note })
        }
    }
}

/// Runs every suite. Rows come back sorted by suite and instance id.
/// Instances above an oracle cap are marked skipped and do not affect the
/// aggregates. With `timings`, rows carry wall-clock runtimes.
pub fn run_bench(suites: &[SuiteSpec], timings: bool) -> Result<RatioReport, Error> {
    let mut jobs = Vec::new();
    for suite in suites {
        let floor = suite.floor()?;
        let width = suite.n_max.saturating_sub(suite.n_min) + 1;
        for i in 0..suite.count {
            let n = suite.n_min.max(1) + i % width;
            let profile = suite.profiles[i % suite.profiles.len().max(1)];
            jobs.push((suite, floor.clone(), i, n, profile, suite.seed.wrapping_add(i as u64)));
        }
    }
    let rows = jobs
        .into_par_iter()
        .map(|(suite, floor, i, n, profile, seed)| {
            let file = generate_instance(suite.kind, n, seed, profile);
            let mut row = ReportRow {
                suite: suite.name.clone(),
                id: format!("{}-{i:05}", suite.name),
                kind: suite.kind,
                profile,
                n,
                seed,
                status: RowStatus::Pass,
                algorithm: None,
                oracle: None,
                ratio: None,
                feasible: None,
                note: None,
                runtime_ms: None,
            };
            let started = Instant::now();
            let outcome = file
                .to_problem()
                .map_err(|e| Error::InvalidInstance(e.to_string()))
                .and_then(|p| evaluate(&p, suite));
            if timings {
                row.runtime_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            }
            match outcome {
                Ok(out) => {
                    let ratio = if out.oracle.is_zero() {
                        Rational::one()
                    } else {
                        out.algorithm.clone() / &out.oracle
                    };
                    let above_oracle = suite.kind != ProblemKind::Tw && out.algorithm > out.oracle;
                    let below_floor = ratio < floor;
                    if !out.feasible || above_oracle || below_floor {
                        row.status = RowStatus::Violation;
                    }
                    let mut notes: Vec<String> = out.note.into_iter().collect();
                    if below_floor {
                        notes.push(format!("ratio below floor {}", Scalar(floor.clone())));
                    }
                    if above_oracle {
                        notes.push("algorithm exceeds the exact oracle".into());
                    }
                    row.note = (!notes.is_empty()).then(|| notes.join("; "));
                    row.ratio = ratio.to_f64();
                    row.algorithm = Some(Scalar(out.algorithm));
                    row.oracle = Some(Scalar(out.oracle));
                    row.feasible = Some(out.feasible);
                }
                Err(e @ Error::CapExceeded { .. }) => {
                    row.status = RowStatus::Skipped;
                    row.note = Some(e.to_string());
                }
                Err(e) => {
                    row.status = RowStatus::Violation;
                    row.note = Some(e.to_string());
                }
            }
            row
        })
        .collect();
    Ok(RatioReport::from_rows(rows))
}
