use std::str::FromStr;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Serialize;

use tverberg::constructions::{gen_gaussian, gen_hyperbolic};
use tverberg::io::Instance;
use tverberg::oracle::{self, Space};

use crate::commands::{emit, solve_instance, space_name, summary, theoretical_bound};
use crate::{SweepArgs, SweepFormat};

/// Instances whose partition count exceeds this skip the oracle cross-check.
const SWEEP_ORACLE_CAP: f64 = 50_000.0;

/// Inclusive integer range written `a..b` (or `a..=b`), or a single value.
#[derive(Debug, Clone, Copy)]
pub struct Range {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad range bound '{t}': {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        Ok(Range { lo, hi })
    }
}

impl Range {
    fn values(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

#[derive(Debug, Clone, Serialize)]
struct Trial {
    k: usize,
    r: usize,
    trial: usize,
    seed: u64,
    objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    certificate_passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_gap: Option<f64>,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct Cell {
    k: usize,
    r: usize,
    trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_bound_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theoretical_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_residual: Option<f64>,
    all_passed: bool,
}

#[derive(Debug, Serialize)]
struct SweepReport {
    space: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    norm: Option<tverberg::NormKind>,
    dim: usize,
    seed: u64,
    cells: Vec<Cell>,
    trials: Vec<Trial>,
}

fn trial_seed(base: u64, k: usize, r: usize, trial: usize) -> u64 {
    base ^ ((k as u64) << 48) ^ ((r as u64) << 32) ^ trial as u64
}

fn run_trial(space: Space, k: usize, r: usize, trial: usize, a: &SweepArgs) -> Trial {
    let seed = trial_seed(a.seed, k, r, trial);
    let failed = |error: String| Trial {
        k,
        r,
        trial,
        seed,
        objective: f64::NAN,
        bound_ratio: None,
        residual: None,
        certificate_passed: false,
        oracle_gap: None,
        passed: false,
        error: Some(error),
    };
    let instance = match space {
        Space::Hyper => gen_hyperbolic(k, r, a.dim, 1.0, seed).map(Instance::Hyper),
        _ => gen_gaussian(k, r, a.dim, seed).map(Instance::Euclid),
    };
    let instance = match instance {
        Ok(i) => i,
        Err(e) => return failed(e.to_string()),
    };
    let with_oracle = a.oracle && oracle::partition_count(k, r) <= SWEEP_ORACLE_CAP;
    let report = match solve_instance(&instance, space, None, seed, 1, a.tol, with_oracle) {
        Ok(rep) => rep,
        Err(e) => return failed(format!("{e:#}")),
    };
    let within_bound = match (report.bound_ratio, report.theoretical_bound) {
        (Some(ratio), Some(bound)) => ratio <= bound + 1e-7,
        _ => true,
    };
    let residual_ok = report.residual.is_none_or(|v| v <= 1e-7);
    Trial {
        k,
        r,
        trial,
        seed,
        objective: report.objective,
        bound_ratio: report.bound_ratio,
        residual: report.residual,
        certificate_passed: report.certificate.passed,
        oracle_gap: report.oracle.as_ref().map(|o| o.local_gap),
        passed: within_bound && residual_ok && report.certificate.passed,
        error: None,
    }
}

fn fmax(acc: Option<f64>, v: Option<f64>) -> Option<f64> {
    match (acc, v) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

pub fn run(a: SweepArgs) -> Result<bool> {
    if a.trials == 0 {
        bail!("--trials must be at least 1");
    }
    if a.k.lo < 2 || a.r.lo < 2 {
        bail!("k and r must be at least 2");
    }
    let space = a.space.resolve()?;
    let jobs: Vec<(usize, usize, usize)> =
        a.k.values().flat_map(|k| a.r.values().flat_map(move |r| (0..a.trials).map(move |t| (k, r, t)))).collect();
    // collect keeps job order, so the report does not depend on scheduling
    let trials: Vec<Trial> = jobs.par_iter().map(|&(k, r, t)| run_trial(space, k, r, t, &a)).collect();

    let mut cells = Vec::new();
    for k in a.k.values() {
        for r in a.r.values() {
            let group: Vec<&Trial> = trials.iter().filter(|t| t.k == k && t.r == r).collect();
            cells.push(Cell {
                k,
                r,
                trials: group.len(),
                max_bound_ratio: group.iter().fold(None, |acc, t| fmax(acc, t.bound_ratio)),
                theoretical_bound: theoretical_bound(space, r),
                max_residual: group.iter().fold(None, |acc, t| fmax(acc, t.residual)),
                all_passed: group.iter().all(|t| t.passed),
            });
        }
    }
    let passed = cells.iter().all(|c| c.all_passed);
    let report = SweepReport {
        space: space_name(space),
        norm: match space {
            Space::Banach { norm } => Some(norm),
            _ => None,
        },
        dim: a.dim,
        seed: a.seed,
        cells,
        trials,
    };
    let text = match a.format {
        SweepFormat::Json => serde_json::to_string_pretty(&report)?,
        SweepFormat::Csv => to_csv(&report),
    };
    let to_stdout = emit(a.out.as_deref(), &text)?;
    for c in &report.cells {
        let mut line = format!("k={} r={}: {} trials", c.k, c.r, c.trials);
        if let (Some(m), Some(b)) = (c.max_bound_ratio, c.theoretical_bound) {
            line += &format!(", max bound_ratio {m:.6} (theoretical {b:.6})");
        }
        if let Some(m) = c.max_residual {
            line += &format!(", max residual {m:.3e}");
        }
        line += if c.all_passed { ", PASS" } else { ", FAIL" };
        summary(to_stdout, &line);
    }
    for t in report.trials.iter().filter(|t| !t.passed) {
        eprintln!(
            "failed trial k={} r={} #{} (seed {}): {}",
            t.k,
            t.r,
            t.trial,
            t.seed,
            t.error.as_deref().unwrap_or("check failed")
        );
    }
    Ok(passed)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn to_csv(report: &SweepReport) -> String {
    let mut out = String::from("k,r,trials,max_bound_ratio,theoretical_bound,max_residual,all_passed\n");
    for c in &report.cells {
        out += &format!(
            "{},{},{},{},{},{},{}\n",
            c.k,
            c.r,
            c.trials,
            opt(c.max_bound_ratio),
            opt(c.theoretical_bound),
            opt(c.max_residual),
            c.all_passed
        );
    }
    out.pop();
    out
}
