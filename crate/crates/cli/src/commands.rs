use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use tverberg::banach::{self, PairWitness};
use tverberg::constructions::{self, InstanceKind};
use tverberg::euclid;
use tverberg::hyperbolic::{self, HyperConfig};
use tverberg::io::{partition_from_json, Instance};
use tverberg::oracle::{self, Space};
use tverberg::search::random_partition;
use tverberg::{Certificate, Check, ColoredConfig, NormKind, TransversalPartition};

use crate::{DemoArgs, DemoKind, GenerateArgs, SolveArgs, SpaceArg, SpaceOpts, VerifyArgs};

impl SpaceOpts {
    pub fn resolve(&self) -> Result<Space> {
        Ok(match self.space {
            SpaceArg::Euclid => Space::Euclid,
            SpaceArg::Hyper => Space::Hyper,
            SpaceArg::Banach => {
                let norm = match self.p {
                    Some(p) if p.is_infinite() => NormKind::LInfinity,
                    Some(p) => NormKind::lp(p)?,
                    None => self.norm,
                };
                Space::Banach { norm }
            }
        })
    }
}

pub fn space_name(space: Space) -> &'static str {
    match space {
        Space::Euclid => "euclid",
        Space::Banach { .. } => "banach",
        Space::Hyper => "hyper",
    }
}

/// Radius bound relative to the inter-color diameter, where one is known.
pub fn theoretical_bound(space: Space, r: usize) -> Option<f64> {
    match space {
        Space::Euclid => Some(1.0 / (2.0 * r as f64).sqrt()),
        Space::Banach { .. } => Some(0.5),
        Space::Hyper => None,
    }
}

/// Writes `json` to `out`, or to stdout when no path is given. Returns whether
/// a file was written, so the caller knows where the summary may go.
pub fn emit(out: Option<&Path>, json: &str) -> Result<bool> {
    match out {
        Some(path) => {
            fs::write(path, format!("{json}\n")).with_context(|| format!("writing {}", path.display()))?;
            Ok(true)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{json}")?;
            Ok(false)
        }
    }
}

pub fn summary(to_stdout: bool, line: &str) {
    if to_stdout {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn read_instance(path: &PathBuf) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Instance::from_json(&text).with_context(|| format!("parsing instance {}", path.display()))
}

fn config_for(instance: &Instance, space: Space) -> Result<&ColoredConfig> {
    match (instance, space) {
        (Instance::Hyper(h), Space::Hyper) => Ok(h.raw()),
        (Instance::Euclid(c), Space::Euclid | Space::Banach { .. }) => Ok(c),
        (Instance::Euclid(_), Space::Hyper) => bail!("--space hyper needs an instance with \"model\": \"hyperboloid\""),
        (Instance::Hyper(_), _) => bail!("hyperboloid instances can only be solved with --space hyper"),
    }
}

pub fn generate(a: GenerateArgs) -> Result<bool> {
    let instance = match a.kind {
        InstanceKind::Gaussian => Instance::Euclid(constructions::gen_gaussian(a.k, a.r, a.dim, a.seed)?),
        InstanceKind::LpOrthogonalSimplices => {
            Instance::Euclid(constructions::gen_lp_orthogonal_simplices(a.k, a.r, a.p)?)
        }
        InstanceKind::LinfEmbedding => Instance::Euclid(constructions::gen_linf_embedding(a.k, a.r)?),
        InstanceKind::SphericalSquare => Instance::Euclid(constructions::spherical_square_config()),
        InstanceKind::Hyperbolic => Instance::Hyper(constructions::gen_hyperbolic(a.k, a.r, a.dim, a.sigma, a.seed)?),
    };
    let raw = instance.raw();
    let to_stdout = emit(a.out.as_deref(), &instance.to_json())?;
    summary(
        to_stdout,
        &format!("generated {:?} instance: k={} r={} coordinates={}", a.kind, raw.k(), raw.r(), raw.dim()),
    );
    Ok(true)
}

#[derive(Debug, Serialize)]
pub struct RestartRecord {
    pub seed: u64,
    pub objective: f64,
    pub swap_count: usize,
}

#[derive(Debug, Serialize)]
pub struct OracleCheck {
    pub best_objective: f64,
    pub best_assignment: TransversalPartition,
    pub num_enumerated: usize,
    /// How far the local search result is from the optimum (nonnegative).
    pub local_gap: f64,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub space: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormKind>,
    pub k: usize,
    pub r: usize,
    pub dim: usize,
    pub eps: f64,
    pub partition: TransversalPartition,
    pub objective: f64,
    pub swap_count: usize,
    /// Largest power (Euclidean) or `max fᵢ` (hyperbolic) at the common point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theoretical_bound: Option<f64>,
    pub restarts: Vec<RestartRecord>,
    pub balls: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub common_point: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairwise_witness: Option<Vec<PairWitness>>,
    pub certificate: Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
}

/// The best of `restarts` seeded local searches, with its full report.
pub fn solve_instance(
    instance: &Instance,
    space: Space,
    eps: Option<f64>,
    seed: u64,
    restarts: u64,
    tol: f64,
    with_oracle: bool,
) -> Result<SolveReport> {
    let cfg = config_for(instance, space)?;
    let (k, r) = (cfg.k(), cfg.r());
    let hyper = match instance {
        Instance::Hyper(h) => Some(h),
        Instance::Euclid(_) => None,
    };
    let eps = match (eps, space) {
        (Some(e), _) => e,
        (None, Space::Euclid) => euclid::default_eps(cfg),
        (None, Space::Banach { norm }) => banach::default_eps(cfg, norm),
        (None, Space::Hyper) => hyperbolic::default_eps(hyper.expect("checked")),
    };
    let maximize = !matches!(space, Space::Hyper);

    let mut records = Vec::new();
    let mut best: Option<(usize, TransversalPartition, f64, usize)> = None;
    for i in 0..restarts {
        let s = seed.wrapping_add(i);
        let init = random_partition(k, r, s);
        let (partition, objective, swap_count) = match space {
            Space::Euclid => {
                let rep = euclid::local_search_euclid(cfg, &init, eps)?;
                (rep.partition, rep.objective, rep.swap_count)
            }
            Space::Banach { norm } => {
                let rep = banach::local_search_banach(cfg, norm, &init, eps)?;
                (rep.partition, rep.objective, rep.swap_count)
            }
            Space::Hyper => {
                let rep = hyperbolic::local_search_hyper(hyper.expect("checked"), &init, eps)?;
                (rep.partition, rep.objective, rep.swap_count)
            }
        };
        records.push(RestartRecord { seed: s, objective, swap_count });
        let better = match &best {
            None => true,
            Some((_, _, b, _)) => (maximize && objective > *b) || (!maximize && objective < *b),
        };
        if better {
            best = Some((records.len() - 1, partition, objective, swap_count));
        }
    }
    let (_, partition, objective, swap_count) = best.expect("restarts >= 1");

    let mut certificate = oracle::certify_partition(cfg, space, &partition, tol)?;
    let (residual, bound_ratio, balls, common_point, pairwise_witness) = match space {
        Space::Euclid => {
            let rep = euclid::report_for_partition(cfg, &partition)?;
            let cp = rep.common_point.as_ref().map(|p| p.coords().to_vec());
            (Some(rep.residual), Some(rep.bound_ratio), serde_json::to_value(&rep.balls)?, cp, None)
        }
        Space::Banach { norm } => {
            let rep = banach::report_for_partition(cfg, norm, &partition)?;
            let cp = rep.common_point.as_ref().map(|p| p.coords().to_vec());
            (None, Some(rep.bound_ratio), serde_json::to_value(&rep.balls)?, cp, Some(rep.pairwise_witness))
        }
        Space::Hyper => {
            let rep = hyperbolic::report_for_partition(hyper.expect("checked"), &partition)?;
            let cp = rep.common_point.as_ref().map(|p| p.coords().to_vec());
            (Some(rep.residual), None, serde_json::to_value(&rep.balls)?, cp, None)
        }
    };

    let oracle = if with_oracle {
        let res = oracle::global_opt(cfg, space.into())?;
        let local_gap = if maximize { res.best_objective - objective } else { objective - res.best_objective };
        let scale = res.best_objective.abs().max(1.0);
        certificate.push(Check::le("oracle/local-not-better-than-optimum", -local_gap, 0.0, 1e-9 * scale));
        certificate.merge(oracle::certify_partition(cfg, space, &res.best_partition, tol)?.renamed("oracle-optimum"));
        Some(OracleCheck {
            best_objective: res.best_objective,
            best_assignment: res.best_partition,
            num_enumerated: res.num_enumerated,
            local_gap,
        })
    } else {
        None
    };

    Ok(SolveReport {
        space: space_name(space),
        norm: match space {
            Space::Banach { norm } => Some(norm),
            _ => None,
        },
        k,
        r,
        dim: match instance {
            Instance::Hyper(h) => h.dim(),
            Instance::Euclid(c) => c.dim(),
        },
        eps,
        partition,
        objective,
        swap_count,
        residual,
        bound_ratio,
        theoretical_bound: theoretical_bound(space, r),
        restarts: records,
        balls,
        common_point,
        pairwise_witness,
        certificate,
        oracle,
    })
}

fn print_violations(cert: &Certificate) {
    for v in &cert.violations {
        eprintln!("violation: {v}");
    }
}

pub fn solve(a: SolveArgs) -> Result<bool> {
    if a.tol.is_nan() || a.tol <= 0.0 {
        bail!("--tol must be positive");
    }
    let space = a.space.resolve()?;
    let instance = read_instance(&a.input)?;
    let report = solve_instance(&instance, space, a.eps, a.seed, a.restarts, a.tol, a.oracle)?;
    let to_stdout = emit(a.out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
    let mut line = format!(
        "{} k={} r={}: objective {:.12}, {} swaps",
        report.space, report.k, report.r, report.objective, report.swap_count
    );
    if let (Some(ratio), Some(bound)) = (report.bound_ratio, report.theoretical_bound) {
        line += &format!(", bound_ratio {ratio:.6} (theoretical {bound:.6})");
    }
    if let Some(res) = report.residual {
        line += &format!(", residual {res:.3e}");
    }
    line += if report.certificate.passed { ", certificate PASS" } else { ", certificate FAIL" };
    summary(to_stdout, &line);
    print_violations(&report.certificate);
    if report.common_point.is_none() && !matches!(space, Space::Banach { .. }) {
        eprintln!("error: the common-point solver did not converge");
        return Ok(false);
    }
    Ok(report.certificate.passed)
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    space: &'static str,
    partition: TransversalPartition,
    objective: f64,
    certificate: Certificate,
}

pub fn verify(a: VerifyArgs) -> Result<bool> {
    let space = a.space.resolve()?;
    let instance = read_instance(&a.input)?;
    let cfg = config_for(&instance, space)?;
    let text = fs::read_to_string(&a.partition).with_context(|| format!("reading {}", a.partition.display()))?;
    let partition = partition_from_json(&text).context("parsing partition")?;
    partition.validate_for(cfg)?;
    let objective = match space {
        Space::Euclid => euclid::objective(cfg, &partition)?,
        Space::Banach { norm } => banach::objective(cfg, &partition, norm)?,
        Space::Hyper => hyperbolic::objective(&HyperConfig::from_config(cfg)?, &partition)?,
    };
    let certificate = oracle::certify_partition(cfg, space, &partition, a.tol)?;
    let passed = certificate.passed;
    let report = VerifyReport { space: space_name(space), partition, objective, certificate };
    let to_stdout = emit(a.out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
    summary(to_stdout, &format!("verify {}: {}", report.space, if passed { "PASS" } else { "FAIL" }));
    print_violations(&report.certificate);
    Ok(passed)
}

#[derive(Debug, Serialize)]
struct HullRatioDemo {
    k: usize,
    r: usize,
    inter_color_diameter: f64,
    /// Smallest radius of a ball meeting every hull, minimized over partitions.
    best_radius: f64,
    ratio: f64,
    upper_bound: f64,
    lower_bound: f64,
    num_partitions: usize,
}

#[derive(Debug, Serialize)]
struct LinfDemo {
    k: usize,
    r: usize,
    dim: usize,
    inter_color_diameter: f64,
    /// Smallest ℓ∞ distance seen between the hulls of two parts.
    min_hull_distance: f64,
    achieved_ratio_lower_bound: f64,
    local_search_bound_ratio: f64,
    certificate: Certificate,
}

pub fn demo(a: DemoArgs) -> Result<bool> {
    let (json, line, passed) = match a.kind {
        DemoKind::SphericalSquare => {
            let demo = constructions::spherical_square_demo();
            let mut line = String::from("spherical square:");
            for (i, w) in demo.partitions.iter().enumerate() {
                line += &format!(
                    " partition {i}: center distance {:.12}, radii {:.12} + {:.12}, gap {:.12};",
                    w.center_distance, w.radii[0], w.radii[1], w.gap
                );
            }
            line += if demo.certificate.passed { " circles disjoint (PASS)" } else { " FAIL" };
            (serde_json::to_string_pretty(&demo)?, line, demo.certificate.passed)
        }
        DemoKind::Square => {
            let p = |c: [f64; 2]| tverberg::Point::new(c.to_vec()).expect("finite");
            let cfg = ColoredConfig::new(vec![vec![p([0.0, 0.0]), p([1.0, 0.0])], vec![p([0.0, 1.0]), p([1.0, 1.0])]])?;
            let report = solve_instance(&Instance::Euclid(cfg), Space::Euclid, None, 0, 1, 1e-9, true)?;
            let line = format!(
                "square: objective {}, bound_ratio {:.12}, theoretical {:.12}, certificate {}",
                report.objective,
                report.bound_ratio.unwrap_or(f64::NAN),
                report.theoretical_bound.unwrap_or(f64::NAN),
                if report.certificate.passed { "PASS" } else { "FAIL" }
            );
            let passed = report.certificate.passed;
            (serde_json::to_string_pretty(&report)?, line, passed)
        }
        DemoKind::LpOrthogonalSimplices => {
            let cfg = constructions::gen_lp_orthogonal_simplices(a.k, a.r, 2.0)?;
            let diam = cfg.inter_color_diameter(NormKind::EUCLIDEAN);
            let mut best = f64::INFINITY;
            let mut count = 0;
            for part in oracle::enumerate_partitions(&cfg)? {
                best = best.min(oracle::best_ball_radius(&cfg, &part, 1e-12)?);
                count += 1;
            }
            let r = a.r as f64;
            let d = HullRatioDemo {
                k: a.k,
                r: a.r,
                inter_color_diameter: diam,
                best_radius: best,
                ratio: best / diam,
                upper_bound: 1.0 / (2.0 * r).sqrt(),
                lower_bound: 0.5f64.sqrt() * r.powf(-0.5),
                num_partitions: count,
            };
            let ok = d.ratio <= d.upper_bound + 1e-7;
            let line = format!(
                "orthogonal simplices k={} r={}: ratio {:.9} (upper {:.9}, lower {:.9}) over {count} partitions",
                a.k, a.r, d.ratio, d.upper_bound, d.lower_bound
            );
            (serde_json::to_string_pretty(&d)?, line, ok)
        }
        DemoKind::LinfEmbedding => {
            let cfg = constructions::gen_linf_embedding(a.k, a.r)?;
            let diam = cfg.inter_color_diameter(NormKind::LInfinity);
            let parts = cfg.parts_of(&TransversalPartition::identity(a.k, a.r))?;
            // centroids lie in the hulls, so their distance is a hull-to-hull distance
            let mut min_dist = f64::INFINITY;
            for i in 0..parts.len() {
                for j in (i + 1)..parts.len() {
                    let ci = tverberg::centroid(&parts[i])?;
                    let cj = tverberg::centroid(&parts[j])?;
                    min_dist = min_dist.min(tverberg::norm_dist(&ci, &cj, NormKind::LInfinity)?);
                }
            }
            let report = solve_instance(
                &Instance::Euclid(cfg.clone()),
                Space::Banach { norm: NormKind::LInfinity },
                None,
                0,
                1,
                1e-9,
                false,
            )?;
            let d = LinfDemo {
                k: a.k,
                r: a.r,
                dim: cfg.dim(),
                inter_color_diameter: diam,
                min_hull_distance: min_dist,
                achieved_ratio_lower_bound: min_dist / 2.0 / diam,
                local_search_bound_ratio: report.bound_ratio.unwrap_or(f64::NAN),
                certificate: report.certificate,
            };
            let line = format!(
                "linf embedding k={} r={} (dim {}): diameter {}, hull distance {}, ratio >= {:.12}, certificate {}",
                a.k,
                a.r,
                d.dim,
                diam,
                min_dist,
                d.achieved_ratio_lower_bound,
                if d.certificate.passed { "PASS" } else { "FAIL" }
            );
            let ok = d.certificate.passed;
            (serde_json::to_string_pretty(&d)?, line, ok)
        }
    };
    let to_stdout = emit(a.out.as_deref(), &json)?;
    summary(to_stdout, &line);
    Ok(passed)
}
