//! Exhaustive ground truth at desk scale: enumeration of all partitions into
//! transversals, global optima of the three objectives, Euclidean distance to
//! a convex hull, and the smallest ball meeting every hull of a partition.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::banach;
use crate::certificate::{Certificate, Check};
use crate::config::{ColoredConfig, TransversalPartition};
use crate::error::{Error, Result};
use crate::euclid;
use crate::hyperbolic::{self, HyperConfig};
use crate::point::{dist_sq, dot, NormKind, Point};
use crate::simplex_qp::{self, QpOptions};

pub const DEFAULT_CAP: usize = 1_000_000;

/// Largest vertex count solved by support enumeration in [`dist_to_hull`].
pub const HULL_EXACT_MAX: usize = 8;

/// Number of partitions into transversals up to relabeling of the parts, `(k!)^(r−1)`.
pub fn partition_count(k: usize, r: usize) -> f64 {
    let fact: f64 = (1..=k).map(|v| v as f64).product();
    fact.powi(r.saturating_sub(1) as i32)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All permutations of `0..k` in lexicographic order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..k).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

/// Lexicographic enumeration of canonical partitions: color 0 is fixed to the
/// identity and every other color ranges over all permutations.
#[derive(Debug, Clone)]
pub struct PartitionIterator {
    perms: Vec<Vec<usize>>,
    /// One permutation index per color after the first; `None` once exhausted.
    cursor: Option<Vec<usize>>,
    k: usize,
}

impl PartitionIterator {
    pub fn new(k: usize, r: usize, cap: usize) -> Result<Self> {
        if k == 0 || r == 0 {
            return Err(Error::InvalidParameter("k and r must be positive".into()));
        }
        let count = partition_count(k, r);
        if count > cap as f64 {
            return Err(Error::CapExceeded { count, cap });
        }
        Ok(Self { perms: permutations(k), cursor: Some(vec![0; r - 1]), k })
    }
}

impl Iterator for PartitionIterator {
    type Item = TransversalPartition;

    fn next(&mut self) -> Option<TransversalPartition> {
        let cursor = self.cursor.as_mut()?;
        let mut assignment = Vec::with_capacity(cursor.len() + 1);
        assignment.push((0..self.k).collect());
        assignment.extend(cursor.iter().map(|&c| self.perms[c].clone()));
        // odometer with the last color fastest, which keeps lexicographic order
        let mut pos = cursor.len();
        loop {
            if pos == 0 {
                self.cursor = None;
                break;
            }
            pos -= 1;
            cursor[pos] += 1;
            if cursor[pos] < self.perms.len() {
                break;
            }
            cursor[pos] = 0;
        }
        Some(TransversalPartition { assignment })
    }
}

pub fn enumerate_partitions(cfg: &ColoredConfig) -> Result<PartitionIterator> {
    enumerate_partitions_with_cap(cfg, DEFAULT_CAP)
}

pub fn enumerate_partitions_with_cap(cfg: &ColoredConfig, cap: usize) -> Result<PartitionIterator> {
    PartitionIterator::new(cfg.k(), cfg.r(), cap)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    /// `Σ d²(Pᵢ)`, maximized.
    EuclidSum,
    /// `Σ ∆(Pᵢ)`, maximized.
    BanachSum { norm: NormKind },
    /// `Σ p(Pᵢ,Pᵢ)` on hyperboloid coordinates, minimized.
    HyperSum,
}

impl Objective {
    pub fn maximize(&self) -> bool {
        !matches!(self, Objective::HyperSum)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleResult {
    #[serde(rename = "best_assignment")]
    pub best_partition: TransversalPartition,
    pub best_objective: f64,
    pub num_enumerated: usize,
}

/// Exact optimum by enumeration. Ties keep the lexicographically first
/// partition. For [`Objective::HyperSum`] the coordinates must lie on the
/// hyperboloid.
pub fn global_opt(cfg: &ColoredConfig, objective: Objective) -> Result<OracleResult> {
    global_opt_with_cap(cfg, objective, DEFAULT_CAP)
}

pub fn global_opt_with_cap(cfg: &ColoredConfig, objective: Objective, cap: usize) -> Result<OracleResult> {
    let iter = enumerate_partitions_with_cap(cfg, cap)?;
    let hyper = match objective {
        Objective::HyperSum => Some(HyperConfig::from_config(cfg)?),
        _ => None,
    };
    let eval = |p: &TransversalPartition| -> Result<f64> {
        match objective {
            Objective::EuclidSum => euclid::objective(cfg, p),
            Objective::BanachSum { norm } => banach::objective(cfg, p, norm),
            Objective::HyperSum => hyperbolic::objective(hyper.as_ref().expect("built above"), p),
        }
    };
    let mut best: Option<(TransversalPartition, f64)> = None;
    let mut count = 0;
    for p in iter {
        count += 1;
        let v = eval(&p)?;
        let better = match &best {
            None => true,
            Some((_, b)) if objective.maximize() => v > *b,
            Some((_, b)) => v < *b,
        };
        if better {
            best = Some((p, v));
        }
    }
    let (best_partition, best_objective) = best.expect("at least one partition");
    Ok(OracleResult { best_partition, best_objective, num_enumerated: count })
}

/// Euclidean distance from `x` to `conv(vertices)`.
///
/// Solves `min ‖Σ λᵢ (vᵢ − x)‖²` over the probability simplex; the distance is
/// the norm of the optimal combination.
pub fn dist_to_hull(x: &Point, vertices: &[Point]) -> Result<f64> {
    Ok(nearest_in_hull(x, vertices)?.1)
}

/// Nearest point of `conv(vertices)` to `x` and its distance.
pub fn nearest_in_hull(x: &Point, vertices: &[Point]) -> Result<(Point, f64)> {
    if vertices.is_empty() {
        return Err(Error::Empty("hull with no vertices"));
    }
    for v in vertices {
        x.check_dim(v)?;
    }
    let shifted: Vec<Vec<f64>> =
        vertices.iter().map(|v| v.coords().iter().zip(x.coords()).map(|(a, b)| a - b).collect()).collect();
    let n = vertices.len();
    let h = DMatrix::from_fn(n, n, |i, j| 2.0 * dot(&shifted[i], &shifted[j]));
    let a = DVector::zeros(n);
    let opts = QpOptions { exact_max: HULL_EXACT_MAX, tol: 1e-15, ..QpOptions::default() };
    let sol = simplex_qp::solve(&h, &a, opts)?;
    let mut offset = vec![0.0; x.dim()];
    for (w, u) in sol.weights.iter().zip(&shifted) {
        for (o, ut) in offset.iter_mut().zip(u) {
            *o += w * ut;
        }
    }
    let dist = dot(&offset, &offset).sqrt();
    let nearest = x.coords().iter().zip(&offset).map(|(a, b)| a + b).collect();
    Ok((Point::from_vec_unchecked(nearest), dist))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BestBall {
    pub center: Point,
    pub radius: f64,
    pub iterations: usize,
}

/// Smallest `R` such that one Euclidean ball of radius `R` meets the convex
/// hull of every part.
///
/// Minimizes `F(x) = maxᵢ dist(x, conv Pᵢ)²` by the prox-linear method: each
/// `dist²` is convex with a 2-Lipschitz gradient `2(x − projᵢ(x))`, so the
/// linearized model plus `‖y − x‖²` majorizes `F`; its minimizer comes from a
/// simplex QP over the multipliers. Iterates start at the centroid of all
/// points and remain in their affine hull. Stops once a step moves less than
/// `tol` times the configuration scale.
pub fn best_ball(cfg: &ColoredConfig, partition: &TransversalPartition, tol: f64, max_iter: usize) -> Result<BestBall> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let parts = cfg.parts_of(partition)?;
    let all: Vec<&Point> = cfg.all_points().collect();
    let mut x = crate::point::centroid(all.iter().copied())?;
    let scale = all.iter().map(|p| dist_sq(p.coords(), x.coords())).fold(0.0f64, f64::max).sqrt().max(1e-300);
    let k = parts.len();
    let l = 2.0;

    let eval = |x: &Point| -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let mut values = Vec::with_capacity(k);
        let mut grads = Vec::with_capacity(k);
        for part in &parts {
            let (proj, dist) = nearest_in_hull(x, part)?;
            values.push(dist * dist);
            grads.push(x.coords().iter().zip(proj.coords()).map(|(a, b)| 2.0 * (a - b)).collect::<Vec<f64>>());
        }
        Ok((values, grads))
    };

    for it in 0..max_iter {
        let (values, grads) = eval(&x)?;
        let fx = values.iter().copied().fold(0.0f64, f64::max);
        if fx == 0.0 {
            return Ok(BestBall { center: x, radius: 0.0, iterations: it });
        }
        let h = DMatrix::from_fn(k, k, |i, j| dot(&grads[i], &grads[j]) / l);
        let a = DVector::from_vec(values.clone());
        let sol = simplex_qp::solve(&h, &a, QpOptions::default())?;
        let mut step = vec![0.0; x.dim()];
        for (w, g) in sol.weights.iter().zip(&grads) {
            for (s, gt) in step.iter_mut().zip(g) {
                *s -= w * gt / l;
            }
        }
        let next = Point::from_vec_unchecked(x.coords().iter().zip(&step).map(|(a, b)| a + b).collect());
        let moved = dot(&step, &step).sqrt();
        x = next;
        if moved <= tol * scale {
            let (values, _) = eval(&x)?;
            let radius = values.iter().copied().fold(0.0f64, f64::max).sqrt();
            return Ok(BestBall { center: x, radius, iterations: it + 1 });
        }
    }
    let (values, _) = eval(&x)?;
    let best = values.iter().copied().fold(0.0f64, f64::max).sqrt();
    Err(Error::NonConvergence { iterations: max_iter, best, gap: f64::NAN })
}

pub fn best_ball_radius(cfg: &ColoredConfig, partition: &TransversalPartition, tol: f64) -> Result<f64> {
    Ok(best_ball(cfg, partition, tol, 200_000)?.radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum Space {
    Euclid,
    Banach { norm: NormKind },
    Hyper,
}

impl From<Space> for Objective {
    fn from(s: Space) -> Self {
        match s {
            Space::Euclid => Objective::EuclidSum,
            Space::Banach { norm } => Objective::BanachSum { norm },
            Space::Hyper => Objective::HyperSum,
        }
    }
}

/// Finds the global optimum and certifies it with [`certify_partition`].
pub fn verify_all_certificates(cfg: &ColoredConfig, space: Space, tol: f64) -> Result<Certificate> {
    let opt = global_opt(cfg, space.into())?;
    let mut cert = Certificate::new("oracle");
    cert.push(Check::eq("num-enumerated", opt.num_enumerated as f64, partition_count(cfg.k(), cfg.r()), 0.0));
    cert.merge(certify_partition(cfg, space, &opt.best_partition, tol)?);
    Ok(cert)
}

/// Checks the pairwise swap inequalities of `partition`, then the existence
/// certificate of the space: a common point of the Euclidean balls, pairwise
/// intersection (plus a common box in ℓ∞), or a hyperbolic common point.
/// `tol` is relative to the squared diameter (Euclidean), the diameter
/// (normed) or the largest `x₀²` (hyperbolic).
pub fn certify_partition(
    cfg: &ColoredConfig,
    space: Space,
    partition: &TransversalPartition,
    tol: f64,
) -> Result<Certificate> {
    let k = cfg.k();
    let mut cert = Certificate::new("partition");
    match space {
        Space::Euclid => {
            let scale = cfg.inter_color_diameter(NormKind::EUCLIDEAN).powi(2).max(1.0);
            let report = euclid::report_for_partition(cfg, partition)?;
            cert.merge(euclid::certify_common_ball(cfg, &report, tol * scale));
        }
        Space::Banach { norm } => {
            let parts = cfg.parts_of(partition)?;
            let scale = cfg.inter_color_diameter(norm).max(1.0);
            for i in 0..k {
                for j in (i + 1)..k {
                    let (cross, own) = banach::exchange_sums(&parts[i], &parts[j], norm)?;
                    cert.push(Check::le(format!("swap[{i},{j}]"), cross, own, tol * scale));
                }
            }
            let report = banach::report_for_partition(cfg, norm, partition)?;
            if norm == NormKind::LInfinity {
                cert.merge(banach::certify_linf_common_point(cfg, &report, tol * scale));
            } else {
                cert.merge(banach::certify_pairwise(&report, tol * scale));
            }
        }
        Space::Hyper => {
            let hcfg = HyperConfig::from_config(cfg)?;
            let parts = hcfg.parts_of(partition)?;
            let scale = parts.iter().flatten().map(|x| x.x0() * x.x0()).fold(1.0f64, f64::max);
            for i in 0..k {
                for j in (i + 1)..k {
                    let v = hyperbolic::pair_inequality(&parts[i], &parts[j])?;
                    cert.push(Check::le(format!("swap[{i},{j}]"), v, 0.0, tol * scale));
                }
            }
            let report = hyperbolic::report_for_partition(&hcfg, partition)?;
            let mut sub = Certificate::new("hyper-common-point");
            sub.push(Check::flag("common-point-found", report.common_point.is_some()));
            sub.push(Check::le("residual", report.residual, 0.0, tol * scale));
            cert.merge(sub);
        }
    }
    Ok(cert)
}
