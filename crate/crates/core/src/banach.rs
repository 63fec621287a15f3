//! Normed-space machinery: the mean-distance radius `∆(P)`, the swap search
//! maximizing `Σ ∆(Pᵢ)`, the pairwise-intersection certificate, and the ℓ∞
//! common point obtained from interval intersections.

use serde::{Deserialize, Serialize};

use crate::ball::{Ball, Geometry};
use crate::certificate::{Certificate, Check};
use crate::config::{ColoredConfig, TransversalPartition};
use crate::error::{Error, Result};
use crate::point::{centroid, norm_dist_unchecked, NormKind, Point};
use crate::search::{swap_search, Direction};

pub const DEFAULT_EPS_FACTOR: f64 = 1e-12;

/// Distances and radii for one pair of parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub i: usize,
    pub j: usize,
    /// `‖c_{Pᵢ} − c_{Pⱼ}‖`.
    pub center_distance: f64,
    /// `Σ_{a≠b} (‖xᵢₐ − xⱼ_b‖ + ‖xᵢ_b − xⱼₐ‖) / (2r(r−1))`, the middle term of the chain.
    pub cross_term: f64,
    /// `∆(Pᵢ) + ∆(Pⱼ)`.
    pub radius_sum: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BanachSolveReport {
    pub partition: TransversalPartition,
    pub norm: NormKind,
    /// `Σ ∆(Pᵢ)`.
    pub objective: f64,
    pub swap_count: usize,
    pub balls: Vec<Ball>,
    pub pairwise_witness: Vec<PairWitness>,
    /// Present for ℓ∞ when the boxes meet.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub common_point: Option<Point>,
    /// Largest radius divided by the inter-color diameter.
    pub bound_ratio: f64,
}

fn delta_refs(points: &[&Point], norm: NormKind) -> f64 {
    let r = points.len() as f64;
    let mut sum = 0.0;
    for (a, x) in points.iter().enumerate() {
        for y in &points[a + 1..] {
            sum += norm_dist_unchecked(x.coords(), y.coords(), norm);
        }
    }
    // ordered pairs count each unordered pair twice
    2.0 * sum / (2.0 * r * (r - 1.0))
}

/// `∆(P) = Σ_{x≠y} ‖x − y‖ / (2r(r−1))` over ordered pairs.
pub fn delta(points: &[Point], norm: NormKind) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 points, got {}", points.len())));
    }
    let d = points[0].dim();
    if let Some(p) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
    }
    Ok(delta_refs(&points.iter().collect::<Vec<_>>(), norm))
}

/// `B_X(P)`: centroid with radius `∆(P)`.
pub fn delta_ball(part: &[Point], norm: NormKind) -> Result<Ball> {
    Ball::new(centroid(part)?, delta(part, norm)?, Geometry::Normed(norm))
}

pub fn objective(cfg: &ColoredConfig, partition: &TransversalPartition, norm: NormKind) -> Result<f64> {
    partition.validate_for(cfg)?;
    Ok((0..cfg.k()).map(|i| delta_refs(&cfg.part_refs(&partition.assignment, i), norm)).sum())
}

pub fn default_eps(cfg: &ColoredConfig, norm: NormKind) -> f64 {
    (DEFAULT_EPS_FACTOR * cfg.inter_color_diameter(norm)).max(f64::MIN_POSITIVE)
}

/// Both sides of the exchange inequality for two parts `a`, `b`:
/// `(Σ_{i≠j} ‖aᵢ − bⱼ‖ + ‖aⱼ − bᵢ‖, Σ_{i≠j} ‖aᵢ − aⱼ‖ + ‖bᵢ − bⱼ‖)`.
/// A locally optimal pair has `cross ≤ own`.
pub fn exchange_sums(a: &[Point], b: &[Point], norm: NormKind) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let r = a.len();
    let d = |x: &Point, y: &Point| norm_dist_unchecked(x.coords(), y.coords(), norm);
    let mut cross = 0.0;
    let mut own = 0.0;
    for i in 0..r {
        for j in 0..r {
            if i != j {
                cross += d(&a[i], &b[j]) + d(&a[j], &b[i]);
                own += d(&a[i], &a[j]) + d(&b[i], &b[j]);
            }
        }
    }
    Ok((cross, own))
}

/// The chain `‖c_A − c_B‖ ≤ cross/(2r(r−1)) ≤ ∆(A) + ∆(B)` evaluated numerically.
pub fn pair_witness(i: usize, j: usize, a: &[Point], b: &[Point], norm: NormKind) -> Result<PairWitness> {
    let r = a.len() as f64;
    let (cross, _) = exchange_sums(a, b, norm)?;
    let ca = centroid(a)?;
    let cb = centroid(b)?;
    Ok(PairWitness {
        i,
        j,
        center_distance: norm_dist_unchecked(ca.coords(), cb.coords(), norm),
        cross_term: cross / (2.0 * r * (r - 1.0)),
        radius_sum: delta(a, norm)? + delta(b, norm)?,
    })
}

/// Swap search maximizing `Σ ∆(Pᵢ)` in the given norm.
pub fn local_search_banach(
    cfg: &ColoredConfig,
    norm: NormKind,
    init: &TransversalPartition,
    eps: f64,
) -> Result<BanachSolveReport> {
    init.validate_for(cfg)?;
    let outcome = swap_search(cfg.colors(), init, eps, Direction::Maximize, |p| delta_refs(p, norm), |a, b| a == b)?;
    build_report(cfg, norm, outcome.partition, outcome.objective, outcome.swap_count)
}

pub fn report_for_partition(
    cfg: &ColoredConfig,
    norm: NormKind,
    partition: &TransversalPartition,
) -> Result<BanachSolveReport> {
    let obj = objective(cfg, partition, norm)?;
    build_report(cfg, norm, partition.clone(), obj, 0)
}

fn build_report(
    cfg: &ColoredConfig,
    norm: NormKind,
    partition: TransversalPartition,
    objective: f64,
    swap_count: usize,
) -> Result<BanachSolveReport> {
    let parts = cfg.parts_of(&partition)?;
    let balls = parts.iter().map(|p| delta_ball(p, norm)).collect::<Result<Vec<_>>>()?;
    let mut pairwise_witness = Vec::new();
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            pairwise_witness.push(pair_witness(i, j, &parts[i], &parts[j], norm)?);
        }
    }
    let common_point = match norm {
        NormKind::LInfinity => linf_common_point(&balls, 1e-9),
        NormKind::Lp(_) => None,
    };
    let diam = cfg.inter_color_diameter(norm);
    let max_radius = balls.iter().map(|b| b.radius).fold(0.0f64, f64::max);
    Ok(BanachSolveReport {
        partition,
        norm,
        objective,
        swap_count,
        balls,
        pairwise_witness,
        common_point,
        bound_ratio: max_radius / diam,
    })
}

/// Passes when every pair of balls intersects: `‖cᵢ − cⱼ‖ ≤ ∆ᵢ + ∆ⱼ + tol`.
pub fn certify_pairwise(report: &BanachSolveReport, tol: f64) -> Certificate {
    let mut cert = Certificate::new("banach-pairwise");
    let b = &report.balls;
    for i in 0..b.len() {
        for j in (i + 1)..b.len() {
            let dist = norm_dist_unchecked(b[i].center.coords(), b[j].center.coords(), report.norm);
            cert.push(Check::le(format!("pair[{i},{j}]"), dist, b[i].radius + b[j].radius, tol));
        }
    }
    cert
}

/// Common point of axis-aligned boxes `[cᵢ − ∆ᵢ, cᵢ + ∆ᵢ]` (the ℓ∞ balls).
///
/// Intersects the intervals coordinate by coordinate and returns the midpoint
/// of each intersection, or `None` when some coordinate is empty beyond `tol`.
/// The geometry tag of the balls is not consulted.
pub fn linf_common_point(balls: &[Ball], tol: f64) -> Option<Point> {
    let first = balls.first()?;
    let dim = first.center.dim();
    if balls.iter().any(|b| b.center.dim() != dim) {
        return None;
    }
    let mut coords = Vec::with_capacity(dim);
    for t in 0..dim {
        let lo = balls.iter().map(|b| b.center[t] - b.radius).fold(f64::NEG_INFINITY, f64::max);
        let hi = balls.iter().map(|b| b.center[t] + b.radius).fold(f64::INFINITY, f64::min);
        if lo > hi + tol {
            return None;
        }
        coords.push(0.5 * (lo + hi));
    }
    Some(Point::from_vec_unchecked(coords))
}

/// ℓ∞ certificate: pairwise intersection, a common point of the boxes, and
/// every radius at most half the inter-color diameter.
pub fn certify_linf_common_point(cfg: &ColoredConfig, report: &BanachSolveReport, tol: f64) -> Certificate {
    let mut cert = Certificate::new("linf-common-point");
    if report.norm != NormKind::LInfinity {
        cert.fail(format!("norm must be linf, got {}", report.norm));
        return cert;
    }
    match objective(cfg, &report.partition, report.norm) {
        Ok(obj) => cert.push(Check::eq("objective-consistent", report.objective, obj, 1e-9 * (1.0 + obj.abs()))),
        Err(e) => {
            cert.fail(format!("invalid partition: {e}"));
            return cert;
        }
    }
    cert.merge(certify_pairwise(report, tol));
    match linf_common_point(&report.balls, tol) {
        Some(x) => {
            cert.push(Check::flag("box-common-point", true));
            for (i, b) in report.balls.iter().enumerate() {
                let d = norm_dist_unchecked(x.coords(), b.center.coords(), NormKind::LInfinity);
                cert.push(Check::le(format!("contains[{i}]"), d, b.radius, tol));
            }
        }
        None => cert.push(Check::flag("box-common-point", false)),
    }
    let half_diam = cfg.inter_color_diameter(NormKind::LInfinity) / 2.0;
    for (i, b) in report.balls.iter().enumerate() {
        cert.push(Check::le(format!("radius[{i}]"), b.radius, half_diam, tol));
    }
    cert
}
