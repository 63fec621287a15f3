//! Hyperboloid model: the Lorentzian form, hyperbolic balls induced by point
//! sets, the swap search minimizing `Σ p(Pᵢ,Pᵢ)`, and the verifiers for the
//! reverse Cauchy-Schwarz inequality and the balanced-point inequality.
//!
//! Points of `ℍ^d` are stored as `d + 1` raw coordinates `(x₀, x₁, …, x_d)`
//! with `q(x) = −x₀² + Σ xᵢ² = −1` and `x₀ > 0`.

mod minimize;

pub use minimize::{find_common_point_hyper, find_common_point_hyper_with, HyperMinOptions, HyperMinimum};

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Check};
use crate::config::{ColoredConfig, TransversalPartition};
use crate::error::{Error, Result};
use crate::point::{dot, Point};
use crate::search::{swap_search, Direction};

/// Tolerance on `|q(x) + 1|` (relative to `x₀²`) accepted on input.
pub const HYPERBOLOID_TOL: f64 = 1e-9;

/// `p(x, y) = −x₀y₀ + ⟨x_∞, y_∞⟩` on raw coordinates.
pub fn lorentz_p(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if x.is_empty() {
        return Err(Error::Empty("Lorentz form of empty vectors"));
    }
    Ok(lp(x, y))
}

/// `q(x) = p(x, x)`.
pub fn lorentz_q(x: &[f64]) -> Result<f64> {
    lorentz_p(x, x)
}

#[inline]
pub(crate) fn lp(x: &[f64], y: &[f64]) -> f64 {
    -x[0] * y[0] + dot(&x[1..], &y[1..])
}

/// A point on the upper sheet of the hyperboloid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct HPoint(Point);

impl HPoint {
    /// Validates `q = −1` and `x₀ > 0`, then recomputes `x₀` from the spatial
    /// part so the constraint holds to rounding.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let p = Point::new(coords)?;
        if p.dim() < 2 {
            return Err(Error::NotOnHyperboloid("need at least one spatial coordinate".into()));
        }
        let x0 = p[0];
        if !(x0 > 0.0) {
            return Err(Error::NotOnHyperboloid(format!("x0 = {x0} is not positive")));
        }
        let q = lp(p.coords(), p.coords());
        if (q + 1.0).abs() > HYPERBOLOID_TOL * x0 * x0 {
            return Err(Error::NotOnHyperboloid(format!("q(x) = {q}, expected -1")));
        }
        Ok(Self::from_spatial(&p.coords()[1..]))
    }

    /// The chart map `z ↦ (√(1 + ⟨z,z⟩), z)`.
    pub fn from_spatial(z: &[f64]) -> Self {
        let x0 = (1.0 + dot(z, z)).sqrt();
        let mut coords = Vec::with_capacity(z.len() + 1);
        coords.push(x0);
        coords.extend_from_slice(z);
        Self(Point::from_vec_unchecked(coords))
    }

    /// Base point `(1, 0, …, 0)` of `ℍ^d`.
    pub fn base(d: usize) -> Self {
        Self::from_spatial(&vec![0.0; d])
    }

    /// Normalizes a future time-like vector onto the hyperboloid.
    pub fn normalize(v: &[f64]) -> Result<Self> {
        let q = lorentz_q(v)?;
        if !(q < 0.0) || !(v[0] > 0.0) {
            return Err(Error::NotTimelike(format!("q = {q}, x0 = {}", v[0])));
        }
        let s = 1.0 / (-q).sqrt();
        let spatial: Vec<f64> = v[1..].iter().map(|c| c * s).collect();
        Ok(Self::from_spatial(&spatial))
    }

    pub fn x0(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> &[f64] {
        &self.0.coords()[1..]
    }

    pub fn coords(&self) -> &[f64] {
        self.0.coords()
    }

    /// Hyperbolic dimension (number of spatial coordinates).
    pub fn dim(&self) -> usize {
        self.0.dim() - 1
    }

    pub fn as_point(&self) -> &Point {
        &self.0
    }

    /// Spatial part as a chart point.
    pub fn chart(&self) -> Point {
        Point::from_vec_unchecked(self.spatial().to_vec())
    }
}

impl<'de> Deserialize<'de> for HPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        HPoint::new(coords).map_err(serde::de::Error::custom)
    }
}

/// `z_H = (√(1 + ⟨z,z⟩), z)`.
pub fn lift(z: &Point) -> HPoint {
    HPoint::from_spatial(z.coords())
}

/// `d(x, y) = arcosh(−p(x, y))`.
///
/// Evaluated as `2·asinh(√q(x−y) / 2)`, which agrees with the arcosh form on
/// the hyperboloid and keeps precision for nearby points.
pub fn hdist(x: &HPoint, y: &HPoint) -> Result<f64> {
    let p = lorentz_p(x.coords(), y.coords())?;
    let guard = 1e-12 * (x.x0() * y.x0()).max(1.0);
    if -p < 1.0 - guard {
        return Err(Error::NotOnHyperboloid(format!("-p(x,y) = {} < 1", -p)));
    }
    let diff: Vec<f64> = x.coords().iter().zip(y.coords()).map(|(a, b)| a - b).collect();
    let q = lp(&diff, &diff).max(0.0);
    Ok(2.0 * (q.sqrt() / 2.0).asinh())
}

/// `p(A, B) = Σ_{i≠j} p(aᵢ, bⱼ)` for transversals aligned by color.
pub fn pairing(a: &[HPoint], b: &[HPoint]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    if let (Some(x), Some(y)) = (a.first(), b.first()) {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
        }
    }
    let refs_a: Vec<&HPoint> = a.iter().collect();
    let refs_b: Vec<&HPoint> = b.iter().collect();
    Ok(pairing_refs(&refs_a, &refs_b))
}

pub(crate) fn pairing_refs(a: &[&HPoint], b: &[&HPoint]) -> f64 {
    let mut sum = 0.0;
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i != j {
                sum += lp(x.coords(), y.coords());
            }
        }
    }
    sum
}

/// The ball `B_H(X) = {z ∈ ℍ : Σ_{x≠y} p(x − z, y − z) ≤ 0}`.
///
/// Expanding the defining sum with `q(z) = −1` gives
/// `Σ_{x≠y} p(x,y) − 2n(n−1)·p(z, c_X) − n(n−1)`, so membership is
/// `p(z, c_X) ≥ threshold` with
/// `threshold = (Σ_{x≠y} p(x,y) − n(n−1)) / (2n(n−1))`, equivalently
/// `d(z, center) ≤ arcosh(−threshold / √|q(c_X)|)` with `center = c_X / √|q(c_X)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperBall {
    pub center: HPoint,
    pub radius: f64,
    /// Membership holds exactly when `p(z, c_X) ≥ defining_threshold`.
    pub defining_threshold: f64,
    /// Raw centroid `c_X` in the ambient coordinates.
    pub centroid: Vec<f64>,
    /// Points defining the ball.
    pub generators: Vec<HPoint>,
}

impl HyperBall {
    /// `Σ_{x≠y} p(x − z, y − z)` evaluated directly from the generators.
    pub fn defining_sum(&self, z: &HPoint) -> f64 {
        defining_sum(&self.generators, z)
    }

    pub fn contains_by_threshold(&self, z: &HPoint) -> bool {
        lp(z.coords(), &self.centroid) >= self.defining_threshold
    }

    pub fn contains_by_distance(&self, z: &HPoint, tol: f64) -> bool {
        hdist(z, &self.center).is_ok_and(|d| d <= self.radius + tol)
    }
}

/// `Σ_{x≠y∈X} p(x − z, y − z)` over ordered pairs.
pub fn defining_sum(points: &[HPoint], z: &HPoint) -> f64 {
    let shifted: Vec<Vec<f64>> =
        points.iter().map(|x| x.coords().iter().zip(z.coords()).map(|(a, b)| a - b).collect()).collect();
    let mut sum = 0.0;
    for (i, u) in shifted.iter().enumerate() {
        for (j, v) in shifted.iter().enumerate() {
            if i != j {
                sum += lp(u, v);
            }
        }
    }
    sum
}

pub fn hyper_ball(points: &[HPoint]) -> Result<HyperBall> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("a hyperbolic ball needs at least 2 points, got {n}")));
    }
    let dim = points[0].coords().len();
    if let Some(p) = points.iter().find(|p| p.coords().len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: p.coords().len() });
    }
    let nf = n as f64;
    let mut centroid = vec![0.0; dim];
    for p in points {
        for (c, x) in centroid.iter_mut().zip(p.coords()) {
            *c += x / nf;
        }
    }
    let q_c = lp(&centroid, &centroid);
    // a centroid of hyperboloid points is always future time-like
    if !(q_c < 0.0) || !(centroid[0] > 0.0) {
        return Err(Error::NotTimelike(format!("centroid has q = {q_c}")));
    }
    let refs: Vec<&HPoint> = points.iter().collect();
    let s = pairing_refs(&refs, &refs);
    let pairs = nf * (nf - 1.0);
    let threshold = (s - pairs) / (2.0 * pairs);
    let norm_c = (-q_c).sqrt();
    let center = HPoint::normalize(&centroid)?;
    // the argument is ≥ 1 analytically; rounding may dip below
    let arg = (-threshold / norm_c).max(1.0);
    Ok(HyperBall { center, radius: arg.acosh(), defining_threshold: threshold, centroid, generators: points.to_vec() })
}

/// Colored configuration whose points lie on the hyperboloid.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperConfig {
    colors: Vec<Vec<HPoint>>,
    raw: ColoredConfig,
}

impl HyperConfig {
    pub fn new(colors: Vec<Vec<HPoint>>) -> Result<Self> {
        let raw =
            ColoredConfig::new(colors.iter().map(|c| c.iter().map(|p| p.as_point().clone()).collect()).collect())?;
        Ok(Self { colors, raw })
    }

    /// Validates every point of a raw configuration against the hyperboloid.
    pub fn from_config(cfg: &ColoredConfig) -> Result<Self> {
        let colors = cfg
            .colors()
            .iter()
            .map(|c| c.iter().map(|p| HPoint::new(p.coords().to_vec())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(colors)
    }

    pub fn k(&self) -> usize {
        self.raw.k()
    }

    pub fn r(&self) -> usize {
        self.raw.r()
    }

    /// Hyperbolic dimension.
    pub fn dim(&self) -> usize {
        self.raw.dim() - 1
    }

    pub fn colors(&self) -> &[Vec<HPoint>] {
        &self.colors
    }

    pub fn raw(&self) -> &ColoredConfig {
        &self.raw
    }

    pub fn parts_of(&self, partition: &TransversalPartition) -> Result<Vec<Vec<HPoint>>> {
        partition.validate_for(&self.raw)?;
        Ok((0..self.k())
            .map(|i| (0..self.r()).map(|j| self.colors[j][partition.assignment[j][i]].clone()).collect())
            .collect())
    }

    /// Largest hyperbolic distance between points of different colors.
    pub fn inter_color_diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (a, ca) in self.colors.iter().enumerate() {
            for cb in &self.colors[a + 1..] {
                for x in ca {
                    for y in cb {
                        best = best.max(hdist(x, y).unwrap_or(0.0));
                    }
                }
            }
        }
        best
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperSolveReport {
    pub partition: TransversalPartition,
    /// `Σ p(Pᵢ, Pᵢ)`.
    pub objective: f64,
    pub swap_count: usize,
    pub balls: Vec<HyperBall>,
    pub common_point: Option<HPoint>,
    /// `max_i fᵢ` at the returned point.
    pub residual: f64,
    /// Parts active at the minimizer of `f` and their multipliers.
    pub active: Vec<usize>,
    pub weights: Vec<f64>,
}

pub fn objective(cfg: &HyperConfig, partition: &TransversalPartition) -> Result<f64> {
    let parts = cfg.parts_of(partition)?;
    parts.iter().map(|p| pairing(p, p)).sum()
}

/// Default swap threshold, scaled by the largest `x₀²` in the instance.
pub fn default_eps(cfg: &HyperConfig) -> f64 {
    let m = cfg.colors.iter().flatten().map(HPoint::x0).fold(1.0f64, f64::max);
    1e-12 * m * m
}

/// `p(Pᵢ,Pᵢ) + p(Pⱼ,Pⱼ) − 2p(Pᵢ,Pⱼ)`; nonpositive for locally optimal pairs.
pub fn pair_inequality(pi: &[HPoint], pj: &[HPoint]) -> Result<f64> {
    Ok(pairing(pi, pi)? + pairing(pj, pj)? - 2.0 * pairing(pi, pj)?)
}

/// Swap search minimizing `Σ p(Pᵢ, Pᵢ)`, followed by the common-point solve.
pub fn local_search_hyper(cfg: &HyperConfig, init: &TransversalPartition, eps: f64) -> Result<HyperSolveReport> {
    init.validate_for(&cfg.raw)?;
    let outcome = swap_search(&cfg.colors, init, eps, Direction::Minimize, |p| pairing_refs(p, p), |a, b| a == b)?;
    build_report(cfg, outcome.partition, outcome.objective, outcome.swap_count)
}

pub fn report_for_partition(cfg: &HyperConfig, partition: &TransversalPartition) -> Result<HyperSolveReport> {
    let obj = objective(cfg, partition)?;
    build_report(cfg, partition.clone(), obj, 0)
}

fn build_report(
    cfg: &HyperConfig,
    partition: TransversalPartition,
    objective: f64,
    swap_count: usize,
) -> Result<HyperSolveReport> {
    let parts = cfg.parts_of(&partition)?;
    let balls = parts.iter().map(|p| hyper_ball(p)).collect::<Result<Vec<_>>>()?;
    let (common_point, residual, active, weights) = match find_common_point_hyper(&parts, 1e-12, 100_000) {
        Ok(m) => (Some(m.point), m.residual, m.active, m.weights),
        Err(Error::NonConvergence { best, .. }) => (None, best, Vec::new(), Vec::new()),
        Err(e) => return Err(e),
    };
    Ok(HyperSolveReport { partition, objective, swap_count, balls, common_point, residual, active, weights })
}

/// Values `fᵢ(z) = Σ_{x≠y∈Pᵢ} p(x − z_H, y − z_H)` and their gradients
/// `∇fᵢ(z) = −2(r−1) Σ_{x∈Pᵢ} (x_∞ − x₀·z/√(1 + ⟨z,z⟩))`.
pub fn hyper_f_and_grad(z: &Point, parts: &[Vec<HPoint>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let zh = lift(z);
    let mut values = Vec::with_capacity(parts.len());
    let mut grads = Vec::with_capacity(parts.len());
    for part in parts {
        let r = part.len();
        if r < 2 {
            return Err(Error::InvalidParameter("parts need at least 2 points".into()));
        }
        if let Some(x) = part.iter().find(|x| x.dim() != z.dim()) {
            return Err(Error::DimensionMismatch { expected: z.dim(), got: x.dim() });
        }
        let rf = r as f64;
        let refs: Vec<&HPoint> = part.iter().collect();
        let self_pairing = pairing_refs(&refs, &refs);
        let cross: f64 = part.iter().map(|x| lp(x.coords(), zh.coords())).sum();
        values.push(self_pairing - 2.0 * (rf - 1.0) * cross - rf * (rf - 1.0));

        let w0 = zh.x0();
        let mut g = vec![0.0; z.dim()];
        for x in part {
            for (gt, (xt, zt)) in g.iter_mut().zip(x.spatial().iter().zip(z.coords())) {
                *gt += xt - x.x0() * zt / w0;
            }
        }
        grads.push(g.into_iter().map(|v| -2.0 * (rf - 1.0) * v).collect());
    }
    Ok((values, grads))
}

/// Reverse Cauchy-Schwarz for future time-like vectors: `p(x,y) < 0` and
/// `p(x,y)² ≥ q(x)q(y)`.
pub fn check_timelike_cs(x: &[f64], y: &[f64]) -> Result<Certificate> {
    let qx = lorentz_q(x)?;
    let qy = lorentz_q(y)?;
    if !(qx < 0.0 && qy < 0.0 && x[0] > 0.0 && y[0] > 0.0) {
        return Err(Error::Precondition(format!(
            "vectors must be future time-like (q(x) = {qx}, q(y) = {qy}, x0 = {}, y0 = {})",
            x[0], y[0]
        )));
    }
    let p = lp(x, y);
    let mut cert = Certificate::new("timelike-cauchy-schwarz");
    cert.push(Check { label: "p-negative".into(), lhs: p, rhs: 0.0, passed: p < 0.0 });
    let scale = p * p;
    cert.push(Check::le("reverse-cs", qx * qy, p * p, 1e-12 * scale));
    Ok(cert)
}

/// Intermediate quantities of the balanced-point inequality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BalancedPointReport {
    pub certificate: Certificate,
    /// `sₙ = Σᵢ λᵢ xᵢₙ` per color.
    pub s: Vec<Vec<f64>>,
    /// `βₙ = √(−q(sₙ))`.
    pub beta: Vec<f64>,
    /// `Σ_{m≠n} p(sₙ − z_H, s_m − z_H)`.
    pub lhs: f64,
    /// `−q(Σₙ sₙ)`.
    pub minus_q_total: f64,
    /// Norm of `Σᵢ λᵢ ∇fᵢ(z)`.
    pub balance_residual: f64,
}

/// Verifies `Σ_{m≠n} p(Σᵢλᵢ(xᵢₙ − z_H), Σᵢλᵢ(xᵢ_m − z_H)) ≤ 0` at a balanced
/// point `z`, along with `βₙ ≥ 1` and `−q(Σsₙ) ≥ (Σβₙ)² ≥ r²`.
///
/// Fails with [`Error::Precondition`] when `Σ λᵢ ∇fᵢ(z)` is not zero within
/// `tol` (relative to the gradient scale).
pub fn check_balanced_point(
    parts: &[Vec<HPoint>],
    weights: &[f64],
    z: &Point,
    tol: f64,
) -> Result<BalancedPointReport> {
    if parts.is_empty() || parts.len() != weights.len() {
        return Err(Error::InvalidParameter(format!(
            "need one weight per part: {} parts, {} weights",
            parts.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("weights must be nonnegative and sum to 1".into()));
    }
    let r = parts[0].len();
    if parts.iter().any(|p| p.len() != r) {
        return Err(Error::InvalidParameter("parts must have equal size".into()));
    }
    let (_, grads) = hyper_f_and_grad(z, parts)?;
    let d = z.dim();
    let mut balance = vec![0.0; d];
    for (w, g) in weights.iter().zip(&grads) {
        for (b, gi) in balance.iter_mut().zip(g) {
            *b += w * gi;
        }
    }
    let balance_residual = dot(&balance, &balance).sqrt();
    let grad_scale = 2.0
        * (r as f64 - 1.0)
        * parts.iter().zip(weights).map(|(p, w)| w * p.iter().map(|x| x.x0()).sum::<f64>()).sum::<f64>();
    if balance_residual > tol * grad_scale.max(1.0) {
        return Err(Error::Precondition(format!("balancing condition violated: |Σλ∇f| = {balance_residual:.3e}")));
    }

    let zh = lift(z);
    let dim = d + 1;
    let s: Vec<Vec<f64>> = (0..r)
        .map(|n| {
            let mut v = vec![0.0; dim];
            for (part, w) in parts.iter().zip(weights) {
                for (vt, xt) in v.iter_mut().zip(part[n].coords()) {
                    *vt += w * xt;
                }
            }
            v
        })
        .collect();
    let shifted: Vec<Vec<f64>> = s.iter().map(|v| v.iter().zip(zh.coords()).map(|(a, b)| a - b).collect()).collect();
    let mut lhs = 0.0;
    for n in 0..r {
        for m in 0..r {
            if m != n {
                lhs += lp(&shifted[n], &shifted[m]);
            }
        }
    }
    let beta: Vec<f64> = s.iter().map(|v| (-lp(v, v)).max(0.0).sqrt()).collect();
    let mut total = vec![0.0; dim];
    for v in &s {
        for (t, x) in total.iter_mut().zip(v) {
            *t += x;
        }
    }
    let minus_q_total = -lp(&total, &total);
    let beta_sum: f64 = beta.iter().sum();

    let scale = zh.x0() * total[0];
    let mut certificate = Certificate::new("balanced-point-inequality");
    certificate.push(Check::le("lhs", lhs, 0.0, tol * scale.max(1.0)));
    for (n, b) in beta.iter().enumerate() {
        certificate.push(Check::le(format!("beta[{n}]>=1"), 1.0, *b, tol));
    }
    certificate.push(Check::le("beta-sum-squared", beta_sum * beta_sum, minus_q_total, tol * minus_q_total.max(1.0)));
    certificate.push(Check::le("r-squared", (r * r) as f64, beta_sum * beta_sum, tol * (r * r) as f64));
    Ok(BalancedPointReport { certificate, s, beta, lhs, minus_q_total, balance_residual })
}

#[cfg(test)]
mod tests;
