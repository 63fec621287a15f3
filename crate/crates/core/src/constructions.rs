//! Instance generators: seeded random instances, the lower-bound
//! configurations, and the spherical square.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Check};
use crate::config::ColoredConfig;
use crate::error::{Error, Result};
use crate::hyperbolic::{HPoint, HyperConfig};
use crate::point::{NormKind, Point};

/// Largest `k·r` accepted by [`gen_linf_embedding`]; the ambient dimension is `2^(kr−1)`.
pub const LINF_EMBEDDING_MAX_POINTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Gaussian,
    LpOrthogonalSimplices,
    LinfEmbedding,
    SphericalSquare,
    /// Gaussian chart coordinates lifted onto the hyperboloid.
    Hyperbolic,
}

impl std::str::FromStr for InstanceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "lp_orthogonal_simplices" => Ok(Self::LpOrthogonalSimplices),
            "linf_embedding" => Ok(Self::LinfEmbedding),
            "spherical_square" => Ok(Self::SphericalSquare),
            "hyperbolic" => Ok(Self::Hyperbolic),
            other => Err(Error::InvalidParameter(format!("unknown instance kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub k: usize,
    pub r: usize,
    pub dim: usize,
    pub p: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        let need = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::InvalidParameter(msg.to_string())) };
        match self.kind {
            InstanceKind::Gaussian | InstanceKind::Hyperbolic => {
                need(self.k >= 2 && self.r >= 2, "k and r must be at least 2")?;
                need(self.dim >= 1, "dim must be at least 1")
            }
            InstanceKind::LpOrthogonalSimplices => {
                need(self.k >= 2 && self.r >= 2, "k and r must be at least 2")?;
                NormKind::lp(self.p).map(|_| ())
            }
            InstanceKind::LinfEmbedding => {
                need(self.k >= 2 && self.r >= 2, "k and r must be at least 2")?;
                need(self.k * self.r <= LINF_EMBEDDING_MAX_POINTS, "linf embedding requires k*r <= 12")
            }
            InstanceKind::SphericalSquare => Ok(()),
        }
    }
}

fn gaussian_colors(rng: &mut ChaCha8Rng, k: usize, r: usize, dim: usize, sigma: f64) -> Vec<Vec<Point>> {
    (0..r)
        .map(|_| {
            (0..k)
                .map(|_| {
                    let c: Vec<f64> = (0..dim).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect();
                    Point::from_vec_unchecked(c)
                })
                .collect()
        })
        .collect()
}

/// `r·k` standard normal points, deterministic per seed.
pub fn gen_gaussian(k: usize, r: usize, dim: usize, seed: u64) -> Result<ColoredConfig> {
    InstanceSpec { kind: InstanceKind::Gaussian, k, r, dim, p: 2.0, seed }.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        // cross-color duplicates have probability zero; redraw if one appears
        if let Ok(cfg) = ColoredConfig::new(gaussian_colors(&mut rng, k, r, dim, 1.0)) {
            return Ok(cfg);
        }
    }
}

/// Chart coordinates drawn from `N(0, sigma²)` and lifted onto `ℍ^dim`.
pub fn gen_hyperbolic(k: usize, r: usize, dim: usize, sigma: f64, seed: u64) -> Result<HyperConfig> {
    InstanceSpec { kind: InstanceKind::Hyperbolic, k, r, dim, p: 2.0, seed }.validate()?;
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let colors: Vec<Vec<HPoint>> = gaussian_colors(&mut rng, k, r, dim, sigma)
            .into_iter()
            .map(|c| c.iter().map(|z| HPoint::from_spatial(z.coords())).collect())
            .collect();
        if let Ok(cfg) = HyperConfig::new(colors) {
            return Ok(cfg);
        }
    }
}

/// Vertices of a regular simplex with `k` vertices in `ℝ^(k−1)`, centered at
/// the origin with circumradius `√(1 − 1/k)` (Helmert basis of the sum-zero
/// hyperplane).
pub fn regular_simplex(k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|i| {
            (1..k)
                .map(|m| {
                    let norm = ((m * (m + 1)) as f64).sqrt();
                    match i.cmp(&m) {
                        std::cmp::Ordering::Less => 1.0 / norm,
                        std::cmp::Ordering::Equal => -(m as f64) / norm,
                        std::cmp::Ordering::Greater => 0.0,
                    }
                })
                .collect()
        })
        .collect()
}

/// Color `j` occupies coordinates `j(k−1) .. (j+1)(k−1)`; inside its block the
/// `k` points are the vertices of a centered regular simplex, rescaled to unit
/// ℓp norm.
pub fn gen_lp_orthogonal_simplices(k: usize, r: usize, p: f64) -> Result<ColoredConfig> {
    InstanceSpec { kind: InstanceKind::LpOrthogonalSimplices, k, r, dim: 0, p, seed: 0 }.validate()?;
    let norm = NormKind::lp(p)?;
    let block = k - 1;
    let simplex = regular_simplex(k);
    let colors = (0..r)
        .map(|j| {
            simplex
                .iter()
                .map(|v| {
                    let scale = 1.0 / norm.norm(v);
                    let mut c = vec![0.0; r * block];
                    for (t, x) in v.iter().enumerate() {
                        c[j * block + t] = x * scale;
                    }
                    Point::from_vec_unchecked(c)
                })
                .collect()
        })
        .collect();
    ColoredConfig::new(colors)
}

/// Sign-evaluation embedding `ℓ₁^n → ℓ∞^(2^(n−1))`: coordinate `ε` of the
/// image is `⟨ε, x⟩` over sign vectors with `ε₀ = +1`.
pub fn linf_embed(x: &[f64]) -> Result<Point> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Empty("embedding of an empty vector"));
    }
    if n > 24 {
        return Err(Error::InvalidParameter(format!("embedding dimension 2^{} is too large", n - 1)));
    }
    let coords = (0..1usize << (n - 1))
        .map(|mask| {
            x[0] + x[1..].iter().enumerate().map(|(b, v)| if mask & (1 << b) != 0 { -v } else { *v }).sum::<f64>()
        })
        .collect();
    Ok(Point::from_vec_unchecked(coords))
}

/// Images of the `kr` standard basis vectors of `ℓ₁^(kr)`; color `i` receives
/// basis vectors `ki .. k(i+1)`.
pub fn gen_linf_embedding(k: usize, r: usize) -> Result<ColoredConfig> {
    InstanceSpec { kind: InstanceKind::LinfEmbedding, k, r, dim: 0, p: 1.0, seed: 0 }.validate()?;
    let n = k * r;
    let colors = (0..r)
        .map(|i| {
            (0..k)
                .map(|a| {
                    let mut e = vec![0.0; n];
                    e[k * i + a] = 1.0;
                    linf_embed(&e)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ColoredConfig::new(colors)
}

/// The four axis points `±e₁`, `±e₂` on the unit 2-sphere, colored by axis.
pub fn spherical_square_config() -> ColoredConfig {
    let p = |c: [f64; 3]| Point::from_vec_unchecked(c.to_vec());
    ColoredConfig::new(vec![
        vec![p([1.0, 0.0, 0.0]), p([-1.0, 0.0, 0.0])],
        vec![p([0.0, 1.0, 0.0]), p([0.0, -1.0, 0.0])],
    ])
    .expect("distinct points")
}

/// Great-circle distance between unit vectors.
pub fn sphere_dist(x: &[f64], y: &[f64]) -> f64 {
    let diff: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let sum: f64 = x.iter().zip(y).map(|(a, b)| (a + b) * (a + b)).sum::<f64>().sqrt();
    2.0 * diff.atan2(sum)
}

fn sphere_midpoint(x: &[f64], y: &[f64]) -> Vec<f64> {
    let m: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let n = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    m.into_iter().map(|v| v / n).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphericalPartitionWitness {
    /// The two segments as pairs of endpoints.
    pub segments: Vec<[Vec<f64>; 2]>,
    pub centers: Vec<Vec<f64>>,
    pub segment_lengths: Vec<f64>,
    pub radii: Vec<f64>,
    pub center_distance: f64,
    /// `center_distance − (radius₁ + radius₂)`.
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphericalDemo {
    pub certificate: Certificate,
    pub partitions: Vec<SphericalPartitionWitness>,
}

/// For both transversal partitions of the spherical square, builds the two
/// circles having the segments as diameters and certifies they are disjoint.
pub fn spherical_square_demo() -> SphericalDemo {
    let e1 = vec![1.0, 0.0, 0.0];
    let e2 = vec![0.0, 1.0, 0.0];
    let neg = |v: &Vec<f64>| v.iter().map(|x| -x).collect::<Vec<f64>>();
    let layouts = [[[e1.clone(), e2.clone()], [neg(&e1), neg(&e2)]], [[e1.clone(), neg(&e2)], [neg(&e1), e2.clone()]]];
    let mut certificate = Certificate::new("spherical-square");
    let mut partitions = Vec::new();
    for (idx, segs) in layouts.into_iter().enumerate() {
        let centers: Vec<Vec<f64>> = segs.iter().map(|[a, b]| sphere_midpoint(a, b)).collect();
        let segment_lengths: Vec<f64> = segs.iter().map(|[a, b]| sphere_dist(a, b)).collect();
        let radii: Vec<f64> = segment_lengths.iter().map(|l| l / 2.0).collect();
        let center_distance = sphere_dist(&centers[0], &centers[1]);
        let gap = center_distance - (radii[0] + radii[1]);
        for (s, len) in segment_lengths.iter().enumerate() {
            certificate.push(Check::eq(format!("partition[{idx}]/segment[{s}]"), *len, PI / 2.0, 1e-12));
        }
        certificate.push(Check::eq(format!("partition[{idx}]/center-distance"), center_distance, PI, 1e-12));
        certificate.push(Check::le(format!("partition[{idx}]/disjoint"), radii[0] + radii[1], center_distance, -1e-9));
        certificate.push(Check::eq(format!("partition[{idx}]/gap"), gap, PI / 2.0, 1e-9));
        partitions.push(SphericalPartitionWitness {
            segments: segs.to_vec(),
            centers,
            segment_lengths,
            radii,
            center_distance,
            gap,
        });
    }
    SphericalDemo { certificate, partitions }
}
