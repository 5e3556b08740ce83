//! Synthetic clustered data and the density and size experiments.
//!
//! Clusters sit on corners of the cube `[150, 850]^d`, so centres are at
//! least 700 apart, and are either uniform in a ball of radius 300 or
//! Gaussian with σ = 100. Noise is uniform in the bounding box of the
//! cluster points grown by 10% on every side.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::boxgraph::BoxMode;
use crate::dbscan::{dbscan, original_dbscan, Labeling, Meter, PairCheck, Params, Variant};
use crate::error::{invalid, Result};
use crate::geometry::PointSet;
use crate::Scalar;

const CORNER_LO: f64 = 150.0;
const CORNER_HI: f64 = 850.0;
const BALL_RADIUS: f64 = 300.0;
const SIGMA: f64 = 100.0;
const NOISE_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    UniformBall,
    Gaussian,
}

/// Generator settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSpec {
    pub dim: usize,
    pub clusters: usize,
    pub per_cluster: usize,
    pub shape: Shape,
    pub noise_fraction: f64,
    pub seed: u64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec { dim: 2, clusters: 4, per_cluster: 1000, shape: Shape::Gaussian, noise_fraction: 0.05, seed: 0 }
    }
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(invalid("dim must be at least 1"));
        }
        if self.clusters == 0 || self.per_cluster == 0 {
            return Err(invalid("clusters and per_cluster must be at least 1"));
        }
        if self.dim < usize::BITS as usize && self.clusters > 1usize << self.dim {
            return Err(invalid(format!("at most {} clusters fit on the corners in dimension {}", 1usize << self.dim, self.dim)));
        }
        if !(0.0..1.0).contains(&self.noise_fraction) {
            return Err(invalid(format!("noise_fraction must lie in [0, 1), got {}", self.noise_fraction)));
        }
        Ok(())
    }

    /// Cluster radius used by the density measure: the ball radius, or 3σ
    /// for Gaussian clusters.
    pub fn radius(&self) -> f64 {
        match self.shape {
            Shape::UniformBall => BALL_RADIUS,
            Shape::Gaussian => 3.0 * SIGMA,
        }
    }

    pub fn centre(&self, c: usize) -> Vec<f64> {
        (0..self.dim)
            .map(|k| if k < usize::BITS as usize && (c >> k) & 1 == 1 { CORNER_HI } else { CORNER_LO })
            .collect()
    }

    pub fn cluster_points(&self) -> usize {
        self.clusters * self.per_cluster
    }

    /// `round(noise_fraction · cluster_points())`.
    pub fn noise_points(&self) -> usize {
        (self.noise_fraction * self.cluster_points() as f64).round() as usize
    }
}

/// Points and their generating cluster (`-1` for noise). Cluster points come
/// first, cluster by cluster, then the noise.
pub fn generate<T: Scalar>(spec: &DatasetSpec) -> Result<(PointSet<T>, Vec<i64>)> {
    spec.validate()?;
    let d = spec.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, SIGMA).expect("valid sigma");
    let mut coords: Vec<f64> = Vec::with_capacity((spec.cluster_points() + spec.noise_points()) * d);
    let mut labels = Vec::with_capacity(coords.capacity() / d);
    let mut offset = vec![0.0; d];
    for c in 0..spec.clusters {
        let centre = spec.centre(c);
        for _ in 0..spec.per_cluster {
            match spec.shape {
                Shape::Gaussian => offset.iter_mut().for_each(|o| *o = normal.sample(&mut rng)),
                Shape::UniformBall => loop {
                    offset.iter_mut().for_each(|o| *o = rng.random_range(-BALL_RADIUS..=BALL_RADIUS));
                    if offset.iter().map(|o| o * o).sum::<f64>() <= BALL_RADIUS * BALL_RADIUS {
                        break;
                    }
                },
            }
            coords.extend(centre.iter().zip(&offset).map(|(c, o)| c + o));
            labels.push(c as i64);
        }
    }
    let noise = spec.noise_points();
    if noise > 0 {
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in coords.chunks(d) {
            for k in 0..d {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        for k in 0..d {
            let pad = NOISE_MARGIN * (hi[k] - lo[k]);
            lo[k] -= pad;
            hi[k] += pad;
        }
        for _ in 0..noise {
            for k in 0..d {
                coords.push(if lo[k] < hi[k] { rng.random_range(lo[k]..hi[k]) } else { lo[k] });
            }
            labels.push(-1);
        }
    }
    let ps = PointSet::from_flat(d, coords.into_iter().map(T::of_f64).collect())?;
    Ok((ps, labels))
}

/// Expected number of cluster points within ε of a cluster point:
/// `n · (ε / r)^d`.
pub fn density(n_per_cluster: usize, r: f64, eps: f64, d: usize) -> f64 {
    n_per_cluster as f64 * (eps / r).powi(d as i32)
}

/// The ε at which [`density`] equals `target`.
pub fn eps_for_density(n_per_cluster: usize, r: f64, target: f64, d: usize) -> Result<f64> {
    if n_per_cluster == 0 || d == 0 || !(r > 0.0) || !(target > 0.0) || !target.is_finite() || !r.is_finite() {
        return Err(invalid(format!("cannot solve density {target} for n = {n_per_cluster}, r = {r}, d = {d}")));
    }
    Ok(r * (target / n_per_cluster as f64).powf(1.0 / d as f64))
}

/// Algorithms the sweeps can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    NewStrip,
    NewGrid,
    Original,
}

impl Algorithm {
    pub fn id(self) -> &'static str {
        match self {
            Algorithm::NewStrip => "new_strip",
            Algorithm::NewGrid => "new_grid",
            Algorithm::Original => "original",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "new_strip" => Ok(Algorithm::NewStrip),
            "new_grid" => Ok(Algorithm::NewGrid),
            "original" => Ok(Algorithm::Original),
            _ => Err(invalid(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// One measured run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub dim: usize,
    pub n: usize,
    pub eps: f64,
    pub min_pts: usize,
    pub delta: Option<f64>,
    pub wall_ms: f64,
    pub distance_computations: u64,
    pub seeds: u64,
    /// Sizes of the four largest clusters, zero-padded.
    pub largest: [usize; 4],
    pub dataset_seed: u64,
}

/// Settings shared by every run of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub min_pts: usize,
    pub variant: Variant,
    pub pair_check: PairCheck,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings { min_pts: 4, variant: Variant::Dbscan, pair_check: PairCheck::RandomizedBrute }
    }
}

/// Runs one algorithm and records its counters. The meter seed is the
/// dataset seed.
pub fn run_one(
    ps: &PointSet<f64>,
    spec: &DatasetSpec,
    eps: f64,
    settings: RunSettings,
    algorithm: Algorithm,
) -> Result<(RunRecord, Labeling)> {
    let params = Params::new(eps, settings.min_pts, settings.variant)?;
    let mut meter = Meter::with_seed(spec.seed);
    let start = Instant::now();
    let labeling = match algorithm {
        Algorithm::NewStrip => dbscan(ps, &params, BoxMode::Strip, settings.pair_check, &mut meter)?,
        Algorithm::NewGrid => dbscan(ps, &params, BoxMode::Grid, settings.pair_check, &mut meter)?,
        Algorithm::Original => original_dbscan(ps, &params, &mut meter)?,
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut largest = [0; 4];
    for (slot, s) in largest.iter_mut().zip(labeling.cluster_sizes()) {
        *slot = s;
    }
    let record = RunRecord {
        algorithm,
        dim: ps.dim(),
        n: ps.len(),
        eps,
        min_pts: settings.min_pts,
        delta: None,
        wall_ms,
        distance_computations: meter.distance_computations,
        seeds: meter.seeds,
        largest,
        dataset_seed: spec.seed,
    };
    Ok((record, labeling))
}

/// Fixed data, varying ε: one record per `(eps, algorithm)` in that order.
pub fn sweep_eps(spec: &DatasetSpec, eps_values: &[f64], algorithms: &[Algorithm], settings: RunSettings) -> Result<Vec<RunRecord>> {
    let (ps, _) = generate::<f64>(spec)?;
    let mut out = Vec::with_capacity(eps_values.len() * algorithms.len());
    for &eps in eps_values {
        for &a in algorithms {
            out.push(run_one(&ps, spec, eps, settings, a)?.0);
        }
    }
    Ok(out)
}

/// Fixed density, varying cluster size: for each size ε is solved from the
/// density equation and the data regenerated.
pub fn sweep_size(
    template: &DatasetSpec,
    sizes: &[usize],
    fixed_density: f64,
    algorithms: &[Algorithm],
    settings: RunSettings,
) -> Result<Vec<RunRecord>> {
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("sizes must be ascending"));
    }
    let mut out = Vec::new();
    for &n in sizes {
        let spec = DatasetSpec { per_cluster: n, ..template.clone() };
        let eps = eps_for_density(n, spec.radius(), fixed_density, spec.dim)?;
        let (ps, _) = generate::<f64>(&spec)?;
        for &a in algorithms {
            out.push(run_one(&ps, &spec, eps, settings, a)?.0);
        }
    }
    Ok(out)
}

pub const CSV_HEADER: [&str; 14] = [
    "algorithm", "dim", "n", "eps", "min_pts", "delta", "wall_ms", "dist_comps", "seeds", "c1", "c2", "c3", "c4",
    "dataset_seed",
];

/// `x` with `sig` significant digits, formatted like C's `%g`.
pub fn format_g(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

/// Writes the records with a header row.
pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let to_err = |e: csv::Error| crate::Error::Internal(format!("csv output failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(to_err)?;
    for r in records {
        let row = [
            r.algorithm.id().to_string(),
            r.dim.to_string(),
            r.n.to_string(),
            format_g(r.eps, 12),
            r.min_pts.to_string(),
            r.delta.map(|d| format_g(d, 6)).unwrap_or_default(),
            format_g(r.wall_ms, 6),
            r.distance_computations.to_string(),
            r.seeds.to_string(),
            r.largest[0].to_string(),
            r.largest[1].to_string(),
            r.largest[2].to_string(),
            r.largest[3].to_string(),
            r.dataset_seed.to_string(),
        ];
        w.write_record(&row).map_err(to_err)?;
    }
    w.flush().map_err(|e| crate::Error::Internal(format!("csv output failed: {e}")))?;
    Ok(())
}

/// Least-squares line `y = slope · x + intercept` and its R².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(invalid("linear fit needs two equally long series of at least two values"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("x values are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit { slope, intercept, r_squared })
}
