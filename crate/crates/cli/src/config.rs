//! Benchmark configuration files.

use std::path::PathBuf;

use anyhow::{bail, Result};
use boxclust::bench::{
    density, eps_for_density, linear_fit, sweep_eps, sweep_size, Algorithm, DatasetSpec, RunRecord, RunSettings,
};
use serde::Deserialize;

use crate::{PairCheckArg, VariantArg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Fixed data, the listed `eps` values.
    Eps,
    /// Fixed data, ε solved from each of the listed `densities`.
    Density,
    /// Listed cluster `sizes` at one fixed `density`.
    Size,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub sweep: SweepKind,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_min_pts")]
    pub min_pts: usize,
    #[serde(default)]
    pub variant: VariantArg,
    #[serde(default)]
    pub pair_check: PairCheckArg,
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub densities: Vec<f64>,
    #[serde(default)]
    pub sizes: Vec<usize>,
    pub density: Option<f64>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub dataset: DatasetSpec,
}

fn default_min_pts() -> usize {
    4
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: BenchConfig = toml::from_str(text)?;
        if cfg.algorithms.is_empty() {
            bail!("no algorithms listed");
        }
        let (list, name) = match cfg.sweep {
            SweepKind::Eps => (cfg.eps.len(), "eps"),
            SweepKind::Density => (cfg.densities.len(), "densities"),
            SweepKind::Size => (cfg.sizes.len(), "sizes"),
        };
        if list == 0 {
            bail!("a {:?} sweep needs a non-empty `{name}` list", cfg.sweep);
        }
        if cfg.sweep == SweepKind::Size && cfg.density.is_none() {
            bail!("a size sweep needs `density`");
        }
        cfg.dataset.validate()?;
        Ok(cfg)
    }

    fn settings(&self) -> RunSettings {
        RunSettings { min_pts: self.min_pts, variant: self.variant.into(), pair_check: self.pair_check.into() }
    }

    pub fn run(&self) -> Result<Vec<RunRecord>> {
        let spec = &self.dataset;
        let records = match self.sweep {
            SweepKind::Eps => sweep_eps(spec, &self.eps, &self.algorithms, self.settings())?,
            SweepKind::Density => {
                let eps = self
                    .densities
                    .iter()
                    .map(|&t| eps_for_density(spec.per_cluster, spec.radius(), t, spec.dim))
                    .collect::<boxclust::Result<Vec<f64>>>()?;
                sweep_eps(spec, &eps, &self.algorithms, self.settings())?
            }
            SweepKind::Size => {
                let fixed = self.density.expect("checked in parse");
                sweep_size(spec, &self.sizes, fixed, &self.algorithms, self.settings())?
            }
        };
        Ok(records)
    }

    /// Per-algorithm table of the counters and their last/first ratios.
    /// Wall time is left out so the summary is reproducible.
    pub fn summary(&self, records: &[RunRecord]) -> String {
        let spec = &self.dataset;
        let mut s = String::new();
        for &a in &self.algorithms {
            let rows: Vec<&RunRecord> = records.iter().filter(|r| r.algorithm == a).collect();
            let dens: Vec<f64> = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let per_cluster = if self.sweep == SweepKind::Size { self.sizes[i] } else { spec.per_cluster };
                    density(per_cluster, spec.radius(), r.eps, r.dim)
                })
                .collect();
            s += &format!("{a}\n");
            s += &format!("  {:>9} {:>14} {:>10} {:>14} {:>14}\n", "n", "eps", "density", "dist_comps", "seeds");
            for (r, d) in rows.iter().zip(&dens) {
                s += &format!(
                    "  {:>9} {:>14.6} {:>10.3} {:>14} {:>14}\n",
                    r.n, r.eps, d, r.distance_computations, r.seeds
                );
            }
            if let (Some(f), Some(l)) = (rows.first(), rows.last()) {
                let ratio = |a: f64, b: f64| if a == 0.0 { f64::NAN } else { b / a };
                s += &format!(
                    "  last/first: n {:.4} density {:.4} dist_comps {:.4} seeds {:.4}\n",
                    ratio(f.n as f64, l.n as f64),
                    ratio(dens[0], dens[dens.len() - 1]),
                    ratio(f.distance_computations as f64, l.distance_computations as f64),
                    ratio(f.seeds as f64, l.seeds as f64),
                );
                let seeds: Vec<f64> = rows.iter().map(|r| r.seeds as f64).collect();
                if let Ok(fit) = linear_fit(&dens, &seeds) {
                    if fit.slope != 0.0 {
                        s += &format!("  seeds vs density: slope {:.4} r2 {:.6}\n", fit.slope, fit.r_squared);
                    }
                }
            }
        }
        s
    }
}
