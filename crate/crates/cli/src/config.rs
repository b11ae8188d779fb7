//! Run configuration: a JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RouteChoice {
    Radial,
    Schrodinger,
    Both,
}

/// Every setting any command reads. Absent values fall back to per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Singularity exponent of the metric
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Space dimension N
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Angular mode n
    #[arg(long, visible_alias = "n", global = true, allow_hyphen_values = true)]
    pub mode: Option<i64>,
    /// Number of eigenvalues, or the eigenvalue index for `decay`
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub eps_min: Option<f64>,
    #[arg(long, global = true)]
    pub eps_max: Option<f64>,
    #[arg(long, global = true)]
    pub eps_count: Option<usize>,
    /// Mesh nodes (or sample points for `potential`, grid cells per side for `geodesic`)
    #[arg(long, global = true)]
    pub mesh_nodes: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub route: Option<RouteChoice>,
    /// Refinement levels as `LO..HI`
    #[arg(long, global = true)]
    pub refine: Option<String>,
    /// Neighbour count of the geodesic stencil (8 or 16)
    #[arg(long, global = true)]
    pub stencil: Option<u32>,
    /// Random test functions for the norm chain
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Collar width for `bounds`
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Hardy constant for `bounds`; defaults to the closed form
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Spectral shift a
    #[arg(long, global = true)]
    pub shift: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }

    /// `self` wins wherever it is set.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            gamma: self.gamma.or(base.gamma),
            dim: self.dim.or(base.dim),
            mode: self.mode.or(base.mode),
            k: self.k.or(base.k),
            eps_min: self.eps_min.or(base.eps_min),
            eps_max: self.eps_max.or(base.eps_max),
            eps_count: self.eps_count.or(base.eps_count),
            mesh_nodes: self.mesh_nodes.or(base.mesh_nodes),
            format: self.format.or(base.format),
            out: self.out.or(base.out),
            seed: self.seed.or(base.seed),
            route: self.route.or(base.route),
            refine: self.refine.or(base.refine),
            stencil: self.stencil.or(base.stencil),
            samples: self.samples.or(base.samples),
            eps: self.eps.or(base.eps),
            c: self.c.or(base.c),
            shift: self.shift.or(base.shift),
        }
    }

    pub fn eps_range(&self, lo: f64, hi: f64, count: usize) -> (f64, f64, usize) {
        (
            self.eps_min.unwrap_or(lo),
            self.eps_max.unwrap_or(hi),
            self.eps_count.unwrap_or(count),
        )
    }

    pub fn refine_levels(&self) -> Result<std::ops::RangeInclusive<u32>, CliError> {
        let text = self.refine.as_deref().unwrap_or("7..12");
        let bad = || CliError::Validation(format!("--refine expects LO..HI, got {text:?}"));
        let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        Ok(lo..=hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: RunConfig = serde_json::from_str(r#"{"gamma": 0.1, "k": 5}"#).unwrap();
        let flags = RunConfig { gamma: Some(0.25), ..Default::default() };
        let merged = flags.over(file);
        assert_eq!(merged.gamma, Some(0.25));
        assert_eq!(merged.k, Some(5));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"gama": 0.1}"#).is_err());
    }

    #[test]
    fn refine_syntax() {
        let c = RunConfig { refine: Some("7..=10".into()), ..Default::default() };
        assert_eq!(c.refine_levels().unwrap(), 7..=10);
        let c = RunConfig { refine: Some("seven".into()), ..Default::default() };
        assert!(c.refine_levels().is_err());
    }
}
