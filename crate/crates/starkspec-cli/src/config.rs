//! Run configuration: a flat TOML document overridable by CLI flags.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use starkspec::subordinacy::SurveyConfig;

/// Flat, typed key-value configuration of a survey run. Every field has a
/// default; CLI flags override file values.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Potential description, e.g. `power_law{A=1,beta=0.5}`.
    pub potential: String,
    /// λ-grid: `a:b:n` (n points, inclusive) or a comma-separated list.
    pub lambda: String,
    pub xi0: f64,
    pub xi_max: f64,
    pub rtol: f64,
    pub integral6_tolerance: f64,
    pub subordinacy_low: f64,
    pub subordinacy_high: f64,
    pub workers: usize,
    pub plots: bool,
    pub trajectories: bool,
    pub output_dir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sc = SurveyConfig::default();
        RunConfig {
            potential: "zero".to_string(),
            lambda: "0".to_string(),
            xi0: sc.xi0,
            xi_max: sc.xi_max,
            rtol: sc.rtol,
            integral6_tolerance: sc.integral6_tolerance,
            subordinacy_low: sc.subordinacy_band.0,
            subordinacy_high: sc.subordinacy_band.1,
            workers: 0, // 0 = available parallelism
            plots: false,
            trajectories: false,
            output_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn survey_config(&self) -> SurveyConfig {
        SurveyConfig {
            xi0: self.xi0,
            xi_max: self.xi_max,
            rtol: self.rtol,
            integral6_tolerance: self.integral6_tolerance,
            subordinacy_band: (self.subordinacy_low, self.subordinacy_high),
            ..SurveyConfig::default()
        }
    }
}

/// Parse `a:b:n` (inclusive linspace) or a comma-separated list of values.
pub fn parse_lambda_grid(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let colon_parts: Vec<&str> = s.split(':').collect();
    if colon_parts.len() == 3 {
        let a: f64 = colon_parts[0].trim().parse().context("grid start")?;
        let b: f64 = colon_parts[1].trim().parse().context("grid end")?;
        let n: usize = colon_parts[2].trim().parse().context("grid count")?;
        if n == 0 {
            bail!("lambda grid needs at least one point");
        }
        if n == 1 {
            return Ok(vec![a]);
        }
        return Ok((0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect());
    }
    if colon_parts.len() != 1 {
        bail!("lambda grid must be `a:b:n` or a comma-separated list, got `{s}`");
    }
    let vals: Result<Vec<f64>> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid lambda `{p}`"))
        })
        .collect();
    let vals = vals?;
    if vals.is_empty() {
        bail!("empty lambda grid");
    }
    Ok(vals)
}

/// Default output directory: `$STARKSPEC_OUT_DIR` or the current directory.
pub fn output_dir(explicit: Option<&str>) -> std::path::PathBuf {
    if let Some(d) = explicit {
        return d.into();
    }
    if let Ok(d) = std::env::var("STARKSPEC_OUT_DIR") {
        if !d.is_empty() {
            return d.into();
        }
    }
    ".".into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_grid() {
        let g = parse_lambda_grid("-2:3:9").unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], -2.0);
        assert_eq!(g[8], 3.0);
        assert!((g[1] - (-1.375)).abs() < 1e-12);
    }

    #[test]
    fn list_grid() {
        assert_eq!(parse_lambda_grid("0").unwrap(), vec![0.0]);
        assert_eq!(parse_lambda_grid("0.5, 1.5").unwrap(), vec![0.5, 1.5]);
        assert!(parse_lambda_grid("a:b").is_err());
        assert!(parse_lambda_grid("1:2:0").is_err());
    }
}
