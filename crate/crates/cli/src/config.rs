use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Curves,
    Rightmost,
    Snmap,
    Releq,
    ZeroRoots,
    PhasediffCheck,
    Simulate,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    FullPhase,
    Phase,
    PhaseDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockArg {
    Fix,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EqArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    Newton,
    Halley,
}

/// Every run setting. Each field may come from the JSON config or a flag;
/// flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Number of nodes N.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub coupling: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Free-running frequency; results are reported in units where it is 1.
    #[arg(long)]
    pub omega_m: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum)]
    pub block: Option<BlockArg>,
    #[arg(long = "eq", value_enum)]
    #[serde(rename = "eq")]
    pub equilibrium: Option<EqArg>,
    /// `start:end:count`
    #[arg(long)]
    pub mu_grid: Option<String>,
    /// `start:end:count`
    #[arg(long = "K-grid")]
    #[serde(rename = "K_grid")]
    pub k_grid: Option<String>,
    /// `start:end:count`
    #[arg(long)]
    pub tau_grid: Option<String>,
    /// Winding range `first:last`.
    #[arg(long = "n")]
    #[serde(rename = "n")]
    pub n_range: Option<String>,
    /// Curve index range `first:last`.
    #[arg(long = "m")]
    #[serde(rename = "m")]
    pub m_range: Option<String>,
    /// `ω_M τ / π` for the phase-model equilibrium curves.
    #[arg(long)]
    pub half_turns: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Comma-separated node-space direction of the initial perturbation.
    #[arg(long)]
    pub direction: Option<String>,
    /// Rest-point constant of the phase-difference model.
    #[arg(long)]
    pub c_const: Option<f64>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional SVG line chart.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Worker threads, 0 = automatic.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Default)]
pub struct FileConfig {
    pub command: Option<Command>,
    pub settings: Settings,
}

impl FileConfig {
    pub fn from_json(text: &str) -> Result<FileConfig> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        let object = value.as_object_mut().context("config must be a JSON object")?;
        let command = match object.remove("command") {
            Some(c) => Some(serde_json::from_value(c).context("command")?),
            None => None,
        };
        let settings = serde_json::from_value(value)?;
        Ok(FileConfig { command, settings })
    }
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl Settings {
    /// `self` with every field set in `flags` replaced.
    pub fn overlay(mut self, flags: &Settings) -> Settings {
        overlay!(
            self, flags, model, nodes, coupling, mu, omega_m, tau, block, equilibrium, mu_grid, k_grid,
            tau_grid, n_range, m_range, half_turns, seed, samples, t_end, step, amplitude, direction,
            c_const, scheme, out, svg, threads
        );
        self
    }
}

pub fn load(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    FileConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Grid {
    pub fn parse(s: &str) -> Result<Grid> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("grid `{s}` is not start:end:count");
        }
        let start: f64 = parts[0].trim().parse().with_context(|| format!("grid start in `{s}`"))?;
        let end: f64 = parts[1].trim().parse().with_context(|| format!("grid end in `{s}`"))?;
        let count: usize = parts[2].trim().parse().with_context(|| format!("grid count in `{s}`"))?;
        if count < 2 {
            bail!("grid `{s}` needs at least 2 points");
        }
        if !(end > start) || !start.is_finite() || !end.is_finite() {
            bail!("grid `{s}` needs a positive extent");
        }
        Ok(Grid { start, end, count })
    }

    pub fn scaled(self, factor: f64) -> Grid {
        Grid {
            start: self.start * factor,
            end: self.end * factor,
            count: self.count,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let h = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + h * i as f64).collect()
    }
}

pub fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<i64>> {
    let (a, b) = s.split_once(':').with_context(|| format!("range `{s}` is not first:last"))?;
    let a: i64 = a.trim().parse().with_context(|| format!("range start in `{s}`"))?;
    let b: i64 = b.trim().parse().with_context(|| format!("range end in `{s}`"))?;
    if b < a {
        bail!("range `{s}` is empty");
    }
    Ok(a..=b)
}

pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("component `{v}` of `{s}`")))
        .collect()
}
