use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hf2d::dualvar::QDescriptor;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Subcommand, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Tabulate Phi over a radius range
    #[default]
    Kernel,
    /// Apply the outgoing resolvent to a field dump (or a Gaussian)
    Resolve,
    /// Dyadic, truncated and endpoint scan tables
    Estimates,
    /// Solve u = R(Q|u|^{p-2}u)
    Solve,
    /// Far-field trace and prediction errors of a field dump
    Farfield,
    /// Radial shooting solution
    Oracle,
    /// Phi = Phi1 + Phi2 decay profiles
    Decomp,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Kernel => "kernel",
            Command::Resolve => "resolve",
            Command::Estimates => "estimates",
            Command::Solve => "solve",
            Command::Farfield => "farfield",
            Command::Oracle => "oracle",
            Command::Decomp => "decomp",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    FixedPoint,
    Dual,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    Dyadic,
    Truncated,
    Endpoint,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    pub h: f64,
}

/// A named preset with optional parameter overrides, or a descriptor file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct QConfig {
    pub preset: Option<String>,
    pub file: Option<PathBuf>,
    pub q0: Option<f64>,
    pub width: Option<f64>,
    pub q1: Option<f64>,
    pub radius: Option<f64>,
    pub edge: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub subcommand: Command,
    pub grid: GridConfig,
    pub p: f64,
    pub q: QConfig,
    pub mode: SolveMode,
    pub tol: f64,
    pub max_iter: usize,
    /// Damping; the solver default when absent.
    pub theta: Option<f64>,
    pub seed: u64,
    pub out: PathBuf,
    /// Input field dump for `resolve` and `farfield`.
    pub input: Option<PathBuf>,
    /// Radius range and sample count for `kernel`.
    pub r_range: [f64; 2],
    pub points: usize,
    pub annuli: Vec<[f64; 2]>,
    pub cesaro_radii: Vec<f64>,
    pub scan: ScanKind,
    pub probes: usize,
    pub a_bracket: [f64; 2],
    pub r_max: f64,
    pub angles: usize,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            subcommand: Command::Kernel,
            grid: GridConfig { n: 512, h: 2.0 * PI / 16.0 },
            p: 6.0,
            q: QConfig::default(),
            mode: SolveMode::FixedPoint,
            tol: 1e-6,
            max_iter: 200,
            theta: None,
            seed: 0,
            out: PathBuf::from("hf2d-out"),
            input: None,
            r_range: [1e-3, 100.0],
            points: 1000,
            annuli: vec![[20.0, 30.0], [50.0, 60.0], [80.0, 100.0]],
            cesaro_radii: vec![5.0, 10.0, 20.0, 40.0, 80.0],
            scan: ScanKind::All,
            probes: 24,
            a_bracket: [1.9, 2.0],
            r_max: 200.0,
            angles: hf2d::farfield::DEFAULT_ANGLES,
            threads: None,
        }
    }
}

/// Spacing as a number or `<a>pi/<b>`, e.g. `2pi/16`.
pub fn parse_spacing(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once("pi/") {
        let a = if num.is_empty() { 1.0 } else { num.parse::<f64>().map_err(|e| e.to_string())? };
        let b = den.parse::<f64>().map_err(|e| e.to_string())?;
        return Ok(a * PI / b);
    }
    s.parse::<f64>().map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> Result<GridConfig, String> {
    let (n, h) = s.split_once(',').ok_or("expected n,h")?;
    Ok(GridConfig { n: n.trim().parse().map_err(|e| format!("{e}"))?, h: parse_spacing(h)? })
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or("expected a,b")?;
    Ok([a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?])
}

#[derive(Parser, Debug)]
#[command(name = "hf2d", version, about = "Outgoing Helmholtz resolvent experiments in the plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

/// Every flag overrides the matching field of `--config`.
#[derive(Args, Debug, Default)]
pub struct Flags {
    /// JSON config file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: hf2d-out]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Grid as n,h; h may be written 2pi/16 [default: 512,2pi/16]
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<GridConfig>,
    /// Nonlinearity exponent [default: 6]
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Weight: gaussian, cosine-lattice, disc, or a JSON descriptor file [default: gaussian]
    #[arg(long = "Q", alias = "q", global = true)]
    pub q: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<SolveMode>,
    /// Relative residual tolerance [default: 1e-6]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// [default: 200]
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// Seed for probes and initial perturbations [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Radius range r0,r1 of the kernel table [default: 1e-3,100]
    #[arg(long, global = true, value_parser = parse_pair)]
    pub r_range: Option<[f64; 2]>,
    /// [default: 1000]
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Annulus r_in,r_out; repeatable
    #[arg(long = "annulus", global = true, value_parser = parse_pair)]
    pub annuli: Vec<[f64; 2]>,
    #[arg(long, global = true, value_enum)]
    pub scan: Option<ScanKind>,
    /// [default: 24]
    #[arg(long, global = true)]
    pub probes: Option<usize>,
    /// Shooting bracket a0,a1 [default: 1.9,2.0]
    #[arg(long = "a-bracket", global = true, value_parser = parse_pair)]
    pub a_bracket: Option<[f64; 2]>,
    /// Matching radius of the oracle [default: 200]
    #[arg(long = "Rmax", alias = "r-max", global = true)]
    pub r_max: Option<f64>,
    /// Angles of the far-field trace [default: 256]
    #[arg(long, global = true)]
    pub angles: Option<usize>,
    /// Worker cap; falls back to HF2D_THREADS
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

/// Reads `--config` if given, then applies the flags on top and validates.
pub fn parse_config(command: Command, flags: &Flags) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &flags.config {
        Some(path) => load_file(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.subcommand = command;
    macro_rules! take {
        ($($f:ident),*) => {$(if let Some(v) = flags.$f.clone() { cfg.$f = v; })*};
    }
    take!(out, grid, p, mode, tol, max_iter, seed, scan, probes, a_bracket, r_max, angles, r_range, points);
    if flags.theta.is_some() {
        cfg.theta = flags.theta;
    }
    if flags.input.is_some() {
        cfg.input = flags.input.clone();
    }
    if flags.threads.is_some() {
        cfg.threads = flags.threads;
    }
    if !flags.annuli.is_empty() {
        cfg.annuli = flags.annuli.clone();
    }
    if let Some(q) = &flags.q {
        cfg.q = if is_preset(q) {
            QConfig { preset: Some(q.clone()), ..QConfig::default() }
        } else {
            QConfig { file: Some(PathBuf::from(q)), ..QConfig::default() }
        };
    }
    validate(&cfg)?;
    Ok(cfg)
}

pub fn load_file(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn is_preset(name: &str) -> bool {
    matches!(name, "gaussian" | "cosine-lattice" | "disc")
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn validate(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    let g = cfg.grid;
    if g.n < 16 || !g.n.is_power_of_two() {
        bail!("grid.n: {} is not a power of two >= 16", g.n);
    }
    if !(g.h > 0.0 && g.h.is_finite()) {
        bail!("grid.h: spacing must be positive, got {}", g.h);
    }
    if !(cfg.p >= 6.0 && cfg.p.is_finite()) {
        bail!("p: exponent must be >= 6, got {}", cfg.p);
    }
    if !(cfg.tol >= 0.0) {
        bail!("tol: must be non-negative");
    }
    if let Some(t) = cfg.theta {
        if !(t > 0.0 && t <= 1.0) {
            bail!("theta: damping must lie in (0, 1], got {t}");
        }
    }
    if let Some(name) = &cfg.q.preset {
        if !is_preset(name) {
            bail!("q.preset: unknown preset {name:?} (gaussian, cosine-lattice, disc)");
        }
    }
    if cfg.q.preset.is_some() && cfg.q.file.is_some() {
        bail!("q: give either a preset or a descriptor file");
    }
    let half = 0.5 * g.h * g.n as f64;
    let uses_annuli = matches!(cfg.subcommand, Command::Farfield);
    if uses_annuli {
        for a in &cfg.annuli {
            if !(a[0] >= 0.0 && a[1] > a[0]) {
                bail!("annuli: invalid annulus [{}, {}]", a[0], a[1]);
            }
            if a[1] > half {
                bail!("annuli: radius {} exceeds the half-width h*n/2 = {half:.3}", a[1]);
            }
        }
    }
    let [r0, r1] = cfg.r_range;
    if !(r0 > 0.0 && r1 > r0) || cfg.points < 2 {
        bail!("r_range: need 0 < r0 < r1 and at least two points");
    }
    if cfg.probes == 0 {
        bail!("probes: need at least one probe");
    }
    if !(cfg.a_bracket[1] > cfg.a_bracket[0]) {
        bail!("a_bracket: empty bracket");
    }
    if !(cfg.r_max > 0.0) {
        bail!("r_max: must be positive");
    }
    if cfg.angles < 4 {
        bail!("angles: need at least 4");
    }
    if cfg.threads == Some(0) {
        bail!("threads: must be at least 1");
    }
    Ok(())
}

/// Resolves the weight of `cfg`; the Gaussian `2 e^{-|x|^2}` by default.
pub fn q_descriptor(cfg: &ExperimentConfig) -> anyhow::Result<QDescriptor> {
    let q = &cfg.q;
    let d = if let Some(path) = &q.file {
        let text = std::fs::read_to_string(path).with_context(|| format!("q.file: reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("q.file: parsing {}", path.display()))?
    } else {
        match q.preset.as_deref().unwrap_or("gaussian") {
            "gaussian" => QDescriptor::Gaussian { q0: q.q0.unwrap_or(2.0), width: q.width.unwrap_or(1.0) },
            "cosine-lattice" => QDescriptor::CosineLattice { q1: q.q1.unwrap_or(0.5) },
            "disc" => QDescriptor::Disc {
                q0: q.q0.unwrap_or(1.0),
                radius: q.radius.unwrap_or(1.0),
                edge: q.edge.unwrap_or(0.5),
            },
            other => bail!("q.preset: unknown preset {other:?}"),
        }
    };
    d.validate().map_err(|e| anyhow::anyhow!("q: {e}"))?;
    Ok(d)
}
