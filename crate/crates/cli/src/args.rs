//! Flag parsing and the defaults < flags < JSON file precedence.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    parse_config_json, parse_measures, parse_states, parse_weight, Channel, Command, Format, Layout, Repr, RunConfig,
    SigmaRule,
};
use crate::parse::{parse_count_grid, parse_grid, parse_scalar, parse_sites, ConfigError};

#[derive(Debug, Parser)]
#[command(name = "qmacro", version, about = "Coherence, asymmetry and macroscopicity of collective spin states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Measures on a grid of states.
    Measure(Flags),
    /// Per-mode asymmetries, with exact sums for coherent states.
    Modes(Flags),
    /// Measures against the particle number.
    SweepN(Flags),
    /// Measures against the observable's polar angle.
    SweepAxis(Flags),
    /// Measures along a dephasing or dissipative trajectory.
    Evolve(Flags),
    /// Runs the acceptance suite.
    Verify(Flags),
}

impl Sub {
    pub fn parts(&self) -> (Command, &Flags) {
        match self {
            Sub::Measure(f) => (Command::Measure, f),
            Sub::Modes(f) => (Command::Modes, f),
            Sub::SweepN(f) => (Command::SweepN, f),
            Sub::SweepAxis(f) => (Command::SweepAxis, f),
            Sub::Evolve(f) => (Command::Evolve, f),
            Sub::Verify(f) => (Command::Verify, f),
        }
    }
}

/// Grids accept `a,b,c`, `start:stop:count` and `lo..hi[:step]`; angles may
/// be written as multiples of `pi`.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// coherent, ghz, product (comma separated)
    #[arg(long)]
    pub state: Option<String>,
    /// Particle numbers.
    #[arg(long)]
    pub n: Option<String>,
    /// State polar angles.
    #[arg(long)]
    pub theta: Option<String>,
    /// State azimuth.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// Observable polar angles.
    #[arg(long)]
    pub axis_theta: Option<String>,
    /// Observable azimuths.
    #[arg(long, allow_hyphen_values = true)]
    pub axis_phi: Option<String>,
    /// Product-state site angles `theta,phi;theta,phi;...`.
    #[arg(long)]
    pub sites: Option<String>,
    /// tr, hs, sigma, skew, total (comma separated)
    #[arg(long)]
    pub measure: Option<String>,
    /// power:P, scaled:S, g-delta, g-gaussian:S, g-grid:x,g;..., concave:F:S
    #[arg(long)]
    pub weight: Option<String>,
    /// A positive number or `sqrt-NlogN`.
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long, value_enum)]
    pub repr: Option<Repr>,
    #[arg(long, value_enum)]
    pub channel: Option<Channel>,
    #[arg(long)]
    pub t_max: Option<String>,
    /// Time points for `evolve`.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum)]
    pub layout: Option<Layout>,
    /// Output file; a `<file>.json` sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON file overriding the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Criteria to run (`verify`), e.g. `1,2,5`.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Option<Vec<u32>>,
}

fn field<T>(name: &str, r: Result<T, String>) -> Result<T, ConfigError> { r.map_err(|m| ConfigError::new(name, m)) }

/// Builds the validated configuration for `command`.
pub fn resolve(command: Command, flags: &Flags) -> Result<RunConfig, ConfigError> {
    let mut c = RunConfig::defaults_for(command);
    if let Some(v) = &flags.state {
        c.states = field("state", parse_states(v))?;
    }
    if let Some(v) = &flags.n {
        c.n = field("n", parse_count_grid(v))?;
    }
    if let Some(v) = &flags.theta {
        c.theta = field("theta", parse_grid(v))?;
    }
    if let Some(v) = &flags.phi {
        c.phi = field("phi", parse_scalar(v))?;
    }
    if let Some(v) = &flags.axis_theta {
        c.axis_theta = field("axis-theta", parse_grid(v))?;
    }
    if let Some(v) = &flags.axis_phi {
        c.axis_phi = field("axis-phi", parse_grid(v))?;
    }
    if let Some(v) = &flags.sites {
        c.sites = Some(field("sites", parse_sites(v))?);
    }
    if let Some(v) = &flags.measure {
        c.measures = field("measure", parse_measures(v))?;
    }
    if let Some(v) = &flags.weight {
        c.weight = field("weight", parse_weight(v))?;
    }
    if let Some(v) = &flags.sigma {
        c.sigma = field("sigma", SigmaRule::parse(v))?;
    }
    if let Some(v) = flags.repr {
        c.repr = v;
    }
    if let Some(v) = flags.channel {
        c.channel = v;
    }
    if let Some(v) = &flags.t_max {
        c.t_max = Some(field("t-max", parse_scalar(v))?);
    }
    if let Some(v) = flags.points {
        c.points = v;
    }
    if let Some(v) = flags.format {
        c.format = v;
    }
    if let Some(v) = flags.layout {
        c.layout = v;
    }
    if let Some(v) = &flags.out {
        c.out = Some(v.clone());
    }
    if let Some(v) = flags.seed {
        c.seed = v;
    }
    if let Some(v) = &flags.criteria {
        c.criteria = v.clone();
    }
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        apply_json(&mut c, &text)?;
    }
    c.validate()?;
    Ok(c)
}

/// Overlays a JSON configuration; its `command`, if present, must match.
pub fn apply_json(c: &mut RunConfig, text: &str) -> Result<(), ConfigError> {
    let file = parse_config_json(text)?;
    if let Some(cmd) = file.command {
        if cmd != c.command {
            return Err(ConfigError::new("command", format!("file names {cmd:?}, but {:?} was invoked", c.command)));
        }
    }
    c.overlay(file)
}
