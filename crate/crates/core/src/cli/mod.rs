//! Batch driver: single solves, spatial and temporal convergence studies,
//! stability runs and the inf-sup diagnostic, all writing CSV.
//!
//! Settings are layered as flags > `--config` file > `--preset` > defaults.

mod csv;
mod study;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};

pub use csv::{format_snapshots, format_stability, format_study, STUDY_HEADER};
pub use study::{
    random_state, residual_gate, run_case, run_convergence, run_infsup, run_solve, run_stability,
    run_temporal_convergence, GATE_TOLERANCE,
    StabilityRun, StudyRow,
};

use crate::error::{invalid, Error, Result};
use crate::fespace::ElementFamily;
use crate::linalg::DEFAULT_SOLVER_TOL;
use crate::material::IsotropicMaterial;
use crate::mms::Example;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Solve,
    Convergence,
    TemporalConvergence,
    Stability,
    Infsup,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

/// Named study setups reproducing the reference convergence tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Table1,
    Table2,
    Table3,
    Table7,
    Table8,
    Table9,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "table1" => Self::Table1,
            "table2" => Self::Table2,
            "table3" => Self::Table3,
            "table7" => Self::Table7,
            "table8" => Self::Table8,
            "table9" => Self::Table9,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown preset '{other}' (available: table1, table2, table3, table7, table8, table9)"
                )))
            }
        })
    }
}

impl Preset {
    /// Mode, example, N list, M list and time step of the preset.
    fn expand(self) -> Layer {
        let spatial = |ex: u32| Layer {
            mode: Some(Mode::Convergence),
            example: Some(ex),
            nx: Some(vec![4, 8, 16, 32, 64]),
            dt: Some(0.005),
            t_final: Some(1.0),
            ..Layer::default()
        };
        let temporal = |ex: u32| Layer {
            mode: Some(Mode::TemporalConvergence),
            example: Some(ex),
            nt: Some(vec![4, 8, 12, 16]),
            t_final: Some(1.0),
            ..Layer::default()
        };
        match self {
            Self::Table1 => spatial(1),
            Self::Table2 => spatial(2),
            Self::Table3 => spatial(3),
            Self::Table7 => temporal(1),
            Self::Table8 => temporal(2),
            Self::Table9 => temporal(3),
        }
    }
}

fn parse_preset(s: &str) -> std::result::Result<Preset, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// One layer of optional settings; also the clap argument set.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "maxwell-mixed", version, about = "Mixed FEM solver for the Maxwell viscoelastic wave model")]
pub struct Layer {
    /// What to run.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Element pair: nedelec-q1q0 or hmz.
    #[arg(long)]
    pub element: Option<ElementFamily>,
    /// Manufactured solution 1, 2 or 3.
    #[arg(long)]
    pub example: Option<u32>,
    /// Mesh sizes N (N x N elements), comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub nx: Option<Vec<usize>>,
    /// Numbers of time steps M, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub nt: Option<Vec<usize>>,
    /// Time step; must divide the final time.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time T.
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Relative residual tolerance of the stress solve.
    #[arg(long)]
    pub solver_tol: Option<f64>,
    /// table1, table2, table3, table7, table8 or table9.
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// Keep every k-th time level for the snapshot file (solve mode).
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Vertex-rule lumping of the stress mass matrix (nedelec-q1q0 only).
    #[arg(long, action = clap::ArgAction::Set)]
    pub lumping: Option<bool>,
    /// Seed for random initial data in stability mode without an example.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Skip the manufactured-solution residual gate.
    #[arg(long, action = clap::ArgAction::SetTrue)]
    pub force: bool,
    /// key=value file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Layer {
    /// Fills every unset field of `self` from `lower`.
    fn over(self, lower: Layer) -> Layer {
        Layer {
            mode: self.mode.or(lower.mode),
            element: self.element.or(lower.element),
            example: self.example.or(lower.example),
            nx: self.nx.or(lower.nx),
            nt: self.nt.or(lower.nt),
            dt: self.dt.or(lower.dt),
            t_final: self.t_final.or(lower.t_final),
            rho: self.rho.or(lower.rho),
            mu: self.mu.or(lower.mu),
            lambda: self.lambda.or(lower.lambda),
            solver_tol: self.solver_tol.or(lower.solver_tol),
            preset: self.preset.or(lower.preset),
            snapshot_every: self.snapshot_every.or(lower.snapshot_every),
            out: self.out.or(lower.out),
            lumping: self.lumping.or(lower.lumping),
            seed: self.seed.or(lower.seed),
            force: self.force || lower.force,
            config: self.config.or(lower.config),
        }
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn from_config_text(text: &str) -> Result<Layer> {
        let mut argv = vec!["maxwell-mixed".to_string()];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return invalid(format!("config line {}: expected key=value, got '{line}'", lineno + 1));
            };
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            if key == "config" {
                return invalid("config files cannot include other config files");
            }
            if key == "force" {
                match value {
                    "true" => argv.push("--force".into()),
                    "false" => {}
                    _ => return invalid(format!("config line {}: force must be true or false", lineno + 1)),
                }
                continue;
            }
            argv.push(format!("--{key}"));
            argv.push(value.to_string());
        }
        Layer::try_parse_from(argv).map_err(|e| Error::InvalidArgument(format!("config file: {}", first_line(&e))))
    }

    pub fn from_config_file(path: &Path) -> Result<Layer> {
        Self::from_config_text(&std::fs::read_to_string(path)?)
    }
}

fn first_line(e: &clap::Error) -> String {
    let text = e.to_string();
    text.lines().next().unwrap_or("invalid entry").trim_start_matches("error: ").to_string()
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub element: ElementFamily,
    /// `None` only in stability mode, meaning `f = 0` with random initial data.
    pub example: Option<Example>,
    pub nx: Vec<usize>,
    pub nt: Vec<usize>,
    pub t_final: f64,
    pub material: IsotropicMaterial,
    pub solver_tol: f64,
    pub snapshot_every: usize,
    pub out: Option<PathBuf>,
    pub lumped: bool,
    pub seed: u64,
    pub force: bool,
}

impl RunConfig {
    /// Resolves flags over an optional config file, preset and defaults.
    pub fn resolve(flags: Layer) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => Layer::from_config_file(path)?,
            None => Layer::default(),
        };
        let merged = flags.over(file);
        let preset = merged.preset.map(Preset::expand).unwrap_or_default();
        Self::from_layer(merged.over(preset))
    }

    pub fn from_layer(l: Layer) -> Result<Self> {
        let mode = l.mode.unwrap_or(Mode::Solve);
        let element = l.element.unwrap_or(ElementFamily::Hmz);
        let t_final = l.t_final.unwrap_or(1.0);
        if !(t_final > 0.0 && t_final.is_finite()) {
            return invalid(format!("final time must be positive, got {t_final}"));
        }
        let example = match (l.example, mode) {
            (Some(id), _) => Some(Example::from_id(id)?),
            (None, Mode::Stability) => None,
            (None, _) => Some(Example::Polynomial),
        };
        let material = IsotropicMaterial::new(l.rho.unwrap_or(1.0), l.mu.unwrap_or(1.0), l.lambda.unwrap_or(1.0))?;
        let solver_tol = l.solver_tol.unwrap_or(DEFAULT_SOLVER_TOL);
        if !(solver_tol > 0.0 && solver_tol < 1.0) {
            return invalid(format!("solver tolerance must lie in (0, 1), got {solver_tol}"));
        }
        let lumped = l.lumping.unwrap_or(element == ElementFamily::NedelecQ1);
        if lumped && element == ElementFamily::Hmz {
            return invalid("lumping is only available for nedelec-q1q0");
        }

        let default_nx = match mode {
            Mode::Solve | Mode::Stability | Mode::Infsup => vec![8],
            _ => vec![4, 8, 16, 32, 64],
        };
        let mut nx = l.nx.unwrap_or(default_nx);
        if nx.is_empty() || nx.contains(&0) {
            return invalid("mesh sizes must be positive");
        }

        let nt = match mode {
            Mode::TemporalConvergence => {
                if l.dt.is_some() {
                    return invalid("temporal-convergence derives dt from --nt; do not pass --dt");
                }
                let nt = l.nt.unwrap_or_else(|| vec![4, 8, 12, 16]);
                if let Some(m) = nt.iter().find(|&&m| m == 0 || m % 2 != 0) {
                    return invalid(format!("N = M^2/4 needs even M, got {m}"));
                }
                nx = nt.iter().map(|m| m * m / 4).collect();
                nt
            }
            _ => vec![steps_from(l.dt, l.nt.as_deref(), t_final)?],
        };
        if matches!(mode, Mode::Solve | Mode::Stability) && nx.len() != 1 {
            return invalid(format!("{mode} mode takes a single mesh size, got {}", nx.len()));
        }
        if matches!(mode, Mode::Convergence | Mode::TemporalConvergence) {
            let sizes = if mode == Mode::Convergence { &nx } else { &nt };
            if sizes.windows(2).any(|w| w[1] <= w[0]) {
                return invalid("refinement lists must be strictly increasing");
            }
        }
        let snapshot_every = l.snapshot_every.unwrap_or(0);
        if snapshot_every > 0 && (mode != Mode::Solve || l.out.is_none()) {
            return invalid("--snapshot-every needs solve mode and --out");
        }
        Ok(Self {
            mode,
            element,
            example,
            nx,
            nt,
            t_final,
            material,
            solver_tol,
            snapshot_every,
            out: l.out,
            lumped,
            seed: l.seed.unwrap_or(0),
            force: l.force,
        })
    }

    /// Path of the snapshot file next to the main output.
    pub fn snapshot_path(&self) -> Option<PathBuf> {
        let out = self.out.as_ref()?;
        let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Some(out.with_file_name(format!("{stem}_snapshots.csv")))
    }
}

/// `M` from `dt` and/or a single-entry `--nt`; defaults to `dt = 0.005`.
fn steps_from(dt: Option<f64>, nt: Option<&[usize]>, t_final: f64) -> Result<usize> {
    let from_nt = match nt {
        Some([m]) if *m > 0 => Some(*m),
        Some([_]) => return invalid("number of time steps must be positive"),
        Some(list) => return invalid(format!("this mode takes a single --nt value, got {}", list.len())),
        None => None,
    };
    match (dt, from_nt) {
        (Some(dt), Some(m)) => {
            if ((dt * m as f64 - t_final) / t_final).abs() > 1e-9 {
                return invalid(format!("dt * M = {} differs from T = {t_final}", dt * m as f64));
            }
            Ok(m)
        }
        (None, Some(m)) => Ok(m),
        (dt, None) => Ok(crate::timestepper::TimeGrid::from_dt(t_final, dt.unwrap_or(0.005))?.steps()),
    }
}

/// Runs the configured mode and writes its CSV; returns the main CSV text.
pub fn execute(config: &RunConfig) -> Result<String> {
    let output = match config.mode {
        Mode::Convergence => format_study(&run_convergence(config)?),
        Mode::TemporalConvergence => format_study(&run_temporal_convergence(config)?),
        Mode::Solve => {
            let (row, snapshots) = run_solve(config)?;
            if let (Some(path), Some(text)) = (config.snapshot_path(), snapshots) {
                std::fs::write(path, text)?;
            }
            format_study(&[row])
        }
        Mode::Stability => format_stability(&run_stability(config)?),
        Mode::Infsup => {
            let mut text = String::from("N,beta_h\n");
            for (n, beta) in config.nx.iter().zip(run_infsup(config)?) {
                text.push_str(&format!("{n},{beta:.10e}\n"));
            }
            text
        }
    };
    if let Some(path) = &config.out {
        std::fs::write(path, &output)?;
    }
    Ok(output)
}
