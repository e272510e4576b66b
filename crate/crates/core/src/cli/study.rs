use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{format_snapshots, Mode, RunConfig};
use crate::analysis::{convergence_orders, discrete_infsup, ErrorRecord};
use crate::error::{invalid, Error, Result};
use crate::fespace::ElementFamily;
use crate::material::IsotropicMaterial;
use crate::mesh::{Point, StructuredMesh};
use crate::mms::{verify_residuals, Example, ExactSolution};
use crate::timestepper::{NodeDiagnostics, SimState, Simulation, TimeGrid};

/// Residual bound every manufactured solution must meet before a study runs.
pub const GATE_TOLERANCE: f64 = 1e-8;
const GATE_SAMPLES: usize = 1000;

/// One line of a convergence table; orders are relative to the previous row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub record: ErrorRecord,
    pub order_sigma: Option<f64>,
    pub order_v: Option<f64>,
}

/// Checks the exact fields against the model equations for the configured
/// material, unless `force` is set.
pub fn residual_gate(example: Example, material: &IsotropicMaterial, t_final: f64, force: bool) -> Result<()> {
    if force {
        return Ok(());
    }
    let exact = ExactSolution::new(example, material);
    let report = verify_residuals(&exact, material, GATE_SAMPLES, t_final)?;
    if report.max() > GATE_TOLERANCE {
        return Err(Error::ResidualGate(format!(
            "example {} violates the model for rho={}, mu={}, lambda={} (momentum {:.3e}, constitutive {:.3e}); pass --force to run anyway",
            example.id(),
            material.rho(),
            material.mu(),
            material.lambda(),
            report.momentum,
            report.constitutive
        )));
    }
    Ok(())
}

/// Solves one manufactured-solution case and returns its max-in-time errors.
#[allow(clippy::too_many_arguments)]
pub fn run_case(
    family: ElementFamily,
    example: Example,
    n: usize,
    steps: usize,
    t_final: f64,
    material: IsotropicMaterial,
    lumped: bool,
    tol: f64,
) -> Result<ErrorRecord> {
    let (sim, exact) = setup(family, example, n, steps, t_final, material, lumped, tol)?;
    let forcing = |p: Point, t: f64| exact.f(p, t);
    let traj = sim.run(sim.init_exact(&exact), Some(&forcing), Some(&exact), 0)?;
    record_of(n, &sim, &traj)
}

#[allow(clippy::too_many_arguments)]
fn setup(
    family: ElementFamily,
    example: Example,
    n: usize,
    steps: usize,
    t_final: f64,
    material: IsotropicMaterial,
    lumped: bool,
    tol: f64,
) -> Result<(Simulation, ExactSolution)> {
    let mesh = StructuredMesh::unit_square(n)?;
    let grid = TimeGrid::new(t_final, steps)?;
    let sim = Simulation::new(&mesh, family, material, lumped, grid, tol)?;
    Ok((sim, ExactSolution::new(example, &material)))
}

fn record_of(n: usize, sim: &Simulation, traj: &crate::timestepper::Trajectory) -> Result<ErrorRecord> {
    let (e_a_sigma, argmax_sigma, e_c_v, argmax_v) =
        traj.max_errors().ok_or_else(|| Error::InvalidArgument("run tracked no errors".into()))?;
    Ok(ErrorRecord {
        n,
        m: sim.grid.steps(),
        dt: sim.grid.dt(),
        e_a_sigma,
        e_c_v,
        argmax_sigma,
        argmax_v,
    })
}

fn require_example(config: &RunConfig) -> Result<Example> {
    match config.example {
        Some(ex) => Ok(ex),
        None => invalid(format!("{} mode needs --example", config.mode)),
    }
}

fn rows_with_orders(records: Vec<ErrorRecord>, params: &[f64]) -> Result<Vec<StudyRow>> {
    let es: Vec<f64> = records.iter().map(|r| r.e_a_sigma).collect();
    let ev: Vec<f64> = records.iter().map(|r| r.e_c_v).collect();
    let os = convergence_orders(params, &es)?;
    let ov = convergence_orders(params, &ev)?;
    Ok(records
        .into_iter()
        .enumerate()
        .map(|(i, record)| StudyRow {
            record,
            order_sigma: i.checked_sub(1).map(|k| os[k]),
            order_v: i.checked_sub(1).map(|k| ov[k]),
        })
        .collect())
}

fn run_cases(config: &RunConfig, cases: &[(usize, usize)]) -> Result<Vec<ErrorRecord>> {
    let example = require_example(config)?;
    residual_gate(example, &config.material, config.t_final, config.force)?;
    cases
        .par_iter()
        .map(|&(n, m)| {
            run_case(config.element, example, n, m, config.t_final, config.material, config.lumped, config.solver_tol)
        })
        .collect()
}

/// Spatial study: every N in `config.nx` at the single time step `config.nt[0]`.
pub fn run_convergence(config: &RunConfig) -> Result<Vec<StudyRow>> {
    if config.mode != Mode::Convergence {
        return invalid("run_convergence needs convergence mode");
    }
    let &[m] = config.nt.as_slice() else {
        return invalid("convergence mode takes a single time step count");
    };
    let cases: Vec<_> = config.nx.iter().map(|&n| (n, m)).collect();
    let records = run_cases(config, &cases)?;
    let params: Vec<f64> = config.nx.iter().map(|&n| n as f64).collect();
    rows_with_orders(records, &params)
}

/// Synchronous study with `N = M^2 / 4`; orders are taken against `M`.
pub fn run_temporal_convergence(config: &RunConfig) -> Result<Vec<StudyRow>> {
    if config.mode != Mode::TemporalConvergence {
        return invalid("run_temporal_convergence needs temporal-convergence mode");
    }
    if let Some(m) = config.nt.iter().find(|&&m| m == 0 || m % 2 != 0) {
        return invalid(format!("N = M^2/4 needs even M, got {m}"));
    }
    let cases: Vec<_> = config.nt.iter().map(|&m| (m * m / 4, m)).collect();
    let records = run_cases(config, &cases)?;
    let params: Vec<f64> = config.nt.iter().map(|&m| m as f64).collect();
    rows_with_orders(records, &params)
}

/// Single solve; also returns the snapshot CSV when snapshots were requested.
pub fn run_solve(config: &RunConfig) -> Result<(StudyRow, Option<String>)> {
    let example = require_example(config)?;
    residual_gate(example, &config.material, config.t_final, config.force)?;
    let (n, m) = (config.nx[0], config.nt[0]);
    let (sim, exact) =
        setup(config.element, example, n, m, config.t_final, config.material, config.lumped, config.solver_tol)?;
    let forcing = |p: Point, t: f64| exact.f(p, t);
    let traj = sim.run(sim.init_exact(&exact), Some(&forcing), Some(&exact), config.snapshot_every)?;
    let row = StudyRow { record: record_of(n, &sim, &traj)?, order_sigma: None, order_v: None };
    let snapshots = (config.snapshot_every > 0).then(|| format_snapshots(&sim, &traj.snapshots));
    Ok((row, snapshots))
}

/// Energy history of one stability run.
#[derive(Debug, Clone)]
pub struct StabilityRun {
    pub diagnostics: Vec<NodeDiagnostics>,
    pub initial_energy: f64,
    /// `(E^0 + T rho^-1 ||f||^2) exp(2T)`
    pub gronwall_bound: f64,
}

impl StabilityRun {
    pub fn final_energy(&self) -> f64 {
        self.diagnostics.last().map_or(self.initial_energy, |d| d.energy)
    }

    pub fn max_identity_defect(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.identity_defect(self.initial_energy)).fold(0.0, f64::max)
    }
}

/// Uniformly random coefficients in `[-1, 1]`.
pub fn random_state(stress_dim: usize, velocity_dim: usize, seed: u64) -> SimState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |k: usize| (0..k).map(|_| rng.gen_range(-1.0..=1.0)).collect::<Vec<f64>>();
    let alpha = draw(stress_dim);
    let beta = draw(velocity_dim);
    SimState { alpha, beta, t: 0.0 }
}

/// Energy run: with an example, its forcing and interpolated initial data;
/// without, `f = 0` and seeded random coefficients.
pub fn run_stability(config: &RunConfig) -> Result<StabilityRun> {
    let mesh = StructuredMesh::unit_square(config.nx[0])?;
    let grid = TimeGrid::new(config.t_final, config.nt[0])?;
    let sim = Simulation::new(&mesh, config.element, config.material, config.lumped, grid, config.solver_tol)?;
    let traj = match config.example {
        Some(example) => {
            residual_gate(example, &config.material, config.t_final, config.force)?;
            let exact = ExactSolution::new(example, &config.material);
            let forcing = |p: Point, t: f64| exact.f(p, t);
            sim.run(sim.init_exact(&exact), Some(&forcing), None, 0)?
        }
        None => sim.run(random_state(sim.stress.dim(), sim.velocity.dim(), config.seed), None, None, 0)?,
    };
    Ok(StabilityRun {
        initial_energy: traj.initial_energy(),
        gronwall_bound: traj.gronwall_bound(config.material.rho()),
        diagnostics: traj.diagnostics,
    })
}

/// Inf-sup constants for every mesh size in `config.nx`.
pub fn run_infsup(config: &RunConfig) -> Result<Vec<f64>> {
    discrete_infsup(&config.nx, config.element)
}
