//! Crank-Nicolson stepping of the semi-discrete system
//!
//! ```text
//! (1/dt + 1/2) A a' + 1/2 B^T b' = (1/dt - 1/2) A a - 1/2 B^T b
//! -1/2 B a' + (1/dt) C b'       = 1/2 B a + (1/dt) C b + F^{n+1/2}
//! ```
//!
//! solved by eliminating the velocity through the block-diagonal `C`.

use crate::analysis::{energy, NormEvaluator};
use crate::assembly::{assemble_load, AssembledSystem};
use crate::error::{invalid, Result};
use crate::fespace::{ElementFamily, StressSpace, VelocitySpace};
use crate::linalg::{axpy, dot, BlockDiagInverse, SchurSolver};
use crate::material::{IsotropicMaterial, VoigtTensor};
use crate::mesh::{Point, StructuredMesh};
use crate::mms::ExactSolution;

/// Stress coefficients `alpha`, velocity coefficients `beta` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub t: f64,
}

impl SimState {
    pub fn zeros(stress_dim: usize, velocity_dim: usize) -> Self {
        Self { alpha: vec![0.0; stress_dim], beta: vec![0.0; velocity_dim], t: 0.0 }
    }
}

/// Uniform time grid `t_n = n * T / M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return invalid(format!("final time must be positive, got {t_final}"));
        }
        if steps == 0 {
            return invalid("at least one time step is required");
        }
        Ok(Self { t_final, steps })
    }

    /// Grid with step `dt`; `T / dt` must be an integer to within rounding.
    pub fn from_dt(t_final: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return invalid(format!("time step must be positive, got {dt}"));
        }
        let m = (t_final / dt).round();
        if m < 1.0 || ((m * dt - t_final) / t_final).abs() > 1e-9 {
            return invalid(format!("dt = {dt} does not divide T = {t_final}"));
        }
        Self::new(t_final, m as usize)
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn node(&self, n: usize) -> f64 {
        if n == self.steps {
            self.t_final
        } else {
            n as f64 * self.dt()
        }
    }
}

/// Prepared one-step map for fixed matrices and time step.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    system: AssembledSystem,
    c_inv: BlockDiagInverse,
    solver: SchurSolver,
    dt: f64,
}

impl CrankNicolson {
    pub fn new(system: AssembledSystem, dt: f64, tol: f64) -> Result<Self> {
        let c_inv = system.c_inverse()?;
        let solver = SchurSolver::new(&system.a, &system.b, &c_inv, dt, tol)?;
        Ok(Self { system, c_inv, solver, dt })
    }

    pub fn system(&self) -> &AssembledSystem {
        &self.system
    }

    pub fn solver(&self) -> &SchurSolver {
        &self.solver
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `state` by one step; `load_mid` is `(F(t_n) + F(t_{n+1})) / 2`, or `None` for `f = 0`.
    pub fn step(&self, state: &SimState, load_mid: Option<&[f64]>) -> Result<SimState> {
        let sys = &self.system;
        let dt = self.dt;
        if state.alpha.len() != sys.stress_dim() || state.beta.len() != sys.velocity_dim() {
            return invalid("state does not match the assembled system");
        }
        // g = 1/2 B alpha + F
        let mut g = sys.b.mul_vec(&state.alpha);
        g.iter_mut().for_each(|x| *x *= 0.5);
        if let Some(f) = load_mid {
            axpy(1.0, f, &mut g);
        }
        let mut w = self.c_inv.apply(&g);
        w.iter_mut().for_each(|x| *x *= 0.5 * dt);
        axpy(1.0, &state.beta, &mut w);
        let mut rhs = sys.a.mul_vec(&state.alpha);
        rhs.iter_mut().for_each(|x| *x *= 1.0 / dt - 0.5);
        axpy(-1.0, &sys.b.mul_transpose_vec(&w), &mut rhs);

        let alpha = self.solver.solve_from(&rhs, state.alpha.clone())?;

        // beta' = beta + dt C^-1 [1/2 B (alpha' + alpha) + F]
        let sum: Vec<f64> = alpha.iter().zip(&state.alpha).map(|(a, b)| a + b).collect();
        let mut g = sys.b.mul_vec(&sum);
        g.iter_mut().for_each(|x| *x *= 0.5);
        if let Some(f) = load_mid {
            axpy(1.0, f, &mut g);
        }
        let mut beta = self.c_inv.apply(&g);
        beta.iter_mut().for_each(|x| *x *= dt);
        axpy(1.0, &state.beta, &mut beta);
        Ok(SimState { alpha, beta, t: state.t + dt })
    }

    /// Max-norm residuals of the two step equations for `old -> new`.
    pub fn residuals(&self, old: &SimState, new: &SimState, load_mid: Option<&[f64]>) -> (f64, f64) {
        let sys = &self.system;
        let dt = self.dt;
        let a_new = sys.a.mul_vec(&new.alpha);
        let a_old = sys.a.mul_vec(&old.alpha);
        let bt_new = sys.b.mul_transpose_vec(&new.beta);
        let bt_old = sys.b.mul_transpose_vec(&old.beta);
        let first = (0..a_new.len())
            .map(|i| ((1.0 / dt + 0.5) * a_new[i] + 0.5 * bt_new[i] - (1.0 / dt - 0.5) * a_old[i] + 0.5 * bt_old[i]).abs())
            .fold(0.0, f64::max);
        let b_new = sys.b.mul_vec(&new.alpha);
        let b_old = sys.b.mul_vec(&old.alpha);
        let c_new = sys.c.mul_vec(&new.beta);
        let c_old = sys.c.mul_vec(&old.beta);
        let second = (0..b_new.len())
            .map(|i| {
                let f = load_mid.map_or(0.0, |l| l[i]);
                (-0.5 * b_new[i] + c_new[i] / dt - 0.5 * b_old[i] - c_old[i] / dt - f).abs()
            })
            .fold(0.0, f64::max);
        (first, second)
    }
}

/// Free-function form of [`CrankNicolson::step`].
pub fn cn_step(stepper: &CrankNicolson, state: &SimState, load_mid: Option<&[f64]>) -> Result<SimState> {
    stepper.step(state, load_mid)
}

/// `alpha = I_H psi0`, `beta = I_V phi1`, `t = 0`.
pub fn init_state(
    stress: &StressSpace,
    velocity: &VelocitySpace,
    psi0: impl Fn(Point) -> VoigtTensor,
    phi1: impl Fn(Point) -> [f64; 2],
) -> SimState {
    SimState { alpha: stress.interpolate(psi0), beta: velocity.interpolate(phi1), t: 0.0 }
}

/// Quantities tracked at one time node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeDiagnostics {
    pub n: usize,
    pub t: f64,
    /// `||sigma_h^n||_a^2 + ||v_h^n||_c^2` with the assembled matrices.
    pub energy: f64,
    /// `2 dt sum_{k<n} ||sigma_h^{k+1/2}||_a^2`
    pub dissipation: f64,
    /// `2 dt sum_{k<n} (f^{k+1/2}, v_h^{k+1/2})`
    pub work: f64,
    pub stress_error: Option<f64>,
    pub velocity_error: Option<f64>,
}

impl NodeDiagnostics {
    /// Relative mismatch of `E^n + dissipation = E^0 + work`.
    pub fn identity_defect(&self, initial_energy: f64) -> f64 {
        let lhs = self.energy + self.dissipation;
        let rhs = initial_energy + self.work;
        (lhs - rhs).abs() / rhs.abs().max(lhs.abs()).max(f64::MIN_POSITIVE)
    }
}

/// Per-node diagnostics plus retained snapshots of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub diagnostics: Vec<NodeDiagnostics>,
    /// Every `snapshot_every`-th state (always including the first and last).
    pub snapshots: Vec<SimState>,
    pub final_state: SimState,
    /// `max_n ||f(t_n)||_0`
    pub forcing_bound: f64,
}

impl Trajectory {
    pub fn initial_energy(&self) -> f64 {
        self.diagnostics[0].energy
    }

    /// Right side of the discrete Gronwall bound
    /// `(E^0 + T rho^-1 ||f||^2_{L^inf(L^2)}) exp(2T)`.
    pub fn gronwall_bound(&self, rho: f64) -> f64 {
        let t = self.grid.t_final();
        (self.initial_energy() + t / rho * self.forcing_bound.powi(2)) * (2.0 * t).exp()
    }

    /// Max-over-nodes errors for `n = 1..M`, with the maximizing indices.
    pub fn max_errors(&self) -> Option<(f64, usize, f64, usize)> {
        let mut out = (0.0, 0, 0.0, 0);
        for d in self.diagnostics.iter().skip(1) {
            let (es, ev) = (d.stress_error?, d.velocity_error?);
            if es > out.0 {
                out.0 = es;
                out.1 = d.n;
            }
            if ev > out.2 {
                out.2 = ev;
                out.3 = d.n;
            }
        }
        Some(out)
    }
}

/// Spaces, matrices and the prepared step map for one mesh, element pair and time grid.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub stress: StressSpace,
    pub velocity: VelocitySpace,
    pub material: IsotropicMaterial,
    pub grid: TimeGrid,
    stepper: CrankNicolson,
    norms: NormEvaluator,
}

impl Simulation {
    pub fn new(
        mesh: &StructuredMesh,
        family: ElementFamily,
        material: IsotropicMaterial,
        lumped: bool,
        grid: TimeGrid,
        tol: f64,
    ) -> Result<Self> {
        let stress = StressSpace::new(mesh, family);
        let velocity = VelocitySpace::new(mesh, family);
        let system = AssembledSystem::new(&stress, &velocity, &material, lumped)?;
        let stepper = CrankNicolson::new(system, grid.dt(), tol)?;
        let norms = NormEvaluator::new(&stress, &velocity, &material);
        Ok(Self { stress, velocity, material, grid, stepper, norms })
    }

    pub fn stepper(&self) -> &CrankNicolson {
        &self.stepper
    }

    pub fn system(&self) -> &AssembledSystem {
        self.stepper.system()
    }

    pub fn init_exact(&self, exact: &ExactSolution) -> SimState {
        init_state(&self.stress, &self.velocity, |p| exact.sigma(p, 0.0), |p| exact.v(p, 0.0))
    }

    /// Runs all `M` steps from `initial`.
    ///
    /// Errors are measured at every node when `exact` is given; snapshots are
    /// kept every `snapshot_every` steps (0 keeps only the endpoints).
    pub fn run(
        &self,
        initial: SimState,
        forcing: Option<&dyn Fn(Point, f64) -> [f64; 2]>,
        exact: Option<&ExactSolution>,
        snapshot_every: usize,
    ) -> Result<Trajectory> {
        let sys = self.system();
        if initial.alpha.len() != sys.stress_dim() || initial.beta.len() != sys.velocity_dim() {
            return invalid("initial state does not match the spaces");
        }
        let dt = self.grid.dt();
        let mesh = self.stress.mesh();
        let errors_at = |s: &SimState, t: f64| match exact {
            Some(ex) => (
                Some(self.norms.stress_error(&self.stress, &s.alpha, |p| ex.sigma(p, t))),
                Some(self.norms.velocity_error(&self.velocity, &s.beta, |p| ex.v(p, t))),
            ),
            None => (None, None),
        };
        let forcing_norm = |t: f64| forcing.map_or(0.0, |f| self.norms.l2_norm(mesh, |p| f(p, t)));

        let (es, ev) = errors_at(&initial, 0.0);
        let mut diagnostics = vec![NodeDiagnostics {
            n: 0,
            t: 0.0,
            energy: energy(sys, &initial),
            dissipation: 0.0,
            work: 0.0,
            stress_error: es,
            velocity_error: ev,
        }];
        let mut forcing_bound = forcing_norm(0.0);
        let mut snapshots = vec![initial.clone()];
        let mut load_prev = forcing.map(|f| assemble_load(&self.velocity, f, 0.0));
        let mut state = initial;
        let (mut dissipation, mut work) = (0.0, 0.0);

        for n in 1..=self.grid.steps() {
            let t = self.grid.node(n);
            let load_next = forcing.map(|f| assemble_load(&self.velocity, f, t));
            let load_mid: Option<Vec<f64>> = match (&load_prev, &load_next) {
                (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()),
                _ => None,
            };
            let mut next = self.stepper.step(&state, load_mid.as_deref())?;
            next.t = t;

            let alpha_mid: Vec<f64> = next.alpha.iter().zip(&state.alpha).map(|(a, b)| 0.5 * (a + b)).collect();
            dissipation += 2.0 * dt * sys.a.bilinear(&alpha_mid, &alpha_mid);
            if let Some(f) = &load_mid {
                let beta_mid: Vec<f64> = next.beta.iter().zip(&state.beta).map(|(a, b)| 0.5 * (a + b)).collect();
                work += 2.0 * dt * dot(f, &beta_mid);
            }
            let (es, ev) = errors_at(&next, t);
            diagnostics.push(NodeDiagnostics {
                n,
                t,
                energy: energy(sys, &next),
                dissipation,
                work,
                stress_error: es,
                velocity_error: ev,
            });
            forcing_bound = forcing_bound.max(forcing_norm(t));
            if n == self.grid.steps() || (snapshot_every > 0 && n % snapshot_every == 0) {
                snapshots.push(next.clone());
            }
            state = next;
            load_prev = load_next;
        }
        Ok(Trajectory { grid: self.grid, diagnostics, snapshots, final_state: state, forcing_bound })
    }
}
