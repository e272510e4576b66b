//! Acceptance criteria, one test per criterion.
//!
//! Every test prints its sub-checks and a final `criterion N: PASS|FAIL` line;
//! run with `--nocapture` to see passing reports as well.

mod common;

use common::*;
use maxwell_mixed::analysis::{convergence_orders, ErrorRecord};
use maxwell_mixed::cli::{random_state, run_case};
use maxwell_mixed::mesh::Point;
use maxwell_mixed::mms::verify_residuals;
use maxwell_mixed::timestepper::{Simulation, TimeGrid};
use maxwell_mixed::{ElementFamily, Example, ExactSolution, IsotropicMaterial, StructuredMesh};
use rayon::prelude::*;

const SPATIAL_N: [usize; 5] = [4, 8, 16, 32, 64];
const TEMPORAL_M: [usize; 4] = [4, 8, 12, 16];
const FIXED_STEPS: usize = 200; // dt = 0.005 on [0, 1]

struct Report {
    id: u32,
    title: &'static str,
    lines: Vec<(bool, String)>,
}

impl Report {
    fn new(id: u32, title: &'static str) -> Self {
        Self { id, title, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.lines.push((ok, detail));
    }

    /// Relative deviation check `|got - want| <= tol * want`.
    fn rel(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let dev = (got - want).abs() / want;
        self.check(dev <= tol, format!("{label}: {got:.6} vs {want} (rel dev {:.3}, limit {tol})", dev));
    }

    /// Absolute deviation check `|got - want| <= tol`.
    fn abs(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let dev = (got - want).abs();
        self.check(dev <= tol, format!("{label}: {got:.4} vs {want} (dev {dev:.3}, limit {tol})"));
    }

    fn finish(self) {
        let pass = self.lines.iter().all(|(ok, _)| *ok);
        for (ok, line) in &self.lines {
            println!("  [{}] {line}", if *ok { "ok" } else { "FAIL" });
        }
        println!("criterion {}: {} - {}", self.id, if pass { "PASS" } else { "FAIL" }, self.title);
        let failed: Vec<&String> = self.lines.iter().filter(|(ok, _)| !ok).map(|(_, l)| l).collect();
        assert!(failed.is_empty(), "criterion {} failed: {failed:#?}", self.id);
    }
}

fn spatial(family: ElementFamily, example: Example) -> Vec<ErrorRecord> {
    let material = IsotropicMaterial::unit();
    SPATIAL_N
        .par_iter()
        .map(|&n| run_case(family, example, n, FIXED_STEPS, 1.0, material, family == ElementFamily::NedelecQ1, 1e-12).unwrap())
        .collect()
}

fn temporal(family: ElementFamily, example: Example) -> Vec<ErrorRecord> {
    let material = IsotropicMaterial::unit();
    TEMPORAL_M
        .par_iter()
        .map(|&m| run_case(family, example, m * m / 4, m, 1.0, material, family == ElementFamily::NedelecQ1, 1e-12).unwrap())
        .collect()
}

fn orders(params: &[usize], errors: impl Iterator<Item = f64>) -> Vec<f64> {
    let p: Vec<f64> = params.iter().map(|&x| x as f64).collect();
    convergence_orders(&p, &errors.collect::<Vec<_>>()).unwrap()
}

#[test]
fn criterion_1_hmz_polynomial_spatial() {
    let mut r = Report::new(1, "HMZ, polynomial solution, dt = 0.005, N = 4..64");
    let recs = spatial(ElementFamily::Hmz, Example::Polynomial);
    let want_s = [0.0097, 0.0054, 0.0028, 0.0014, 0.0007];
    let want_v = [0.0032, 0.0018, 0.0008, 0.0004, 0.0002];
    for (i, rec) in recs.iter().enumerate() {
        r.rel(&format!("E_a_sigma N={}", rec.n), rec.e_a_sigma, want_s[i], 0.05);
        r.rel(&format!("E_c_v N={}", rec.n), rec.e_c_v, want_v[i], 0.05);
    }
    let os = orders(&SPATIAL_N, recs.iter().map(|r| r.e_a_sigma));
    let ov = orders(&SPATIAL_N, recs.iter().map(|r| r.e_c_v));
    for (i, (ws, wv)) in [0.83, 0.96, 0.99, 1.00].iter().zip([0.86, 0.97, 0.99, 1.00]).enumerate() {
        r.abs(&format!("order sigma {}->{}", SPATIAL_N[i], SPATIAL_N[i + 1]), os[i], *ws, 0.1);
        r.abs(&format!("order v {}->{}", SPATIAL_N[i], SPATIAL_N[i + 1]), ov[i], wv, 0.1);
    }
    r.finish();
}

#[test]
fn criterion_2_trigonometric_spatial_both_elements() {
    let mut r = Report::new(2, "trigonometric solution, dt = 0.005, both elements");
    let hmz = spatial(ElementFamily::Hmz, Example::Trigonometric);
    for (rec, want) in hmz.iter().zip([0.3524, 0.1784, 0.0896, 0.0448, 0.0224]) {
        r.rel(&format!("HMZ E_a_sigma N={}", rec.n), rec.e_a_sigma, want, 0.05);
    }
    let ned = spatial(ElementFamily::NedelecQ1, Example::Trigonometric);
    let os = orders(&SPATIAL_N, ned.iter().map(|r| r.e_a_sigma));
    for (i, o) in os.iter().enumerate() {
        let (a, b) = (SPATIAL_N[i], SPATIAL_N[i + 1]);
        r.check(*o >= 1.0, format!("Nedelec order sigma {a}->{b}: {o:.4} >= 1.0"));
        if a >= 16 {
            r.check(*o >= 1.7, format!("Nedelec order sigma {a}->{b}: {o:.4} >= 1.7"));
        }
        if a >= 8 {
            let want = [1.25, 1.76, 2.08][i - 1];
            r.abs(&format!("Nedelec order sigma {a}->{b}"), *o, want, 0.2);
        }
    }
    r.finish();
}

#[test]
fn criterion_3_hmz_half_power_spatial() {
    let mut r = Report::new(3, "HMZ, half-power solution, dt = 0.005, N = 4..64");
    let recs = spatial(ElementFamily::Hmz, Example::HalfPower);
    for (rec, want) in recs.iter().zip([0.2531, 0.1307, 0.0661, 0.0332, 0.0167]) {
        r.rel(&format!("E_a_sigma N={}", rec.n), rec.e_a_sigma, want, 0.08);
    }
    r.finish();
}

#[test]
fn criterion_4_synchronous_refinement() {
    let mut r = Report::new(4, "N = M^2/4 with M = 4, 8, 12, 16");
    let hmz_want = [[1.79, 1.98, 2.00], [1.98, 2.00, 2.00], [1.94, 1.99, 1.99]];
    let ned_want = [[2.76, 2.91, 2.97], [3.13, 3.03, 3.05], [2.85, 2.78, 2.60]];
    for (k, example) in Example::ALL.into_iter().enumerate() {
        let os = orders(&TEMPORAL_M, temporal(ElementFamily::Hmz, example).iter().map(|r| r.e_a_sigma));
        for (i, o) in os.iter().enumerate() {
            r.abs(&format!("HMZ example {} order {}->{}", k + 1, TEMPORAL_M[i], TEMPORAL_M[i + 1]), *o, hmz_want[k][i], 0.15);
        }
        let os = orders(&TEMPORAL_M, temporal(ElementFamily::NedelecQ1, example).iter().map(|r| r.e_a_sigma));
        for (i, o) in os.iter().enumerate() {
            let label = format!("Nedelec example {} order {}->{}", k + 1, TEMPORAL_M[i], TEMPORAL_M[i + 1]);
            r.check(*o >= 2.5, format!("{label}: {o:.4} >= 2.5"));
            r.abs(&label, *o, ned_want[k][i], 0.3);
        }
    }
    r.finish();
}

#[test]
fn criterion_5_discrete_energy_identity() {
    let mut r = Report::new(5, "energy identity, f = 0, random data, N = 8, M = 20");
    let mesh = StructuredMesh::unit_square(8).unwrap();
    for family in ElementFamily::ALL {
        let grid = TimeGrid::new(1.0, 20).unwrap();
        let lumped = family == ElementFamily::NedelecQ1;
        let sim = Simulation::new(&mesh, family, IsotropicMaterial::unit(), lumped, grid, 1e-12).unwrap();
        let mut worst: f64 = 0.0;
        for seed in 0..16 {
            let traj = sim.run(random_state(sim.stress.dim(), sim.velocity.dim(), seed), None, None, 0).unwrap();
            let e0 = traj.initial_energy();
            worst = traj.diagnostics.iter().map(|d| d.identity_defect(e0)).fold(worst, f64::max);
        }
        r.check(worst <= 1e-9, format!("{family}: max relative defect over 16 seeds x 21 nodes = {worst:.3e} <= 1e-9"));
    }
    r.finish();
}

#[test]
fn criterion_6_no_blowup_for_large_steps() {
    let mut r = Report::new(6, "trigonometric forcing, N = 8, dt in {0.5, 0.1, 0.02}");
    let material = IsotropicMaterial::unit();
    let exact = ExactSolution::new(Example::Trigonometric, &material);
    let forcing = |p: Point, t: f64| exact.f(p, t);
    let mesh = StructuredMesh::unit_square(8).unwrap();
    for family in ElementFamily::ALL {
        let finals: Vec<f64> = [2usize, 10, 50]
            .iter()
            .map(|&m| {
                let grid = TimeGrid::new(1.0, m).unwrap();
                let sim = Simulation::new(&mesh, family, material, family == ElementFamily::NedelecQ1, grid, 1e-12).unwrap();
                sim.run(sim.init_exact(&exact), Some(&forcing), None, 0).unwrap().diagnostics.last().unwrap().energy
            })
            .collect();
        let lo = finals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = finals.iter().copied().fold(0.0, f64::max);
        r.check(
            finals.iter().all(|e| e.is_finite()) && hi <= 3.0 * lo,
            format!("{family}: final energies {finals:.4?}, max/min = {:.3} <= 3", hi / lo),
        );
    }
    r.finish();
}

#[test]
fn criterion_7_manufactured_residual_gate() {
    let mut r = Report::new(7, "exact fields satisfy the model, 1000 samples");
    let material = IsotropicMaterial::unit();
    for example in Example::ALL {
        let rep = verify_residuals(&ExactSolution::new(example, &material), &material, 1000, 1.0).unwrap();
        r.check(
            rep.momentum <= 1e-8 && rep.constitutive <= 1e-8,
            format!("example {}: momentum {:.2e}, constitutive {:.2e} <= 1e-8", example.id(), rep.momentum, rep.constitutive),
        );
    }
    r.finish();
}

#[test]
fn criterion_8_element_conformity() {
    let mut r = Report::new(8, "unisolvence, normal-trace continuity, constants");
    for family in ElementFamily::ALL {
        for n in [2, 3] {
            let (stress, velocity) = spaces(n, family);
            let u = unisolvence_defect(&stress);
            let j = max_normal_jump(&stress);
            let c = constant_reproduction_defect(&stress, &velocity);
            r.check(u <= 1e-12, format!("{family} N={n}: Kronecker defect {u:.2e} <= 1e-12"));
            r.check(j <= 1e-12, format!("{family} N={n}: max normal jump {j:.2e} <= 1e-12"));
            r.check(c <= 1e-12, format!("{family} N={n}: constant reproduction {c:.2e}"));
        }
    }
    r.finish();
}

#[test]
fn criterion_9_norm_equivalence() {
    let mut r = Report::new(9, "0.25 |tau|_0^2 <= |tau|_a^2 <= 0.5 |tau|_0^2 for 1000 random fields");
    for family in ElementFamily::ALL {
        let (lo, hi) = norm_ratio_range(family, 4, 1000, 2024);
        r.check(lo >= 0.25 && hi <= 0.5, format!("{family}: ratio range [{lo:.4}, {hi:.4}]"));
    }
    r.finish();
}
