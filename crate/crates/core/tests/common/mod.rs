//! Shared checks for the element and study test targets.
#![allow(dead_code)]

use maxwell_mixed::assembly::assemble_mass_stress;
use maxwell_mixed::analysis::NormEvaluator;
use maxwell_mixed::mesh::Point;
use maxwell_mixed::quadrature::rect_rule_composite;
use maxwell_mixed::{ElementFamily, IsotropicMaterial, StressSpace, StructuredMesh, VelocitySpace, VoigtTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn spaces(n: usize, family: ElementFamily) -> (StressSpace, VelocitySpace) {
    let mesh = StructuredMesh::unit_square(n).unwrap();
    (StressSpace::new(&mesh, family), VelocitySpace::new(&mesh, family))
}

/// Largest `|l_i(phi_j) - delta_ij|` over all elements.
pub fn unisolvence_defect(space: &StressSpace) -> f64 {
    let mut worst: f64 = 0.0;
    for e in 0..space.mesh().num_elements() {
        for j in 0..space.local_dim() {
            let phi = |p: Point| space.eval_basis(e, j, p).unwrap();
            for i in 0..space.local_dim() {
                let delta = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((space.local_functional(e, i, &phi) - delta).abs());
            }
        }
    }
    worst
}

/// Largest jump of `tau n` over every global basis function, interior edge and
/// five points per edge.
pub fn max_normal_jump(space: &StressSpace) -> f64 {
    let mesh = space.mesh();
    let mut worst: f64 = 0.0;
    let mut coeffs = vec![0.0; space.dim()];
    for g in 0..space.dim() {
        coeffs[g] = 1.0;
        for (k, edge) in mesh.edges().iter().enumerate() {
            let owners = mesh.edge_elements(k);
            if owners.len() != 2 {
                continue;
            }
            let [a, b] = edge.vertices.map(|v| mesh.vertex(v));
            let nrm = edge.normal();
            for s in [0.0, 0.2, 0.5, 0.8, 1.0] {
                let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                let traction = |elem: usize| {
                    let t = space.evaluate(&coeffs, elem, p);
                    [t.t11 * nrm[0] + t.t12 * nrm[1], t.t12 * nrm[0] + t.t22 * nrm[1]]
                };
                let (l, r) = (traction(owners[0]), traction(owners[1]));
                worst = worst.max((l[0] - r[0]).abs()).max((l[1] - r[1]).abs());
            }
        }
        coeffs[g] = 0.0;
    }
    worst
}

/// Largest pointwise error after interpolating constants into both spaces.
pub fn constant_reproduction_defect(stress: &StressSpace, velocity: &VelocitySpace) -> f64 {
    let tau = VoigtTensor::new(0.7, -1.3, 0.4);
    let w = [2.5, -0.6];
    let alpha = stress.interpolate(|_| tau);
    let beta = velocity.interpolate(|_| w);
    let mesh = stress.mesh();
    let mut worst: f64 = 0.0;
    for (e, rect) in mesh.rects().enumerate() {
        for &p in rect_rule_composite(&rect).unwrap().points() {
            worst = worst.max((stress.evaluate(&alpha, e, p) - tau).max_abs());
            let v = velocity.evaluate(&beta, e, p);
            worst = worst.max((v[0] - w[0]).abs()).max((v[1] - w[1]).abs());
        }
    }
    worst
}

/// Extremes of `||tau_h||_a^2 / ||tau_h||_0^2` over random coefficient vectors.
pub fn norm_ratio_range(family: ElementFamily, n: usize, samples: usize, seed: u64) -> (f64, f64) {
    let material = IsotropicMaterial::unit();
    let (stress, velocity) = spaces(n, family);
    let a = assemble_mass_stress(&stress, &material, false).unwrap();
    let norms = NormEvaluator::new(&stress, &velocity, &material);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..samples {
        let alpha: Vec<f64> = (0..stress.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ratio = a.bilinear(&alpha, &alpha) / norms.stress_l2_squared(&stress, &alpha);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    (lo, hi)
}
