//! Error norms, convergence orders, discrete energy and the inf-sup diagnostic.

use nalgebra::{Cholesky, DMatrix};

use crate::assembly::{coupling_any_pair, stress_gram, velocity_l2_gram, AssembledSystem};
use crate::error::{invalid, Error, Result};
use crate::fespace::{ElementFamily, StressSpace, VelocitySpace};
use crate::material::{IsotropicMaterial, VoigtTensor};
use crate::mesh::{Point, StructuredMesh};
use crate::quadrature::rect_rule_composite;
use crate::timestepper::SimState;

/// Maximum-in-time errors of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub n: usize,
    pub m: usize,
    pub dt: f64,
    pub e_a_sigma: f64,
    pub e_c_v: f64,
    /// Time indices at which the maxima were attained.
    pub argmax_sigma: usize,
    pub argmax_v: usize,
}

/// Basis values at the composite quadrature points of the reference element.
///
/// The mesh is uniform, so one table serves every element.
#[derive(Debug, Clone)]
pub struct NormEvaluator {
    ref_points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    stress_vals: Vec<VoigtTensor>,
    stress_local: usize,
    velocity_vals: Vec<[f64; 2]>,
    velocity_local: usize,
    material: IsotropicMaterial,
}

impl NormEvaluator {
    pub fn new(stress: &StressSpace, velocity: &VelocitySpace, material: &IsotropicMaterial) -> Self {
        let rect = stress.mesh().rect_unchecked(0);
        let rule = rect_rule_composite(&rect).expect("non-degenerate");
        let ref_points: Vec<[f64; 2]> = rule.points().iter().map(|&p| rect.to_reference(p)).collect();
        let weights = rule.weights().to_vec();
        let (ns, nv) = (stress.local_dim(), velocity.local_dim());
        let mut stress_vals = Vec::with_capacity(ref_points.len() * ns);
        let mut velocity_vals = Vec::with_capacity(ref_points.len() * nv);
        for &r in &ref_points {
            stress_vals.extend((0..ns).map(|l| stress.reference_basis(l, r, &rect).0));
            velocity_vals.extend((0..nv).map(|l| velocity.reference_basis(l, r)));
        }
        Self {
            ref_points,
            weights,
            stress_vals,
            stress_local: ns,
            velocity_vals,
            velocity_local: nv,
            material: *material,
        }
    }

    /// `||sigma - sigma_h||_a`.
    pub fn stress_error(&self, space: &StressSpace, alpha: &[f64], exact: impl Fn(Point) -> VoigtTensor) -> f64 {
        let mesh = space.mesh();
        let ns = self.stress_local;
        let mut total = 0.0;
        for e in 0..mesh.num_elements() {
            let rect = mesh.rect_unchecked(e);
            let dofs = space.element_dofs(e);
            for (q, (&r, &w)) in self.ref_points.iter().zip(&self.weights).enumerate() {
                let vals = &self.stress_vals[q * ns..(q + 1) * ns];
                let sh = dofs.iter().zip(vals).fold(VoigtTensor::ZERO, |acc, (&g, &phi)| acc + alpha[g] * phi);
                let d = exact(rect.from_reference(r)) - sh;
                total += w * self.material.apply_compliance(d).contract(&d);
            }
        }
        total.max(0.0).sqrt()
    }

    /// `||v - v_h||_c`.
    pub fn velocity_error(&self, space: &VelocitySpace, beta: &[f64], exact: impl Fn(Point) -> [f64; 2]) -> f64 {
        let mesh = space.mesh();
        let nv = self.velocity_local;
        let mut total = 0.0;
        for e in 0..mesh.num_elements() {
            let rect = mesh.rect_unchecked(e);
            let coeffs = &beta[space.element_dofs(e)];
            for (q, (&r, &w)) in self.ref_points.iter().zip(&self.weights).enumerate() {
                let vals = &self.velocity_vals[q * nv..(q + 1) * nv];
                let vh = coeffs.iter().zip(vals).fold([0.0; 2], |acc, (&c, phi)| [acc[0] + c * phi[0], acc[1] + c * phi[1]]);
                let v = exact(rect.from_reference(r));
                let d = [v[0] - vh[0], v[1] - vh[1]];
                total += w * self.material.rho() * (d[0] * d[0] + d[1] * d[1]);
            }
        }
        total.max(0.0).sqrt()
    }

    /// `||g||_0` of a vector field over the whole mesh.
    pub fn l2_norm(&self, mesh: &StructuredMesh, g: impl Fn(Point) -> [f64; 2]) -> f64 {
        let mut total = 0.0;
        for rect in mesh.rects() {
            for (&r, &w) in self.ref_points.iter().zip(&self.weights) {
                let v = g(rect.from_reference(r));
                total += w * (v[0] * v[0] + v[1] * v[1]);
            }
        }
        total.sqrt()
    }

    /// `||tau_h||_0^2` of a discrete stress field.
    pub fn stress_l2_squared(&self, space: &StressSpace, alpha: &[f64]) -> f64 {
        let ns = self.stress_local;
        let mut total = 0.0;
        for e in 0..space.mesh().num_elements() {
            let dofs = space.element_dofs(e);
            for (q, &w) in self.weights.iter().enumerate() {
                let vals = &self.stress_vals[q * ns..(q + 1) * ns];
                let sh = dofs.iter().zip(vals).fold(VoigtTensor::ZERO, |acc, (&g, &phi)| acc + alpha[g] * phi);
                total += w * sh.contract(&sh);
            }
        }
        total
    }
}

/// `||sigma(t) - sigma_h||_a` by the composite rule on every element.
pub fn stress_error_a(
    space: &StressSpace,
    alpha: &[f64],
    exact: impl Fn(Point) -> VoigtTensor,
    material: &IsotropicMaterial,
) -> f64 {
    let velocity = VelocitySpace::new(space.mesh(), space.family());
    NormEvaluator::new(space, &velocity, material).stress_error(space, alpha, exact)
}

/// `||v(t) - v_h||_c` by the composite rule on every element.
pub fn velocity_error_c(
    space: &VelocitySpace,
    beta: &[f64],
    exact: impl Fn(Point) -> [f64; 2],
    material: &IsotropicMaterial,
) -> f64 {
    let stress = StressSpace::new(space.mesh(), space.family());
    NormEvaluator::new(&stress, space, material).velocity_error(space, beta, exact)
}

/// Observed orders `log(e_i / e_{i+1}) / log(p_{i+1} / p_i)` for parameters `p` (N or M).
pub fn convergence_orders(params: &[f64], errors: &[f64]) -> Result<Vec<f64>> {
    if params.len() != errors.len() {
        return invalid("parameter and error lists differ in length");
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return invalid(format!("errors must be positive and finite, got {e}"));
    }
    if params.windows(2).any(|w| !(w[1] > w[0])) || params.iter().any(|&p| !(p > 0.0)) {
        return invalid("parameters must be positive and strictly increasing");
    }
    Ok(params
        .windows(2)
        .zip(errors.windows(2))
        .map(|(p, e)| (e[0] / e[1]).ln() / (p[1] / p[0]).ln())
        .collect())
}

/// Discrete energy `alpha^T A alpha + beta^T C beta`.
pub fn energy(system: &AssembledSystem, state: &SimState) -> f64 {
    system.a.bilinear(&state.alpha, &state.alpha) + system.c.bilinear(&state.beta, &state.beta)
}

/// Largest mesh accepted by the dense inf-sup computation.
pub const MAX_INFSUP_N: usize = 8;

/// Discrete inf-sup constants on `n x n` unit-square meshes.
pub fn discrete_infsup(sizes: &[usize], family: ElementFamily) -> Result<Vec<f64>> {
    sizes
        .iter()
        .map(|&n| {
            if n == 0 || n > MAX_INFSUP_N {
                return invalid(format!("inf-sup diagnostic supports 1 <= N <= {MAX_INFSUP_N}, got {n}"));
            }
            let mesh = StructuredMesh::unit_square(n)?;
            infsup_constant(&StressSpace::new(&mesh, family), &VelocitySpace::new(&mesh, family))
        })
        .collect()
}

/// `min_w max_tau b(w, tau) / (||tau||_div ||w||_0)` for any pair of spaces on one mesh.
///
/// Equal to the square root of the smallest eigenvalue of
/// `L^-1 B G^-1 B^T L^-T`, where `G` is the div-norm Gram matrix and `L L^T`
/// the velocity L2 Gram matrix.
pub fn infsup_constant(stress: &StressSpace, velocity: &VelocitySpace) -> Result<f64> {
    if stress.mesh().num_elements() > MAX_INFSUP_N * MAX_INFSUP_N {
        return invalid("mesh too large for the dense inf-sup computation");
    }
    let g = stress_gram(stress, true).to_dense();
    let mv = velocity_l2_gram(velocity).to_dense();
    let b = coupling_any_pair(stress, velocity).to_dense();
    let g_chol = Cholesky::new(g).ok_or_else(|| singular("div-norm Gram matrix"))?;
    let l = Cholesky::new(mv).ok_or_else(|| singular("velocity Gram matrix"))?.l();
    let ginv_bt = g_chol.solve(&b.transpose());
    let inner = &b * ginv_bt;
    let l_inv = l.clone().solve_lower_triangular(&DMatrix::identity(l.nrows(), l.nrows())).ok_or_else(|| singular("velocity factor"))?;
    let k = &l_inv * inner * l_inv.transpose();
    let k = (&k + k.transpose()) * 0.5;
    let min = k.symmetric_eigenvalues().min();
    Ok(min.max(0.0).sqrt())
}

fn singular(what: &str) -> Error {
    Error::NumericalSingularity { block: 0, reason: format!("{what} is not positive definite") }
}
