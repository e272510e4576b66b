//! Global matrices of the semi-discrete system
//!
//! ```text
//! A[i][j] = (C^-1 phi_j, phi_i)    B[i][j] = (div phi_j, kappa_i)    C[i][j] = (rho kappa_j, kappa_i)
//! ```
//!
//! All element integrals use the composite 14-point rule, which is exact for
//! every integrand assembled here, except the lumped Nedelec stress mass.

use crate::error::{invalid, Result};
use crate::fespace::{ElementFamily, StressSpace, VelocitySpace};
use crate::linalg::{block_diag_inverse, BlockDiagInverse, SparseMatrix, TripletBuilder};
use crate::material::{IsotropicMaterial, VoigtTensor};
use crate::mesh::Point;
use crate::quadrature::{rect_rule_composite, rect_rule_lumped, QuadratureRule};

/// `A`, `B`, `C` for one stress/velocity pair.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub c: SparseMatrix,
    pub lumped: bool,
    /// Size of the element blocks of `C` (2 for Q0, 4 for the HMZ partner).
    pub c_block: usize,
}

impl AssembledSystem {
    pub fn new(stress: &StressSpace, velocity: &VelocitySpace, material: &IsotropicMaterial, lumped: bool) -> Result<Self> {
        Ok(Self {
            a: assemble_mass_stress(stress, material, lumped)?,
            b: assemble_coupling(stress, velocity)?,
            c: assemble_mass_velocity(velocity, material),
            lumped,
            c_block: velocity.local_dim(),
        })
    }

    pub fn c_inverse(&self) -> Result<BlockDiagInverse> {
        block_diag_inverse(&self.c, self.c_block)
    }

    pub fn stress_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn velocity_dim(&self) -> usize {
        self.c.nrows()
    }
}

fn element_rule(space: &StressSpace, elem: usize, lumped: bool) -> QuadratureRule {
    let rect = space.mesh().rect_unchecked(elem);
    if lumped {
        rect_rule_lumped(&rect)
    } else {
        rect_rule_composite(&rect)
    }
    .expect("mesh rectangles are non-degenerate")
}

/// Stress mass matrix weighted by the compliance.
///
/// With `lumped` the vertex rule replaces the composite rule; only valid for `NedelecQ1`,
/// whose DOFs sit at the vertices.
pub fn assemble_mass_stress(space: &StressSpace, material: &IsotropicMaterial, lumped: bool) -> Result<SparseMatrix> {
    if lumped && space.family() != ElementFamily::NedelecQ1 {
        return invalid(format!("mass lumping is only defined for nedelec-q1q0, not {}", space.family()));
    }
    let nl = space.local_dim();
    let mesh = space.mesh();
    let mut tb = TripletBuilder::with_capacity(space.dim(), space.dim(), mesh.num_elements() * nl * nl);
    let mut local = vec![0.0; nl * nl];
    let mut vals = vec![VoigtTensor::ZERO; nl];
    for e in 0..mesh.num_elements() {
        let rect = mesh.rect_unchecked(e);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (p, w) in element_rule(space, e, lumped).iter() {
            let r = rect.to_reference(p);
            for (l, v) in vals.iter_mut().enumerate() {
                *v = space.reference_basis(l, r, &rect).0;
            }
            for j in 0..nl {
                let cj = material.apply_compliance(vals[j]);
                for i in 0..nl {
                    local[i * nl + j] += w * cj.contract(&vals[i]);
                }
            }
        }
        scatter(&mut tb, space.element_dofs(e), space.element_dofs(e), &local);
    }
    Ok(tb.build())
}

/// Coupling `B[i][j] = (kappa_i, div phi_j)`; rows are velocity DOFs.
pub fn assemble_coupling(stress: &StressSpace, velocity: &VelocitySpace) -> Result<SparseMatrix> {
    if stress.family() != velocity.family() {
        return invalid(format!(
            "stress family {} cannot be paired with velocity family {}",
            stress.family(),
            velocity.family()
        ));
    }
    if stress.mesh().nx() != velocity.mesh().nx() || stress.mesh().ny() != velocity.mesh().ny() {
        return invalid("stress and velocity spaces live on different meshes");
    }
    Ok(coupling_any_pair(stress, velocity))
}

/// Coupling for an arbitrary pair on the same mesh; used by diagnostics that
/// deliberately mismatch spaces.
pub(crate) fn coupling_any_pair(stress: &StressSpace, velocity: &VelocitySpace) -> SparseMatrix {
    let (ns, nv) = (stress.local_dim(), velocity.local_dim());
    let mesh = stress.mesh();
    let mut tb = TripletBuilder::with_capacity(velocity.dim(), stress.dim(), mesh.num_elements() * ns * nv);
    let mut local = vec![0.0; nv * ns];
    let mut divs = vec![[0.0; 2]; ns];
    for e in 0..mesh.num_elements() {
        let rect = mesh.rect_unchecked(e);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (p, w) in element_rule(stress, e, false).iter() {
            let r = rect.to_reference(p);
            for (l, d) in divs.iter_mut().enumerate() {
                *d = stress.reference_basis(l, r, &rect).1;
            }
            for i in 0..nv {
                let k = velocity.reference_basis(i, r);
                for j in 0..ns {
                    local[i * ns + j] += w * (k[0] * divs[j][0] + k[1] * divs[j][1]);
                }
            }
        }
        let rows: Vec<usize> = velocity.element_dofs(e).collect();
        scatter(&mut tb, &rows, stress.element_dofs(e), &local);
    }
    tb.build()
}

/// Density-weighted velocity mass matrix; block diagonal by element.
pub fn assemble_mass_velocity(velocity: &VelocitySpace, material: &IsotropicMaterial) -> SparseMatrix {
    velocity_gram(velocity, material.rho())
}

fn velocity_gram(velocity: &VelocitySpace, weight: f64) -> SparseMatrix {
    let nl = velocity.local_dim();
    let mesh = velocity.mesh();
    let mut tb = TripletBuilder::with_capacity(velocity.dim(), velocity.dim(), mesh.num_elements() * nl * nl);
    let mut local = vec![0.0; nl * nl];
    for (e, rect) in mesh.rects().enumerate() {
        local.iter_mut().for_each(|v| *v = 0.0);
        for (p, w) in rect_rule_composite(&rect).expect("non-degenerate").iter() {
            let r = rect.to_reference(p);
            for i in 0..nl {
                let ki = velocity.reference_basis(i, r);
                for j in 0..nl {
                    let kj = velocity.reference_basis(j, r);
                    local[i * nl + j] += w * weight * (ki[0] * kj[0] + ki[1] * kj[1]);
                }
            }
        }
        let dofs: Vec<usize> = velocity.element_dofs(e).collect();
        scatter(&mut tb, &dofs, &dofs, &local);
    }
    tb.build()
}

/// Unweighted velocity L2 Gram matrix.
pub fn velocity_l2_gram(velocity: &VelocitySpace) -> SparseMatrix {
    velocity_gram(velocity, 1.0)
}

/// Unweighted stress Gram matrix for `||tau||_0^2`, plus `||div tau||_0^2` when `with_div`.
pub fn stress_gram(space: &StressSpace, with_div: bool) -> SparseMatrix {
    let nl = space.local_dim();
    let mesh = space.mesh();
    let mut tb = TripletBuilder::with_capacity(space.dim(), space.dim(), mesh.num_elements() * nl * nl);
    let mut local = vec![0.0; nl * nl];
    let mut vals = vec![(VoigtTensor::ZERO, [0.0; 2]); nl];
    for e in 0..mesh.num_elements() {
        let rect = mesh.rect_unchecked(e);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (p, w) in element_rule(space, e, false).iter() {
            let r = rect.to_reference(p);
            for (l, v) in vals.iter_mut().enumerate() {
                *v = space.reference_basis(l, r, &rect);
            }
            for i in 0..nl {
                for j in 0..nl {
                    let mut s = vals[i].0.contract(&vals[j].0);
                    if with_div {
                        s += vals[i].1[0] * vals[j].1[0] + vals[i].1[1] * vals[j].1[1];
                    }
                    local[i * nl + j] += w * s;
                }
            }
        }
        scatter(&mut tb, space.element_dofs(e), space.element_dofs(e), &local);
    }
    tb.build()
}

/// Load vector `F[i] = (f(., t), kappa_i)`.
pub fn assemble_load(velocity: &VelocitySpace, f: &dyn Fn(Point, f64) -> [f64; 2], t: f64) -> Vec<f64> {
    let nl = velocity.local_dim();
    let mut out = vec![0.0; velocity.dim()];
    for (e, rect) in velocity.mesh().rects().enumerate() {
        let base = nl * e;
        for (p, w) in rect_rule_composite(&rect).expect("non-degenerate").iter() {
            let r = rect.to_reference(p);
            let fv = f(p, t);
            for l in 0..nl {
                let k = velocity.reference_basis(l, r);
                out[base + l] += w * (fv[0] * k[0] + fv[1] * k[1]);
            }
        }
    }
    out
}

fn scatter(tb: &mut TripletBuilder, rows: &[usize], cols: &[usize], local: &[f64]) {
    let nc = cols.len();
    for (i, &gi) in rows.iter().enumerate() {
        for (j, &gj) in cols.iter().enumerate() {
            let v = local[i * nc + j];
            if v != 0.0 {
                tb.push(gi, gj, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::StructuredMesh;

    fn spaces(n: usize, fam: ElementFamily) -> (StressSpace, VelocitySpace) {
        let m = StructuredMesh::unit_square(n).unwrap();
        (StressSpace::new(&m, fam), VelocitySpace::new(&m, fam))
    }

    #[test]
    fn lumped_vertex_entry() {
        let (s, _) = spaces(1, ElementFamily::NedelecQ1);
        let a = assemble_mass_stress(&s, &IsotropicMaterial::unit(), true).unwrap();
        // (1/4) * (1/2 - 1/8): weight times C^-1 applied to e_11, paired with e_11
        assert!((a.get(0, 0) - 0.09375).abs() < 1e-15);
        assert!((a.get(0, 1) + 0.25 * 0.125).abs() < 1e-15);
        assert!((a.get(2, 2) - 0.25 * 0.5 * 2.0).abs() < 1e-15);
        // no coupling between different vertices
        assert_eq!(a.get(0, 3), 0.0);
        assert_eq!(a.nnz(), 4 * 5);
    }

    #[test]
    fn lumping_rejected_for_hmz() {
        let (s, _) = spaces(2, ElementFamily::Hmz);
        assert!(assemble_mass_stress(&s, &IsotropicMaterial::unit(), true).is_err());
    }

    #[test]
    fn identity_stress_energy() {
        for fam in ElementFamily::ALL {
            let (s, _) = spaces(3, fam);
            let alpha = s.interpolate(|_| VoigtTensor::IDENTITY);
            for lumped in [false, fam == ElementFamily::NedelecQ1] {
                let a = assemble_mass_stress(&s, &IsotropicMaterial::unit(), lumped).unwrap();
                assert!(a.symmetry_defect() < 1e-14);
                assert!((a.bilinear(&alpha, &alpha) - 0.5).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn coupling_examples() {
        let (s, v) = spaces(1, ElementFamily::NedelecQ1);
        let b = assemble_coupling(&s, &v).unwrap();
        assert!((b.get(0, 0) + 0.5).abs() < 1e-15);
        for fam in ElementFamily::ALL {
            let (s, v) = spaces(4, fam);
            let b = assemble_coupling(&s, &v).unwrap();
            let alpha = s.interpolate(|_| VoigtTensor::IDENTITY);
            assert!(b.mul_vec(&alpha).iter().all(|x| x.abs() < 1e-13));
        }
        let (s, _) = spaces(2, ElementFamily::NedelecQ1);
        let (_, v) = spaces(2, ElementFamily::Hmz);
        assert!(assemble_coupling(&s, &v).is_err());
    }

    #[test]
    fn velocity_mass_examples() {
        let (_, v) = spaces(1, ElementFamily::NedelecQ1);
        let c = assemble_mass_velocity(&v, &IsotropicMaterial::unit());
        assert!((c.to_dense() - nalgebra::DMatrix::identity(2, 2)).abs().max() < 1e-15);
        let (_, v) = spaces(4, ElementFamily::NedelecQ1);
        let c = assemble_mass_velocity(&v, &IsotropicMaterial::unit());
        assert!(c.diagonal().iter().all(|d| (d - 1.0 / 16.0).abs() < 1e-15));
        assert_eq!(c.nnz(), 32);
        let (_, v) = spaces(1, ElementFamily::Hmz);
        let c = assemble_mass_velocity(&v, &IsotropicMaterial::unit()).to_dense();
        let expect = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0 / 3.0, 1.0, 1.0 / 3.0]));
        assert!((c - expect).abs().max() < 1e-15);
    }

    #[test]
    fn load_examples() {
        let (_, v) = spaces(3, ElementFamily::NedelecQ1);
        assert!(assemble_load(&v, &|_, _| [0.0, 0.0], 0.0).iter().all(|&x| x == 0.0));
        let f = assemble_load(&v, &|_, _| [1.0, 0.0], 0.3);
        for (i, x) in f.iter().enumerate() {
            let expect = if i % 2 == 0 { 1.0 / 9.0 } else { 0.0 };
            assert!((x - expect).abs() < 1e-15);
        }
        let (_, v) = spaces(1, ElementFamily::NedelecQ1);
        let f = assemble_load(&v, &|p, _| [p[0], 0.0], 0.0);
        assert!((f[0] - 0.5).abs() < 1e-15 && f[1].abs() < 1e-15);
    }
}
