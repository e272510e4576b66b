use super::{hat, ElementFamily, REF_VERTICES};
use crate::error::{invalid, Result};
use crate::material::VoigtTensor;
use crate::mesh::{Point, Rect, StructuredMesh};

/// Which tensor component a stress DOF controls and where it lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StressDofKind {
    /// Component index 0 = `tau_11`, 1 = `tau_22`, 2 = `tau_12`.
    Vertex { vertex: usize, component: usize },
    Edge { edge: usize, component: usize },
    Interior { element: usize, component: usize },
}

#[derive(Debug, Clone)]
pub struct StressSpace {
    family: ElementFamily,
    mesh: StructuredMesh,
    dim: usize,
    local_dim: usize,
    /// Flattened element-to-global map, `local_dim` entries per element.
    dofs: Vec<usize>,
    kinds: Vec<StressDofKind>,
}

pub fn build_stress_space(mesh: &StructuredMesh, family: ElementFamily) -> StressSpace {
    StressSpace::new(mesh, family)
}

impl StressSpace {
    pub fn new(mesh: &StructuredMesh, family: ElementFamily) -> Self {
        let (nx, ny) = (mesh.nx(), mesh.ny());
        let ne = mesh.num_elements();
        match family {
            ElementFamily::NedelecQ1 => {
                let nv = mesh.num_vertices();
                let mut dofs = Vec::with_capacity(12 * ne);
                for e in 0..ne {
                    for v in mesh.element_vertices(e) {
                        dofs.extend((0..3).map(|c| 3 * v + c));
                    }
                }
                let kinds = (0..3 * nv)
                    .map(|g| StressDofKind::Vertex { vertex: g / 3, component: g % 3 })
                    .collect();
                Self { family, mesh: mesh.clone(), dim: 3 * nv, local_dim: 12, dofs, kinds }
            }
            ElementFamily::Hmz => {
                let nh = mesh.num_horizontal_edges();
                let n_vert_edges = (nx + 1) * ny;
                let off11_int = n_vert_edges;
                let off22 = off11_int + ne;
                let off22_int = off22 + nh;
                let off12 = off22_int + ne;
                let dim = off12 + mesh.num_vertices();

                let mut kinds = Vec::with_capacity(dim);
                kinds.extend((0..n_vert_edges).map(|k| StressDofKind::Edge { edge: nh + k, component: 0 }));
                kinds.extend((0..ne).map(|e| StressDofKind::Interior { element: e, component: 0 }));
                kinds.extend((0..nh).map(|k| StressDofKind::Edge { edge: k, component: 1 }));
                kinds.extend((0..ne).map(|e| StressDofKind::Interior { element: e, component: 1 }));
                kinds.extend((0..mesh.num_vertices()).map(|v| StressDofKind::Vertex { vertex: v, component: 2 }));

                let mut dofs = Vec::with_capacity(10 * ne);
                for e in 0..ne {
                    let [bottom, right, top, left] = mesh.element_edges(e);
                    dofs.extend([left - nh, right - nh, off11_int + e]);
                    dofs.extend([off22 + bottom, off22 + top, off22_int + e]);
                    dofs.extend(mesh.element_vertices(e).iter().map(|v| off12 + v));
                }
                Self { family, mesh: mesh.clone(), dim, local_dim: 10, dofs, kinds }
            }
        }
    }

    pub fn family(&self) -> ElementFamily {
        self.family
    }

    pub fn mesh(&self) -> &StructuredMesh {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn element_dofs(&self, elem: usize) -> &[usize] {
        &self.dofs[elem * self.local_dim..(elem + 1) * self.local_dim]
    }

    pub fn dof_kind(&self, global: usize) -> StressDofKind {
        self.kinds[global]
    }

    fn check(&self, elem: usize, ldof: usize) -> Result<()> {
        self.mesh.check_element(elem)?;
        if ldof >= self.local_dim {
            return invalid(format!("local stress dof {ldof} out of range ({})", self.local_dim));
        }
        Ok(())
    }

    /// Local basis tensor `ldof` of element `elem` at physical `point`.
    pub fn eval_basis(&self, elem: usize, ldof: usize, point: Point) -> Result<VoigtTensor> {
        self.check(elem, ldof)?;
        let rect = self.mesh.rect_unchecked(elem);
        Ok(self.reference_basis(ldof, rect.to_reference(point), &rect).0)
    }

    /// Row-wise divergence of local basis tensor `ldof` at physical `point`.
    pub fn eval_div(&self, elem: usize, ldof: usize, point: Point) -> Result<[f64; 2]> {
        self.check(elem, ldof)?;
        let rect = self.mesh.rect_unchecked(elem);
        Ok(self.reference_basis(ldof, rect.to_reference(point), &rect).1)
    }

    /// Value and physical divergence of a local basis tensor at reference point `r`.
    pub(crate) fn reference_basis(&self, ldof: usize, r: [f64; 2], rect: &Rect) -> (VoigtTensor, [f64; 2]) {
        let (sx, sy) = (2.0 / rect.hx, 2.0 / rect.hy);
        match self.family {
            ElementFamily::NedelecQ1 => {
                let (n, g) = hat(ldof / 3, r);
                let (gx, gy) = (g[0] * sx, g[1] * sy);
                match ldof % 3 {
                    0 => (VoigtTensor::new(n, 0.0, 0.0), [gx, 0.0]),
                    1 => (VoigtTensor::new(0.0, n, 0.0), [0.0, gy]),
                    _ => (VoigtTensor::new(0.0, 0.0, n), [gy, gx]),
                }
            }
            ElementFamily::Hmz => match ldof {
                0..=2 => {
                    let (v, d) = quad_1d(ldof, r[0]);
                    (VoigtTensor::new(v, 0.0, 0.0), [d * sx, 0.0])
                }
                3..=5 => {
                    let (v, d) = quad_1d(ldof - 3, r[1]);
                    (VoigtTensor::new(0.0, v, 0.0), [0.0, d * sy])
                }
                _ => {
                    let (n, g) = hat(ldof - 6, r);
                    (VoigtTensor::new(0.0, 0.0, n), [g[1] * sy, g[0] * sx])
                }
            },
        }
    }

    /// Local DOF functional `ldof` of element `elem` applied to a tensor field.
    ///
    /// HMZ edge DOFs sample at edge midpoints; the bubble DOF is the center
    /// value minus the mean of the two edge values.
    pub fn local_functional(&self, elem: usize, ldof: usize, field: &dyn Fn(Point) -> VoigtTensor) -> f64 {
        let rect = self.mesh.rect_unchecked(elem);
        let at = |r: [f64; 2]| field(rect.from_reference(r));
        match self.family {
            ElementFamily::NedelecQ1 => at(REF_VERTICES[ldof / 3]).as_array()[ldof % 3],
            ElementFamily::Hmz => match ldof {
                0 => at([-1.0, 0.0]).t11,
                1 => at([1.0, 0.0]).t11,
                2 => at([0.0, 0.0]).t11 - 0.5 * (at([-1.0, 0.0]).t11 + at([1.0, 0.0]).t11),
                3 => at([0.0, -1.0]).t22,
                4 => at([0.0, 1.0]).t22,
                5 => at([0.0, 0.0]).t22 - 0.5 * (at([0.0, -1.0]).t22 + at([0.0, 1.0]).t22),
                _ => at(REF_VERTICES[ldof - 6]).t12,
            },
        }
    }

    /// Canonical interpolant: every global DOF functional applied to `field`.
    pub fn interpolate(&self, field: impl Fn(Point) -> VoigtTensor) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for e in 0..self.mesh.num_elements() {
            for (l, &g) in self.element_dofs(e).iter().enumerate() {
                out[g] = self.local_functional(e, l, &field);
            }
        }
        out
    }

    /// Finite element stress field with coefficients `coeffs`, evaluated in element `elem`.
    pub fn evaluate(&self, coeffs: &[f64], elem: usize, point: Point) -> VoigtTensor {
        let rect = self.mesh.rect_unchecked(elem);
        let r = rect.to_reference(point);
        self.element_dofs(elem)
            .iter()
            .enumerate()
            .fold(VoigtTensor::ZERO, |acc, (l, &g)| acc + coeffs[g] * self.reference_basis(l, r, &rect).0)
    }

    pub fn evaluate_div(&self, coeffs: &[f64], elem: usize, point: Point) -> [f64; 2] {
        let rect = self.mesh.rect_unchecked(elem);
        let r = rect.to_reference(point);
        self.element_dofs(elem).iter().enumerate().fold([0.0; 2], |acc, (l, &g)| {
            let d = self.reference_basis(l, r, &rect).1;
            [acc[0] + coeffs[g] * d[0], acc[1] + coeffs[g] * d[1]]
        })
    }
}

/// Hierarchical quadratic basis on `[-1, 1]`: left value, right value, bubble.
#[inline]
fn quad_1d(k: usize, s: f64) -> (f64, f64) {
    match k {
        0 => (0.5 * (1.0 - s), -0.5),
        1 => (0.5 * (1.0 + s), 0.5),
        _ => (1.0 - s * s, -2.0 * s),
    }
}
