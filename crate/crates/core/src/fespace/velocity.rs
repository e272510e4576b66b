use super::ElementFamily;
use crate::error::{invalid, Result};
use crate::mesh::{Point, StructuredMesh};
use crate::quadrature::rect_rule_composite;

/// Fully discontinuous velocity space paired with a stress family.
#[derive(Debug, Clone)]
pub struct VelocitySpace {
    family: ElementFamily,
    mesh: StructuredMesh,
    local_dim: usize,
}

pub fn build_velocity_space(mesh: &StructuredMesh, family: ElementFamily) -> VelocitySpace {
    VelocitySpace::new(mesh, family)
}

impl VelocitySpace {
    pub fn new(mesh: &StructuredMesh, family: ElementFamily) -> Self {
        let local_dim = match family {
            ElementFamily::NedelecQ1 => 2,
            ElementFamily::Hmz => 4,
        };
        Self { family, mesh: mesh.clone(), local_dim }
    }

    pub fn family(&self) -> ElementFamily {
        self.family
    }

    pub fn mesh(&self) -> &StructuredMesh {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.local_dim * self.mesh.num_elements()
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Global DOFs of an element are contiguous: `local_dim * elem ..`.
    pub fn element_dofs(&self, elem: usize) -> std::ops::Range<usize> {
        self.local_dim * elem..self.local_dim * (elem + 1)
    }

    pub fn eval_basis(&self, elem: usize, ldof: usize, point: Point) -> Result<[f64; 2]> {
        self.mesh.check_element(elem)?;
        if ldof >= self.local_dim {
            return invalid(format!("local velocity dof {ldof} out of range ({})", self.local_dim));
        }
        let rect = self.mesh.rect_unchecked(elem);
        Ok(self.reference_basis(ldof, rect.to_reference(point)))
    }

    /// Q0: unit component indicators. HMZ: `(1,0), (x,0), (0,1), (0,y)` in reference coordinates.
    #[inline]
    pub(crate) fn reference_basis(&self, ldof: usize, r: [f64; 2]) -> [f64; 2] {
        match (self.family, ldof) {
            (ElementFamily::NedelecQ1, 0) => [1.0, 0.0],
            (ElementFamily::NedelecQ1, _) => [0.0, 1.0],
            (ElementFamily::Hmz, 0) => [1.0, 0.0],
            (ElementFamily::Hmz, 1) => [r[0], 0.0],
            (ElementFamily::Hmz, 2) => [0.0, 1.0],
            (ElementFamily::Hmz, _) => [0.0, r[1]],
        }
    }

    /// Element-local L2 projection. The local bases are orthogonal, so each
    /// coefficient is a ratio of two integrals.
    pub fn interpolate(&self, field: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (e, rect) in self.mesh.rects().enumerate() {
            let rule = rect_rule_composite(&rect).expect("mesh rectangles are non-degenerate");
            let mut num = [0.0; 4];
            let mut den = [0.0; 4];
            for (p, w) in rule.iter() {
                let f = field(p);
                let r = rect.to_reference(p);
                for (l, (n, d)) in num.iter_mut().zip(den.iter_mut()).enumerate().take(self.local_dim) {
                    let phi = self.reference_basis(l, r);
                    *n += w * (f[0] * phi[0] + f[1] * phi[1]);
                    *d += w * (phi[0] * phi[0] + phi[1] * phi[1]);
                }
            }
            for (l, g) in self.element_dofs(e).enumerate() {
                out[g] = num[l] / den[l];
            }
        }
        out
    }

    pub fn evaluate(&self, coeffs: &[f64], elem: usize, point: Point) -> [f64; 2] {
        let rect = self.mesh.rect_unchecked(elem);
        let r = rect.to_reference(point);
        self.element_dofs(elem).enumerate().fold([0.0; 2], |acc, (l, g)| {
            let phi = self.reference_basis(l, r);
            [acc[0] + coeffs[g] * phi[0], acc[1] + coeffs[g] * phi[1]]
        })
    }
}
