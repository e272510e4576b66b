//! Isotropic constitutive law in two dimensions.

use std::ops::{Add, Mul, Sub};

use crate::error::{invalid, Result};

/// Symmetric 2x2 tensor stored as `(t11, t22, t12)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VoigtTensor {
    pub t11: f64,
    pub t22: f64,
    pub t12: f64,
}

impl VoigtTensor {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const IDENTITY: Self = Self::new(1.0, 1.0, 0.0);

    pub const fn new(t11: f64, t22: f64, t12: f64) -> Self {
        Self { t11, t22, t12 }
    }

    pub fn trace(&self) -> f64 {
        self.t11 + self.t22
    }

    /// Full contraction `s : t`; the shear entry counts twice.
    pub fn contract(&self, other: &Self) -> f64 {
        self.t11 * other.t11 + self.t22 * other.t22 + 2.0 * self.t12 * other.t12
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.t11, self.t22, self.t12]
    }

    pub fn max_abs(&self) -> f64 {
        self.t11.abs().max(self.t22.abs()).max(self.t12.abs())
    }
}

impl Add for VoigtTensor {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.t11 + o.t11, self.t22 + o.t22, self.t12 + o.t12)
    }
}

impl Sub for VoigtTensor {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.t11 - o.t11, self.t22 - o.t22, self.t12 - o.t12)
    }
}

impl Mul<VoigtTensor> for f64 {
    type Output = VoigtTensor;
    fn mul(self, t: VoigtTensor) -> VoigtTensor {
        VoigtTensor::new(self * t.t11, self * t.t22, self * t.t12)
    }
}

/// Homogeneous isotropic medium: density and Lamé parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicMaterial {
    rho: f64,
    mu: f64,
    lambda: f64,
}

impl IsotropicMaterial {
    pub fn new(rho: f64, mu: f64, lambda: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return invalid(format!("density must be positive, got {rho}"));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return invalid(format!("shear modulus must be positive, got {mu}"));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return invalid(format!("lambda must be nonnegative, got {lambda}"));
        }
        Ok(Self { rho, mu, lambda })
    }

    /// `rho = mu = lambda = 1`.
    pub fn unit() -> Self {
        Self { rho: 1.0, mu: 1.0, lambda: 1.0 }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `C eps = 2 mu eps + lambda tr(eps) I`.
    pub fn apply_stiffness(&self, eps: VoigtTensor) -> VoigtTensor {
        let lt = self.lambda * eps.trace();
        VoigtTensor::new(
            2.0 * self.mu * eps.t11 + lt,
            2.0 * self.mu * eps.t22 + lt,
            2.0 * self.mu * eps.t12,
        )
    }

    /// Inverse of [`apply_stiffness`](Self::apply_stiffness).
    pub fn apply_compliance(&self, sig: VoigtTensor) -> VoigtTensor {
        let s = 1.0 / (2.0 * self.mu);
        let shift = self.lambda / (2.0 * self.mu + 2.0 * self.lambda) * sig.trace();
        VoigtTensor::new(s * (sig.t11 - shift), s * (sig.t22 - shift), s * sig.t12)
    }

    /// Extreme eigenvalues `(M0, M1)` of the compliance on symmetric tensors.
    pub fn compliance_bounds(&self) -> (f64, f64) {
        (1.0 / (2.0 * self.mu + 2.0 * self.lambda), 1.0 / (2.0 * self.mu))
    }
}
