//! Closed-form solutions used to measure discretization errors.
//!
//! Every example separates as `u = a(t) U(x)` and `sigma = b(t) S(x)`, so
//! `v = a' U`, `v_t = a'' U`, `sigma_t = b' S`, and the body force is
//! `f = rho a'' U - b div S`. The spatial factors and their derivatives are
//! hand-differentiated below; [`verify_residuals`] checks them against finite
//! differences of the primary evaluators.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::material::{IsotropicMaterial, VoigtTensor};
use crate::mesh::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Example {
    /// Polynomial displacement with `exp(-t)` decay.
    Polynomial,
    /// `sin(pi x) sin(pi y)` displacement.
    Trigonometric,
    /// Displacement with `x^{3/2}`, `y^{3/2}` factors; `sigma_12` has unbounded derivatives at `x = 0`, `y = 0`.
    HalfPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    Smooth,
    /// Half-power terms in the stress; derivatives blow up at the left and bottom sides.
    HalfPowerSingular,
}

impl Example {
    pub const ALL: [Example; 3] = [Example::Polynomial, Example::Trigonometric, Example::HalfPower];

    pub fn from_id(id: u32) -> Result<Self> {
        match id {
            1 => Ok(Example::Polynomial),
            2 => Ok(Example::Trigonometric),
            3 => Ok(Example::HalfPower),
            _ => invalid(format!("unknown example {id} (expected 1, 2 or 3)")),
        }
    }

    pub fn id(&self) -> u32 {
        match self {
            Example::Polynomial => 1,
            Example::Trigonometric => 2,
            Example::HalfPower => 3,
        }
    }

    pub fn regularity(&self) -> Regularity {
        match self {
            Example::HalfPower => Regularity::HalfPowerSingular,
            _ => Regularity::Smooth,
        }
    }
}

/// Exact displacement, velocity, stress and body force of one example.
#[derive(Debug, Clone, Copy)]
pub struct ExactSolution {
    example: Example,
    rho: f64,
    stress_scale: f64,
}

pub fn exact_fields(example: u32, material: &IsotropicMaterial) -> Result<ExactSolution> {
    Ok(ExactSolution::new(Example::from_id(example)?, material))
}

/// Time factors `(a, a', a'', b, b')`.
fn time_factors(example: Example, t: f64) -> [f64; 5] {
    match example {
        Example::Polynomial | Example::Trigonometric => {
            let e = (-t).exp();
            [-e, e, -e, t * e, (1.0 - t) * e]
        }
        Example::HalfPower => {
            let e = t.exp();
            [e, e, e, e, e]
        }
    }
}

/// `P(s) = s^2 (1 - s)^2` and its first three derivatives.
fn bump(s: f64) -> [f64; 4] {
    [
        s.powi(4) - 2.0 * s.powi(3) + s * s,
        4.0 * s.powi(3) - 6.0 * s * s + 2.0 * s,
        12.0 * s * s - 12.0 * s + 2.0,
        24.0 * s - 12.0,
    ]
}

/// `R(s) = s^{3/2} - s^{5/2}` and its first two derivatives.
fn half_power(s: f64) -> [f64; 3] {
    let r = s.sqrt();
    [
        s * r - s * s * r,
        1.5 * r - 2.5 * s * r,
        if s > 0.0 { 0.75 / r - 3.75 * r } else { f64::INFINITY },
    ]
}

/// Spatial factors: `U`, `grad U` as `[[dU1/dx, dU1/dy], [dU2/dx, dU2/dy]]`, `S`, `div S`.
struct Spatial {
    u: [f64; 2],
    grad_u: [[f64; 2]; 2],
    s: VoigtTensor,
    div_s: [f64; 2],
}

fn spatial(example: Example, p: Point) -> Spatial {
    let [x, y] = p;
    match example {
        Example::Polynomial => {
            let [px, dpx, d2px, d3px] = bump(x);
            let [py, dpy, d2py, d3py] = bump(y);
            let s11 = 4.0 * dpx * dpy;
            Spatial {
                u: [px * dpy, py * dpx],
                grad_u: [[dpx * dpy, px * d2py], [py * d2px, dpy * dpx]],
                s: VoigtTensor::new(s11, s11, px * d2py + py * d2px),
                div_s: [
                    4.0 * d2px * dpy + (px * d3py + dpy * d2px),
                    (dpx * d2py + py * d3px) + 4.0 * dpx * d2py,
                ],
            }
        }
        Example::Trigonometric => {
            let (sx, cx) = (PI * x).sin_cos();
            let (sy, cy) = (PI * y).sin_cos();
            let s = sx * sy;
            let d = PI * PI * (2.0 * cx * cy - 4.0 * sx * sy);
            Spatial {
                u: [s, s],
                grad_u: [[PI * cx * sy, PI * sx * cy], [PI * cx * sy, PI * sx * cy]],
                s: VoigtTensor::new(
                    PI * (3.0 * cx * sy + sx * cy),
                    PI * (3.0 * sx * cy + cx * sy),
                    PI * (sx * cy + cx * sy),
                ),
                div_s: [d, d],
            }
        }
        Example::HalfPower => {
            let (sx, cx) = (PI * x).sin_cos();
            let (sy, cy) = (PI * y).sin_cos();
            let [rx, drx, d2rx] = half_power(x);
            let [ry, dry, d2ry] = half_power(y);
            Spatial {
                u: [sx * ry, sy * rx],
                grad_u: [[PI * cx * ry, sx * dry], [sy * drx, PI * cy * rx]],
                s: VoigtTensor::new(
                    PI * (1.5 * cx * ry + 0.5 * cy * rx),
                    PI * (1.5 * cy * rx + 0.5 * cx * ry),
                    0.5 * (sx * dry + sy * drx),
                ),
                div_s: [
                    PI * (-1.5 * PI * sx * ry + 0.5 * cy * drx) + 0.5 * (sx * d2ry + PI * cy * drx),
                    0.5 * (PI * cx * dry + sy * d2rx) + PI * (-1.5 * PI * sy * rx + 0.5 * cx * dry),
                ],
            }
        }
    }
}

impl ExactSolution {
    pub fn new(example: Example, material: &IsotropicMaterial) -> Self {
        Self { example, rho: material.rho(), stress_scale: 1.0 }
    }

    /// Multiplies the stress by `factor` while keeping `f` consistent with it.
    /// Only the constitutive law is broken; used as a negative control.
    pub fn with_stress_scale(mut self, factor: f64) -> Self {
        self.stress_scale = factor;
        self
    }

    pub fn example(&self) -> Example {
        self.example
    }

    pub fn regularity(&self) -> Regularity {
        self.example.regularity()
    }

    pub fn u(&self, p: Point, t: f64) -> [f64; 2] {
        let a = time_factors(self.example, t)[0];
        let u = spatial(self.example, p).u;
        [a * u[0], a * u[1]]
    }

    pub fn v(&self, p: Point, t: f64) -> [f64; 2] {
        let a1 = time_factors(self.example, t)[1];
        let u = spatial(self.example, p).u;
        [a1 * u[0], a1 * u[1]]
    }

    pub fn v_t(&self, p: Point, t: f64) -> [f64; 2] {
        let a2 = time_factors(self.example, t)[2];
        let u = spatial(self.example, p).u;
        [a2 * u[0], a2 * u[1]]
    }

    /// Symmetric velocity gradient `eps(v)`.
    pub fn strain_rate(&self, p: Point, t: f64) -> VoigtTensor {
        let a1 = time_factors(self.example, t)[1];
        let g = spatial(self.example, p).grad_u;
        a1 * VoigtTensor::new(g[0][0], g[1][1], 0.5 * (g[0][1] + g[1][0]))
    }

    pub fn sigma(&self, p: Point, t: f64) -> VoigtTensor {
        (self.stress_scale * time_factors(self.example, t)[3]) * spatial(self.example, p).s
    }

    pub fn sigma_t(&self, p: Point, t: f64) -> VoigtTensor {
        (self.stress_scale * time_factors(self.example, t)[4]) * spatial(self.example, p).s
    }

    pub fn div_sigma(&self, p: Point, t: f64) -> [f64; 2] {
        let b = self.stress_scale * time_factors(self.example, t)[3];
        let d = spatial(self.example, p).div_s;
        [b * d[0], b * d[1]]
    }

    /// Body force `rho v_t - div sigma`.
    pub fn f(&self, p: Point, t: f64) -> [f64; 2] {
        let [_, _, a2, b, _] = time_factors(self.example, t);
        let b = self.stress_scale * b;
        let sp = spatial(self.example, p);
        [
            self.rho * a2 * sp.u[0] - b * sp.div_s[0],
            self.rho * a2 * sp.u[1] - b * sp.div_s[1],
        ]
    }
}

/// Largest residuals of the velocity-stress equations over the sample set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// `max |rho v_t - div sigma - f|`
    pub momentum: f64,
    /// `max |sigma + sigma_t - C eps(v)|`
    pub constitutive: f64,
    /// `max |v - u_t|`
    pub velocity: f64,
    pub samples: usize,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.momentum.max(self.constitutive).max(self.velocity)
    }
}

/// Distance kept from the sides of the unit square for the half-power example.
pub const SINGULAR_MARGIN: f64 = 1e-3;
const FD_STEP: f64 = 1e-4;

/// Fourth-order central difference of `g` at `x`.
fn central4<const N: usize>(g: impl Fn(f64) -> [f64; N], x: f64, h: f64) -> [f64; N] {
    let (m2, m1, p1, p2) = (g(x - 2.0 * h), g(x - h), g(x + h), g(x + 2.0 * h));
    std::array::from_fn(|k| (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * h))
}

/// Halton radical inverse.
fn halton(mut i: usize, base: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Evaluates the momentum and constitutive residuals at `n_samples` Halton
/// points of `Omega x (0, t_final)`, with every derivative taken by fourth-order
/// central differences of `u`, `v` and `sigma`.
///
/// For the half-power example points stay [`SINGULAR_MARGIN`] away from the
/// boundary and the spatial step shrinks near `x = 0` and `y = 0`.
pub fn verify_residuals(sol: &ExactSolution, material: &IsotropicMaterial, n_samples: usize, t_final: f64) -> Result<ResidualReport> {
    if n_samples == 0 {
        return invalid("at least one sample point is required");
    }
    let margin = match sol.regularity() {
        Regularity::Smooth => 0.0,
        Regularity::HalfPowerSingular => SINGULAR_MARGIN,
    };
    let mut report = ResidualReport { momentum: 0.0, constitutive: 0.0, velocity: 0.0, samples: n_samples };
    for i in 1..=n_samples {
        let x = margin + (1.0 - 2.0 * margin) * halton(i, 2);
        let y = margin + (1.0 - 2.0 * margin) * halton(i, 3);
        let t = t_final * halton(i, 5);
        let h = match sol.regularity() {
            Regularity::Smooth => FD_STEP,
            Regularity::HalfPowerSingular => FD_STEP.min(x.min(y) / 200.0),
        };
        let ht = FD_STEP.min(0.25 * t.max(1e-3));

        let v_t = central4(|s| sol.v([x, y], s), t, ht);
        let sig_t = central4(|s| sol.sigma([x, y], s).as_array(), t, ht);
        let u_t = central4(|s| sol.u([x, y], s), t, ht);
        let sig_x = central4(|s| sol.sigma([s, y], t).as_array(), x, h);
        let sig_y = central4(|s| sol.sigma([x, s], t).as_array(), y, h);
        let v_x = central4(|s| sol.v([s, y], t), x, h);
        let v_y = central4(|s| sol.v([x, s], t), y, h);

        let f = sol.f([x, y], t);
        let div = [sig_x[0] + sig_y[2], sig_x[2] + sig_y[1]];
        let rho = material.rho();
        for k in 0..2 {
            report.momentum = report.momentum.max((rho * v_t[k] - div[k] - f[k]).abs());
        }
        let eps = VoigtTensor::new(v_x[0], v_y[1], 0.5 * (v_y[0] + v_x[1]));
        let sig = sol.sigma([x, y], t);
        let resid = sig + VoigtTensor::new(sig_t[0], sig_t[1], sig_t[2]) - material.apply_stiffness(eps);
        report.constitutive = report.constitutive.max(resid.max_abs());
        let v = sol.v([x, y], t);
        report.velocity = report.velocity.max((v[0] - u_t[0]).abs()).max((v[1] - u_t[1]).abs());
    }
    Ok(report)
}
