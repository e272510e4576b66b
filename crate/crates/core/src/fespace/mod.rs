//! The two rectangular stress/velocity element pairs.
//!
//! * `NedelecQ1`: every stress component is continuous Q1 with vertex-value
//!   DOFs, paired with componentwise Q0 velocities.
//! * `Hmz`: `tau_11` in `span{1, x, x^2}` with shared values on vertical edges,
//!   `tau_22` in `span{1, y, y^2}` with shared values on horizontal edges,
//!   `tau_12` continuous Q1; velocities `w_1 in span{1, x}`, `w_2 in span{1, y}`
//!   per element.
//!
//! Basis functions are written on the reference square `[-1, 1]^2`.

mod stress;
mod velocity;

use std::fmt;
use std::str::FromStr;

pub use stress::{build_stress_space, StressDofKind, StressSpace};
pub use velocity::{build_velocity_space, VelocitySpace};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementFamily {
    NedelecQ1,
    Hmz,
}

impl ElementFamily {
    pub const ALL: [ElementFamily; 2] = [ElementFamily::NedelecQ1, ElementFamily::Hmz];

    pub fn name(&self) -> &'static str {
        match self {
            ElementFamily::NedelecQ1 => "nedelec-q1q0",
            ElementFamily::Hmz => "hmz",
        }
    }
}

impl fmt::Display for ElementFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ElementFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nedelec-q1q0" | "nedelec" | "nedelec-q1" => Ok(ElementFamily::NedelecQ1),
            "hmz" => Ok(ElementFamily::Hmz),
            other => Err(Error::InvalidArgument(format!(
                "unknown element family '{other}' (expected nedelec-q1q0 or hmz)"
            ))),
        }
    }
}

/// Reference coordinates of the four element vertices, counterclockwise from lower-left.
pub(crate) const REF_VERTICES: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

/// Bilinear hat of reference vertex `k` and its reference gradient.
#[inline]
pub(crate) fn hat(k: usize, r: [f64; 2]) -> (f64, [f64; 2]) {
    let [xk, yk] = REF_VERTICES[k];
    let ax = 1.0 + xk * r[0];
    let ay = 1.0 + yk * r[1];
    (0.25 * ax * ay, [0.25 * xk * ay, 0.25 * ax * yk])
}
