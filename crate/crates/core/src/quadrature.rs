//! Quadrature on triangles and element rectangles.

use crate::error::{invalid, Result};
use crate::mesh::{Point, Rect};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p)).sum()
    }

    fn extend(&mut self, other: QuadratureRule) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }
}

/// Free-function form of [`QuadratureRule::integrate`].
pub fn integrate(rule: &QuadratureRule, f: impl Fn(Point) -> f64) -> f64 {
    rule.integrate(f)
}

/// Seven-point degree-5 rule (Radon) mapped onto the triangle `v0 v1 v2`.
pub fn triangle_rule_deg5(v0: Point, v1: Point, v2: Point) -> Result<QuadratureRule> {
    let area = 0.5 * ((v1[0] - v0[0]) * (v2[1] - v0[1]) - (v2[0] - v0[0]) * (v1[1] - v0[1]));
    let area = area.abs();
    let scale = v0[0].abs().max(v0[1].abs()).max(v1[0].abs()).max(v1[1].abs()).max(1.0);
    if !(area > 1e-14 * scale * scale) {
        return invalid(format!("degenerate triangle {v0:?} {v1:?} {v2:?}"));
    }
    let s15 = 15f64.sqrt();
    let a1 = (6.0 - s15) / 21.0;
    let b1 = (9.0 + 2.0 * s15) / 21.0;
    let w1 = (155.0 - s15) / 1200.0;
    let a2 = (6.0 + s15) / 21.0;
    let b2 = (9.0 - 2.0 * s15) / 21.0;
    let w2 = (155.0 + s15) / 1200.0;
    let third = 1.0 / 3.0;
    let bary: [([f64; 3], f64); 7] = [
        ([third, third, third], 9.0 / 40.0),
        ([a1, a1, b1], w1),
        ([a1, b1, a1], w1),
        ([b1, a1, a1], w1),
        ([a2, a2, b2], w2),
        ([a2, b2, a2], w2),
        ([b2, a2, a2], w2),
    ];
    let (points, weights) = bary
        .iter()
        .map(|(l, w)| {
            let p = [
                l[0] * v0[0] + l[1] * v1[0] + l[2] * v2[0],
                l[0] * v0[1] + l[1] * v1[1] + l[2] * v2[1],
            ];
            (p, w * area)
        })
        .unzip();
    Ok(QuadratureRule { points, weights })
}

/// Two seven-point rules on the triangles cut by the lower-left to upper-right diagonal.
pub fn rect_rule_composite(rect: &Rect) -> Result<QuadratureRule> {
    check_rect(rect)?;
    let [c0, c1, c2, c3] = rect.corners;
    let mut rule = triangle_rule_deg5(c0, c1, c2)?;
    rule.extend(triangle_rule_deg5(c0, c2, c3)?);
    Ok(rule)
}

/// Vertex rule `(hx hy / 4) * sum g(T_i)`, exact on Q1; used for mass lumping.
pub fn rect_rule_lumped(rect: &Rect) -> Result<QuadratureRule> {
    check_rect(rect)?;
    let w = 0.25 * rect.hx * rect.hy;
    Ok(QuadratureRule { points: rect.corners.to_vec(), weights: vec![w; 4] })
}

fn check_rect(rect: &Rect) -> Result<()> {
    if !(rect.hx > 0.0 && rect.hy > 0.0) {
        return invalid(format!("degenerate rectangle {:?}", rect.corners));
    }
    Ok(())
}
