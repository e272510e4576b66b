//! Uniform rectangular partitions of an axis-aligned rectangle.
//!
//! Vertices are numbered `i + j * (nx + 1)` and elements row-major (x fastest).
//! Horizontal edges come first (`i + j * nx`), followed by vertical edges
//! (`nx * (ny + 1) + i + j * (nx + 1)`). Edge normals are fixed globally:
//! `+y` on horizontal edges and `+x` on vertical edges.

use crate::error::{invalid, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrientation {
    /// Runs along x; unit normal `+y`.
    Horizontal,
    /// Runs along y; unit normal `+x`.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Endpoints ordered by increasing coordinate along the edge.
    pub vertices: [usize; 2],
    pub orientation: EdgeOrientation,
    pub boundary: bool,
}

impl Edge {
    pub fn normal(&self) -> Point {
        match self.orientation {
            EdgeOrientation::Horizontal => [0.0, 1.0],
            EdgeOrientation::Vertical => [1.0, 0.0],
        }
    }
}

/// Axis-aligned element rectangle with corners counterclockwise from lower-left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub corners: [Point; 4],
    pub hx: f64,
    pub hy: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, hx: f64, hy: f64) -> Result<Self> {
        if !(hx > 0.0 && hy > 0.0) || !hx.is_finite() || !hy.is_finite() {
            return invalid(format!("degenerate rectangle with sides {hx} x {hy}"));
        }
        Ok(Self {
            corners: [[x0, y0], [x0 + hx, y0], [x0 + hx, y0 + hy], [x0, y0 + hy]],
            hx,
            hy,
        })
    }

    pub fn lower_left(&self) -> Point {
        self.corners[0]
    }

    pub fn center(&self) -> Point {
        [self.corners[0][0] + 0.5 * self.hx, self.corners[0][1] + 0.5 * self.hy]
    }

    pub fn area(&self) -> f64 {
        self.hx * self.hy
    }

    /// Maps a physical point to reference coordinates in `[-1, 1]^2`.
    pub fn to_reference(&self, p: Point) -> Point {
        let c = self.center();
        [2.0 * (p[0] - c[0]) / self.hx, 2.0 * (p[1] - c[1]) / self.hy]
    }

    pub fn from_reference(&self, r: Point) -> Point {
        let c = self.center();
        [c[0] + 0.5 * self.hx * r[0], c[1] + 0.5 * self.hy * r[1]]
    }
}

#[derive(Debug, Clone)]
pub struct StructuredMesh {
    nx: usize,
    ny: usize,
    bounds: [f64; 4],
    edges: Vec<Edge>,
}

impl StructuredMesh {
    /// Builds an `nx` by `ny` partition of `[x0, x1] x [y0, y1]`; `bounds = [x0, x1, y0, y1]`.
    pub fn uniform(nx: usize, ny: usize, bounds: [f64; 4]) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return invalid(format!("element counts must be positive, got {nx} x {ny}"));
        }
        let [x0, x1, y0, y1] = bounds;
        if !(x0 < x1 && y0 < y1) {
            return invalid(format!("inverted domain bounds {bounds:?}"));
        }
        let vid = |i: usize, j: usize| i + j * (nx + 1);
        let mut edges = Vec::with_capacity(nx * (ny + 1) + ny * (nx + 1));
        for j in 0..=ny {
            for i in 0..nx {
                edges.push(Edge {
                    vertices: [vid(i, j), vid(i + 1, j)],
                    orientation: EdgeOrientation::Horizontal,
                    boundary: j == 0 || j == ny,
                });
            }
        }
        for j in 0..ny {
            for i in 0..=nx {
                edges.push(Edge {
                    vertices: [vid(i, j), vid(i, j + 1)],
                    orientation: EdgeOrientation::Vertical,
                    boundary: i == 0 || i == nx,
                });
            }
        }
        Ok(Self { nx, ny, bounds, edges })
    }

    pub fn unit_square(n: usize) -> Result<Self> {
        Self::uniform(n, n, [0.0, 1.0, 0.0, 1.0])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn bounds(&self) -> [f64; 4] {
        self.bounds
    }

    pub fn hx(&self) -> f64 {
        (self.bounds[1] - self.bounds[0]) / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        (self.bounds[3] - self.bounds[2]) / self.ny as f64
    }

    /// Mesh size `h = max(hx, hy)`.
    pub fn h(&self) -> f64 {
        self.hx().max(self.hy())
    }

    pub fn num_vertices(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn num_elements(&self) -> usize {
        self.nx * self.ny
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_horizontal_edges(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    pub fn vertex(&self, v: usize) -> Point {
        let i = v % (self.nx + 1);
        let j = v / (self.nx + 1);
        [
            self.bounds[0] + i as f64 * self.hx(),
            self.bounds[2] + j as f64 * self.hy(),
        ]
    }

    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        i + j * (self.nx + 1)
    }

    /// Element grid position `(i, j)`.
    pub fn element_ij(&self, elem: usize) -> (usize, usize) {
        (elem % self.nx, elem / self.nx)
    }

    pub fn check_element(&self, elem: usize) -> Result<()> {
        if elem >= self.num_elements() {
            return invalid(format!(
                "element {elem} out of range (mesh has {})",
                self.num_elements()
            ));
        }
        Ok(())
    }

    /// Vertices counterclockwise from lower-left.
    pub fn element_vertices(&self, elem: usize) -> [usize; 4] {
        let (i, j) = self.element_ij(elem);
        [
            self.vertex_index(i, j),
            self.vertex_index(i + 1, j),
            self.vertex_index(i + 1, j + 1),
            self.vertex_index(i, j + 1),
        ]
    }

    /// Edges in the order bottom, right, top, left.
    pub fn element_edges(&self, elem: usize) -> [usize; 4] {
        let (i, j) = self.element_ij(elem);
        let h = self.num_horizontal_edges();
        [
            i + j * self.nx,
            h + (i + 1) + j * (self.nx + 1),
            i + (j + 1) * self.nx,
            h + i + j * (self.nx + 1),
        ]
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Elements sharing edge `e`: one for boundary edges, two otherwise.
    /// For interior edges the first entry lies on the `-normal` side.
    pub fn edge_elements(&self, e: usize) -> Vec<usize> {
        let h = self.num_horizontal_edges();
        let mut out = Vec::with_capacity(2);
        if e < h {
            let (i, j) = (e % self.nx, e / self.nx);
            if j > 0 {
                out.push(i + (j - 1) * self.nx);
            }
            if j < self.ny {
                out.push(i + j * self.nx);
            }
        } else {
            let k = e - h;
            let (i, j) = (k % (self.nx + 1), k / (self.nx + 1));
            if i > 0 {
                out.push(i - 1 + j * self.nx);
            }
            if i < self.nx {
                out.push(i + j * self.nx);
            }
        }
        out
    }

    pub fn element_rect(&self, elem: usize) -> Result<Rect> {
        self.check_element(elem)?;
        Ok(self.rect_unchecked(elem))
    }

    pub(crate) fn rect_unchecked(&self, elem: usize) -> Rect {
        let ll = self.vertex(self.element_vertices(elem)[0]);
        Rect {
            corners: [
                ll,
                [ll[0] + self.hx(), ll[1]],
                [ll[0] + self.hx(), ll[1] + self.hy()],
                [ll[0], ll[1] + self.hy()],
            ],
            hx: self.hx(),
            hy: self.hy(),
        }
    }

    pub fn rects(&self) -> impl Iterator<Item = Rect> + '_ {
        (0..self.num_elements()).map(|e| self.rect_unchecked(e))
    }
}
