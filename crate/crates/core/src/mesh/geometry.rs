use crate::{rot, Point, Vec2};

/// Per-triangle geometric quantities.
///
/// Index `k` refers to vertex `a_k`, the edge `e_k` opposite it (running from
/// `a_{k+1}` to `a_{k+2}`) and the angle `θ_k` at `a_k`.
#[derive(Debug, Clone, Copy)]
pub struct TriangleGeometry {
    pub vertices: [Point; 3],
    pub area: f64,
    pub lengths: [f64; 3],
    pub angles: [f64; 3],
    /// Distance from `a_k` to the line through `e_k`.
    pub heights: [f64; 3],
    /// Counterclockwise unit tangents of the edges.
    pub tangents: [Vec2; 3],
    /// Outward unit normals of the edges.
    pub normals: [Vec2; 3],
    pub barycenter: Point,
    pub grad_lambda: [Vec2; 3],
}

impl TriangleGeometry {
    pub fn new(a0: Point, a1: Point, a2: Point) -> Self {
        let vertices = [a0, a1, a2];
        let area = super::signed_area(a0, a1, a2);
        let mut lengths = [0.0; 3];
        let mut tangents = [Vec2::zeros(); 3];
        let mut normals = [Vec2::zeros(); 3];
        let mut heights = [0.0; 3];
        let mut grad_lambda = [Vec2::zeros(); 3];
        for k in 0..3 {
            let d = vertices[(k + 2) % 3] - vertices[(k + 1) % 3];
            lengths[k] = d.norm();
            tangents[k] = d / lengths[k];
            // rot n = t, so n = rot⁻¹ t
            normals[k] = Vec2::new(tangents[k].y, -tangents[k].x);
            heights[k] = 2.0 * area / lengths[k];
            grad_lambda[k] = -normals[k] / heights[k];
        }
        let mut angles = [0.0; 3];
        for k in 0..3 {
            let u = vertices[(k + 1) % 3] - vertices[k];
            let v = vertices[(k + 2) % 3] - vertices[k];
            angles[k] = (u.perp(&v)).atan2(u.dot(&v));
        }
        TriangleGeometry {
            vertices,
            area,
            lengths,
            angles,
            heights,
            tangents,
            normals,
            barycenter: (a0 + a1 + a2) / 3.0,
            grad_lambda,
        }
    }

    pub fn barycentric(&self, x: Point) -> [f64; 3] {
        let mut l = [0.0; 3];
        for k in 0..3 {
            let on_edge = self.vertices[(k + 1) % 3];
            // λ_k vanishes on e_k, which contains a_{k+1}
            l[k] = self.grad_lambda[k].dot(&(x - on_edge));
        }
        l
    }

    pub fn from_barycentric(&self, l: [f64; 3]) -> Point {
        self.vertices[0] * l[0] + self.vertices[1] * l[1] + self.vertices[2] * l[2]
    }

    /// Whether `x` lies in the closed triangle up to a relative tolerance.
    pub fn contains(&self, x: Point, tol: f64) -> bool {
        self.barycentric(x).iter().all(|&l| l >= -tol)
    }

    pub fn edge_midpoint(&self, k: usize) -> Point {
        (self.vertices[(k + 1) % 3] + self.vertices[(k + 2) % 3]) * 0.5
    }

    pub fn diameter(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }

    pub fn cot(&self, k: usize) -> f64 {
        self.angles[k].cos() / self.angles[k].sin()
    }

    /// `rot n_k`, which equals `t_k`.
    pub fn rotated_normal(&self, k: usize) -> Vec2 {
        rot(self.normals[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn reference() -> TriangleGeometry {
        TriangleGeometry::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0))
    }

    #[test]
    fn reference_triangle() {
        let g = reference();
        assert_abs_diff_eq!(g.area, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g.lengths[0], 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(g.lengths[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.lengths[2], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.normals[0].x, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(g.normals[0].y, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(g.heights[0], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(g.grad_lambda[0].x, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.grad_lambda[0].y, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.angles[0], PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn equilateral_angles() {
        let g = TriangleGeometry::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 3f64.sqrt() / 2.0),
        );
        for k in 0..3 {
            assert_abs_diff_eq!(g.angles[k], PI / 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn identities_on_skewed_triangle() {
        let g = TriangleGeometry::new(Point::new(0.1, -0.2), Point::new(1.3, 0.4), Point::new(0.2, 0.9));
        let sum: f64 = g.angles.iter().sum();
        assert_abs_diff_eq!(sum, PI, epsilon = 1e-14);
        for k in 0..3 {
            assert_abs_diff_eq!(g.area, 0.5 * g.lengths[k] * g.heights[k], epsilon = 1e-14);
            let r = g.rotated_normal(k);
            assert_abs_diff_eq!((r - g.tangents[k]).norm(), 0.0, epsilon = 1e-15);
            let expect = -g.normals[k] / g.heights[k];
            assert_abs_diff_eq!((g.grad_lambda[k] - expect).norm(), 0.0, epsilon = 1e-15);
            // outward: normal points away from the opposite vertex
            assert!(g.normals[k].dot(&(g.edge_midpoint(k) - g.vertices[k])) > 0.0);
        }
        let l = g.barycentric(g.barycenter);
        for k in 0..3 {
            assert_abs_diff_eq!(l[k], 1.0 / 3.0, epsilon = 1e-14);
        }
        let x = g.from_barycentric([0.2, 0.3, 0.5]);
        let back = g.barycentric(x);
        assert_abs_diff_eq!(back[1], 0.3, epsilon = 1e-14);
    }
}
