//! Quadrature on triangles and edges.

use std::f64::consts::PI;

use crate::mesh::TriangleGeometry;
use crate::Point;

/// Gauss–Legendre nodes and weights on `[0, 1]`, weights summing to 1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one Gauss point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    // ascending order on [0, 1]
    (nodes, weights)
}

/// Gauss rule on an edge, parametrised by `s ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub params: Vec<f64>,
    pub weights: Vec<f64>,
}

impl EdgeRule {
    /// `n`-point Gauss rule, exact for degree `2n - 1`.
    pub fn gauss(n: usize) -> Self {
        let (params, weights) = gauss_legendre(n);
        EdgeRule { params, weights }
    }

    pub fn degree(&self) -> usize {
        2 * self.params.len() - 1
    }

    /// `∫_{[a,b]} f`.
    pub fn integrate<T>(&self, a: Point, b: Point, f: impl Fn(Point) -> T) -> T
    where
        T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let len = (b - a).norm();
        let mut points = self.params.iter().zip(&self.weights);
        let (&s0, &w0) = points.next().unwrap();
        let mut acc = f(a + (b - a) * s0) * (w0 * len);
        for (&s, &w) in points {
            acc = acc + f(a + (b - a) * s) * (w * len);
        }
        acc
    }
}

impl Default for EdgeRule {
    fn default() -> Self {
        EdgeRule::gauss(4)
    }
}

/// Triangle rule in barycentric coordinates. Weights are fractions of the
/// triangle area and sum to 1.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    degree: usize,
}

impl TriangleRule {
    /// Symmetric 7-point rule of degree 5.
    pub fn degree5() -> Self {
        let s = 15f64.sqrt();
        let a = (6.0 - s) / 21.0;
        let b = (6.0 + s) / 21.0;
        let wa = (155.0 - s) / 1200.0;
        let wb = (155.0 + s) / 1200.0;
        let third = 1.0 / 3.0;
        TriangleRule {
            points: vec![
                [third, third, third],
                [a, a, 1.0 - 2.0 * a],
                [a, 1.0 - 2.0 * a, a],
                [1.0 - 2.0 * a, a, a],
                [b, b, 1.0 - 2.0 * b],
                [b, 1.0 - 2.0 * b, b],
                [1.0 - 2.0 * b, b, b],
            ],
            weights: vec![0.225, wa, wa, wa, wb, wb, wb],
            degree: 5,
        }
    }

    /// The three edge midpoints with equal weights; degree 2. On a
    /// difference of piecewise linear fields it yields the exact norm, and
    /// against a smooth field it measures the midpoint interpolation error.
    pub fn edge_midpoint() -> Self {
        TriangleRule {
            points: vec![[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]],
            weights: vec![1.0 / 3.0; 3],
            degree: 2,
        }
    }

    /// Conical product (collapsed Gauss) rule exact for polynomials of the
    /// given degree.
    pub fn collapsed(degree: usize) -> Self {
        let m = (degree + 2).div_ceil(2);
        let (u, wu) = gauss_legendre(m);
        let (v, wv) = gauss_legendre(m);
        let mut points = Vec::with_capacity(m * m);
        let mut weights = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let x = u[i];
                let y = v[j] * (1.0 - u[i]);
                points.push([1.0 - x - y, x, y]);
                // reference area 1/2 → normalise by 2
                weights.push(2.0 * wu[i] * wv[j] * (1.0 - u[i]));
            }
        }
        TriangleRule {
            points,
            weights,
            degree,
        }
    }

    /// The cheapest built-in rule reaching `degree`.
    pub fn with_degree(degree: usize) -> Self {
        if degree <= 5 {
            TriangleRule::degree5()
        } else {
            TriangleRule::collapsed(degree)
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Physical points and area-scaled weights on `g`.
    pub fn nodes<'a>(&'a self, g: &'a TriangleGeometry) -> impl Iterator<Item = (Point, f64)> + 'a {
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(l, &w)| (g.from_barycentric(*l), w * g.area))
    }

    /// `∫_τ f`.
    pub fn integrate<T>(&self, g: &TriangleGeometry, f: impl Fn(Point) -> T) -> T
    where
        T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let mut it = self.nodes(g);
        let (x0, w0) = it.next().unwrap();
        let mut acc = f(x0) * w0;
        for (x, w) in it {
            acc = acc + f(x) * w;
        }
        acc
    }
}

impl Default for TriangleRule {
    fn default() -> Self {
        TriangleRule::degree5()
    }
}

/// The pair of rules used for all inner products.
#[derive(Debug, Clone, Default)]
pub struct Quadrature {
    pub triangle: TriangleRule,
    pub edge: EdgeRule,
}

impl Quadrature {
    pub fn new(triangle_degree: usize, edge_points: usize) -> Self {
        Quadrature {
            triangle: TriangleRule::with_degree(triangle_degree),
            edge: EdgeRule::gauss(edge_points),
        }
    }

    /// High-order rules for reference computations.
    pub fn high_order() -> Self {
        Quadrature::new(24, 12)
    }
}
