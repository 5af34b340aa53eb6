//! Coefficients, data and manufactured solutions.

use std::f64::consts::PI;

use crate::{Mat2, Point, Vec2};

type ScalarFn = Box<dyn Fn(Point) -> f64 + Send + Sync>;
type VectorFn = Box<dyn Fn(Point) -> Vec2 + Send + Sync>;
type MatrixFn = Box<dyn Fn(Point) -> Mat2 + Send + Sync>;
/// Boundary data `g(x, n_out)`.
type BoundaryFn = Box<dyn Fn(Point, Vec2) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryKind {
    /// `u = g` on the boundary.
    #[default]
    Dirichlet,
    /// `p·n = g` on the boundary.
    Neumann,
}

/// Exact fields of a manufactured problem.
pub struct ExactSolution {
    pub u: ScalarFn,
    pub grad_u: VectorFn,
    /// `p = A∇u + bu`.
    pub p: VectorFn,
    /// `J[i][j] = ∂p_i/∂x_j`.
    pub p_jacobian: MatrixFn,
}

/// The problem `−div p + cu = f` with `p = A∇u + bu`.
///
/// `b` and `c` are optional; `None` means identically zero, which the
/// assembler relies on (pure Neumann gauge, symmetric structure).
pub struct ProblemSpec {
    pub a: MatrixFn,
    pub b: Option<VectorFn>,
    pub c: Option<ScalarFn>,
    pub f: ScalarFn,
    /// Dirichlet: the trace of `u`. Neumann: the outward flux `p·n`.
    pub g: BoundaryFn,
    pub bc: BoundaryKind,
    pub exact: Option<ExactSolution>,
}

impl ProblemSpec {
    /// `A = I`, `b = c = 0`, homogeneous data.
    pub fn new(bc: BoundaryKind) -> Self {
        ProblemSpec {
            a: Box::new(|_| Mat2::identity()),
            b: None,
            c: None,
            f: Box::new(|_| 0.0),
            g: Box::new(|_, _| 0.0),
            bc,
            exact: None,
        }
    }

    pub fn with_a(mut self, a: impl Fn(Point) -> Mat2 + Send + Sync + 'static) -> Self {
        self.a = Box::new(a);
        self
    }

    pub fn with_b(mut self, b: impl Fn(Point) -> Vec2 + Send + Sync + 'static) -> Self {
        self.b = Some(Box::new(b));
        self
    }

    pub fn with_c(mut self, c: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        self.c = Some(Box::new(c));
        self
    }

    pub fn with_f(mut self, f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        self.f = Box::new(f);
        self
    }

    pub fn with_g(mut self, g: impl Fn(Point, Vec2) -> f64 + Send + Sync + 'static) -> Self {
        self.g = Box::new(g);
        self
    }

    /// `u = sin(2πx) sin(πy)` on the unit square with `A = I`, constant `b`
    /// and `c`; `f` and `g` follow analytically. A zero `b` or `c` is
    /// stored as absent.
    pub fn manufactured(b: Vec2, c: f64, bc: BoundaryKind) -> Self {
        let u = |x: Point| (2.0 * PI * x.x).sin() * (PI * x.y).sin();
        let grad_u = |x: Point| {
            Vec2::new(
                2.0 * PI * (2.0 * PI * x.x).cos() * (PI * x.y).sin(),
                PI * (2.0 * PI * x.x).sin() * (PI * x.y).cos(),
            )
        };
        let hess_u = move |x: Point| {
            let uxy = 2.0 * PI * PI * (2.0 * PI * x.x).cos() * (PI * x.y).cos();
            let v = u(x);
            Mat2::new(-4.0 * PI * PI * v, uxy, uxy, -PI * PI * v)
        };
        let p = move |x: Point| grad_u(x) + b * u(x);
        let p_jacobian = move |x: Point| hess_u(x) + b * grad_u(x).transpose();
        // −div p + cu with div p = Δu + b·∇u
        let f = move |x: Point| 5.0 * PI * PI * u(x) - b.dot(&grad_u(x)) + c * u(x);
        let g: BoundaryFn = match bc {
            BoundaryKind::Dirichlet => Box::new(move |x, _| u(x)),
            BoundaryKind::Neumann => Box::new(move |x, n| p(x).dot(&n)),
        };
        ProblemSpec {
            a: Box::new(|_| Mat2::identity()),
            b: (b != Vec2::zeros()).then(|| Box::new(move |_| b) as VectorFn),
            c: (c != 0.0).then(|| Box::new(move |_| c) as ScalarFn),
            f: Box::new(f),
            g,
            bc,
            exact: Some(ExactSolution {
                u: Box::new(u),
                grad_u: Box::new(grad_u),
                p: Box::new(p),
                p_jacobian: Box::new(p_jacobian),
            }),
        }
    }

    /// `−Δu + u = f`, `u = 0` on the boundary.
    pub fn reaction_diffusion() -> Self {
        Self::manufactured(Vec2::zeros(), 1.0, BoundaryKind::Dirichlet)
    }

    /// `−Δu = f`, `u = 0` on the boundary.
    pub fn poisson() -> Self {
        Self::manufactured(Vec2::zeros(), 0.0, BoundaryKind::Dirichlet)
    }

    /// `−div(∇u + bu) + u = f` with `b = (1, 2)`.
    pub fn convection_reaction() -> Self {
        Self::manufactured(Vec2::new(1.0, 2.0), 1.0, BoundaryKind::Dirichlet)
    }

    pub fn c_vanishes(&self) -> bool {
        self.c.is_none()
    }
}
