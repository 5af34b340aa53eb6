//! Exact local identities of the RT0/CR pair, evaluated numerically.
//!
//! Every check returns an [`IdentityDefect`]: the largest absolute mismatch
//! and the natural scale it should be compared against. Linear data and
//! callback derivatives keep all of these at round-off level.

use rand::Rng;

use super::fields::{rt_basis_eval, FieldEval, RtField, VectorCrField};
use super::quadrature::{EdgeRule, Quadrature, TriangleRule};
use crate::mesh::{Mesh, TriangleGeometry};
use crate::{Mat2, Point, Vec2};

/// A vector field with a closed-form Jacobian.
pub trait SmoothVectorField: Sync {
    fn value(&self, x: Point) -> Vec2;

    /// `J[i][j] = ∂q_i/∂x_j`.
    fn jacobian(&self, x: Point) -> Mat2;

    fn divergence(&self, x: Point) -> f64 {
        self.jacobian(x).trace()
    }
}

/// `p(x) = c + G x`.
#[derive(Debug, Clone, Copy)]
pub struct LinearField {
    pub constant: Vec2,
    pub gradient: Mat2,
}

impl LinearField {
    /// Derivative along direction `d`: `G d`.
    pub fn directional(&self, d: Vec2) -> Vec2 {
        self.gradient * d
    }
}

impl SmoothVectorField for LinearField {
    fn value(&self, x: Point) -> Vec2 {
        self.constant + self.gradient * x
    }

    fn jacobian(&self, _x: Point) -> Mat2 {
        self.gradient
    }
}

/// A vector field given by a pair of closures.
pub struct SmoothFn<F, J> {
    pub value: F,
    pub jacobian: J,
}

impl<F, J> SmoothVectorField for SmoothFn<F, J>
where
    F: Fn(Point) -> Vec2 + Sync,
    J: Fn(Point) -> Mat2 + Sync,
{
    fn value(&self, x: Point) -> Vec2 {
        (self.value)(x)
    }

    fn jacobian(&self, x: Point) -> Mat2 {
        (self.jacobian)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityDefect {
    pub defect: f64,
    pub scale: f64,
}

impl IdentityDefect {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.defect / self.scale
        } else {
            self.defect
        }
    }

    /// Worst of two outcomes by relative defect.
    pub fn worst(self, other: IdentityDefect) -> IdentityDefect {
        if other.relative() > self.relative() {
            other
        } else {
            self
        }
    }
}

/// `max |N_j(φ_k) − δ_jk|` over the nine pairs, by edge quadrature.
pub fn rt_dof_duality(g: &TriangleGeometry, rule: &EdgeRule) -> IdentityDefect {
    let mut defect: f64 = 0.0;
    for j in 0..3 {
        let a = g.vertices[(j + 1) % 3];
        let b = g.vertices[(j + 2) % 3];
        for k in 0..3 {
            let n = rule.integrate(a, b, |x| rt_basis_eval(g, k, x).dot(&g.normals[j]));
            let delta = if j == k { 1.0 } else { 0.0 };
            defect = defect.max((n - delta).abs());
        }
    }
    IdentityDefect { defect, scale: 1.0 }
}

/// `max_τ |div(Π_h q)|_τ − P_h(div q)|_τ|`.
pub fn commuting_diagram_check(mesh: &Mesh, q: &dyn SmoothVectorField, quad: &Quadrature) -> IdentityDefect {
    let pi = super::interpolate_rt(mesh, &quad.edge, |x| q.value(x));
    let ph_div = super::project_p0(mesh, &quad.triangle, |x| q.divergence(x));
    let mut defect: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for t in 0..mesh.num_triangles() {
        defect = defect.max((pi.divergence(mesh, t) - ph_div.values[t]).abs());
        scale = scale.max(ph_div.values[t].abs());
    }
    IdentityDefect {
        defect,
        scale: scale.max(1.0),
    }
}

/// Π_h I_h^CR q = Π_h q, compared dof-wise. Π_h of the local CR polynomial
/// is computed on every triangle independently by edge quadrature.
pub fn cr_rt_interpolant_check<F>(mesh: &Mesh, q: F, rule: &EdgeRule) -> IdentityDefect
where
    F: Fn(Point) -> Vec2 + Sync,
{
    let cr: VectorCrField = super::interpolate_cr(mesh, rule, &q);
    let pi = super::interpolate_rt(mesh, rule, &q);
    let mut defect: f64 = 0.0;
    for t in 0..mesh.num_triangles() {
        let g = mesh.geometry(t);
        let edges = mesh.triangle_edges(t);
        let signs = mesh.triangle_signs(t);
        for k in 0..3 {
            let a = g.vertices[(k + 1) % 3];
            let b = g.vertices[(k + 2) % 3];
            let local = rule.integrate(a, b, |x| cr.value(mesh, t, x).dot(&g.normals[k]));
            defect = defect.max((local - signs[k] * pi.dofs[edges[k]]).abs());
        }
    }
    let scale = pi.dofs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    IdentityDefect {
        defect,
        scale: scale.max(f64::MIN_POSITIVE),
    }
}

/// Local RT interpolant of a linear field on a single triangle.
fn local_rt_interpolant<'a>(g: &'a TriangleGeometry, p: &LinearField) -> impl Fn(Point) -> Vec2 + 'a {
    let fluxes = [0, 1, 2].map(|k| g.lengths[k] * p.value(g.edge_midpoint(k)).dot(&g.normals[k]));
    move |x| (0..3).map(|k| rt_basis_eval(g, k, x) * fluxes[k]).sum()
}

/// `p_L − Π_h p_L = curl r` with
/// `r = −Σ_k (ℓ_k²/2)(n_k·∂p_L/∂t_k) λ_{k−1} λ_{k+1}`, checked at the nodes
/// of `rule`. Scale is `|∇p_L| · h`.
pub fn local_expansion_check(g: &TriangleGeometry, p: &LinearField, rule: &TriangleRule) -> IdentityDefect {
    let pi = local_rt_interpolant(g, p);
    let coeff = [0, 1, 2].map(|k| -0.5 * g.lengths[k].powi(2) * g.normals[k].dot(&p.directional(g.tangents[k])));
    let mut defect: f64 = 0.0;
    for l in &rule.points {
        let x = g.from_barycentric(*l);
        let mut grad_r = Vec2::zeros();
        for k in 0..3 {
            let (km, kp) = ((k + 2) % 3, (k + 1) % 3);
            grad_r += (g.grad_lambda[km] * l[kp] + g.grad_lambda[kp] * l[km]) * coeff[k];
        }
        let curl_r = Vec2::new(grad_r.y, -grad_r.x);
        defect = defect.max((p.value(x) - pi(x) - curl_r).norm());
    }
    IdentityDefect {
        defect,
        scale: p.gradient.norm() * g.diameter(),
    }
}

/// `∫_τ (p_L − Π_h p_L)·q = Σ_k cot θ_k ∫_{e_k} λ_{k−1}λ_{k+1}
/// (Σ_j α_k^{(j)} A_k^{(j)} p_L) (q·n_k)` for constant `q`, where
/// `α^{(1)} = |τ|`, `α^{(2)} = −|τ|`, `α^{(3)} = (ℓ_{k−1}² − ℓ_{k+1}²)/2` and
/// `A^{(1)} = t·∂_t`, `A^{(2)} = n·∂_n`, `A^{(3)} = n·∂_t`.
/// Scale is `h² |q| |∇p_L|`.
pub fn local_variational_identity_check(
    g: &TriangleGeometry,
    p: &LinearField,
    q: Vec2,
    quad: &Quadrature,
) -> IdentityDefect {
    let pi = local_rt_interpolant(g, p);
    let lhs = quad.triangle.integrate(g, |x| (p.value(x) - pi(x)).dot(&q));
    let mut rhs = 0.0;
    for k in 0..3 {
        let (km, kp) = ((k + 2) % 3, (k + 1) % 3);
        let (t, n) = (g.tangents[k], g.normals[k]);
        let a1 = t.dot(&p.directional(t));
        let a2 = n.dot(&p.directional(n));
        let a3 = n.dot(&p.directional(t));
        let weight = g.area * a1 - g.area * a2 + 0.5 * (g.lengths[km].powi(2) - g.lengths[kp].powi(2)) * a3;
        let a = g.vertices[kp];
        let b = g.vertices[km];
        let bubble = quad.edge.integrate(a, b, |x| {
            let l = g.barycentric(x);
            l[km] * l[kp]
        });
        rhs += g.cot(k) * bubble * weight * q.dot(&n);
    }
    let h = g.diameter();
    IdentityDefect {
        defect: (lhs - rhs).abs(),
        scale: h * h * q.norm() * p.gradient.norm(),
    }
}

/// `q·n_e` at every interior midpoint, seen from both sides.
pub fn normal_trace_check(mesh: &Mesh, field: &RtField) -> IdentityDefect {
    let mut defect: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for e in mesh.interior_edges() {
        let edge = mesh.edge(e);
        let (m, n) = (mesh.edge_midpoint(e), mesh.edge_normal(e));
        let a = field.value(mesh, edge.first, m).dot(&n);
        let b = field.value(mesh, edge.second.unwrap(), m).dot(&n);
        defect = defect.max((a - b).abs());
        scale = scale.max(a.abs());
    }
    IdentityDefect {
        defect,
        scale: scale.max(f64::MIN_POSITIVE),
    }
}

/// Π_h q_h = q_h for q_h in RT0.
pub fn rt_reproduction_check(mesh: &Mesh, field: &RtField, rule: &EdgeRule) -> IdentityDefect {
    let again = super::interpolate_rt_field(mesh, rule, field);
    let defect = again
        .dofs
        .iter()
        .zip(&field.dofs)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let scale = field.dofs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    IdentityDefect {
        defect,
        scale: scale.max(f64::MIN_POSITIVE),
    }
}

/// Random counterclockwise triangle with all angles above 15° and diameter
/// between 0.05 and 1.
pub fn random_triangle(rng: &mut impl Rng) -> TriangleGeometry {
    loop {
        let pts: Vec<Point> = (0..3)
            .map(|_| Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let scale = rng.random_range(0.05..1.0);
        let (a, b, c) = (pts[0] * scale, pts[1] * scale, pts[2] * scale);
        let mut g = TriangleGeometry::new(a, b, c);
        if g.area < 0.0 {
            g = TriangleGeometry::new(a, c, b);
        }
        let min_angle = g.angles.iter().copied().fold(f64::INFINITY, f64::min);
        if min_angle > 15f64.to_radians() && g.diameter() > 0.05 {
            return g;
        }
    }
}

pub fn random_linear_field(rng: &mut impl Rng) -> LinearField {
    let mut r = || rng.random_range(-1.0..1.0);
    LinearField {
        constant: Vec2::new(r(), r()),
        gradient: Mat2::new(r(), r(), r(), r()),
    }
}

/// Random cubic polynomial vector field: coefficients of `x^a y^b`, `a + b ≤ 3`.
pub fn random_cubic_field(rng: &mut impl Rng) -> impl Fn(Point) -> Vec2 + Sync {
    let mut coeffs = Vec::new();
    for a in 0..=3i32 {
        for b in 0..=(3 - a) {
            coeffs.push((a, b, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        }
    }
    move |x: Point| {
        coeffs.iter().fold(Vec2::zeros(), |acc, &(a, b, cx, cy)| {
            let m = x.x.powi(a) * x.y.powi(b);
            acc + Vec2::new(cx * m, cy * m)
        })
    }
}

/// Random trigonometric field `(A sin(k·x + φ), B cos(l·x + ψ))` with its
/// Jacobian.
pub fn random_trig_field(rng: &mut impl Rng) -> impl SmoothVectorField {
    let mut r = |lo: f64, hi: f64| rng.random_range(lo..hi);
    let (a, b) = (r(-2.0, 2.0), r(-2.0, 2.0));
    let k = Vec2::new(r(-4.0, 4.0), r(-4.0, 4.0));
    let l = Vec2::new(r(-4.0, 4.0), r(-4.0, 4.0));
    let (phi, psi) = (r(0.0, 6.3), r(0.0, 6.3));
    SmoothFn {
        value: move |x: Point| Vec2::new(a * (k.dot(&x) + phi).sin(), b * (l.dot(&x) + psi).cos()),
        jacobian: move |x: Point| {
            let c = a * (k.dot(&x) + phi).cos();
            let s = -b * (l.dot(&x) + psi).sin();
            Mat2::new(c * k.x, c * k.y, s * l.x, s * l.y)
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_uniform;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn reference() -> TriangleGeometry {
        TriangleGeometry::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0))
    }

    #[test]
    fn duality_on_reference_and_random() {
        assert!(rt_dof_duality(&reference(), &EdgeRule::default()).defect <= 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = random_triangle(&mut rng);
            assert!(rt_dof_duality(&g, &EdgeRule::default()).defect <= 1e-13);
        }
    }

    #[test]
    fn divergence_of_basis_is_constant() {
        // div((x − a)/(2|τ|)) = 1/|τ|: check with a finite flux balance of φ_0
        let g = reference();
        let total: f64 = (0..3)
            .map(|j| {
                let a = g.vertices[(j + 1) % 3];
                let b = g.vertices[(j + 2) % 3];
                EdgeRule::default().integrate(a, b, |x| rt_basis_eval(&g, 0, x).dot(&g.normals[j]))
            })
            .sum();
        assert!((total / g.area - 1.0 / g.area).abs() < 1e-14);
    }

    #[test]
    fn commuting_diagram_linear_and_trig() {
        let mesh = generate_uniform(8).unwrap();
        let lin = LinearField {
            constant: Vec2::zeros(),
            gradient: Mat2::identity(),
        };
        let d = commuting_diagram_check(&mesh, &lin, &Quadrature::default());
        assert!(d.defect < 1e-13, "{d:?}");
        let trig = SmoothFn {
            value: |x: Point| Vec2::new((PI * x.x).sin() * (PI * x.y).sin(), 0.0),
            jacobian: |x: Point| {
                Mat2::new(
                    PI * (PI * x.x).cos() * (PI * x.y).sin(),
                    PI * (PI * x.x).sin() * (PI * x.y).cos(),
                    0.0,
                    0.0,
                )
            },
        };
        let d = commuting_diagram_check(&mesh, &trig, &Quadrature::high_order());
        assert!(d.relative() < 1e-12, "{d:?}");
    }

    #[test]
    fn expansion_on_reference() {
        let g = reference();
        let constant = LinearField {
            constant: Vec2::new(0.3, -2.0),
            gradient: Mat2::zeros(),
        };
        assert!(local_expansion_check(&g, &constant, &TriangleRule::default()).defect < 1e-15);
        // p_L = (y, 0)
        let p = LinearField {
            constant: Vec2::zeros(),
            gradient: Mat2::new(0.0, 1.0, 0.0, 0.0),
        };
        assert!(local_expansion_check(&g, &p, &TriangleRule::default()).defect < 1e-14);
    }

    #[test]
    fn variational_identity_on_reference() {
        let g = reference();
        let p = LinearField {
            constant: Vec2::zeros(),
            gradient: Mat2::new(0.0, 1.0, 0.0, 0.0),
        };
        let d = local_variational_identity_check(&g, &p, Vec2::new(1.0, 0.0), &Quadrature::default());
        assert!(d.defect < 1e-15, "{d:?}");
        let constant = LinearField {
            constant: Vec2::new(1.0, 1.0),
            gradient: Mat2::zeros(),
        };
        let d = local_variational_identity_check(&g, &constant, Vec2::new(0.4, 0.1), &Quadrature::default());
        assert!(d.defect < 1e-15);
    }

    #[test]
    fn randomized_local_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let quad = Quadrature::default();
        for _ in 0..100 {
            let g = random_triangle(&mut rng);
            let p = random_linear_field(&mut rng);
            let q = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let e = local_expansion_check(&g, &p, &quad.triangle);
            assert!(e.relative() <= 1e-13, "{e:?}");
            let v = local_variational_identity_check(&g, &p, q, &quad);
            assert!(v.relative() <= 1e-13, "{v:?}");
        }
    }

    #[test]
    fn cr_rt_identity_random_cubics() {
        let mesh = crate::mesh::generate_perturbed(6, 0.5, 0.3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let q = random_cubic_field(&mut rng);
            let d = cr_rt_interpolant_check(&mesh, q, &EdgeRule::default());
            assert!(d.relative() <= 1e-13, "{d:?}");
        }
    }

    #[test]
    fn rt_fields_are_normal_continuous_and_reproduced() {
        let mesh = crate::mesh::generate_perturbed(5, 0.5, 0.3, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let field = RtField {
            dofs: (0..mesh.num_edges()).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        assert!(normal_trace_check(&mesh, &field).relative() < 1e-13);
        assert!(rt_reproduction_check(&mesh, &field, &EdgeRule::default()).relative() < 1e-13);
    }
}
