use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Mesh;
use crate::error::{Error, Result};
use crate::Point;

#[derive(Clone, Copy)]
enum Diagonal {
    /// From the lower-left to the upper-right corner.
    Rising,
    /// From the lower-right to the upper-left corner.
    Falling,
}

fn square_grid(n: usize, diagonal: impl Fn(usize, usize) -> Diagonal) -> (Vec<Point>, Vec<[usize; 3]>) {
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point::new(i as f64 * h, j as f64 * h));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            match diagonal(i, j) {
                Diagonal::Rising => {
                    triangles.push([v00, v10, v11]);
                    triangles.push([v00, v11, v01]);
                }
                Diagonal::Falling => {
                    triangles.push([v00, v10, v01]);
                    triangles.push([v10, v11, v01]);
                }
            }
        }
    }
    (vertices, triangles)
}

/// Uniform grid of the unit square: `n × n` squares, each cut by
/// the rising diagonal.
pub fn generate_uniform(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("uniform grid needs n >= 1".into()));
    }
    let (v, t) = square_grid(n, |_, _| Diagonal::Rising);
    Mesh::new(v, t)
}

/// Four uniform quadrant blocks whose diagonal direction alternates between
/// neighbouring quadrants. The diagonals of all four blocks point at the
/// centre of the square.
pub fn generate_piecewise_uniform(n: usize) -> Result<Mesh> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "piecewise uniform grid needs an even n >= 2, got {n}"
        )));
    }
    let half = n / 2;
    let (v, t) = square_grid(n, |i, j| {
        if (i < half) == (j < half) {
            Diagonal::Rising
        } else {
            Diagonal::Falling
        }
    });
    Mesh::new(v, t)
}

/// Uniform grid whose interior vertices are moved by pseudo-random vectors of
/// length at most `amplitude · h^{1+alpha}` with `h = 1/n`.
///
/// `alpha = f64::INFINITY` or `amplitude = 0` reproduces [`generate_uniform`].
pub fn generate_perturbed(n: usize, alpha: f64, amplitude: f64, seed: u64) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("perturbed grid needs n >= 1".into()));
    }
    if !(amplitude >= 0.0) || alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "perturbation needs amplitude >= 0 and alpha >= 0, got amplitude={amplitude}, alpha={alpha}"
        )));
    }
    let (mut vertices, triangles) = square_grid(n, |_, _| Diagonal::Rising);
    let h = 1.0 / n as f64;
    let radius = amplitude * h.powf(1.0 + alpha);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for j in 1..n {
        for i in 1..n {
            // draw unconditionally so the sequence only depends on (n, seed)
            let r: f64 = rng.random::<f64>().sqrt();
            let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            if radius > 0.0 {
                let v = &mut vertices[j * (n + 1) + i];
                v.x += radius * r * theta.cos();
                v.y += radius * r * theta.sin();
            }
        }
    }
    for (index, tri) in triangles.iter().enumerate() {
        let area = super::signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
        if !(area > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "perturbation amplitude {amplitude} inverts triangle {index} (signed area {area:e}); reduce it"
            )));
        }
    }
    Mesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_counts() {
        for n in [1usize, 2, 8, 16] {
            let m = generate_uniform(n).unwrap();
            assert_eq!(m.num_vertices(), (n + 1) * (n + 1));
            assert_eq!(m.num_triangles(), 2 * n * n);
            assert_eq!(m.num_edges(), 3 * n * n + 2 * n);
        }
        let m = generate_uniform(8).unwrap();
        assert_eq!(m.num_edges() + m.num_triangles(), 336);
        let m = generate_uniform(16).unwrap();
        assert_eq!(m.num_edges() + m.num_triangles(), 1312);
    }

    #[test]
    fn zero_rejected() {
        assert!(generate_uniform(0).is_err());
        assert!(generate_perturbed(0, 1.0, 0.1, 0).is_err());
    }

    #[test]
    fn piecewise_counts_and_parity() {
        let m = generate_piecewise_uniform(8).unwrap();
        assert_eq!(m.num_edges() + m.num_triangles(), 336);
        assert!(generate_piecewise_uniform(2).is_ok());
        assert!(generate_piecewise_uniform(7).is_err());
        assert!(generate_piecewise_uniform(0).is_err());
    }

    #[test]
    fn zero_perturbation_is_uniform() {
        let a = generate_perturbed(6, f64::INFINITY, 0.5, 3).unwrap();
        let b = generate_uniform(6).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        let c = generate_perturbed(6, 1.0, 0.0, 3).unwrap();
        assert_eq!(c.vertices(), b.vertices());
    }

    #[test]
    fn perturbation_bounded_and_boundary_fixed() {
        let n = 16;
        let (alpha, amp) = (0.5, 0.25);
        let m = generate_perturbed(n, alpha, amp, 1).unwrap();
        let u = generate_uniform(n).unwrap();
        let bound = amp * (1.0 / n as f64).powf(1.0 + alpha);
        for (v, (p, q)) in m.vertices().iter().zip(u.vertices()).enumerate() {
            let d = (p - q).norm();
            if u.is_boundary_vertex(v) {
                assert_eq!(d, 0.0);
            } else {
                assert!(d <= bound * (1.0 + 1e-12));
            }
        }
        assert_eq!(m.triangles(), u.triangles());
    }

    #[test]
    fn inverting_amplitude_rejected() {
        assert!(generate_perturbed(4, 0.0, 5.0, 9).is_err());
    }
}
