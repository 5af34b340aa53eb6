#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superconv::mesh::{generate_perturbed, generate_piecewise_uniform, generate_uniform, refine_regular};
use superconv::Mesh;

/// The same triangulation with shuffled vertex labels, shuffled triangle
/// order, and each triangle's vertex list rotated (orientation kept).
pub fn renumbered(mesh: &Mesh, seed: u64) -> Mesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = mesh.num_vertices();
    let mut perm: Vec<usize> = (0..nv).collect();
    perm.shuffle(&mut rng);
    let mut vertices = vec![mesh.vertex(0); nv];
    for (old, &new) in perm.iter().enumerate() {
        vertices[new] = mesh.vertex(old);
    }
    let mut triangles: Vec<[usize; 3]> = mesh
        .triangles()
        .iter()
        .map(|t| {
            let r = rng.random_range(0..3);
            [perm[t[r]], perm[t[(r + 1) % 3]], perm[t[(r + 2) % 3]]]
        })
        .collect();
    triangles.shuffle(&mut rng);
    Mesh::new(vertices, triangles).expect("renumbering keeps a valid mesh")
}

/// Quantised coordinates for comparing point multisets.
pub fn key(x: f64, y: f64) -> (i64, i64) {
    ((x * 1e9).round() as i64, (y * 1e9).round() as i64)
}

pub fn vertex_keys(mesh: &Mesh) -> Vec<(i64, i64)> {
    let mut k: Vec<_> = mesh.vertices().iter().map(|p| key(p.x, p.y)).collect();
    k.sort_unstable();
    k
}

pub fn centroid_keys(mesh: &Mesh) -> Vec<(i64, i64)> {
    let mut k: Vec<_> = (0..mesh.num_triangles())
        .map(|t| {
            let c = mesh
                .triangle(t)
                .iter()
                .fold(superconv::Vec2::zeros(), |s, &v| s + mesh.vertex(v))
                / 3.0;
            key(c.x, c.y)
        })
        .collect();
    k.sort_unstable();
    k
}

#[derive(Debug, Clone, Copy)]
pub enum Family {
    Uniform,
    Piecewise,
    Perturbed { alpha: f64, amplitude: f64, seed: u64 },
}

pub fn build(family: Family, n: usize, refinements: usize) -> Mesh {
    let mut mesh = match family {
        Family::Uniform => generate_uniform(n),
        Family::Piecewise => generate_piecewise_uniform(2 * n.div_ceil(2)),
        Family::Perturbed { alpha, amplitude, seed } => generate_perturbed(n, alpha, amplitude, seed),
    }
    .expect("generator accepts these parameters");
    for _ in 0..refinements {
        mesh = refine_regular(&mesh).expect("refinement of a valid mesh");
    }
    mesh
}
