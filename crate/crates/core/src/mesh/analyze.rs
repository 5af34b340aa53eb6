//! Empirical (α, σ) classification of triangulations.

use std::fmt::Write as _;

use super::Mesh;
use crate::error::{Error, Result};
use crate::study::least_squares_slope;

/// Deviations below `ROUNDOFF · h` count as exact zeros.
const ROUNDOFF: f64 = 1e-12;

/// Classification of a single mesh.
#[derive(Debug, Clone)]
pub struct LevelStructure {
    pub h: f64,
    /// Parallelogram deviation per interior edge, indexed like
    /// [`Mesh::interior_edges`].
    pub edge_deviation: Vec<f64>,
    /// `(vertex, max corresponding-edge length difference, |t - t'|)` for every
    /// boundary vertex.
    pub boundary_deviation: Vec<(usize, f64, f64)>,
    pub e1: usize,
    pub e2: usize,
    pub e2_measure: f64,
    pub p1: usize,
    /// κ = |P2|.
    pub kappa: usize,
    pub max_edge_deviation: f64,
    /// Largest deviation among E1 edges; α̂ is fitted from this.
    pub max_e1_deviation: f64,
}

/// Structure report over one or more refinement levels.
#[derive(Debug, Clone)]
pub struct MeshStructureReport {
    pub alpha_hypothesis: f64,
    pub threshold: f64,
    pub levels: Vec<LevelStructure>,
    /// Fitted α̂; `INFINITY` when every deviation vanishes. `None` for a single mesh.
    pub alpha_hat: Option<f64>,
    /// Fitted σ̂; `INFINITY` when E2 is empty on every level. `None` for a single mesh.
    pub sigma_hat: Option<f64>,
    pub rho: Option<f64>,
}

/// ρ = min(1, α, σ/2).
pub fn expected_rate(alpha: f64, sigma: f64) -> f64 {
    1f64.min(alpha).min(sigma / 2.0)
}

/// Deviation of the quadrilateral formed by the two triangles on an interior
/// edge from a parallelogram: the larger length mismatch of its two pairs of
/// opposite sides.
pub fn parallelogram_deviation(mesh: &Mesh, e: usize) -> Option<f64> {
    let edge = mesh.edge(e);
    let second = edge.second?;
    let [a, b] = edge.vertices;
    let apex = |t: usize| {
        let k = mesh.local_index(t, e).expect("edge of triangle");
        mesh.triangle(t)[k]
    };
    let (c, d) = (apex(edge.first), apex(second));
    let p = |v: usize| mesh.vertex(v);
    let len = |u: usize, v: usize| (p(u) - p(v)).norm();
    // cyclic order a, c, b, d
    let first_pair = (len(a, c) - len(b, d)).abs();
    let second_pair = (len(c, b) - len(d, a)).abs();
    Some(first_pair.max(second_pair))
}

/// Boundary-vertex deviation: for the boundary edge entering `x` and the one
/// leaving it (counterclockwise), compare corresponding edges of their two
/// triangles and the unit tangents.
fn boundary_vertex_deviation(mesh: &Mesh, incoming: usize, outgoing: usize) -> (f64, f64) {
    let local = |e: usize| {
        let t = mesh.edge(e).first;
        (t, mesh.local_index(t, e).unwrap())
    };
    let (t, k) = local(incoming);
    let (tp, kp) = local(outgoing);
    let (g, gp) = (mesh.geometry(t), mesh.geometry(tp));
    let mut length_dev: f64 = 0.0;
    for j in 0..3 {
        length_dev = length_dev.max((g.lengths[(k + j) % 3] - gp.lengths[(kp + j) % 3]).abs());
    }
    let tangent_dev = (g.tangents[k] - gp.tangents[kp]).norm();
    (length_dev, tangent_dev)
}

fn classify(mesh: &Mesh, alpha: f64, threshold: f64) -> LevelStructure {
    let h = mesh.max_diameter();
    let length_tol = threshold * h.powf(1.0 + alpha) + ROUNDOFF * h;
    let tangent_tol = threshold * h.powf(alpha) + ROUNDOFF;

    let mut edge_deviation = Vec::new();
    let (mut e1, mut e2, mut e2_measure) = (0, 0, 0.0);
    let mut max_e1_deviation: f64 = 0.0;
    for e in mesh.interior_edges() {
        let dev = parallelogram_deviation(mesh, e).unwrap();
        edge_deviation.push(dev);
        if dev <= length_tol {
            e1 += 1;
            max_e1_deviation = max_e1_deviation.max(dev);
        } else {
            e2 += 1;
            let edge = mesh.edge(e);
            e2_measure += mesh.geometry(edge.first).area + mesh.geometry(edge.second.unwrap()).area;
        }
    }

    // boundary edges as directed by their triangle's counterclockwise traversal
    let mut incoming = vec![usize::MAX; mesh.num_vertices()];
    let mut outgoing = vec![usize::MAX; mesh.num_vertices()];
    for e in mesh.boundary_edges() {
        let t = mesh.edge(e).first;
        let k = mesh.local_index(t, e).unwrap();
        let tri = mesh.triangle(t);
        outgoing[tri[(k + 1) % 3]] = e;
        incoming[tri[(k + 2) % 3]] = e;
    }
    let mut boundary_deviation = Vec::new();
    let (mut p1, mut kappa) = (0, 0);
    for v in 0..mesh.num_vertices() {
        if !mesh.is_boundary_vertex(v) {
            continue;
        }
        let (len_dev, tan_dev) = boundary_vertex_deviation(mesh, incoming[v], outgoing[v]);
        boundary_deviation.push((v, len_dev, tan_dev));
        if len_dev <= length_tol && tan_dev <= tangent_tol {
            p1 += 1;
        } else {
            kappa += 1;
        }
    }

    let max_edge_deviation = edge_deviation.iter().copied().fold(0.0, f64::max);
    LevelStructure {
        h,
        edge_deviation,
        boundary_deviation,
        e1,
        e2,
        e2_measure,
        p1,
        kappa,
        max_edge_deviation,
        max_e1_deviation,
    }
}

/// Classifies each mesh of a refinement sequence against the hypothesis
/// `alpha` with threshold constant `threshold` (deviations ≤ `C h^{1+α}` are
/// in E1) and, for two or more levels, fits α̂ and σ̂ in log-log scale.
pub fn analyze_structure(meshes: &[&Mesh], alpha: f64, threshold: f64) -> Result<MeshStructureReport> {
    if meshes.is_empty() {
        return Err(Error::InvalidArgument("no meshes to analyze".into()));
    }
    if !(threshold > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold constant must be positive, got {threshold}"
        )));
    }
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "alpha must be non-negative, got {alpha}"
        )));
    }
    let levels: Vec<LevelStructure> = meshes.iter().map(|m| classify(m, alpha, threshold)).collect();

    let (alpha_hat, sigma_hat, rho) = if levels.len() < 2 {
        (None, None, None)
    } else {
        let hs: Vec<f64> = levels.iter().map(|l| l.h).collect();
        let devs: Vec<f64> = levels.iter().map(|l| l.max_e1_deviation).collect();
        let alpha_hat = if levels.iter().all(|l| l.max_e1_deviation <= ROUNDOFF * l.h) {
            f64::INFINITY
        } else {
            least_squares_slope(&hs, &devs).map(|s| s - 1.0).unwrap_or(f64::NAN)
        };
        let measures: Vec<f64> = levels.iter().map(|l| l.e2_measure).collect();
        let sigma_hat = if measures.iter().all(|&m| m == 0.0) {
            f64::INFINITY
        } else {
            least_squares_slope(&hs, &measures).unwrap_or(f64::NAN)
        };
        (
            Some(alpha_hat),
            Some(sigma_hat),
            Some(expected_rate(alpha_hat, sigma_hat)),
        )
    };

    Ok(MeshStructureReport {
        alpha_hypothesis: alpha,
        threshold,
        levels,
        alpha_hat,
        sigma_hat,
        rho,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6e}"),
        None => "NA".to_string(),
    }
}

impl MeshStructureReport {
    /// One row per level: `level,h,E1,E2,E2_measure,kappa,alphahat,sigmahat,rho`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,h,E1,E2,E2_measure,kappa,alphahat,sigmahat,rho\n");
        for (i, l) in self.levels.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{:.6e},{},{},{:.6e},{},{},{},{}",
                i,
                l.h,
                l.e1,
                l.e2,
                l.e2_measure,
                l.kappa,
                fmt_opt(self.alpha_hat),
                fmt_opt(self.sigma_hat),
                fmt_opt(self.rho)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_piecewise_uniform, generate_uniform, refine_regular};

    #[test]
    fn uniform_has_no_exceptional_edges() {
        let m = generate_uniform(8).unwrap();
        let r = analyze_structure(&[&m], 1.0, 1.0).unwrap();
        let l = &r.levels[0];
        assert_eq!(l.e2, 0);
        assert_eq!(l.kappa, 4);
        assert_eq!(l.e2_measure, 0.0);
        assert!(r.alpha_hat.is_none());
        let h = 1.0 / 8.0;
        assert!(l.edge_deviation.iter().all(|&d| d <= 1e-14 * h));
    }

    #[test]
    fn uniform_with_infinite_alpha() {
        let m = generate_uniform(4).unwrap();
        let r = analyze_structure(&[&m], f64::INFINITY, 1.0).unwrap();
        assert_eq!(r.levels[0].e2, 0);
        assert_eq!(r.levels[0].kappa, 4);
    }

    #[test]
    fn piecewise_interfaces_are_exceptional() {
        let m = generate_piecewise_uniform(8).unwrap();
        let r = analyze_structure(&[&m], 1.0, 1.0).unwrap();
        let l = &r.levels[0];
        // the interface cross carries 2 * 8 edges
        assert_eq!(l.e2, 16);
        assert_eq!(l.e1 + l.e2, m.interior_edges().count());
        assert!((l.e2_measure - 16.0 * 2.0 / 128.0).abs() < 1e-12);
    }

    #[test]
    fn piecewise_sigma_is_one() {
        let m0 = generate_piecewise_uniform(8).unwrap();
        let m1 = refine_regular(&m0).unwrap();
        let m2 = refine_regular(&m1).unwrap();
        let r = analyze_structure(&[&m0, &m1, &m2], 1.0, 1.0).unwrap();
        assert!((r.sigma_hat.unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(r.alpha_hat, Some(f64::INFINITY));
        assert!((r.rho.unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_threshold() {
        let m = generate_uniform(2).unwrap();
        assert!(analyze_structure(&[&m], 1.0, 0.0).is_err());
        assert!(analyze_structure(&[], 1.0, 1.0).is_err());
    }

    #[test]
    fn rate_formula() {
        assert_eq!(expected_rate(0.5, f64::INFINITY), 0.5);
        assert_eq!(expected_rate(f64::INFINITY, 1.0), 0.5);
        assert_eq!(expected_rate(f64::INFINITY, f64::INFINITY), 1.0);
    }
}
