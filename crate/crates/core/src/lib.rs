//! Lowest-order Raviart–Thomas mixed and Crouzeix–Raviart nonconforming
//! finite elements on triangles, the edge-midpoint flux recovery operator,
//! and the machinery for supercloseness and superconvergence studies on
//! mildly structured grids.
//!
//! Module map:
//! - [`mesh`]: triangulations, generators, red refinement, structure analysis
//! - [`spaces`]: quadrature, RT0/P0/CR/P1 fields, interpolants, identity oracles
//! - [`sparse`]: CSR matrices and direct solvers
//! - [`solver`]: mixed and CR systems, Marini reconstruction, Helmholtz split
//! - [`recovery`]: the recovery operator and the a posteriori estimator
//! - [`study`]: error norms, order fitting, convergence experiments

// `!(x > 0.0)` rejects NaN on purpose; index loops mirror the local formulas
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::type_complexity
)]

pub mod error;
pub mod mesh;
pub mod recovery;
pub mod solver;
pub mod spaces;
pub mod sparse;
pub mod study;

pub use error::{Error, Result};
pub use mesh::{Mesh, MeshStructureReport, TriangleGeometry};
pub use recovery::{apply_gh, estimator, EstimatorReport, RecoveredField};
pub use solver::{
    assemble_mixed, helmholtz_split, marini_reconstruct, solve_cr, solve_mixed, BoundaryKind, CrRhs, HelmholtzSplit,
    LinearSystem, MixedSolution, ProblemSpec,
};
pub use spaces::{CrField, P0Field, P1Field, Quadrature, RtField, VectorCrField};
pub use sparse::{SolveReport, SparseMatrix};
pub use study::{run_experiment, ErrorReport, ErrorRule, ExperimentConfig, MeshFamily, ProblemKind};

/// Points and vectors in the plane.
pub type Point = nalgebra::Vector2<f64>;
pub type Vec2 = nalgebra::Vector2<f64>;
pub type Mat2 = nalgebra::Matrix2<f64>;

/// Counterclockwise quarter turn.
#[inline]
pub fn rot(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}
