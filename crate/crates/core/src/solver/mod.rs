//! Mixed and Crouzeix–Raviart solvers, Marini reconstruction and the
//! discrete Helmholtz decomposition.

mod cr;
mod helmholtz;
mod mixed;
mod problem;

pub use cr::{marini_reconstruct, solve_cr, CrRhs, CrSolution};
pub use helmholtz::{helmholtz_split, rt_inner, HelmholtzSplit};
pub use mixed::{
    apply_neumann, assemble_mixed, error_equation_residual, neumann_fluxes, solve_mixed, solve_problem, LinearSystem,
    MixedSolution,
};
pub use problem::{BoundaryKind, ExactSolution, ProblemSpec};
