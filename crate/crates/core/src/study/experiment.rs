//! Convergence experiments over a sequence of meshes.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::{generate_perturbed, generate_piecewise_uniform, generate_uniform, refine_regular, Mesh};
use crate::recovery::{apply_gh, estimator};
use crate::solver::{helmholtz_split, rt_inner, solve_cr, solve_problem, BoundaryKind, CrRhs, ProblemSpec};
use crate::spaces::{interpolate_rt, project_p0, EdgeRule, P0Field, P0VectorField, Quadrature, TriangleRule};
use crate::Vec2;

use super::norms::{div_norm, l2_distance, l2_error, p0_norm};
use super::rates::{fit_order, least_squares_slope};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFamily {
    Uniform,
    /// Four uniform quadrants, refined regularly.
    Piecewise,
    /// Uniform grid with interior vertices displaced by `amplitude · h^{1+α}`,
    /// regenerated at every level.
    Perturbed,
}

impl FromStr for MeshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(MeshFamily::Uniform),
            "piecewise" => Ok(MeshFamily::Piecewise),
            "perturbed" => Ok(MeshFamily::Perturbed),
            _ => Err(Error::InvalidArgument(format!(
                "unknown mesh family {s:?} (uniform, piecewise, perturbed)"
            ))),
        }
    }
}

impl std::fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MeshFamily::Uniform => "uniform",
            MeshFamily::Piecewise => "piecewise",
            MeshFamily::Perturbed => "perturbed",
        })
    }
}

/// Manufactured problems with `u = sin(2πx) sin(πy)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// `−Δu + u = f`, Dirichlet.
    Mixed,
    /// `−Δu + u = f`, Neumann data `p·n`.
    MixedNeumann,
    /// `−Δu = f`, Dirichlet, solved by the mixed method.
    MixedPoisson,
    /// `−div(∇u + bu) + u = f`, `b = (1, 2)`, Dirichlet.
    MixedConvection,
    /// `−Δu = f` by Crouzeix–Raviart.
    Cr,
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mixed" => Ok(ProblemKind::Mixed),
            "mixed-neumann" => Ok(ProblemKind::MixedNeumann),
            "mixed-poisson" => Ok(ProblemKind::MixedPoisson),
            "mixed-convection" => Ok(ProblemKind::MixedConvection),
            "cr" => Ok(ProblemKind::Cr),
            _ => Err(Error::InvalidArgument(format!(
                "unknown problem {s:?} (mixed, mixed-neumann, mixed-poisson, mixed-convection, cr)"
            ))),
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProblemKind::Mixed => "mixed",
            ProblemKind::MixedNeumann => "mixed-neumann",
            ProblemKind::MixedPoisson => "mixed-poisson",
            ProblemKind::MixedConvection => "mixed-convection",
            ProblemKind::Cr => "cr",
        })
    }
}

impl ProblemKind {
    pub fn spec(self) -> ProblemSpec {
        match self {
            ProblemKind::Mixed => ProblemSpec::reaction_diffusion(),
            ProblemKind::MixedNeumann => ProblemSpec::manufactured(Vec2::zeros(), 1.0, BoundaryKind::Neumann),
            ProblemKind::MixedPoisson | ProblemKind::Cr => ProblemSpec::poisson(),
            ProblemKind::MixedConvection => ProblemSpec::convection_reaction(),
        }
    }
}

/// How the tabulated errors against the exact solution are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorRule {
    /// Exact fields sampled at edge midpoints: the RT interpolant takes
    /// `ℓ_e p(m_e)·n_e` as its dofs and `L²` norms use the three-midpoint
    /// rule. This reproduces the reference uniform-grid errors.
    #[default]
    Midpoint,
    /// The configured Gauss rules throughout.
    Quadrature,
}

impl FromStr for ErrorRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint" => Ok(ErrorRule::Midpoint),
            "quadrature" => Ok(ErrorRule::Quadrature),
            other => Err(Error::InvalidArgument(format!(
                "unknown error rule {other:?}; expected midpoint or quadrature"
            ))),
        }
    }
}

impl std::fmt::Display for ErrorRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ErrorRule::Midpoint => "midpoint",
            ErrorRule::Quadrature => "quadrature",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: MeshFamily,
    pub n0: usize,
    pub levels: usize,
    pub alpha: f64,
    pub amplitude: f64,
    pub seed: u64,
    pub problem: ProblemKind,
    pub triangle_degree: usize,
    pub edge_points: usize,
    /// Residual every solve must reach; never looser than the direct solver's.
    pub solver_tolerance: f64,
    /// Also split `Π_h p − p_h` and report the gradient-part norm.
    pub helmholtz: bool,
    pub error_rule: ErrorRule,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            family: MeshFamily::Uniform,
            n0: 8,
            levels: 4,
            alpha: 0.5,
            amplitude: 1.0,
            seed: 1,
            problem: ProblemKind::Mixed,
            triangle_degree: 5,
            edge_points: 4,
            solver_tolerance: crate::sparse::SOLVER_TOLERANCE,
            helmholtz: false,
            error_rule: ErrorRule::Midpoint,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 {
            return Err(Error::InvalidArgument("levels must be at least 2".into()));
        }
        if self.n0 == 0 {
            return Err(Error::InvalidArgument("n0 must be positive".into()));
        }
        if self.family == MeshFamily::Piecewise && !self.n0.is_multiple_of(2) {
            return Err(Error::InvalidArgument("piecewise family needs an even n0".into()));
        }
        if self.triangle_degree < 5 || self.edge_points < 4 {
            return Err(Error::InvalidArgument(
                "quadrature must be at least degree 5 on triangles and 4 Gauss points on edges".into(),
            ));
        }
        if !(self.solver_tolerance > 0.0) {
            return Err(Error::InvalidArgument("solver tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn quadrature(&self) -> Quadrature {
        Quadrature::new(self.triangle_degree, self.edge_points)
    }

    /// Rules for the tabulated errors: `(flux rule for Π_h, norm rule)`.
    pub fn error_rules(&self) -> (EdgeRule, TriangleRule) {
        let quad = self.quadrature();
        match self.error_rule {
            ErrorRule::Midpoint => (EdgeRule::gauss(1), TriangleRule::edge_midpoint()),
            ErrorRule::Quadrature => (quad.edge, quad.triangle),
        }
    }

    /// The mesh of every level, in order.
    pub fn meshes(&self) -> Result<Vec<Mesh>> {
        self.validate()?;
        let mut out: Vec<Mesh> = Vec::with_capacity(self.levels);
        for l in 0..self.levels {
            let n = self.n0 << l;
            let mesh = match (self.family, out.last()) {
                (MeshFamily::Uniform, _) => generate_uniform(n)?,
                (MeshFamily::Piecewise, None) => generate_piecewise_uniform(n)?,
                (MeshFamily::Piecewise, Some(prev)) => refine_regular(prev)?,
                (MeshFamily::Perturbed, _) => generate_perturbed(n, self.alpha, self.amplitude, self.seed)?,
            };
            out.push(mesh);
        }
        Ok(out)
    }

    /// `key = value` lines.
    pub fn describe(&self) -> String {
        format!(
            "family = {}\nn0 = {}\nlevels = {}\nalpha = {}\namplitude = {}\nseed = {}\nproblem = {}\n\
             triangle_degree = {}\nedge_points = {}\nsolver_tolerance = {:e}\nhelmholtz = {}\nerror_rule = {}\n",
            self.family,
            self.n0,
            self.levels,
            self.alpha,
            self.amplitude,
            self.seed,
            self.problem,
            self.triangle_degree,
            self.edge_points,
            self.solver_tolerance,
            self.helmholtz,
            self.error_rule
        )
    }
}

/// Errors on one mesh. For [`ProblemKind::Cr`] the columns read
/// `err_p = ‖∇u − ∇_h u^CR‖`, `err_superclose = ‖∇_h(ū^CR − u^CR)‖`,
/// `err_u = ‖u − u^CR‖`, `err_recovery = ‖∇u − G_h ∇_h u^CR‖` and
/// `err_div` is NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelErrors {
    pub nu: usize,
    pub h: f64,
    pub err_p: f64,
    pub err_superclose: f64,
    pub err_div: f64,
    pub err_u: f64,
    pub err_recovery: f64,
    pub estimator: f64,
    pub effectivity: f64,
    /// `‖p − Π_h p‖` (mixed problems).
    pub err_interpolation: f64,
    /// Gradient part of `Π_h p − p_h`, when requested.
    pub err_grad_part: Option<f64>,
    pub recovery_fallbacks: usize,
}

#[derive(Debug)]
pub struct ErrorReport {
    pub config: ExperimentConfig,
    pub levels: Vec<LevelErrors>,
    /// Set when a level failed; earlier levels are kept.
    pub failure: Option<Error>,
}

/// Column selector for order computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    P,
    Superclose,
    Div,
    U,
    Recovery,
    GradPart,
}

impl ErrorReport {
    pub fn column(&self, c: Column) -> Vec<f64> {
        self.levels
            .iter()
            .map(|l| match c {
                Column::P => l.err_p,
                Column::Superclose => l.err_superclose,
                Column::Div => l.err_div,
                Column::U => l.err_u,
                Column::Recovery => l.err_recovery,
                Column::GradPart => l.err_grad_part.unwrap_or(f64::NAN),
            })
            .collect()
    }

    pub fn hs(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.h).collect()
    }

    /// Pairwise orders; entry `i` compares levels `i` and `i + 1`.
    pub fn orders(&self, c: Column) -> Vec<Option<f64>> {
        fit_order(&self.column(c), &self.hs()).pairwise
    }

    pub fn slope(&self, c: Column) -> Option<f64> {
        least_squares_slope(&self.hs(), &self.column(c))
    }

    pub fn to_csv(&self) -> String {
        let cols = [Column::P, Column::Superclose, Column::Div, Column::U, Column::Recovery];
        let orders: Vec<Vec<Option<f64>>> = cols.iter().map(|&c| self.orders(c)).collect();
        let mut out = String::from(
            "nu,h,err_p,ord_p,err_superclose,ord_superclose,err_div,ord_div,err_u,ord_u,err_recovery,ord_recovery,effectivity\n",
        );
        let fmt_order = |o: Option<f64>| o.map_or("NA".to_string(), |v| format!("{v:.4}"));
        for (i, l) in self.levels.iter().enumerate() {
            let _ = write!(out, "{},{:.6e}", l.nu, l.h);
            for (k, &c) in cols.iter().enumerate() {
                let e = self.column(c)[i];
                let o = if i == 0 { None } else { orders[k][i - 1] };
                let _ = write!(out, ",{e:.6e},{}", fmt_order(o));
            }
            let _ = writeln!(out, ",{:.4}", l.effectivity);
        }
        out
    }

    /// Gnuplot data: `log10 h` against `log10` of each error.
    pub fn to_dat(&self) -> String {
        let mut out = String::from(
            "# log10(h) log10(err_p) log10(err_superclose) log10(err_div) log10(err_u) log10(err_recovery)\n",
        );
        for l in &self.levels {
            let _ = writeln!(
                out,
                "{:.8} {:.8} {:.8} {:.8} {:.8} {:.8}",
                l.h.log10(),
                l.err_p.log10(),
                l.err_superclose.log10(),
                l.err_div.log10(),
                l.err_u.log10(),
                l.err_recovery.log10()
            );
        }
        out
    }

    /// Writes `path` (CSV) and `path` with extension `.dat`.
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        std::fs::write(path.with_extension("dat"), self.to_dat())?;
        Ok(())
    }
}

fn check_tolerance(residual: f64, tol: f64) -> Result<()> {
    if residual > tol {
        Err(Error::ResidualTooLarge {
            residual,
            tolerance: tol,
        })
    } else {
        Ok(())
    }
}

/// All errors of the mixed method on one mesh.
pub fn mixed_level(mesh: &Mesh, problem: &ProblemSpec, config: &ExperimentConfig) -> Result<LevelErrors> {
    let quad = config.quadrature();
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("experiments need an exact solution".into()))?;
    let sol = solve_problem(mesh, problem, &quad)?;
    check_tolerance(sol.report.relative_residual, config.solver_tolerance)?;
    let (flux_rule, norm_rule) = config.error_rules();
    // the accurate interpolant keeps div Π_h p = P_h div p exact
    let pi_p = interpolate_rt(mesh, &quad.edge, &*exact.p);
    let diff = pi_p.sub(&sol.p_h);
    let tab_diff = interpolate_rt(mesh, &flux_rule, &*exact.p).sub(&sol.p_h);
    let ph_u = project_p0(mesh, &quad.triangle, &*exact.u);
    let u_diff = P0Field {
        values: ph_u.values.iter().zip(&sol.u_h.values).map(|(a, b)| a - b).collect(),
    };
    let err_p = l2_error(mesh, &sol.p_h, &*exact.p, &quad.triangle);
    let est = estimator(mesh, &sol.p_h, &quad);
    let err_grad_part = if config.helmholtz {
        let split = helmholtz_split(mesh, &diff, problem.bc)?;
        Some(rt_inner(mesh, &split.grad_part, &split.grad_part).max(0.0).sqrt())
    } else {
        None
    };
    Ok(LevelErrors {
        nu: mesh.num_edges() + mesh.num_triangles(),
        h: mesh.max_diameter(),
        err_p: l2_error(mesh, &sol.p_h, &*exact.p, &norm_rule),
        err_superclose: rt_inner(mesh, &tab_diff, &tab_diff).max(0.0).sqrt(),
        err_div: div_norm(mesh, &diff),
        err_u: p0_norm(mesh, &u_diff),
        err_recovery: l2_error(mesh, &est.recovered.field, &*exact.p, &norm_rule),
        estimator: est.eta,
        effectivity: est.eta / err_p,
        err_interpolation: l2_error(mesh, &pi_p, &*exact.p, &quad.triangle),
        err_grad_part,
        recovery_fallbacks: est.recovered.fallback_edges.len(),
    })
}

/// All errors of the Crouzeix–Raviart method on one mesh.
pub fn cr_level(mesh: &Mesh, problem: &ProblemSpec, config: &ExperimentConfig) -> Result<LevelErrors> {
    let quad = config.quadrature();
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("experiments need an exact solution".into()))?;
    let cr = solve_cr(mesh, &*problem.f, CrRhs::Exact, &quad)?;
    let cr_bar = solve_cr(mesh, &*problem.f, CrRhs::Projected, &quad)?;
    check_tolerance(
        cr.report.relative_residual.max(cr_bar.report.relative_residual),
        config.solver_tolerance,
    )?;
    let grad = cr.u.broken_gradient(mesh);
    let grad_bar = cr_bar.u.broken_gradient(mesh);
    let recovered = apply_gh(mesh, &grad);
    let (_, norm_rule) = config.error_rules();
    let err_p = l2_error(mesh, &grad, &*exact.grad_u, &quad.triangle);
    let eta = l2_distance(mesh, &recovered.field, &grad, &quad.triangle);
    let diff = P0VectorField {
        values: grad_bar.values.iter().zip(&grad.values).map(|(a, b)| a - b).collect(),
    };
    Ok(LevelErrors {
        nu: mesh.interior_edges().count(),
        h: mesh.max_diameter(),
        err_p: l2_error(mesh, &grad, &*exact.grad_u, &norm_rule),
        err_superclose: l2_error(mesh, &diff, |_| Vec2::zeros(), &quad.triangle),
        err_div: f64::NAN,
        err_u: l2_error(mesh, &cr.u, &*exact.u, &quad.triangle),
        err_recovery: l2_error(mesh, &recovered.field, &*exact.grad_u, &norm_rule),
        estimator: eta,
        effectivity: eta / err_p,
        err_interpolation: f64::NAN,
        err_grad_part: None,
        recovery_fallbacks: recovered.fallback_edges.len(),
    })
}

/// Run every level. Configuration errors are returned directly; a failure
/// at some level is recorded in the report alongside the completed levels.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ErrorReport> {
    let meshes = config.meshes()?;
    let problem = config.problem.spec();
    let mut report = ErrorReport {
        config: config.clone(),
        levels: Vec::with_capacity(meshes.len()),
        failure: None,
    };
    for (l, mesh) in meshes.iter().enumerate() {
        let level = match config.problem {
            ProblemKind::Cr => cr_level(mesh, &problem, config),
            _ => mixed_level(mesh, &problem, config),
        };
        match level {
            Ok(level) => {
                log::info!(
                    "level {l}: nu={} h={:.4e} err_p={:.4e} superclose={:.4e}",
                    level.nu,
                    level.h,
                    level.err_p,
                    level.err_superclose
                );
                report.levels.push(level);
            }
            Err(e) => {
                log::error!("level {l} failed: {e}");
                report.failure = Some(e);
                break;
            }
        }
    }
    Ok(report)
}
