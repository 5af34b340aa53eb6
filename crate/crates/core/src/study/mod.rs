//! Error norms, order fitting, convergence experiments and the identity suite.

mod experiment;
mod norms;
mod rates;
mod verify;

pub use experiment::{
    cr_level, mixed_level, run_experiment, Column, ErrorReport, ErrorRule, ExperimentConfig, LevelErrors, MeshFamily,
    ProblemKind,
};
pub use norms::{div_norm, l2_distance, l2_error, p0_norm};
pub use rates::{fit_order, least_squares_slope, pairwise_orders, OrderFit};
pub use verify::{verify_identities, IdentityCheck};
