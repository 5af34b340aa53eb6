//! Quadrature, finite element fields, interpolants and identity oracles.

mod fields;
pub mod identities;
mod interpolate;
mod quadrature;

pub use fields::{
    rt_basis_eval, scalars_to_csv, vectors_to_csv, Analytic, CrField, FieldEval, FieldValue, P0Field, P0VectorField,
    P1Field, RtField, VectorCrField,
};
pub use identities::{IdentityDefect, LinearField, SmoothFn, SmoothVectorField};
pub use interpolate::{
    interpolate_cr, interpolate_cr_scalar, interpolate_rt, interpolate_rt_field, interpolate_rt_piecewise, project_p0,
};
pub use quadrature::{gauss_legendre, EdgeRule, Quadrature, TriangleRule};
