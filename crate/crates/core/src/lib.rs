//! Generalized connections on Galilean space-times.
//!
//! A space-time here is a chart with a nowhere-vanishing clock form Ω, a
//! spatial frame spanning Ann Ω and a (possibly indefinite) metric on that
//! frame. Given a field of observers z, every connection compatible with Ω
//! and the metric corresponds to exactly one triple of gravity, Coriolis
//! and spatial-torsion data; [`connection::build_connection`] goes from the
//! data to the connection and [`connection::dz_map`] goes back.
//!
//! Coefficients are closed-form [`expr::Expr`] trees with exact symbolic
//! partials; linear solves happen per point.

pub mod connection;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod geometry;
mod jet;
pub mod report;
pub mod scenario;
pub mod verify;

pub use connection::{
    assemble_a, build_connection, coriolis_of, covariant_derivative, dz_at, dz_map, gravity_of,
    koszul_rhs, torsion_at, Christoffel, Connection, ConnectionData, DataValues,
};
pub use error::{Error, Result};
pub use expr::{parse_expr, Expr};
pub use geometry::{
    lie_bracket, validate_structure, ObserverField, SpacetimeStructure, VectorField, VectorValue,
};
pub use report::{CheckEntry, CheckReport};
pub use scenario::{load_scenario, parse_scenario, ConnectionSource, Scenario, ScenarioError};
