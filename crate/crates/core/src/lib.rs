//! Best-approximation geometry in finite-dimensional polyhedral normed
//! spaces.
//!
//! A space is given by the extreme points `F = -F` of its dual unit ball
//! ([`Space`]). On top of it the crate provides:
//!
//! - intervals `⟦x,y⟧` and a ball-intersection oracle for the hull
//!   `m(x,y)`, plus m-connectedness of finite clouds ([`hull`]);
//! - the associated norm `Σ α_i |f_i(x)|`, betweenness, discrete geodesics
//!   and monotone paths ([`metric`]);
//! - metric projection and sampled sun checks ([`approx`]);
//! - the coordinate embeddings into `ℓ∞(n)` ([`embed`]).

pub mod approx;
pub mod cloud;
pub mod embed;
pub mod error;
pub mod hull;
pub mod metric;
pub mod samples;
pub mod space;
pub mod vector;

pub use approx::{
    find_luminosity, is_sun_sampled, project, sun_check, ProjectionResult, SunParams, SunReport, SunSummary,
    SunVerdict,
};
pub use cloud::PointCloud;
pub use embed::{Embedding, EmbeddedCloud};
pub use error::{Error, Result};
pub use hull::{
    ball_hull_outer, interval, interval_contains, m_connected, m_connectivity_graph, HullApprox, HullMode,
    MConnectOptions, SlabPolytope,
};
pub use metric::{
    associated_norm, check_monotone, is_between, monotone_path, seq_convergence_check, NeighborRadius, Path,
    PathOptions, Weights,
};
pub use space::{Ball, Builtin, Space};
