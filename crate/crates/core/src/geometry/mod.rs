//! Canonical CMC scenarios, their intrinsic triangulations and integration
//! rules.

mod analytic;
mod export;
mod mesh;
mod quadrature;
mod scenario;

use thiserror::Error;

pub use analytic::{ball_robin_lambda1, disk_dirichlet_lambda1, disk_robin_lambda1};
pub use export::{parse_jacmesh, write_jacmesh, MeshFile};
pub use mesh::{mesh, vertex_estimate, RiemannianMesh, VertexField, MAX_VERTICES};
pub use quadrature::{
    gauss_bonnet_defect, gauss_legendre, integrate_scalar, FieldSelector, RadialQuadrature,
};
pub use scenario::{
    make_scenario, ricci_from_gauss, AmbientSpace, BoundaryKind, GalleryId, Model, Scenario,
};

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("scenario `{scenario}` requires parameter `{param}`")]
    MissingParameter { scenario: String, param: String },
    #[error("scenario `{scenario}` does not take parameter `{param}`")]
    UnexpectedParameter { scenario: String, param: String },
    #[error("parameter `{param}` = {value} is invalid: {reason}")]
    InvalidParameter {
        param: String,
        value: f64,
        reason: &'static str,
    },
    #[error("scenario invariant violated: {0}")]
    Invariant(String),
    #[error("refinement level {level} needs ~{vertices} vertices, above the cap of {cap}")]
    LevelTooLarge {
        level: u32,
        vertices: usize,
        cap: usize,
    },
    #[error("scenario `{0}` is quadrature-only and cannot be triangulated")]
    QuadratureOnly(String),
    #[error("scenario `{0}` is two-dimensional; use a triangle mesh instead of radial quadrature")]
    NotRadial(String),
    #[error("mesh invariant violated: {0}")]
    MeshInvariant(String),
    #[error("boundary field requested on a closed mesh")]
    ClosedMesh,
    #[error("malformed mesh file at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}
