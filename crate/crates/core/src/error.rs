use thiserror::Error;

/// Errors produced by graph construction, meshing, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("edge `{0}` has nonpositive length")]
    NonpositiveLength(String),
    #[error("edge `{edge}` references undeclared vertex `{vertex}`")]
    DanglingVertexReference { edge: String, vertex: String },
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("malformed graph spec: {0}")]
    InvalidSpec(String),
    #[error("invalid mesh resolution: {0}")]
    InvalidResolution(String),
    #[error("negative potential value on edge `{0}`")]
    NegativePotentialValue(String),
    #[error("potential assigned to infinite edge `{0}`")]
    PotentialOnInfiniteEdge(String),
    #[error("curvature assigned to infinite edge `{0}`")]
    CurvatureOnInfiniteEdge(String),
    #[error("functions live on different meshes")]
    MeshMismatch,
    #[error("nonlinearity power p={0} outside (2, 6)")]
    InvalidP(f64),
    #[error("function does not have unit mass (mass = {0})")]
    NotUnitMass(f64),
    #[error("graph has an empty compact core")]
    EmptyCore,
    #[error("function has zero mass")]
    ZeroMass,
    #[error("potential is identically zero")]
    ZeroPotential,
    #[error("no interior interval with positive potential")]
    CoreTooShort,
}

pub type Result<T> = std::result::Result<T, Error>;
