//! Coarse-geometric certificates: fat minors, quasi-isometric embeddings and the
//! transfer of cop strategies along an embedding.

pub mod fatminor;
pub mod qi;

pub use fatminor::{build_fat_minor_grid, verify_fat_minor, Condition, FatMinorModel, FatMinorReport, Pattern, Projection, Violation};
pub use qi::{
    shadow_project, simulate_transfer, verify_qi_embedding, LiftedRobber, QiEmbedding, QiReport, QiViolation, ShadowCase, ShadowClass,
    ShadowStep, TransferConstants, TransferReport,
    VirtualCop, Wanderer,
};

use thiserror::Error;

use crate::graph::GraphError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bad embedding: {0}")]
    Embedding(String),
}
