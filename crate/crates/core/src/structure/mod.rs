//! Extension systems: finite classes of finite structures connected by
//! strong embeddings, loaded from JSON and checked for the category laws.

mod analysis;
mod embedding;
mod probe;
mod system;

pub use analysis::{
    check_model_complete, mutually_cofinal, CofinalityReport, CofinalityWitness,
    ModelCompletenessReport, TransportCounterexample,
};
pub use embedding::{compute_embeddings, is_strong_embedding};
pub use probe::{sigma_closed_probe, ChainProbeReport, ChainResult, LowerBound};
pub use system::{
    check_extension_system, Embedding, ExtensionMode, ExtensionSystem, ValidationReport,
};

use thiserror::Error;

use crate::logic::LogicError;

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("edge {from} -> {to} is not a strong embedding: {reason}")]
    NotAnEmbedding {
        from: String,
        to: String,
        reason: String,
    },
    #[error("node `{0}` has no identity edge")]
    MissingIdentity(String),
    #[error("composite of {first} and {second} is not listed")]
    MissingComposite { first: String, second: String },
    #[error("signatures differ")]
    SignatureMismatch,
}
