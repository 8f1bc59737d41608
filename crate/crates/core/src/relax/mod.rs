//! Moment/SOS relaxations, their noise-model variants and SDPA exchange.

mod build;
mod certificate;
mod localizing;
mod moments;
mod problem;
mod sdp;
mod sdpa;

pub use build::{
    build_canonical_robust, build_noise_dual, build_noise_penalized, build_nominal,
    build_priority_psd, build_priority_trace,
};
pub use certificate::SosCertificate;
pub use localizing::{localizing_system, LocalizingBlock, LocalizingSystem, SymEntry};
pub use moments::MomentSequence;
pub use problem::{MomentProblem, Noise};
pub use sdp::{
    BlockKind, BlockSpec, Encoding, Entry, Formulation, FormulationTag, MomentLayout,
    SdpInstance, SparseSym,
};
pub use sdpa::{export_sdpa, from_sdpa_str, import_sdpa, to_sdpa_string};
