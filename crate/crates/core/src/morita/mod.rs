//! Matrix theories, idempotent modifications and the retract data that
//! governs Morita equivalence.

mod idempotent;
mod matrix;
mod retract;

pub use idempotent::{
    condition, idempotent_modification, idempotent_modification_named, is_idempotent, lemma_audit,
    zigzag_functors, ConditionCheck, ConditionPath, Idempotent, IdempotentModification, LemmaAudit, LemmaRankRow,
    ZigzagReport, ZigzagRow,
};
pub use matrix::{matrix_theory, MatrixTheory};
pub use retract::{
    pseudo_invertible, retract_fingerprint, retract_fingerprint_against, FingerprintClass, FingerprintMode,
    PseudoInverse, RetractFingerprint,
};
