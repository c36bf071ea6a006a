//! Certificates and everything that checks them.

pub mod bounds;
mod certificate;
pub mod oracle;
pub mod verify;

pub use bounds::{bounds_table, Bound, BoundRow, BoundsTable};
pub use certificate::{
    record_evidence, Construction, EquilateralCertificate, NormTag, PairEvidence, PartRecord,
    Source, StabilityCheck, DEFAULT_EVIDENCE_PAIRS,
};
pub use oracle::{exhaustive_pivot_oracle, OracleMode, OracleOptimum};
pub use verify::{linf_distance, verify_certificate, Failure, VerificationReport};
