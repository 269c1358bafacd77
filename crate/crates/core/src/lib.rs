//! Round-trip ("retromorphic") testing: a forward program maps an input into
//! another modality, an optional mutation perturbs the result, a backward
//! program maps it back, and a relation is checked between the original input
//! and the round-tripped one.
//!
//! The crate ships the generic pipeline ([`pipeline`]), seeded input
//! generators ([`generators`]), five case-study suites ([`suites`]), an
//! adapter for external line-JSON programs ([`external`]), and the on-disk
//! record formats used by the command-line harness ([`report`]).

pub mod error;
pub mod external;
pub mod generators;
pub mod pipeline;
pub mod registry;
pub mod report;
pub mod rng;
pub mod suites;

pub use error::ConfigError;
pub use pipeline::{
    derive_trial_seed, run_suite, run_trial, Datum, ExecCtx, Fault, Judgement, ModeTag,
    MutationDescriptor, Mutator, ParamValue, Program, RelationCtx, Stage, Suite, SuiteConfig,
    SuiteDefinition, SuiteSummary, Transcript, TrialReport, Verdict,
};
pub use registry::{find_suite, registry};
pub use rng::Rng;
