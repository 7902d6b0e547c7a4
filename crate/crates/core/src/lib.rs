//! One-pass maximum-weight matching over edge streams.
//!
//! Three engines share one implementation ([`Mode`]): the basic local-ratio
//! rule, exponentially growing potentials, and per-vertex queues capped at
//! `beta` for `O(n log n)` space. Every run yields a [`DualCertificate`] that
//! bounds the optimum, and the [`certificate`] and [`verify`] modules replay
//! streams and traces to check the inequalities behind the guarantees.
//!
//! ```
//! use mwm_stream::{run_stream, EngineConfig, RawEdge};
//!
//! let stream = [RawEdge::new(0, 1, 1.0), RawEdge::new(1, 2, 2.0)];
//! let out = run_stream(stream, EngineConfig::capped(0.25)).unwrap();
//! assert_eq!(out.matching.total_weight, 2.0);
//! assert!(out.certificate.upper_bound() >= 2.0);
//! ```

pub mod bench;
pub mod certificate;
pub mod compaction;
pub mod engine;
pub mod error;
pub mod io;
pub mod oracle;
pub mod report;
pub mod stack;
pub mod types;
pub mod verify;

pub use certificate::{CheckReport, DualCertificate, VerificationReport};
pub use compaction::{quantize, CompactPhi, QuantizedWeight, ThresholdFilter};
pub use engine::{
    default_beta, prepare_stream, run_edges, run_stream, Decision, Engine, EngineConfig, Mode,
    PhiBackend, RunOutcome,
};
pub use error::{Error, Result};
pub use oracle::{exact_mwm, generate_stream, offline_greedy, SmallGraph, StreamSpec};
pub use report::RunReport;
pub use types::{EdgeRecord, Matching, RawEdge, StreamStats, TraceDecision, TraceEvent, VertexId, TAU};
pub use verify::{verify_run, verify_trace};
