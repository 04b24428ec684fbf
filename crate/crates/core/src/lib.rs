//! Author-level citation dynamics.
//!
//! `citeburst` turns a bibliographic corpus (papers with months, authors and
//! references) into a weighted bipartite paper→author citation network, then
//! replays the publication stream month by month while reassigning every
//! author-citation with a stochastic attachment kernel:
//!
//! * preferential attachment, weight `A + k` (total citations so far);
//! * recency, weight `A + Δk` (citations collected in the trailing `w` months).
//!
//! Simulated and empirical histories are compared through citation and
//! burst-size distributions (burst size `b = Δk / k` over a calendar year),
//! lag correlations and first Wasserstein distances, and a grid sweep over
//! `(A, w)` locates the best-fitting recency parameters.
//!
//! The pipeline, module by module:
//!
//! ```text
//! corpus ──► bpan ──► simulate ──► metrics ──► fit
//!   │         │  (kernels)            │
//!   └─ synthetic generator            └─ CSV exports
//! ```
//!
//! Runnable examples live in `examples/`; `cargo run --example <name>`.

pub mod bpan;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod fit;
pub mod kernels;
pub mod manifest;
pub mod metrics;
pub mod simulate;

pub use bpan::{AuthorState, Bpan, BpanEdge, BuildOptions, Histories};
pub use corpus::{Corpus, Epoch, PaperRecord, SyntheticSpec};
pub use error::{Error, Result};
pub use fit::{GridSpec, SweepConfig, SweepResult, Transform};
pub use kernels::{KernelKind, KernelParams, UpdateMode};
pub use metrics::DistributionSample;
pub use simulate::{Replay, SimConfig, SimState, StartMode};
