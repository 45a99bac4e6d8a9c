//! Curation engine for a soccer-statistics question/answer corpus.
//!
//! Raw match and event files are parsed ([`ingest`]), turned into five
//! intermediate tables ([`tables`]) with every event placed on a 6×4 pitch
//! grid ([`pitch_grid`]), and summarized ([`stats`]). Template families and
//! teacher-model output are rendered into a chunked JSONL corpus
//! ([`curate`], [`distill`]); [`oracle`] answers and grades the factual
//! families from the same tables. [`lora`] holds the low-rank adapter and
//! 8-bit quantization math at toy scale.

pub mod curate;
pub mod distill;
pub mod error;
pub mod fixture;
pub mod ingest;
pub mod lora;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod pitch_grid;
pub mod stats;
pub mod tables;

pub use error::{Error, Result};
