//! File formats, assistant backends, the generation pipeline and the
//! command line, on top of `cap2qa-core`.

pub mod cli;
pub mod coco;
pub mod config;
pub mod error;
pub mod jsonl;
pub mod lexicon_io;
pub mod llm;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
