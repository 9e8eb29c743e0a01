//! Core algorithms of the cap2qa toolkit.
//!
//! Everything in this crate is pure computation over in-memory values and
//! only needs an allocator: assembling the three-part generation prompt,
//! parsing assistant output into question-answer pairs, rejecting artifacts,
//! running the bounded retry loop against any [`Assistant`], and scoring
//! model outputs (sentence-level object hallucination, parsing VQA accuracy,
//! BLEU and CIDEr).
//!
//! File formats, the HTTP backend, caching and the command line live in the
//! `cap2qa` crate, which builds on top of this one.
//!
//! ```
//! use cap2qa_core::{filter, parse_qas};
//!
//! let pairs = parse_qas("Question: What is shown? Answer: A dog.");
//! let rules = filter::RuleSet::default_rules();
//! let report = rules.filter_artifacts(&pairs);
//! assert_eq!(report.kept.len(), 1);
//! ```
#![no_std]

extern crate alloc;

pub mod assistant;
pub mod caption_metrics;
pub mod corpus;
pub mod filter;
pub mod generator;
pub mod hallucination;
pub mod lexicon;
pub mod parse;
pub mod prompt;
pub mod vqa;

mod digest;

pub use assistant::{cache_key, Assistant, AssistantError, AssistantRequest, AssistantResponse, Clock};
pub use corpus::{dataset_stats, CaptionRecord, DatasetStats, InstructionRecord, ObjectAnnotation, Provenance, Split};
pub use digest::Digest256;
pub use filter::{FilterReport, FilterRule, RuleSet, Scope};
pub use generator::{GenerationOutcome, GenerationSettings, Generator};
pub use lexicon::Lexicon;
pub use parse::{parse_qas, QAPair};
pub use prompt::{default_prompt_config, PromptBundle, PromptConfig};
