use std::io;
use std::path::{Path, PathBuf};

use cap2qa_core::assistant::AssistantError;
use cap2qa_core::caption_metrics::CaptionMetricError;
use cap2qa_core::filter::RuleError;
use cap2qa_core::generator::GenerateError;
use cap2qa_core::hallucination::ChairError;
use cap2qa_core::lexicon::LexiconError;
use cap2qa_core::prompt::PromptError;
use cap2qa_core::vqa::VqaError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: file not found", .0.display())]
    MissingFile(PathBuf),

    #[error("{}: malformed JSON at byte {offset}: {message}", path.display())]
    MalformedJson { path: PathBuf, offset: usize, message: String },

    #[error("{}: entry {index}: {message}", path.display())]
    SchemaViolation { path: PathBuf, index: usize, message: String },

    #[error("{}: annotation {index} references unknown category id {category_id}", path.display())]
    UnknownCategoryId { path: PathBuf, index: usize, category_id: u64 },

    #[error("{}: line {line}: {message}", path.display())]
    MalformedLine { path: PathBuf, line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Lexicon {
        path: PathBuf,
        #[source]
        source: LexiconError,
    },

    #[error("{}: {source}", path.display())]
    Rules {
        path: PathBuf,
        #[source]
        source: RuleError,
    },

    #[error("prompt: {0}")]
    Prompt(#[from] PromptError),

    #[error("{0}")]
    Assistant(#[from] AssistantError),

    #[error("caption {caption_id}: {source}")]
    Generate {
        caption_id: u64,
        #[source]
        source: GenerateError,
    },

    #[error("{0}")]
    Chair(#[from] ChairError),

    #[error("{0}")]
    Vqa(#[from] VqaError),

    #[error("{0}")]
    Caption(#[from] CaptionMetricError),

    #[error("{0}")]
    Input(String),
}

impl Error {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        if source.kind() == io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::Io { path: path.to_path_buf(), source }
        }
    }
}
