//! The bounded generate-filter-retry loop for one caption.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::assistant::{Assistant, AssistantError, AssistantRequest, Clock};
use crate::corpus::{CaptionRecord, InstructionRecord, Provenance};
use crate::filter::{Rejection, RuleSet};
use crate::parse::QaParser;
use crate::prompt::{PromptConfig, PromptError};

pub const DEFAULT_RETRY: u32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSettings {
    /// Upper bound on loop iterations per caption; at least 1.
    pub retry: u32,
    pub model_id: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub keep_raw: bool,
}

impl Default for GenerationSettings {
    fn default() -> Self {
        GenerationSettings {
            retry: DEFAULT_RETRY,
            model_id: "gpt-3.5-turbo".into(),
            temperature: 0.0,
            max_output_tokens: 1024,
            keep_raw: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationOutcome {
    pub caption_id: u64,
    pub image_id: u64,
    pub records: Vec<InstructionRecord>,
    pub attempts_used: u32,
    /// One entry per attempt when `keep_raw` is set.
    pub raw_responses: Vec<String>,
    /// Every rejected pair across all attempts.
    pub rejected: Vec<Rejection>,
}

impl GenerationOutcome {
    pub fn is_exhausted(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerateError {
    InvalidRetry,
    Prompt(PromptError),
    Assistant(AssistantError),
}

impl fmt::Display for GenerateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenerateError::InvalidRetry => f.write_str("retry must be at least 1"),
            GenerateError::Prompt(e) => e.fmt(f),
            GenerateError::Assistant(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for GenerateError {}

impl From<AssistantError> for GenerateError {
    fn from(e: AssistantError) -> Self {
        GenerateError::Assistant(e)
    }
}

impl From<PromptError> for GenerateError {
    fn from(e: PromptError) -> Self {
        GenerateError::Prompt(e)
    }
}

/// Prompt, rules and settings for a run. Cheap to share across threads.
#[derive(Debug, Clone)]
pub struct Generator {
    prompt: PromptConfig,
    rules: RuleSet,
    settings: GenerationSettings,
    parser: QaParser,
}

impl Generator {
    pub fn new(prompt: PromptConfig, rules: RuleSet, settings: GenerationSettings) -> Result<Self, GenerateError> {
        if settings.retry < 1 {
            return Err(GenerateError::InvalidRetry);
        }
        Ok(Generator { prompt, rules, settings, parser: QaParser::new() })
    }

    pub fn prompt(&self) -> &PromptConfig {
        &self.prompt
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn settings(&self) -> &GenerationSettings {
        &self.settings
    }

    /// Render, ask, parse, filter; stop at the first attempt that keeps at
    /// least one pair, or after `retry` attempts with no records.
    ///
    /// Content problems (no markers, everything filtered, empty response)
    /// only consume an attempt. Backend errors are returned.
    pub fn generate_for_caption<A, C>(
        &self,
        caption: &CaptionRecord,
        assistant: &A,
        clock: &C,
    ) -> Result<GenerationOutcome, GenerateError>
    where
        A: Assistant + ?Sized,
        C: Clock + ?Sized,
    {
        let bundle = self.prompt.render(caption)?;
        let mut outcome = GenerationOutcome {
            caption_id: caption.caption_id,
            image_id: caption.image_id,
            records: Vec::new(),
            attempts_used: 0,
            raw_responses: Vec::new(),
            rejected: Vec::new(),
        };

        for attempt in 1..=self.settings.retry {
            outcome.attempts_used = attempt;
            let request = AssistantRequest {
                prompt_text: bundle.rendered.clone(),
                model_id: self.settings.model_id.clone(),
                temperature: self.settings.temperature,
                max_output_tokens: self.settings.max_output_tokens,
                sample: attempt - 1,
            };
            let text = match assistant.complete(&request) {
                Ok(response) => response.text,
                Err(AssistantError::ResponseEmpty) => String::new(),
                Err(e) => return Err(e.into()),
            };
            let pairs = self.parser.parse(&text);
            if self.settings.keep_raw {
                outcome.raw_responses.push(text);
            }
            let report = self.rules.filter_artifacts(&pairs);
            outcome.rejected.extend(report.rejected);
            if !report.kept.is_empty() {
                let created_at = clock.now();
                outcome.records = report
                    .kept
                    .into_iter()
                    .map(|pair| InstructionRecord {
                        image_id: caption.image_id,
                        question: pair.question,
                        answer: pair.answer,
                        source_caption_ids: alloc::vec![caption.caption_id],
                        provenance: Provenance {
                            model_id: self.settings.model_id.clone(),
                            prompt_version: self.prompt.version_tag().into(),
                            attempt,
                            created_at,
                        },
                    })
                    .collect();
                break;
            }
        }
        Ok(outcome)
    }
}
