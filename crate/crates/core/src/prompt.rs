//! Three-part generation prompt: bottom rules, task description, conditions,
//! followed by the caption block.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::CaptionRecord;
use crate::digest::Digest256;

pub const CAPTION_HEADER: &str = "Caption:";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PromptError {
    EmptyPart(&'static str),
    EmptyCaption { caption_id: u64 },
}

impl fmt::Display for PromptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PromptError::EmptyPart(part) => write!(f, "prompt part `{part}` is empty"),
            PromptError::EmptyCaption { caption_id } => {
                write!(f, "caption {caption_id} is empty after trimming")
            }
        }
    }
}

impl core::error::Error for PromptError {}

/// Prompt parts plus a version tag derived from their content.
///
/// The tag is `<name>+<12 hex digits of the parts' digest>`, so editing any
/// rule, the task or a condition changes it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PromptParts", into = "PromptParts")]
pub struct PromptConfig {
    name: String,
    bottom_rules: Vec<String>,
    task_description: String,
    conditions: Vec<String>,
    version_tag: String,
}

/// Serialized form of a [`PromptConfig`]. `version_tag` is written for
/// readers but recomputed on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptParts {
    pub name: String,
    #[serde(default, skip_deserializing)]
    pub version_tag: String,
    pub bottom_rules: Vec<String>,
    pub task_description: String,
    pub conditions: Vec<String>,
}

impl TryFrom<PromptParts> for PromptConfig {
    type Error = PromptError;

    fn try_from(p: PromptParts) -> Result<Self, Self::Error> {
        PromptConfig::new(p.name, p.bottom_rules, p.task_description, p.conditions)
    }
}

impl From<PromptConfig> for PromptParts {
    fn from(c: PromptConfig) -> Self {
        PromptParts {
            name: c.name,
            version_tag: c.version_tag,
            bottom_rules: c.bottom_rules,
            task_description: c.task_description,
            conditions: c.conditions,
        }
    }
}

impl PromptConfig {
    pub fn new(
        name: impl Into<String>,
        bottom_rules: Vec<String>,
        task_description: impl Into<String>,
        conditions: Vec<String>,
    ) -> Result<Self, PromptError> {
        let name = name.into();
        let task_description = task_description.into();
        if name.trim().is_empty() {
            return Err(PromptError::EmptyPart("name"));
        }
        if bottom_rules.is_empty() || bottom_rules.iter().any(|r| r.trim().is_empty()) {
            return Err(PromptError::EmptyPart("bottom_rules"));
        }
        if task_description.trim().is_empty() {
            return Err(PromptError::EmptyPart("task_description"));
        }
        if conditions.is_empty() || conditions.iter().any(|c| c.trim().is_empty()) {
            return Err(PromptError::EmptyPart("conditions"));
        }
        let version_tag = version_tag(&name, &bottom_rules, &task_description, &conditions);
        Ok(PromptConfig { name, bottom_rules, task_description, conditions, version_tag })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn bottom_rules(&self) -> &[String] {
        &self.bottom_rules
    }
    pub fn task_description(&self) -> &str {
        &self.task_description
    }
    pub fn conditions(&self) -> &[String] {
        &self.conditions
    }
    pub fn version_tag(&self) -> &str {
        &self.version_tag
    }

    /// Everything before the caption text. Identical for every caption.
    pub fn render_prefix(&self) -> String {
        let mut out = String::new();
        out.push_str("Bottom rules:\n");
        for rule in &self.bottom_rules {
            out.push_str("- ");
            out.push_str(rule.trim());
            out.push('\n');
        }
        out.push_str("\nTask:\n");
        out.push_str(self.task_description.trim());
        out.push_str("\n\nConditions:\n");
        for cond in &self.conditions {
            out.push_str("- ");
            out.push_str(cond.trim());
            out.push('\n');
        }
        out.push('\n');
        out.push_str(CAPTION_HEADER);
        out.push('\n');
        out
    }

    pub fn render(&self, caption: &CaptionRecord) -> Result<PromptBundle, PromptError> {
        if caption.text.trim().is_empty() {
            return Err(PromptError::EmptyCaption { caption_id: caption.caption_id });
        }
        let mut rendered = self.render_prefix();
        rendered.push_str(&caption.text);
        rendered.push('\n');
        let content_hash = Digest256::of(rendered.as_bytes());
        Ok(PromptBundle { config: self.clone(), caption_text: caption.text.clone(), rendered, content_hash })
    }
}

fn version_tag(name: &str, bottom_rules: &[String], task: &str, conditions: &[String]) -> String {
    let mut fields: Vec<&[u8]> = Vec::new();
    fields.push(b"bottom_rules");
    fields.extend(bottom_rules.iter().map(|s| s.as_bytes()));
    fields.push(b"task_description");
    fields.push(task.as_bytes());
    fields.push(b"conditions");
    fields.extend(conditions.iter().map(|s| s.as_bytes()));
    let digest = Digest256::of_fields(fields);
    let hex = digest.to_hex();
    alloc::format!("{name}+{}", &hex[..12])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    pub config: PromptConfig,
    pub caption_text: String,
    pub rendered: String,
    /// SHA-256 of `rendered`.
    pub content_hash: Digest256,
}

impl PromptBundle {
    /// The text after the caption header line.
    pub fn caption_block(&self) -> &str {
        let header = alloc::format!("\n{CAPTION_HEADER}\n");
        match self.rendered.rfind(&header) {
            Some(i) => &self.rendered[i + header.len()..],
            None => "",
        }
    }
}

pub const ANY_CONTENT_RULE: &str = "Any content should be included by the given context.";
pub const ANSWER_WHAT_ASKED_RULE: &str = "Must answer to what asked. In other word, if not asked, nothing should be answered such as explanation neither any comment.";
pub const NOT_SPECIFIED_TASK: &str = "Must avoid questioning and answering 'not specified in the caption'";
pub const REASONABLE_CONDITION: &str =
    "The generated question-answer should be reasonable and question should not imply answer.";
pub const NO_SPECIFICATION_CONDITION: &str =
    "Must avoid question-answer if answering the question is not valid due to no specification";

/// The shipped prompt.
pub fn default_prompt_config() -> PromptConfig {
    let task = alloc::format!(
        "Generate question-answer pairs from the following caption. {NOT_SPECIFIED_TASK}. \
         Format each pair as 'Question: ...' and 'Answer: ...'"
    );
    PromptConfig::new(
        "cap2qa-default",
        alloc::vec![ANY_CONTENT_RULE.to_owned(), ANSWER_WHAT_ASKED_RULE.to_owned()],
        task,
        alloc::vec![REASONABLE_CONDITION.to_owned(), NO_SPECIFICATION_CONDITION.to_owned()],
    )
    .expect("default prompt parts are non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Split;

    fn caption(text: &str) -> CaptionRecord {
        CaptionRecord { caption_id: 1, image_id: 1, text: text.into(), split: Split::Val }
    }

    #[test]
    fn default_contains_quoted_fragments() {
        let cfg = default_prompt_config();
        assert!(cfg.bottom_rules().iter().any(|r| r == ANY_CONTENT_RULE));
        assert!(cfg.bottom_rules().iter().any(|r| r == ANSWER_WHAT_ASKED_RULE));
        assert!(cfg.task_description().contains(NOT_SPECIFIED_TASK));
        assert!(cfg.conditions().iter().any(|c| c == REASONABLE_CONDITION));
        assert!(cfg.conditions().iter().any(|c| c == NO_SPECIFICATION_CONDITION));

        let rendered = cfg.render(&caption("A dog runs.")).unwrap().rendered;
        for frag in [
            ANY_CONTENT_RULE,
            ANSWER_WHAT_ASKED_RULE,
            NOT_SPECIFIED_TASK,
            REASONABLE_CONDITION,
            NO_SPECIFICATION_CONDITION,
        ] {
            assert!(rendered.contains(frag), "missing {frag}");
        }
    }

    #[test]
    fn caption_appears_once_in_caption_block() {
        let b = default_prompt_config().render(&caption("A dog runs.")).unwrap();
        assert_eq!(b.rendered.matches("A dog runs.").count(), 1);
        assert_eq!(b.caption_block(), "A dog runs.\n");
        assert_eq!(b.content_hash, Digest256::of(b.rendered.as_bytes()));
    }

    #[test]
    fn render_is_deterministic() {
        let cfg = default_prompt_config();
        let a = cfg.render(&caption("A dog runs.")).unwrap();
        let b = default_prompt_config().render(&caption("A dog runs.")).unwrap();
        assert_eq!(a.rendered, b.rendered);
        assert_eq!(a.content_hash, b.content_hash);
        assert_eq!(cfg.version_tag(), default_prompt_config().version_tag());
    }

    #[test]
    fn shared_prefix_up_to_caption_block() {
        let cfg = default_prompt_config();
        let a = cfg.render(&caption("A dog runs.")).unwrap().rendered;
        let b = cfg.render(&caption("Two cats sleep.")).unwrap().rendered;
        let lcp = a.bytes().zip(b.bytes()).take_while(|(x, y)| x == y).count();
        let prefix = cfg.render_prefix();
        assert_eq!(lcp, prefix.len());
        assert!(a.starts_with(&prefix) && b.starts_with(&prefix));
    }

    #[test]
    fn editing_a_condition_changes_tag_and_hash() {
        let base = default_prompt_config();
        let mut conds = base.conditions().to_vec();
        conds[0].push_str(" Be brief.");
        let edited =
            PromptConfig::new(base.name(), base.bottom_rules().to_vec(), base.task_description(), conds).unwrap();
        assert_ne!(base.version_tag(), edited.version_tag());
        let c = caption("A dog runs.");
        assert_ne!(base.render(&c).unwrap().content_hash, edited.render(&c).unwrap().content_hash);
    }

    #[test]
    fn empty_caption_rejected() {
        let err = default_prompt_config().render(&caption("  \n")).unwrap_err();
        assert_eq!(err, PromptError::EmptyCaption { caption_id: 1 });
    }

    #[test]
    fn empty_parts_rejected() {
        let err = PromptConfig::new("x", alloc::vec![], "task", alloc::vec!["c".into()]).unwrap_err();
        assert_eq!(err, PromptError::EmptyPart("bottom_rules"));
        let err = PromptConfig::new("x", alloc::vec!["r".into()], " ", alloc::vec!["c".into()]).unwrap_err();
        assert_eq!(err, PromptError::EmptyPart("task_description"));
    }
}
