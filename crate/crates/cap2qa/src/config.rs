//! TOML files: prompt configs, rule sets and the `generate` run config.

use std::fs;
use std::path::{Path, PathBuf};

use cap2qa_core::filter::{default_rules, FilterRule, Scope};
use cap2qa_core::prompt::PromptParts;
use cap2qa_core::{PromptConfig, RuleSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn config_error(path: &Path, message: impl ToString) -> Error {
    Error::Config { path: path.to_path_buf(), message: message.to_string() }
}

pub fn prompt_from_toml(text: &str) -> std::result::Result<PromptConfig, String> {
    let parts: PromptParts = toml::from_str(text).map_err(|e| e.to_string())?;
    PromptConfig::try_from(parts).map_err(|e| e.to_string())
}

pub fn prompt_to_toml(config: &PromptConfig) -> String {
    toml::to_string(&PromptParts::from(config.clone())).expect("prompt parts serialize")
}

pub fn load_prompt(path: &Path) -> Result<PromptConfig> {
    prompt_from_toml(&read_text(path)?).map_err(|m| config_error(path, m))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RuleEntry {
    #[serde(alias = "rule_id")]
    id: String,
    #[serde(default = "either")]
    scope: Scope,
    pattern: String,
    #[serde(default)]
    description: String,
}

fn either() -> Scope {
    Scope::Either
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RuleFile {
    rule: Vec<RuleEntry>,
}

pub fn rules_from_toml(text: &str) -> std::result::Result<Vec<FilterRule>, String> {
    let file: RuleFile = toml::from_str(text).map_err(|e| e.to_string())?;
    Ok(file
        .rule
        .into_iter()
        .map(|r| FilterRule { rule_id: r.id, scope: r.scope, pattern: r.pattern, description: r.description })
        .collect())
}

pub fn rules_to_toml(rules: &[FilterRule]) -> String {
    let file = RuleFile {
        rule: rules
            .iter()
            .map(|r| RuleEntry {
                id: r.rule_id.clone(),
                scope: r.scope,
                pattern: r.pattern.clone(),
                description: r.description.clone(),
            })
            .collect(),
    };
    toml::to_string(&file).expect("rules serialize")
}

pub fn default_rules_toml() -> String {
    rules_to_toml(&default_rules())
}

pub fn load_rules(path: &Path) -> Result<RuleSet> {
    let rules = rules_from_toml(&read_text(path)?).map_err(|m| config_error(path, m))?;
    RuleSet::new(rules).map_err(|source| Error::Rules { path: path.to_path_buf(), source })
}

/// `generate` settings from a `--config` file. Every key is optional;
/// flags and environment variables take precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateFile {
    pub captions: Option<PathBuf>,
    pub split: Option<String>,
    pub out: Option<PathBuf>,
    pub backend: Option<String>,
    pub base_url: Option<String>,
    pub model: Option<String>,
    pub retry: Option<u32>,
    pub workers: Option<usize>,
    pub rules: Option<PathBuf>,
    pub prompt: Option<PathBuf>,
    pub keep_raw: Option<bool>,
    pub resume: Option<bool>,
    pub script: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
    pub network_retries: Option<u32>,
    pub rpm: Option<u32>,
    pub timeout_secs: Option<u64>,
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    generate: GenerateFile,
}

pub fn load_generate_file(path: &Path) -> Result<GenerateFile> {
    let file: ConfigFile = toml::from_str(&read_text(path)?).map_err(|e| config_error(path, e))?;
    Ok(file.generate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cap2qa_core::default_prompt_config;

    #[test]
    fn prompt_round_trip() {
        let cfg = default_prompt_config();
        let text = prompt_to_toml(&cfg);
        assert!(text.contains("version_tag"));
        assert_eq!(prompt_from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn rules_round_trip() {
        let text = default_rules_toml();
        assert_eq!(rules_from_toml(&text).unwrap(), default_rules());
    }

    #[test]
    fn scope_defaults_to_either() {
        let rules = rules_from_toml("[[rule]]\nid = \"x\"\npattern = \"foo\"\n").unwrap();
        assert_eq!(rules[0].scope, Scope::Either);
    }
}
