//! COCO caption and instance annotation files.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use cap2qa_core::{CaptionRecord, Lexicon, ObjectAnnotation, Split};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Deserialize)]
struct CaptionFile {
    annotations: Vec<Value>,
}

#[derive(Deserialize)]
struct RawCaption {
    id: u64,
    image_id: u64,
    caption: String,
}

#[derive(Deserialize)]
struct InstancesFile {
    categories: Vec<Value>,
    annotations: Vec<Value>,
    #[serde(default)]
    images: Vec<Value>,
}

#[derive(Deserialize)]
struct RawCategory {
    id: u64,
    name: String,
}

#[derive(Deserialize)]
struct RawInstance {
    image_id: u64,
    category_id: u64,
}

#[derive(Deserialize)]
struct RawImage {
    id: u64,
}

/// Byte offset of a serde_json error, from its 1-based line and column.
pub(crate) fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (i, chunk) in bytes.split_inclusive(|&b| b == b'\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1).min(chunk.len());
        }
        offset += chunk.len();
    }
    offset
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn parse_document<T: DeserializeOwned>(path: &Path, bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| {
        if e.is_data() {
            Error::SchemaViolation { path: path.to_path_buf(), index: 0, message: format!("top level: {e}") }
        } else {
            Error::MalformedJson {
                path: path.to_path_buf(),
                offset: byte_offset(bytes, e.line(), e.column()),
                message: e.to_string(),
            }
        }
    })
}

fn entry<T: DeserializeOwned>(path: &Path, index: usize, value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::SchemaViolation {
        path: path.to_path_buf(),
        index,
        message: e.to_string(),
    })
}

/// One record per entry of the top-level `annotations` array, in file order.
pub fn load_coco_captions(path: &Path, split: Split) -> Result<Vec<CaptionRecord>> {
    let bytes = read_bytes(path)?;
    let file: CaptionFile = parse_document(path, &bytes)?;
    let mut seen = HashSet::with_capacity(file.annotations.len());
    let mut out = Vec::with_capacity(file.annotations.len());
    for (index, value) in file.annotations.into_iter().enumerate() {
        let raw: RawCaption = entry(path, index, value)?;
        if raw.caption.trim().is_empty() {
            return Err(Error::SchemaViolation {
                path: path.to_path_buf(),
                index,
                message: format!("caption {} is empty", raw.id),
            });
        }
        if !seen.insert(raw.id) {
            return Err(Error::SchemaViolation {
                path: path.to_path_buf(),
                index,
                message: format!("duplicate caption id {}", raw.id),
            });
        }
        out.push(CaptionRecord { caption_id: raw.id, image_id: raw.image_id, text: raw.caption, split });
    }
    Ok(out)
}

/// Reference captions grouped by image, in file order within each image.
pub fn load_caption_references(path: &Path) -> Result<BTreeMap<u64, Vec<String>>> {
    let bytes = read_bytes(path)?;
    let file: CaptionFile = parse_document(path, &bytes)?;
    let mut out: BTreeMap<u64, Vec<String>> = BTreeMap::new();
    for (index, value) in file.annotations.into_iter().enumerate() {
        let raw: RawCaption = entry(path, index, value)?;
        out.entry(raw.image_id).or_default().push(raw.caption);
    }
    Ok(out)
}

/// Positive categories per image from instance annotations; negatives are
/// the rest of the lexicon vocabulary. Images listed under `images` with no
/// instances get an empty positive set. Categories the lexicon does not
/// know are ignored. Output is sorted by image id.
pub fn load_object_annotations(path: &Path, lexicon: &Lexicon) -> Result<Vec<ObjectAnnotation>> {
    let bytes = read_bytes(path)?;
    let file: InstancesFile = parse_document(path, &bytes)?;

    let mut names = BTreeMap::new();
    for (index, value) in file.categories.into_iter().enumerate() {
        let cat: RawCategory = entry(path, index, value)?;
        names.insert(cat.id, cat.name);
    }

    let mut positives: BTreeMap<u64, BTreeSet<&str>> = BTreeMap::new();
    for (index, value) in file.images.into_iter().enumerate() {
        let image: RawImage = entry(path, index, value)?;
        positives.entry(image.id).or_default();
    }
    for (index, value) in file.annotations.into_iter().enumerate() {
        let inst: RawInstance = entry(path, index, value)?;
        let name = names.get(&inst.category_id).ok_or_else(|| Error::UnknownCategoryId {
            path: path.to_path_buf(),
            index,
            category_id: inst.category_id,
        })?;
        positives.entry(inst.image_id).or_default().insert(name.as_str());
    }

    let vocabulary = lexicon.categories();
    Ok(positives
        .into_iter()
        .map(|(image_id, names)| ObjectAnnotation::from_positives(image_id, names, vocabulary))
        .collect())
}
