use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use cap2qa_core::Digest256;
use serde::{Deserialize, Serialize};

/// On-disk record for one cache key: every sample drawn for it so far.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Entry {
    key: Digest256,
    samples: Vec<Option<String>>,
}

/// Content-addressed response store under `<dir>/<aa>/<key>.json`, where
/// `aa` is the first two hex digits of the key.
#[derive(Debug)]
pub struct ResponseCache {
    dir: PathBuf,
    loaded: Mutex<HashMap<Digest256, Vec<Option<String>>>>,
}

impl ResponseCache {
    pub fn open(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(ResponseCache { dir: dir.to_path_buf(), loaded: Mutex::new(HashMap::new()) })
    }

    fn file_for(&self, key: &Digest256) -> PathBuf {
        let hex = key.to_hex();
        self.dir.join(&hex[..2]).join(format!("{hex}.json"))
    }

    fn load(&self, key: &Digest256) -> io::Result<Vec<Option<String>>> {
        match fs::read(self.file_for(key)) {
            Ok(bytes) => {
                let entry: Entry =
                    serde_json::from_slice(&bytes).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
                if entry.key != *key {
                    return Err(io::Error::new(io::ErrorKind::InvalidData, "cache entry key mismatch"));
                }
                Ok(entry.samples)
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(e),
        }
    }

    pub fn get(&self, key: &Digest256, sample: u32) -> io::Result<Option<String>> {
        let mut loaded = self.loaded.lock().unwrap();
        if !loaded.contains_key(key) {
            let samples = self.load(key)?;
            loaded.insert(*key, samples);
        }
        Ok(loaded[key].get(sample as usize).cloned().flatten())
    }

    pub fn put(&self, key: &Digest256, sample: u32, text: &str) -> io::Result<()> {
        let mut loaded = self.loaded.lock().unwrap();
        if !loaded.contains_key(key) {
            let samples = self.load(key)?;
            loaded.insert(*key, samples);
        }
        let samples = loaded.get_mut(key).expect("just inserted");
        let i = sample as usize;
        if samples.len() <= i {
            samples.resize(i + 1, None);
        }
        samples[i] = Some(text.to_owned());
        let entry = Entry { key: *key, samples: samples.clone() };
        let path = self.file_for(key);
        let parent = path.parent().expect("cache file has a parent");
        fs::create_dir_all(parent)?;
        let tmp = parent.join(format!(".{}.tmp", key.to_hex()));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&serde_json::to_vec(&entry).expect("entry serializes"))?;
        f.sync_all()?;
        fs::rename(&tmp, &path)
    }
}
