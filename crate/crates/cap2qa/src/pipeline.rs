//! Corpus-scale generation: a worker pool over captions feeding a single
//! writer that emits records in caption input order.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{mpsc, Condvar, Mutex};
use std::thread;

use cap2qa_core::generator::GenerateError;
use cap2qa_core::{Assistant, CaptionRecord, Clock, GenerationOutcome, Generator};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jsonl::{check_record, parse_line, to_line};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Concurrent in-flight generations; at least 1.
    pub workers: usize,
    /// Append to an existing output and skip captions already present.
    pub resume: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { workers: 1, resume: false }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub n_captions: u64,
    /// Captions skipped because the output already held their records.
    pub n_skipped: u64,
    /// Records written by this run.
    pub n_records: u64,
    pub n_exhausted: u64,
    /// Distinct images with at least one record in the output file.
    pub n_covered_images: u64,
}

/// Sidecar path for raw responses: `<out>.raw.jsonl`.
pub fn raw_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".raw.jsonl");
    PathBuf::from(name)
}

#[derive(Serialize)]
struct RawLine<'a> {
    caption_id: u64,
    attempt: usize,
    response_text: &'a str,
}

/// Existing records' caption ids and images. A final line cut short by a
/// crash is truncated away first.
fn scan_existing(path: &Path) -> Result<(HashSet<u64>, HashSet<u64>)> {
    let mut captions = HashSet::new();
    let mut images = HashSet::new();
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((captions, images)),
        Err(e) => return Err(Error::io(path, e)),
    };
    let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    if complete < bytes.len() {
        log::warn!("{}: dropping {} bytes of incomplete final line", path.display(), bytes.len() - complete);
        let f = OpenOptions::new().write(true).open(path).map_err(|e| Error::io(path, e))?;
        f.set_len(complete as u64).map_err(|e| Error::io(path, e))?;
    }
    let reader = BufReader::new(&bytes[..complete]);
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: cap2qa_core::InstructionRecord = parse_line(path, i + 1, &line)?;
        check_record(path, i + 1, &record)?;
        captions.extend(record.source_caption_ids.iter().copied());
        images.insert(record.image_id);
    }
    Ok((captions, images))
}

struct Schedule {
    next: usize,
    written: usize,
    abort: bool,
}

struct Sink<'a> {
    out_path: &'a Path,
    out: File,
    raw: Option<(PathBuf, File)>,
    summary: RunSummary,
    images: HashSet<u64>,
}

impl Sink<'_> {
    fn emit(&mut self, caption: &CaptionRecord, outcome: &GenerationOutcome) -> Result<()> {
        if let Some((path, raw)) = &mut self.raw {
            let mut buf = Vec::new();
            for (i, text) in outcome.raw_responses.iter().enumerate() {
                buf.extend(to_line(&RawLine { caption_id: outcome.caption_id, attempt: i + 1, response_text: text }));
            }
            raw.write_all(&buf).map_err(|e| Error::io(path, e))?;
        }
        if outcome.is_exhausted() {
            self.summary.n_exhausted += 1;
            log::warn!(
                "caption {} (image {}) uncovered after {} attempts",
                caption.caption_id,
                caption.image_id,
                outcome.attempts_used
            );
            return Ok(());
        }
        let mut buf = Vec::new();
        for record in &outcome.records {
            buf.extend(to_line(record));
        }
        self.out.write_all(&buf).map_err(|e| Error::io(self.out_path, e))?;
        self.out.flush().map_err(|e| Error::io(self.out_path, e))?;
        self.summary.n_records += outcome.records.len() as u64;
        self.images.insert(outcome.image_id);
        Ok(())
    }
}

/// Run the retry loop over every caption and append the records to
/// `out_path` in caption input order, whatever order workers finish in.
///
/// At most `4 * workers` captions are in flight or waiting to be written.
/// A backend error stops scheduling; captions before the failing one are
/// written, later ones are not, so a `resume` run picks up from there.
pub fn generate_corpus<A, C>(
    captions: &[CaptionRecord],
    generator: &Generator,
    assistant: &A,
    clock: &C,
    out_path: &Path,
    options: &RunOptions,
) -> Result<RunSummary>
where
    A: Assistant + Sync + ?Sized,
    C: Clock + Sync + ?Sized,
{
    if options.workers == 0 {
        return Err(Error::Input("workers must be at least 1".into()));
    }
    let (done, existing_images) = if options.resume { scan_existing(out_path)? } else { Default::default() };
    let pending: Vec<&CaptionRecord> = captions.iter().filter(|c| !done.contains(&c.caption_id)).collect();

    let open = |path: &Path| -> Result<File> {
        let mut o = OpenOptions::new();
        o.create(true);
        if options.resume {
            o.append(true);
        } else {
            o.write(true).truncate(true);
        }
        o.open(path).map_err(|e| Error::io(path, e))
    };
    let out = open(out_path)?;
    let raw = if generator.settings().keep_raw {
        let p = raw_path(out_path);
        let f = open(&p)?;
        Some((p, f))
    } else {
        None
    };
    let mut sink = Sink {
        out_path,
        out,
        raw,
        summary: RunSummary {
            n_captions: captions.len() as u64,
            n_skipped: (captions.len() - pending.len()) as u64,
            ..RunSummary::default()
        },
        images: existing_images,
    };

    let window = 4 * options.workers;
    let schedule = Mutex::new(Schedule { next: 0, written: 0, abort: false });
    let wake = Condvar::new();
    let mut failure: Option<Error> = None;

    thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, std::result::Result<GenerationOutcome, GenerateError>)>();
        for _ in 0..options.workers.min(pending.len().max(1)) {
            let tx = tx.clone();
            let (pending, schedule, wake) = (&pending, &schedule, &wake);
            scope.spawn(move || loop {
                let idx = {
                    let mut s = schedule.lock().unwrap();
                    loop {
                        if s.abort || s.next >= pending.len() {
                            return;
                        }
                        if s.next < s.written + window {
                            s.next += 1;
                            break s.next - 1;
                        }
                        s = wake.wait(s).unwrap();
                    }
                };
                let result = generator.generate_for_caption(pending[idx], assistant, clock);
                if result.is_err() {
                    schedule.lock().unwrap().abort = true;
                    wake.notify_all();
                }
                if tx.send((idx, result)).is_err() {
                    return;
                }
            });
        }
        drop(tx);

        let mut buffered = BTreeMap::new();
        let mut written = 0usize;
        for (idx, result) in rx {
            if failure.is_some() {
                continue;
            }
            buffered.insert(idx, result);
            while let Some(result) = buffered.remove(&written) {
                let caption = pending[written];
                let step = match result {
                    Ok(outcome) => sink.emit(caption, &outcome),
                    Err(source) => Err(Error::Generate { caption_id: caption.caption_id, source }),
                };
                if let Err(e) = step {
                    failure = Some(e);
                    schedule.lock().unwrap().abort = true;
                    wake.notify_all();
                    break;
                }
                written += 1;
                schedule.lock().unwrap().written = written;
                wake.notify_all();
            }
        }
    });

    if let Some((path, raw)) = &mut sink.raw {
        raw.flush().map_err(|e| Error::io(path, e))?;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    sink.summary.n_covered_images = sink.images.len() as u64;
    Ok(sink.summary)
}
