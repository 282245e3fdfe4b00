//! Byte premiums and byte-budgeted corpus scaling.
//!
//! The byte premium of a language relative to a pivot is the UTF-8 size of
//! a text divided by the size of its content-matched pivot translation.
//! Scaling a corpus to `budget * premium` bytes gives languages with
//! expensive encodings the same amount of content as the pivot.

use std::io;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::ParallelCorpus;
use crate::error::{Error, Result};

pub const DEFAULT_PIVOT: &str = "eng_latn";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BytePremium {
    pub lang: String,
    pub pivot_lang: String,
    pub ratio: f64,
    pub lang_bytes: u64,
    pub pivot_bytes: u64,
}

/// UTF-8 bytes of all lines, terminators excluded.
pub fn text_bytes<S: AsRef<str>>(lines: &[S]) -> u64 {
    lines.iter().map(|l| l.as_ref().len() as u64).sum()
}

pub fn compute_byte_premium(corpus: &ParallelCorpus, lang: &str, pivot: &str) -> Result<BytePremium> {
    let get = |l: &str| {
        corpus
            .lines(l)
            .ok_or_else(|| Error::Input(format!("language {l} not in corpus")))
    };
    let lang_bytes = text_bytes(get(lang)?);
    let pivot_bytes = text_bytes(get(pivot)?);
    if pivot_bytes == 0 {
        return Err(Error::Input(format!("pivot {pivot} has no bytes")));
    }
    Ok(BytePremium {
        lang: lang.to_owned(),
        pivot_lang: pivot.to_owned(),
        ratio: lang_bytes as f64 / pivot_bytes as f64,
        lang_bytes,
        pivot_bytes,
    })
}

/// Premiums of every corpus language against `pivot`, in corpus order.
pub fn all_premiums(corpus: &ParallelCorpus, pivot: &str) -> Result<Vec<BytePremium>> {
    corpus
        .langs()
        .iter()
        .map(|l| compute_byte_premium(corpus, l, pivot))
        .collect()
}

/// Byte target for a base budget scaled by a premium ratio.
pub fn scaled_target(base_budget_bytes: u64, ratio: f64) -> Result<u64> {
    if base_budget_bytes == 0 {
        return Err(Error::Input("budget must be positive".into()));
    }
    if !ratio.is_finite() || ratio <= 0.0 {
        return Err(Error::Input(format!(
            "premium ratio must be finite and > 0, got {ratio}"
        )));
    }
    Ok((base_budget_bytes as f64 * ratio).round() as u64)
}

/// Takes lines in order until the next one would push the total past
/// `round(base_budget_bytes * ratio)` bytes. With `shuffle_seed` the lines
/// are shuffled first (ChaCha8, `seed_from_u64`).
pub fn scale_corpus<S: AsRef<str>>(
    lines: &[S],
    ratio: f64,
    base_budget_bytes: u64,
    shuffle_seed: Option<u64>,
) -> Result<Vec<String>> {
    if lines.is_empty() {
        return Err(Error::Input("cannot scale an empty corpus".into()));
    }
    let target = scaled_target(base_budget_bytes, ratio)?;
    let mut order: Vec<&str> = lines.iter().map(AsRef::as_ref).collect();
    if let Some(seed) = shuffle_seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut used = 0u64;
    let mut out = Vec::new();
    for line in order {
        let n = line.len() as u64;
        if used + n > target {
            break;
        }
        used += n;
        out.push(line.to_owned());
    }
    Ok(out)
}

pub fn write_premiums_csv(writer: impl io::Write, premiums: &[BytePremium]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["lang", "pivot_lang", "ratio", "lang_bytes", "pivot_bytes"])?;
    for p in premiums {
        w.write_record([
            p.lang.as_str(),
            &p.pivot_lang,
            &p.ratio.to_string(),
            &p.lang_bytes.to_string(),
            &p.pivot_bytes.to_string(),
        ])?;
    }
    w.flush()
}
