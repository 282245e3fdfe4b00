use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ModelKind, TokenizerModel};
use crate::error::{Error, Result};

/// On-disk JSON layout. Field order is fixed so serialization is canonical.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    kind: ModelKind,
    marker: String,
    specials: Vec<String>,
    vocab: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    merges: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scores: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vocab_size_target: Option<usize>,
}

impl TokenizerModel {
    /// Canonical JSON text of the model, newline-terminated.
    pub fn to_json(&self) -> String {
        let file = ModelFile {
            kind: self.kind,
            marker: self.marker.to_string(),
            specials: self.specials.clone(),
            vocab: self.vocab.clone(),
            merges: (self.kind == ModelKind::Bpe)
                .then(|| self.merges.iter().map(|(l, r)| [l.clone(), r.clone()]).collect()),
            scores: (self.kind == ModelKind::Unigram).then(|| self.scores.clone()),
            vocab_size_target: Some(self.vocab_size_target),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let text = text.strip_prefix('\u{feff}').map_or(Ok(text), |_| {
            Err(Error::format("line 1 column 1", "byte order mark is not allowed"))
        })?;
        let file: ModelFile = serde_json::from_str(text)
            .map_err(|e| Error::format(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        let mut marker_chars = file.marker.chars();
        let marker = match (marker_chars.next(), marker_chars.next()) {
            (Some(c), None) => c,
            _ => return Err(Error::format("marker", "marker must be exactly one character")),
        };
        let merges: Vec<(String, String)> = file
            .merges
            .unwrap_or_default()
            .into_iter()
            .map(|[l, r]| (l, r))
            .collect();
        let scores = file.scores.unwrap_or_default();
        let target = file.vocab_size_target.unwrap_or(file.specials.len() + file.vocab.len());
        TokenizerModel::from_parts(file.kind, file.vocab, merges, scores, marker, file.specials, target)
    }
}

pub fn save_model(model: &TokenizerModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model.to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TokenizerModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TokenizerModel::from_json(&text)
}

/// Imports a model from plain-text vocabulary and merge files.
///
/// The vocabulary file has one token per line, optionally followed by a tab
/// and a natural-log score. Lines equal to a special are skipped. With a
/// merges file (`left right` per line, `#` lines ignored) the result is a
/// BPE model; otherwise every vocabulary line must carry a score and the
/// result is a unigram model.
pub fn import_vocab_merges(
    vocab_path: impl AsRef<Path>,
    merges_path: Option<&Path>,
    marker: char,
    specials: Vec<String>,
) -> Result<TokenizerModel> {
    let vocab_path = vocab_path.as_ref();
    let text = fs::read_to_string(vocab_path).map_err(|e| Error::io(vocab_path, e))?;
    let mut vocab = Vec::new();
    let mut scores = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let ctx = || format!("{}:{}", vocab_path.display(), ln + 1);
        let (tok, score) = match line.split_once('\t') {
            Some((t, s)) => {
                let s: f64 = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::format(ctx(), format!("bad score {s:?}")))?;
                (t, Some(s))
            }
            None => (line, None),
        };
        if specials.iter().any(|s| s == tok) {
            continue;
        }
        vocab.push(tok.to_owned());
        scores.push(score);
    }
    let target = specials.len() + vocab.len();

    match merges_path {
        Some(mp) => {
            let text = fs::read_to_string(mp).map_err(|e| Error::io(mp, e))?;
            let mut merges = Vec::new();
            for (ln, line) in text.lines().enumerate() {
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (l, r) = line
                    .split_once(' ')
                    .ok_or_else(|| Error::format(format!("{}:{}", mp.display(), ln + 1), "expected `left right`"))?;
                merges.push((l.to_owned(), r.to_owned()));
            }
            TokenizerModel::bpe(vocab, merges, marker, specials, target)
        }
        None => {
            let scores = scores
                .into_iter()
                .enumerate()
                .map(|(i, s)| {
                    s.ok_or_else(|| Error::format(format!("vocab[{i}]"), "unigram import needs a score on every line"))
                })
                .collect::<Result<Vec<_>>>()?;
            TokenizerModel::unigram(vocab, scores, marker, specials, target)
        }
    }
}
