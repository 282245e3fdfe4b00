use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One word's tokenization.
///
/// `tokens` never carry the word-initial marker, so they concatenate back
/// to `word`. `boundaries` holds every interior cut as a count of Unicode
/// scalar values preceding it; a word split into `n` tokens has `n - 1`
/// boundaries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    pub word: String,
    pub tokens: Vec<String>,
    pub boundaries: Vec<usize>,
}

impl Segmentation {
    /// Builds a segmentation from marker-free token strings.
    ///
    /// Fails if a token is empty or the tokens do not spell `word`.
    pub fn from_tokens<S: AsRef<str>>(word: &str, tokens: &[S]) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::Input(format!("no tokens given for word {word:?}")));
        }
        let mut joined = String::with_capacity(word.len());
        let mut boundaries = Vec::with_capacity(tokens.len().saturating_sub(1));
        let mut offset = 0usize;
        for (i, tok) in tokens.iter().enumerate() {
            let tok = tok.as_ref();
            if tok.is_empty() {
                return Err(Error::Input(format!("empty token in segmentation of {word:?}")));
            }
            if i > 0 {
                boundaries.push(offset);
            }
            offset += tok.chars().count();
            joined.push_str(tok);
        }
        if joined != word {
            return Err(Error::Input(format!("tokens {joined:?} do not spell word {word:?}")));
        }
        Ok(Segmentation {
            word: word.to_owned(),
            tokens: tokens.iter().map(|t| t.as_ref().to_owned()).collect(),
            boundaries,
        })
    }

    pub fn n_tokens(&self) -> usize {
        self.tokens.len()
    }

    /// Whether a cut falls exactly at character index `b`.
    pub fn has_boundary(&self, b: usize) -> bool {
        self.boundaries.binary_search(&b).is_ok()
    }
}

/// Anything that can split a single whitespace-free word into tokens.
///
/// Implemented by [`TokenizerModel`](crate::tokenizer::TokenizerModel) and by
/// [`LookupSegmenter`](crate::morphscore::LookupSegmenter), which replays a
/// fixed table of tokenizations.
pub trait Segmenter {
    fn segment(&self, word: &str) -> Result<Segmentation>;
}
