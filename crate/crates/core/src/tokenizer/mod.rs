//! Deterministic subword tokenizer engine.
//!
//! Two model kinds share one [`TokenizerModel`] type:
//!
//! * **BPE**: an ordered merge list learned by [`train_bpe`]. Encoding
//!   starts from single characters (the first one carrying the word-initial
//!   marker) and repeatedly applies the lowest-ranked applicable merge.
//! * **Unigram**: a scored vocabulary supplied from outside. Encoding is a
//!   Viterbi search for the segmentation with the highest summed
//!   log-probability.
//!
//! Pre-tokenization splits on Unicode whitespace only. Token ids are laid
//! out as `specials` first, then `vocab` in order.
//!
//! A word starts with a marker-prefixed piece. When the vocabulary has no
//! such piece for the word's first characters, the encoder emits a
//! standalone marker token (if the vocabulary has one) followed by plain
//! pieces. Without either, the first piece is a plain one and decoding can
//! no longer tell where that word began.

mod bpe;
mod io;
mod segmentation;
mod unigram;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bpe::train_bpe;
pub use io::{import_vocab_merges, load_model, save_model};
pub use segmentation::{Segmentation, Segmenter};

pub type TokenId = u32;

/// The word-initial marker used unless a model says otherwise.
pub const DEFAULT_MARKER: char = '\u{2581}';

pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const PAD: &str = "<pad>";

/// `["<unk>", "<s>", "</s>", "<pad>"]`
pub fn default_specials() -> Vec<String> {
    [UNK, BOS, EOS, PAD].iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Bpe,
    Unigram,
}

/// One piece produced by the encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    /// Vocabulary id, or the `<unk>` id for characters outside the vocabulary.
    pub id: TokenId,
    /// Surface text with the marker stripped.
    pub text: String,
    pub unknown: bool,
}

/// A trained or loaded subword model. Immutable once built.
#[derive(Debug, Clone)]
pub struct TokenizerModel {
    kind: ModelKind,
    vocab: Vec<String>,
    merges: Vec<(String, String)>,
    scores: Vec<f64>,
    marker: char,
    specials: Vec<String>,
    vocab_size_target: usize,

    index: HashMap<String, TokenId>,
    merge_ranks: HashMap<(TokenId, TokenId), (usize, TokenId)>,
    unk_id: TokenId,
    bos_id: Option<TokenId>,
    eos_id: Option<TokenId>,
    max_piece_chars: usize,
    unk_score: f64,
    /// Id of a standalone marker token, if the vocabulary has one.
    marker_id: Option<TokenId>,
}

impl PartialEq for TokenizerModel {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.vocab == other.vocab
            && self.merges == other.merges
            && self.scores == other.scores
            && self.marker == other.marker
            && self.specials == other.specials
            && self.vocab_size_target == other.vocab_size_target
    }
}

impl TokenizerModel {
    /// Builds a BPE model, checking every model invariant.
    pub fn bpe(
        vocab: Vec<String>,
        merges: Vec<(String, String)>,
        marker: char,
        specials: Vec<String>,
        vocab_size_target: usize,
    ) -> Result<Self> {
        Self::from_parts(
            ModelKind::Bpe,
            vocab,
            merges,
            Vec::new(),
            marker,
            specials,
            vocab_size_target,
        )
    }

    /// Builds a unigram model from natural-log piece scores.
    pub fn unigram(
        vocab: Vec<String>,
        scores: Vec<f64>,
        marker: char,
        specials: Vec<String>,
        vocab_size_target: usize,
    ) -> Result<Self> {
        Self::from_parts(
            ModelKind::Unigram,
            vocab,
            Vec::new(),
            scores,
            marker,
            specials,
            vocab_size_target,
        )
    }

    pub(crate) fn from_parts(
        kind: ModelKind,
        vocab: Vec<String>,
        merges: Vec<(String, String)>,
        scores: Vec<f64>,
        marker: char,
        specials: Vec<String>,
        vocab_size_target: usize,
    ) -> Result<Self> {
        if marker.is_whitespace() {
            return Err(Error::format("marker", "marker must not be whitespace"));
        }
        let mut index = HashMap::with_capacity(specials.len() + vocab.len());
        for (i, s) in specials.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::format(format!("specials[{i}]"), "empty special token"));
            }
            if index.insert(s.clone(), i as TokenId).is_some() {
                return Err(Error::format(
                    format!("specials[{i}]"),
                    format!("duplicate special {s:?}"),
                ));
            }
        }
        let unk_id = *index
            .get(UNK)
            .ok_or_else(|| Error::format("specials", format!("missing {UNK:?}")))?;
        let bos_id = index.get(BOS).copied();
        let eos_id = index.get(EOS).copied();

        let offset = specials.len();
        let mut max_piece_chars = 1;
        for (i, tok) in vocab.iter().enumerate() {
            if tok.is_empty() {
                return Err(Error::format(format!("vocab[{i}]"), "empty token"));
            }
            if tok.chars().any(char::is_whitespace) {
                return Err(Error::format(
                    format!("vocab[{i}]"),
                    format!("token {tok:?} contains whitespace"),
                ));
            }
            if index.insert(tok.clone(), (offset + i) as TokenId).is_some() {
                let what = if specials.contains(tok) {
                    "overlaps a special"
                } else {
                    "is a duplicate"
                };
                return Err(Error::format(format!("vocab[{i}]"), format!("token {tok:?} {what}")));
            }
            max_piece_chars = max_piece_chars.max(tok.chars().count());
        }
        let total = specials.len() + vocab.len();
        if total > vocab_size_target {
            return Err(Error::format(
                "vocab_size_target",
                format!("{total} tokens exceed the target of {vocab_size_target}"),
            ));
        }

        let marker_id = index.get(marker.to_string().as_str()).copied();
        let mut merge_ranks = HashMap::new();
        let mut unk_score = 0.0;
        match kind {
            ModelKind::Bpe => {
                if !scores.is_empty() {
                    return Err(Error::format("scores", "BPE models carry no scores"));
                }
                for (rank, (left, right)) in merges.iter().enumerate() {
                    let ctx = || format!("merges[{rank}]");
                    let l = *index
                        .get(left)
                        .ok_or_else(|| Error::format(ctx(), format!("unknown token {left:?}")))?;
                    let r = *index
                        .get(right)
                        .ok_or_else(|| Error::format(ctx(), format!("unknown token {right:?}")))?;
                    let product = format!("{left}{right}");
                    let p = *index
                        .get(&product)
                        .ok_or_else(|| Error::format(ctx(), format!("product {product:?} not in vocab")))?;
                    if (l as usize) < offset || (r as usize) < offset {
                        return Err(Error::format(ctx(), "merge refers to a special token"));
                    }
                    merge_ranks.entry((l, r)).or_insert((rank, p));
                }
            }
            ModelKind::Unigram => {
                if !merges.is_empty() {
                    return Err(Error::format("merges", "unigram models carry no merges"));
                }
                if scores.len() != vocab.len() {
                    return Err(Error::format(
                        "scores",
                        format!("{} scores for {} vocab entries", scores.len(), vocab.len()),
                    ));
                }
                for (i, &s) in scores.iter().enumerate() {
                    if !s.is_finite() || s > 0.0 {
                        return Err(Error::format(
                            format!("scores[{i}]"),
                            format!("score {s} must be finite and <= 0"),
                        ));
                    }
                }
                let min = scores.iter().copied().fold(0.0, f64::min);
                unk_score = min - unigram::UNK_PENALTY;
            }
        }

        Ok(TokenizerModel {
            kind,
            vocab,
            merges,
            scores,
            marker,
            specials,
            vocab_size_target,
            index,
            merge_ranks,
            unk_id,
            bos_id,
            eos_id,
            max_piece_chars,
            unk_score,
            marker_id,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn marker(&self) -> char {
        self.marker
    }

    pub fn specials(&self) -> &[String] {
        &self.specials
    }

    pub fn vocab_size_target(&self) -> usize {
        self.vocab_size_target
    }

    /// Number of ids in use, specials included.
    pub fn len(&self) -> usize {
        self.specials.len() + self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn unk_id(&self) -> TokenId {
        self.unk_id
    }

    pub fn token_to_id(&self, token: &str) -> Option<TokenId> {
        self.index.get(token).copied()
    }

    pub fn id_to_token(&self, id: TokenId) -> Option<&str> {
        let id = id as usize;
        if id < self.specials.len() {
            Some(&self.specials[id])
        } else {
            self.vocab.get(id - self.specials.len()).map(String::as_str)
        }
    }

    pub fn is_special(&self, id: TokenId) -> bool {
        (id as usize) < self.specials.len()
    }

    /// Id of the word-initial (marker-prefixed) form of `text`.
    fn marked_id(&self, text: &str) -> Option<TokenId> {
        let mut marked = String::with_capacity(text.len() + self.marker.len_utf8());
        marked.push(self.marker);
        marked.push_str(text);
        self.index.get(&marked).copied()
    }

    fn strip_marker<'a>(&self, token: &'a str) -> &'a str {
        token.strip_prefix(self.marker).unwrap_or(token)
    }

    /// Encodes a single word into pieces.
    pub fn encode_pieces(&self, word: &str) -> Result<Vec<Piece>> {
        if word.is_empty() {
            return Err(Error::Input("cannot encode an empty word".into()));
        }
        if word.chars().any(char::is_whitespace) {
            return Err(Error::Input(format!("word {word:?} contains whitespace")));
        }
        Ok(self.encode_word_unchecked(word))
    }

    fn encode_word_unchecked(&self, word: &str) -> Vec<Piece> {
        match self.kind {
            ModelKind::Bpe => bpe::encode(self, word),
            ModelKind::Unigram => unigram::encode(self, word),
        }
    }

    /// Encodes one word and reports its segmentation with character-index
    /// boundaries into the raw word. A standalone marker token is not part
    /// of the segmentation.
    pub fn encode_word(&self, word: &str) -> Result<Segmentation> {
        let pieces = self.encode_pieces(word)?;
        let mut boundaries = Vec::with_capacity(pieces.len().saturating_sub(1));
        let mut offset = 0;
        let mut tokens = Vec::with_capacity(pieces.len());
        // A standalone marker covers no characters of the word.
        let pieces = pieces.into_iter().filter(|p| !p.text.is_empty());
        for (i, p) in pieces.enumerate() {
            if i > 0 {
                boundaries.push(offset);
            }
            offset += p.text.chars().count();
            tokens.push(p.text);
        }
        Ok(Segmentation {
            word: word.to_owned(),
            tokens,
            boundaries,
        })
    }

    /// Encodes whitespace-separated text into ids. `<s>`/`</s>` are added
    /// only when requested and present in the model.
    pub fn encode_text(&self, text: &str, add_specials: bool) -> Vec<TokenId> {
        let mut ids = Vec::new();
        if add_specials {
            ids.extend(self.bos_id);
        }
        for word in text.split_whitespace() {
            ids.extend(self.encode_word_unchecked(word).into_iter().map(|p| p.id));
        }
        if add_specials {
            ids.extend(self.eos_id);
        }
        ids
    }

    /// Words of `text` each encoded into pieces, in order.
    pub fn encode_text_pieces(&self, text: &str) -> Vec<Vec<Piece>> {
        text.split_whitespace().map(|w| self.encode_word_unchecked(w)).collect()
    }

    /// Inverse of [`encode_text`](Self::encode_text) for text over the
    /// model alphabet. Word-initial tokens start a new space-separated word;
    /// `<s>`, `</s>` and `<pad>` are dropped and `<unk>` is rendered as is.
    pub fn decode(&self, ids: &[TokenId]) -> Result<String> {
        let mut out = String::new();
        for &id in ids {
            let token = self
                .id_to_token(id)
                .ok_or_else(|| Error::Input(format!("token id {id} out of range")))?;
            if self.is_special(id) {
                if id == self.unk_id {
                    out.push_str(token);
                }
                continue;
            }
            if let Some(rest) = token.strip_prefix(self.marker) {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(rest);
            } else {
                out.push_str(token);
            }
        }
        Ok(out)
    }
}

impl Segmenter for TokenizerModel {
    fn segment(&self, word: &str) -> Result<Segmentation> {
        self.encode_word(word)
    }
}

/// Collapses runs of whitespace to single spaces and trims the ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
