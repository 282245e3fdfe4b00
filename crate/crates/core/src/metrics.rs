//! Corpus-level tokenization metrics.
//!
//! All metrics run over the encoded corpus without `<s>`/`</s>`. Token
//! lengths exclude the word-initial marker. The Rényi distribution is the
//! empirical frequency of token types (ids) actually observed in the corpus,
//! and efficiency divides by `log2` of the number of observed types.

use std::collections::HashMap;
use std::io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenizer::{TokenId, TokenizerModel};

/// Order used when no other is given.
pub const DEFAULT_ALPHA: f64 = 2.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub lang: String,
    pub ctc: usize,
    pub n_words: usize,
    pub fertility: f64,
    pub mean_token_len: f64,
    pub renyi_alpha: f64,
    pub renyi_entropy: f64,
    pub renyi_efficiency: f64,
    pub n_token_types: usize,
}

/// Associative accumulator over encoded lines. Partial accumulators over
/// chunks of a corpus can be [`merge`](Self::merge)d in any grouping.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TokenStats {
    pub tokens: usize,
    pub words: usize,
    pub token_chars: usize,
    pub counts: HashMap<TokenId, u64>,
}

impl TokenStats {
    pub fn from_lines<S: AsRef<str>>(model: &TokenizerModel, lines: &[S]) -> Self {
        let mut acc = TokenStats::default();
        for line in lines {
            acc.add_line(model, line.as_ref());
        }
        acc
    }

    pub fn add_line(&mut self, model: &TokenizerModel, line: &str) {
        for pieces in model.encode_text_pieces(line) {
            self.words += 1;
            for p in pieces {
                self.tokens += 1;
                self.token_chars += p.text.chars().count();
                *self.counts.entry(p.id).or_default() += 1;
            }
        }
    }

    pub fn merge(mut self, other: TokenStats) -> Self {
        self.tokens += other.tokens;
        self.words += other.words;
        self.token_chars += other.token_chars;
        for (id, c) in other.counts {
            *self.counts.entry(id).or_default() += c;
        }
        self
    }

    /// Type counts sorted by id, so downstream sums are order-independent.
    fn sorted_counts(&self) -> Vec<u64> {
        let mut v: Vec<(TokenId, u64)> = self.counts.iter().map(|(&k, &c)| (k, c)).collect();
        v.sort_unstable();
        v.into_iter().map(|(_, c)| c).collect()
    }

    pub fn report(&self, lang: &str, alpha: f64) -> Result<MetricsReport> {
        if self.tokens == 0 {
            return Err(Error::Input("corpus encodes to zero tokens".into()));
        }
        let renyi = renyi_from_counts(&self.sorted_counts(), alpha)?;
        Ok(MetricsReport {
            lang: lang.to_owned(),
            ctc: self.tokens,
            n_words: self.words,
            fertility: self.tokens as f64 / self.words as f64,
            mean_token_len: self.token_chars as f64 / self.tokens as f64,
            renyi_alpha: alpha,
            renyi_entropy: renyi.entropy,
            renyi_efficiency: renyi.efficiency,
            n_token_types: self.counts.len(),
        })
    }
}

/// Corpus token count.
pub fn ctc<S: AsRef<str>>(model: &TokenizerModel, lines: &[S]) -> usize {
    lines.iter().map(|l| model.encode_text(l.as_ref(), false).len()).sum()
}

/// Mean characters per token instance.
pub fn mean_token_length<S: AsRef<str>>(model: &TokenizerModel, lines: &[S]) -> Result<f64> {
    let s = TokenStats::from_lines(model, lines);
    if s.tokens == 0 {
        return Err(Error::Input("corpus encodes to zero tokens".into()));
    }
    Ok(s.token_chars as f64 / s.tokens as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Renyi {
    /// Bits.
    pub entropy: f64,
    /// Entropy over `log2(types)`; 0 for a single type.
    pub efficiency: f64,
}

/// Rényi entropy of order `alpha` and efficiency for a corpus.
pub fn renyi<S: AsRef<str>>(model: &TokenizerModel, lines: &[S], alpha: f64) -> Result<Renyi> {
    let s = TokenStats::from_lines(model, lines);
    if s.tokens == 0 {
        return Err(Error::Input("corpus encodes to zero tokens".into()));
    }
    renyi_from_counts(&s.sorted_counts(), alpha)
}

/// Rényi entropy of the distribution proportional to `counts`:
/// `H = log2(sum p^alpha) / (1 - alpha)`, with Shannon entropy at
/// `alpha == 1`.
pub fn renyi_from_counts(counts: &[u64], alpha: f64) -> Result<Renyi> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::Input(format!("alpha must be finite and > 0, got {alpha}")));
    }
    let counts: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Input("empty frequency distribution".into()));
    }
    let types = counts.len();
    if types == 1 {
        return Ok(Renyi {
            entropy: 0.0,
            efficiency: 0.0,
        });
    }
    let total = total as f64;
    let probs = counts.iter().map(|&c| c as f64 / total);
    let entropy = if alpha == 1.0 {
        -probs.map(|p| p * p.log2()).sum::<f64>()
    } else {
        probs.map(|p| p.powf(alpha)).sum::<f64>().log2() / (1.0 - alpha)
    };
    let efficiency = (entropy / (types as f64).log2()).clamp(0.0, 1.0);
    Ok(Renyi { entropy, efficiency })
}

/// Every metric for one corpus.
pub fn compute_metrics<S: AsRef<str>>(
    model: &TokenizerModel,
    lang: &str,
    lines: &[S],
    alpha: f64,
) -> Result<MetricsReport> {
    TokenStats::from_lines(model, lines).report(lang, alpha)
}

/// One CSV row per report, header first.
pub fn write_metrics_csv(writer: impl io::Write, reports: &[MetricsReport]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::{default_specials, train_bpe, DEFAULT_MARKER};

    fn whole_word_model() -> TokenizerModel {
        let vocab: Vec<String> = ["▁abcd", "▁efgh", "▁ijkl", "▁mnop", "▁qrst"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let scores = vec![-1.0; vocab.len()];
        TokenizerModel::unigram(vocab, scores, DEFAULT_MARKER, default_specials(), 64).unwrap()
    }

    #[test]
    fn ctc_counts_whole_words() {
        let m = whole_word_model();
        let lines = vec!["abcd efgh ijkl mnop qrst"; 10];
        assert_eq!(ctc(&m, &lines), 50);
        let empty: [&str; 0] = [];
        assert_eq!(ctc(&m, &empty), 0);
        assert_eq!(mean_token_length(&m, &lines).unwrap(), 4.0);
    }

    #[test]
    fn ctc_matches_word_by_word_count() {
        let corpus = ["the cat sat", "on the mat", "that hat", "a bat ate the rat"];
        let m = train_bpe(&corpus, 40, DEFAULT_MARKER, &default_specials()).unwrap();
        let oracle: usize = corpus
            .iter()
            .flat_map(|l| l.split(' '))
            .map(|w| m.encode_word(w).unwrap().tokens.len())
            .sum();
        assert_eq!(ctc(&m, &corpus), oracle);
        assert_eq!(TokenStats::from_lines(&m, &corpus).tokens, oracle);
    }

    #[test]
    fn mean_token_length_two_tokens() {
        let vocab: Vec<String> = ["▁a", "b", "c", "▁ab"].iter().map(|s| s.to_string()).collect();
        let m = TokenizerModel::bpe(
            vocab,
            vec![("▁a".into(), "b".into())],
            DEFAULT_MARKER,
            default_specials(),
            10,
        )
        .unwrap();
        assert_eq!(m.encode_word("abc").unwrap().tokens, vec!["ab", "c"]);
        assert_eq!(mean_token_length(&m, &["abc"]).unwrap(), 1.5);
        assert!(mean_token_length(&m, &[""]).is_err());
    }

    #[test]
    fn uniform_distribution_has_unit_efficiency() {
        for k in [2usize, 3, 7, 64] {
            for alpha in [0.5, 1.0, 2.5, 5.0] {
                let r = renyi_from_counts(&vec![3; k], alpha).unwrap();
                assert!((r.entropy - (k as f64).log2()).abs() < 1e-9);
                assert!((r.efficiency - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn two_point_distributions() {
        let r = renyi_from_counts(&[1, 1], 2.5).unwrap();
        assert_eq!(r.entropy, 1.0);
        // Fixture evaluated at 40 significant digits:
        // log2(0.75^2.5 + 0.25^2.5) / (1 - 2.5) = 0.63192812245648269098...
        let r = renyi_from_counts(&[3, 1], 2.5).unwrap();
        assert!((r.entropy - 0.631_928_122_456).abs() < 5e-13);
        assert!(r.efficiency < 1.0);
    }

    #[test]
    fn shannon_fallback() {
        let counts = [5u64, 3, 2];
        let p: Vec<f64> = counts.iter().map(|&c| c as f64 / 10.0).collect();
        let oracle: f64 = -p.iter().map(|x| x * x.log2()).sum::<f64>();
        let r = renyi_from_counts(&counts, 1.0).unwrap();
        assert!((r.entropy - oracle).abs() < 1e-9);
        let near = renyi_from_counts(&counts, 1.0 + 1e-7).unwrap();
        assert!((near.entropy - oracle).abs() < 1e-6);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            renyi_from_counts(&[7], 2.5).unwrap(),
            Renyi {
                entropy: 0.0,
                efficiency: 0.0
            }
        );
        assert!(renyi_from_counts(&[], 2.5).is_err());
        assert!(renyi_from_counts(&[1, 2], 0.0).is_err());
        assert!(renyi_from_counts(&[1, 2], -1.0).is_err());
        let m = whole_word_model();
        assert!(renyi(&m, &["", "  "], 2.5).is_err());
    }

    #[test]
    fn duplicating_the_corpus_only_doubles_ctc() {
        let corpus = ["the cat sat", "on the mat", "that hat"];
        let m = train_bpe(&corpus, 35, DEFAULT_MARKER, &default_specials()).unwrap();
        let doubled: Vec<&str> = corpus.iter().chain(corpus.iter()).copied().collect();
        let a = compute_metrics(&m, "x", &corpus, 2.5).unwrap();
        let b = compute_metrics(&m, "x", &doubled, 2.5).unwrap();
        assert_eq!(b.ctc, 2 * a.ctc);
        assert_eq!(a.fertility, b.fertility);
        assert_eq!(a.mean_token_len, b.mean_token_len);
        assert!((a.renyi_efficiency - b.renyi_efficiency).abs() < 1e-12);
    }

    #[test]
    fn chunked_accumulation_matches_whole() {
        let corpus = ["the cat sat", "on the mat", "that hat", "a bat"];
        let m = train_bpe(&corpus, 35, DEFAULT_MARKER, &default_specials()).unwrap();
        let whole = TokenStats::from_lines(&m, &corpus);
        let parts = TokenStats::from_lines(&m, &corpus[2..]).merge(TokenStats::from_lines(&m, &corpus[..2]));
        assert_eq!(whole, parts);
        assert_eq!(whole.report("x", 2.5).unwrap(), parts.report("x", 2.5).unwrap());
    }
}
