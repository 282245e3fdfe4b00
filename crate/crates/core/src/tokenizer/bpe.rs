use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet};

use super::{Piece, TokenId, TokenizerModel, UNK};
use crate::error::{Error, Result};

struct Symbol {
    id: Option<TokenId>,
    text: String,
}

pub(super) fn encode(model: &TokenizerModel, word: &str) -> Vec<Piece> {
    let mut symbols: Vec<Symbol> = Vec::with_capacity(word.len() + 1);
    for (i, c) in word.chars().enumerate() {
        let text = c.to_string();
        let id = if i == 0 {
            match (model.marked_id(&text), model.marker_id) {
                (Some(id), _) => Some(id),
                (None, Some(m)) => {
                    symbols.push(Symbol {
                        id: Some(m),
                        text: String::new(),
                    });
                    model.token_to_id(&text)
                }
                (None, None) => model.token_to_id(&text),
            }
        } else {
            model.token_to_id(&text)
        };
        symbols.push(Symbol { id, text });
    }

    loop {
        let best = symbols
            .windows(2)
            .filter_map(|w| match (w[0].id, w[1].id) {
                (Some(l), Some(r)) => model.merge_ranks.get(&(l, r)).map(|&(rank, _)| (rank, l, r)),
                _ => None,
            })
            .min();
        let Some((_, l, r)) = best else { break };
        let product = model.merge_ranks[&(l, r)].1;
        let mut merged = Vec::with_capacity(symbols.len());
        let mut iter = symbols.into_iter().peekable();
        while let Some(sym) = iter.next() {
            if sym.id == Some(l) && iter.peek().is_some_and(|n| n.id == Some(r)) {
                let next = iter.next().expect("peeked");
                merged.push(Symbol {
                    id: Some(product),
                    text: sym.text + &next.text,
                });
            } else {
                merged.push(sym);
            }
        }
        symbols = merged;
    }

    symbols
        .into_iter()
        .map(|s| match s.id {
            Some(id) => Piece {
                id,
                text: model.strip_marker(model.vocab_token(id)).to_owned(),
                unknown: false,
            },
            None => Piece {
                id: model.unk_id,
                text: s.text,
                unknown: true,
            },
        })
        .collect()
}

impl TokenizerModel {
    fn vocab_token(&self, id: TokenId) -> &str {
        self.id_to_token(id).expect("id produced by the encoder")
    }
}

#[derive(PartialEq, Eq)]
struct Candidate {
    count: u64,
    left: String,
    right: String,
    pair: (TokenId, TokenId),
}

impl Ord for Candidate {
    // Max-heap: highest count first, then lexicographically smallest (left, right).
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Learns a BPE model from whitespace-pre-tokenized lines.
///
/// The base vocabulary holds every corpus character both bare and with the
/// word-initial `marker` prefixed, so any word over the corpus alphabet
/// encodes losslessly. Merges are learned until `specials + vocab` reaches
/// `vocab_size_target` or no pair remains. The most frequent adjacent pair
/// wins; equal counts go to the lexicographically smaller `(left, right)`.
/// A pair whose concatenation already exists in the vocabulary is never
/// merged, so each merge adds exactly one token.
pub fn train_bpe<S: AsRef<str>>(
    corpus: &[S],
    vocab_size_target: usize,
    marker: char,
    specials: &[String],
) -> Result<TokenizerModel> {
    let mut word_counts: BTreeMap<&str, u64> = BTreeMap::new();
    for line in corpus {
        for w in line.as_ref().split_whitespace() {
            *word_counts.entry(w).or_default() += 1;
        }
    }
    if word_counts.is_empty() {
        return Err(Error::Input("training corpus contains no words".into()));
    }
    if word_counts.keys().any(|w| w.contains(marker)) {
        return Err(Error::Input(format!(
            "training corpus contains the marker character {marker:?}"
        )));
    }
    if !specials.iter().any(|s| s == UNK) {
        return Err(Error::Config(format!("specials must include {UNK:?}")));
    }
    let unique_specials: BTreeSet<&String> = specials.iter().collect();
    if unique_specials.len() != specials.len() {
        return Err(Error::Config("duplicate special tokens".into()));
    }

    let alphabet: BTreeSet<char> = word_counts.keys().flat_map(|w| w.chars()).collect();
    let mut vocab: Vec<String> = alphabet.iter().map(|c| c.to_string()).collect();
    vocab.extend(alphabet.iter().map(|c| format!("{marker}{c}")));
    if let Some(clash) = vocab.iter().find(|t| specials.contains(t)) {
        return Err(Error::Config(format!(
            "special {clash:?} collides with an alphabet symbol"
        )));
    }
    let base = specials.len() + vocab.len();
    if vocab_size_target < base {
        return Err(Error::Config(format!(
            "vocab size target {vocab_size_target} is below the base alphabet size {base}"
        )));
    }

    let offset = specials.len() as TokenId;
    let mut index: HashMap<String, TokenId> = vocab
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), offset + i as TokenId))
        .collect();
    let token_str = |vocab: &[String], id: TokenId| vocab[(id - offset) as usize].clone();

    let mut words: Vec<(Vec<TokenId>, u64)> = word_counts
        .iter()
        .map(|(w, &n)| {
            let ids = w
                .chars()
                .enumerate()
                .map(|(i, c)| {
                    let key = if i == 0 { format!("{marker}{c}") } else { c.to_string() };
                    index[&key]
                })
                .collect();
            (ids, n)
        })
        .collect();

    let mut pair_counts: HashMap<(TokenId, TokenId), u64> = HashMap::new();
    let mut pair_words: HashMap<(TokenId, TokenId), BTreeSet<usize>> = HashMap::new();
    for (wi, (ids, n)) in words.iter().enumerate() {
        for p in ids.windows(2) {
            let pair = (p[0], p[1]);
            *pair_counts.entry(pair).or_default() += n;
            pair_words.entry(pair).or_default().insert(wi);
        }
    }
    let mut heap: BinaryHeap<Candidate> = pair_counts
        .iter()
        .map(|(&pair, &count)| Candidate {
            count,
            left: token_str(&vocab, pair.0),
            right: token_str(&vocab, pair.1),
            pair,
        })
        .collect();

    let mut merges: Vec<(String, String)> = Vec::new();
    let mut skipped: HashSet<(TokenId, TokenId)> = HashSet::new();

    while specials.len() + vocab.len() < vocab_size_target {
        let Some(top) = heap.pop() else { break };
        let current = pair_counts.get(&top.pair).copied().unwrap_or(0);
        if current == 0 || skipped.contains(&top.pair) {
            continue;
        }
        if current != top.count {
            heap.push(Candidate { count: current, ..top });
            continue;
        }
        let product_str = format!("{}{}", top.left, top.right);
        if index.contains_key(&product_str) {
            skipped.insert(top.pair);
            continue;
        }
        let product = offset + vocab.len() as TokenId;
        index.insert(product_str.clone(), product);
        vocab.push(product_str);
        merges.push((top.left.clone(), top.right.clone()));

        let (l, r) = top.pair;
        let affected = pair_words.remove(&top.pair).unwrap_or_default();
        let mut touched: BTreeSet<(TokenId, TokenId)> = BTreeSet::new();
        for wi in affected {
            let (ids, n) = &mut words[wi];
            if !ids.windows(2).any(|p| p[0] == l && p[1] == r) {
                continue;
            }
            for p in ids.windows(2) {
                let pair = (p[0], p[1]);
                let c = pair_counts.get_mut(&pair).expect("counted pair");
                *c -= *n;
                touched.insert(pair);
            }
            let mut merged = Vec::with_capacity(ids.len());
            let mut i = 0;
            while i < ids.len() {
                if i + 1 < ids.len() && ids[i] == l && ids[i + 1] == r {
                    merged.push(product);
                    i += 2;
                } else {
                    merged.push(ids[i]);
                    i += 1;
                }
            }
            *ids = merged;
            for p in ids.windows(2) {
                let pair = (p[0], p[1]);
                *pair_counts.entry(pair).or_default() += *n;
                pair_words.entry(pair).or_default().insert(wi);
                touched.insert(pair);
            }
        }
        for pair in touched {
            let count = pair_counts[&pair];
            if count == 0 {
                pair_counts.remove(&pair);
                continue;
            }
            if pair == top.pair || skipped.contains(&pair) {
                continue;
            }
            heap.push(Candidate {
                count,
                left: token_str(&vocab, pair.0),
                right: token_str(&vocab, pair.1),
                pair,
            });
        }
    }

    TokenizerModel::bpe(vocab, merges, marker, specials.to_vec(), vocab_size_target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::{default_specials, DEFAULT_MARKER};

    /// Counts adjacent pairs in the marker-prefixed character split and
    /// returns the best pair under (count desc, left asc, right asc).
    fn brute_force_first_merge(corpus: &[&str]) -> (String, String) {
        let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
        for line in corpus {
            for w in line.split_whitespace() {
                let syms: Vec<String> = w
                    .chars()
                    .enumerate()
                    .map(|(i, c)| if i == 0 { format!("▁{c}") } else { c.to_string() })
                    .collect();
                for p in syms.windows(2) {
                    *counts.entry((p[0].clone(), p[1].clone())).or_default() += 1;
                }
            }
        }
        let max = *counts.values().max().unwrap();
        counts.into_iter().find(|(_, c)| *c == max).unwrap().0
    }

    #[test]
    fn first_merge_matches_brute_force_pair_counting() {
        let corpus = ["ab ab ac"];
        let expected = brute_force_first_merge(&corpus);
        assert_eq!(expected, ("▁a".to_string(), "b".to_string()));
        let specials = default_specials();
        let base = specials.len() + 6; // a b c ▁a ▁b ▁c
        let m = train_bpe(&corpus, base + 1, DEFAULT_MARKER, &specials).unwrap();
        assert_eq!(m.merges(), &[expected]);
    }

    #[test]
    fn single_char_corpus_learns_nothing() {
        let specials = default_specials();
        let m = train_bpe(&["a"], specials.len() + 2, DEFAULT_MARKER, &specials).unwrap();
        assert!(m.merges().is_empty());
        assert_eq!(m.vocab(), &["a".to_string(), "▁a".to_string()]);
    }

    #[test]
    fn equal_counts_merge_the_lexicographically_smaller_pair() {
        // "▁x"+"b" and "▁x"+"a" both occur once.
        let specials = default_specials();
        let m = train_bpe(&["xb xa"], specials.len() + 7, DEFAULT_MARKER, &specials).unwrap();
        assert_eq!(m.merges()[0], ("▁x".to_string(), "a".to_string()));
    }

    #[test]
    fn vocab_grows_by_one_per_merge() {
        let specials = default_specials();
        let corpus = ["the cat sat on the mat", "the bat ate the hat", "that cat"];
        let base = train_bpe(&corpus, 1000, DEFAULT_MARKER, &specials).unwrap();
        let alphabet = base.vocab().len() - base.merges().len();
        for target in [specials.len() + alphabet, specials.len() + alphabet + 5, 1000] {
            let m = train_bpe(&corpus, target, DEFAULT_MARKER, &specials).unwrap();
            assert_eq!(m.vocab().len(), alphabet + m.merges().len());
            assert!(m.len() <= target);
        }
    }

    #[test]
    fn errors() {
        let specials = default_specials();
        let empty: [&str; 0] = [];
        assert!(matches!(
            train_bpe(&empty, 100, DEFAULT_MARKER, &specials),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            train_bpe(&["   "], 100, DEFAULT_MARKER, &specials),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            train_bpe(&["abc"], 5, DEFAULT_MARKER, &specials),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn trained_model_round_trips_its_corpus() {
        let specials = default_specials();
        let corpus = ["tarlaları evlerimizden geliyorum", "tarla ev evler tarlalar"];
        let m = train_bpe(&corpus, 60, DEFAULT_MARKER, &specials).unwrap();
        for line in corpus {
            let ids = m.encode_text(line, false);
            assert_eq!(m.decode(&ids).unwrap(), line);
        }
    }
}
