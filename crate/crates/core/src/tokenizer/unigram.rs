use std::cmp::Ordering;

use super::{Piece, TokenId, TokenizerModel};

/// Characters outside the vocabulary score this far below the worst piece.
pub(super) const UNK_PENALTY: f64 = 10.0;

#[derive(Clone)]
struct Best {
    score: f64,
    /// (start char, end char, id, unknown)
    path: Vec<(usize, usize, TokenId, bool)>,
}

/// Viterbi search over all segmentations of `word`.
///
/// A piece starting at character 0 must be a marker-prefixed vocabulary
/// entry. A standalone marker token, when the vocabulary has one, may
/// instead open the word and be followed by plain pieces. If neither can
/// start the word, plain pieces are allowed at character 0. Ties on total
/// score go to fewer tokens, then to the lexicographically smaller token
/// sequence.
pub(super) fn encode(model: &TokenizerModel, word: &str) -> Vec<Piece> {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let score_of = |id: TokenId| model.scores[id as usize - model.specials.len()];
    let text_of = |s: usize, e: usize| chars[s..e].iter().collect::<String>();

    let has_marked_start = (1..=n.min(model.max_piece_chars)).any(|j| model.marked_id(&text_of(0, j)).is_some());
    let after_marker = model.marker_id.map(|id| Best {
        score: score_of(id),
        path: vec![(0, 0, id, false)],
    });
    let plain_start = !has_marked_start && after_marker.is_none();

    let mut best: Vec<Option<Best>> = vec![None; n + 1];
    best[0] = Some(Best {
        score: 0.0,
        path: Vec::new(),
    });

    for end in 1..=n {
        let lo = end.saturating_sub(model.max_piece_chars);
        let mut winner: Option<Best> = None;
        let mut offer = |prev: &Best, start: usize, id: TokenId, score: f64, unknown: bool| {
            let mut path = prev.path.clone();
            path.push((start, end, id, unknown));
            let cand = Best {
                score: prev.score + score,
                path,
            };
            if winner
                .as_ref()
                .is_none_or(|w| compare(&cand, w, &chars) == Ordering::Less)
            {
                winner = Some(cand);
            }
        };
        for start in lo..end {
            let text = text_of(start, end);
            let plain =
                |prev: &Best, offer: &mut dyn FnMut(&Best, usize, TokenId, f64, bool)| match model.token_to_id(&text) {
                    Some(id) => offer(prev, start, id, score_of(id), false),
                    None if end - start == 1 => offer(prev, start, model.unk_id, model.unk_score, true),
                    None => {}
                };
            if start > 0 {
                if let Some(prev) = &best[start] {
                    plain(prev, &mut offer);
                }
                continue;
            }
            let origin = best[0].as_ref().expect("start state");
            if plain_start {
                match model.marked_id(&text) {
                    Some(id) => offer(origin, 0, id, score_of(id), false),
                    None => plain(origin, &mut offer),
                }
                continue;
            }
            if let Some(id) = model.marked_id(&text) {
                offer(origin, 0, id, score_of(id), false);
            }
            if let Some(prev) = &after_marker {
                plain(prev, &mut offer);
            }
        }
        best[end] = winner;
    }

    let best = best[n]
        .take()
        .expect("single-character fallback always reaches the end");
    best.path
        .into_iter()
        .map(|(s, e, id, unknown)| Piece {
            id,
            text: chars[s..e].iter().collect(),
            unknown,
        })
        .collect()
}

/// `Less` means `a` is preferred.
fn compare(a: &Best, b: &Best, chars: &[char]) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.path.len().cmp(&b.path.len()))
        .then_with(|| {
            let seq = |p: &Best| -> Vec<String> {
                p.path
                    .iter()
                    .map(|&(s, e, _, _)| chars[s..e].iter().collect())
                    .collect()
            };
            seq(a).cmp(&seq(b))
        })
}
