//! Synthetic languages with known morpheme boundaries.
//!
//! An agglutinative word is a root followed by one affix from each of
//! `n_slots` slot inventories (`tarla` + `lar` + `ı`). A fusional word is a
//! root followed by a single portmanteau affix from a paradigm of
//! `paradigm_size` forms (`ar` + `e`). Roots are drawn with Zipf weights
//! `1 / rank^zipf_s`; affixes uniformly. The gold boundary of every word is
//! the end of its root.
//!
//! Roots are generated before affixes from the same seeded stream, so two
//! specs that differ only in typology and affix layout share their roots.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphscore::{MorphItem, Source};
use crate::typology::MorphType;

fn default_words_per_line() -> usize {
    10
}

fn default_zipf() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub typology: MorphType,
    pub n_roots: usize,
    pub root_len_range: (usize, usize),
    pub n_affixes_per_slot: usize,
    /// Agglutinative only.
    pub n_slots: usize,
    /// Fusional only.
    pub paradigm_size: usize,
    pub affix_len_range: (usize, usize),
    pub alphabet: Vec<char>,
    #[serde(default = "default_zipf")]
    pub zipf_s: f64,
    pub seed: u64,
    #[serde(default = "default_words_per_line")]
    pub words_per_line: usize,
}

impl SynthSpec {
    /// A spec with lowercase ASCII letters, 200 roots of 3-6 characters,
    /// affixes of 1-3 characters, Zipf exponent 1 and 10 words per line.
    pub fn new(typology: MorphType, seed: u64) -> Self {
        SynthSpec {
            typology,
            n_roots: 200,
            root_len_range: (3, 6),
            n_affixes_per_slot: 4,
            n_slots: 3,
            paradigm_size: 12,
            affix_len_range: (1, 3),
            alphabet: ('a'..='z').collect(),
            zipf_s: default_zipf(),
            seed,
            words_per_line: default_words_per_line(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        for (name, (lo, hi)) in [
            ("root_len_range", self.root_len_range),
            ("affix_len_range", self.affix_len_range),
        ] {
            if lo == 0 || lo > hi {
                return cfg(format!("{name} ({lo}, {hi}) must be positive and non-empty"));
            }
        }
        let distinct: HashSet<char> = self.alphabet.iter().copied().collect();
        if distinct.len() != self.alphabet.len() {
            return cfg("alphabet has repeated symbols".into());
        }
        if distinct.len() < 2 {
            return cfg("alphabet needs at least 2 symbols".into());
        }
        if self.alphabet.iter().any(|c| c.is_whitespace()) {
            return cfg("alphabet must not contain whitespace".into());
        }
        if self.n_roots == 0 {
            return cfg("n_roots must be at least 1".into());
        }
        if !self.zipf_s.is_finite() || self.zipf_s < 0.0 {
            return cfg(format!("zipf_s must be finite and >= 0, got {}", self.zipf_s));
        }
        if self.words_per_line == 0 {
            return cfg("words_per_line must be at least 1".into());
        }
        match self.typology {
            MorphType::Agglutinative => {
                if self.n_slots == 0 {
                    return cfg("agglutinative specs need n_slots >= 1".into());
                }
                if self.n_affixes_per_slot == 0 {
                    return cfg("n_affixes_per_slot must be at least 1".into());
                }
            }
            MorphType::Fusional => {
                if self.paradigm_size == 0 {
                    return cfg("paradigm_size must be at least 1".into());
                }
            }
        }
        let check = |what: &str, needed: usize, range: (usize, usize)| {
            let cap = capacity(self.alphabet.len(), range);
            if (needed as u128) > cap {
                Err(Error::Config(format!(
                    "alphabet of {} symbols allows only {cap} distinct {what} of length {}..={}, need {needed}",
                    self.alphabet.len(),
                    range.0,
                    range.1
                )))
            } else {
                Ok(())
            }
        };
        check("roots", self.n_roots, self.root_len_range)?;
        match self.typology {
            MorphType::Agglutinative => check("affixes", self.n_affixes_per_slot, self.affix_len_range),
            MorphType::Fusional => check("affixes", self.paradigm_size, self.affix_len_range),
        }
    }
}

fn capacity(alphabet: usize, (lo, hi): (usize, usize)) -> u128 {
    (lo..=hi).fold(0u128, |acc, len| {
        let n = (alphabet as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
        acc.saturating_add(n)
    })
}

fn mid((lo, hi): (usize, usize)) -> f64 {
    (lo + hi) as f64 / 2.0
}

/// Expected characters per word: mean root length plus the mean affix length
/// once per slot (agglutinative) or once (fusional). Lengths are uniform over
/// their ranges.
pub fn expected_word_length(spec: &SynthSpec) -> f64 {
    let affixes = match spec.typology {
        MorphType::Agglutinative => spec.n_slots as f64,
        MorphType::Fusional => 1.0,
    };
    mid(spec.root_len_range) + affixes * mid(spec.affix_len_range)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthCorpus {
    pub lines: Vec<String>,
    /// One item per distinct word form, in order of first occurrence.
    pub gold: Vec<MorphItem>,
    pub spec: SynthSpec,
}

impl SynthCorpus {
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().flat_map(|l| l.split(' '))
    }

    pub fn lang(&self) -> String {
        lang_code(self.spec.typology)
    }
}

pub fn lang_code(typology: MorphType) -> String {
    match typology {
        MorphType::Agglutinative => "synth_agg".to_string(),
        MorphType::Fusional => "synth_fus".to_string(),
    }
}

/// `n` distinct strings with lengths drawn uniformly from `range`.
fn distinct_strings(rng: &mut ChaCha8Rng, alphabet: &[char], n: usize, range: (usize, usize)) -> Result<Vec<String>> {
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    let budget = n.saturating_mul(1000).max(10_000);
    for _ in 0..budget {
        if out.len() == n {
            break;
        }
        let len = rng.random_range(range.0..=range.1);
        let s: String = (0..len)
            .map(|_| alphabet[rng.random_range(0..alphabet.len())])
            .collect();
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    if out.len() < n {
        return Err(Error::Config(format!(
            "could only draw {} of {n} distinct strings; widen the length range or alphabet",
            out.len()
        )));
    }
    Ok(out)
}

/// Generates `n_words` words, deterministic in `spec.seed`.
pub fn generate(spec: &SynthSpec, n_words: usize) -> Result<SynthCorpus> {
    spec.validate()?;
    if n_words == 0 {
        return Err(Error::Input("n_words must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let roots = distinct_strings(&mut rng, &spec.alphabet, spec.n_roots, spec.root_len_range)?;
    let inventories: Vec<Vec<String>> = match spec.typology {
        MorphType::Agglutinative => (0..spec.n_slots)
            .map(|_| distinct_strings(&mut rng, &spec.alphabet, spec.n_affixes_per_slot, spec.affix_len_range))
            .collect::<Result<_>>()?,
        MorphType::Fusional => vec![distinct_strings(
            &mut rng,
            &spec.alphabet,
            spec.paradigm_size,
            spec.affix_len_range,
        )?],
    };
    let weights: Vec<f64> = (1..=roots.len()).map(|r| (r as f64).powf(-spec.zipf_s)).collect();
    let root_dist = WeightedIndex::new(&weights).map_err(|e| Error::Config(format!("root weights: {e}")))?;

    let lang = lang_code(spec.typology);
    let mut words = Vec::with_capacity(n_words);
    let mut gold = Vec::new();
    let mut seen = HashSet::new();
    for _ in 0..n_words {
        let root = &roots[root_dist.sample(&mut rng)];
        let mut word = root.clone();
        for inv in &inventories {
            word.push_str(&inv[rng.random_range(0..inv.len())]);
        }
        if seen.insert(word.clone()) {
            gold.push(MorphItem::new(
                word.clone(),
                root.chars().count(),
                &lang,
                Source::Synthetic,
            )?);
        }
        words.push(word);
    }
    let lines = words.chunks(spec.words_per_line).map(|c| c.join(" ")).collect();
    Ok(SynthCorpus {
        lines,
        gold,
        spec: spec.clone(),
    })
}

/// Builds a one-affix-layer word from explicit parts, returning the word and
/// its gold boundary.
pub fn compose(root: &str, affixes: &[&str]) -> (String, usize) {
    let mut w = root.to_owned();
    for a in affixes {
        w.push_str(a);
    }
    (w, root.chars().count())
}
