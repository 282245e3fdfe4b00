//! Morphological alignment of a tokenizer.
//!
//! Every evaluation item is a word with one annotated morpheme boundary. An
//! item is correct when the tokenizer puts a token boundary at that
//! character index, whatever other cuts it makes. Words the tokenizer keeps
//! whole are excluded in [`Mode::Strict`] and counted correct in
//! [`Mode::Lenient`]. The score is the mean over the items that count.

use std::collections::HashMap;
use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{welch_t, TTestResult};
use crate::tokenizer::{Segmentation, Segmenter};
use crate::typology::MorphType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "UD")]
    Ud,
    #[serde(rename = "UniMorph")]
    UniMorph,
    #[serde(rename = "Synthetic")]
    Synthetic,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Ud => "UD",
            Source::UniMorph => "UniMorph",
            Source::Synthetic => "Synthetic",
        })
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ud" => Ok(Source::Ud),
            "unimorph" => Ok(Source::UniMorph),
            "synthetic" => Ok(Source::Synthetic),
            _ => Err(Error::Input(format!("unknown item source {s:?}"))),
        }
    }
}

/// A word with one annotated morpheme boundary (a character index strictly
/// inside the word).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MorphItem {
    pub word: String,
    pub boundary: usize,
    pub lang: String,
    pub source: Source,
}

impl MorphItem {
    pub fn new(word: impl Into<String>, boundary: usize, lang: impl Into<String>, source: Source) -> Result<Self> {
        let word = word.into();
        if word.chars().any(char::is_whitespace) {
            return Err(Error::Input(format!("item word {word:?} contains whitespace")));
        }
        let len = word.chars().count();
        if boundary == 0 || boundary >= len {
            return Err(Error::Input(format!(
                "boundary {boundary} is not interior to {word:?} ({len} chars)"
            )));
        }
        Ok(MorphItem {
            word,
            boundary,
            lang: lang.into(),
            source,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Correct,
    Incorrect,
    Excluded,
}

/// Scores one item against its segmentation.
pub fn score_item(seg: &Segmentation, item: &MorphItem, mode: Mode) -> Result<Outcome> {
    if seg.word != item.word {
        return Err(Error::Input(format!(
            "segmentation is for {:?}, item is {:?}",
            seg.word, item.word
        )));
    }
    Ok(if seg.boundaries.is_empty() {
        match mode {
            Mode::Strict => Outcome::Excluded,
            Mode::Lenient => Outcome::Correct,
        }
    } else if seg.has_boundary(item.boundary) {
        Outcome::Correct
    } else {
        Outcome::Incorrect
    })
}

/// Per-language summary.
///
/// `score_strict` is NaN when every item was excluded (`n_scored == 0`).
/// `mean_fertility` and `mean_word_len` are averaged over all items, one-token
/// words included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphScoreReport {
    pub lang: String,
    pub n_total: usize,
    pub n_excluded_single_token: usize,
    pub n_scored: usize,
    pub score_strict: f64,
    pub score_lenient: f64,
    pub mean_fertility: f64,
    pub mean_word_len: f64,
    pub one_token_count: usize,
    pub one_token_prop: f64,
}

impl MorphScoreReport {
    pub fn strict_defined(&self) -> bool {
        self.n_scored > 0
    }
}

/// Scores every item with `segmenter`. All items must share one language.
pub fn morphscore<S: Segmenter + ?Sized>(segmenter: &S, items: &[MorphItem]) -> Result<MorphScoreReport> {
    let first = items.first().ok_or_else(|| Error::Input("no items to score".into()))?;
    if let Some(other) = items.iter().find(|i| i.lang != first.lang) {
        return Err(Error::Input(format!(
            "mixed languages in one dataset: {} and {}",
            first.lang, other.lang
        )));
    }

    let (mut correct, mut excluded, mut tokens, mut chars) = (0usize, 0usize, 0usize, 0usize);
    for item in items {
        let seg = segmenter.segment(&item.word)?;
        match score_item(&seg, item, Mode::Strict)? {
            Outcome::Correct => correct += 1,
            Outcome::Excluded => excluded += 1,
            Outcome::Incorrect => {}
        }
        tokens += seg.n_tokens();
        chars += item.word.chars().count();
    }

    let n_total = items.len();
    let n_scored = n_total - excluded;
    let score_strict = if n_scored == 0 {
        f64::NAN
    } else {
        correct as f64 / n_scored as f64
    };
    Ok(MorphScoreReport {
        lang: first.lang.clone(),
        n_total,
        n_excluded_single_token: excluded,
        n_scored,
        score_strict,
        score_lenient: (correct + excluded) as f64 / n_total as f64,
        mean_fertility: tokens as f64 / n_total as f64,
        mean_word_len: chars as f64 / n_total as f64,
        one_token_count: excluded,
        one_token_prop: excluded as f64 / n_total as f64,
    })
}

/// Replays a fixed table of word tokenizations.
#[derive(Debug, Clone, Default)]
pub struct LookupSegmenter {
    table: HashMap<String, Vec<String>>,
}

impl LookupSegmenter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert<S: AsRef<str>>(&mut self, word: &str, tokens: &[S]) -> Result<()> {
        Segmentation::from_tokens(word, tokens)?;
        self.table
            .insert(word.to_owned(), tokens.iter().map(|t| t.as_ref().to_owned()).collect());
        Ok(())
    }

    pub fn with<S: AsRef<str>>(mut self, word: &str, tokens: &[S]) -> Result<Self> {
        self.insert(word, tokens)?;
        Ok(self)
    }

    /// Splits every item exactly at its gold boundary.
    pub fn gold(items: &[MorphItem]) -> Result<Self> {
        Self::split_each(items, |it| it.boundary)
    }

    /// Splits every item one character away from its gold boundary: after it
    /// when that is still interior, before it otherwise.
    pub fn off_by_one(items: &[MorphItem]) -> Result<Self> {
        Self::split_each(items, |it| {
            if it.boundary + 1 < it.word.chars().count() {
                it.boundary + 1
            } else {
                it.boundary - 1
            }
        })
    }

    fn split_each(items: &[MorphItem], cut: impl Fn(&MorphItem) -> usize) -> Result<Self> {
        let mut seg = Self::new();
        for it in items {
            let at = it
                .word
                .char_indices()
                .nth(cut(it))
                .map(|(i, _)| i)
                .unwrap_or(it.word.len());
            let (a, b) = it.word.split_at(at);
            let tokens: Vec<&str> = [a, b].into_iter().filter(|t| !t.is_empty()).collect();
            seg.insert(&it.word, &tokens)?;
        }
        Ok(seg)
    }
}

impl Segmenter for LookupSegmenter {
    fn segment(&self, word: &str) -> Result<Segmentation> {
        let tokens = self
            .table
            .get(word)
            .ok_or_else(|| Error::Input(format!("no tokenization recorded for {word:?}")))?;
        Segmentation::from_tokens(word, tokens)
    }
}

/// Segmenter closure adapter.
pub struct FnSegmenter<F>(pub F);

impl<F> Segmenter for FnSegmenter<F>
where
    F: Fn(&str) -> Result<Segmentation>,
{
    fn segment(&self, word: &str) -> Result<Segmentation> {
        (self.0)(word)
    }
}

/// Which report field to compare across groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreField {
    ScoreStrict,
    ScoreLenient,
    OneTokenCount,
    OneTokenProp,
    MeanFertility,
    MeanWordLen,
}

impl ScoreField {
    fn get(self, r: &MorphScoreReport) -> f64 {
        match self {
            ScoreField::ScoreStrict => r.score_strict,
            ScoreField::ScoreLenient => r.score_lenient,
            ScoreField::OneTokenCount => r.one_token_count as f64,
            ScoreField::OneTokenProp => r.one_token_prop,
            ScoreField::MeanFertility => r.mean_fertility,
            ScoreField::MeanWordLen => r.mean_word_len,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    pub field: ScoreField,
    pub agglutinative: Vec<String>,
    pub fusional: Vec<String>,
    /// Group a is agglutinative, group b fusional.
    pub test: TTestResult,
}

/// Welch test of one report field between agglutinative and fusional
/// languages.
pub fn compare_groups(
    reports: &[MorphScoreReport],
    profile: &HashMap<String, MorphType>,
    field: ScoreField,
) -> Result<GroupComparison> {
    let (mut agg, mut fus) = (Vec::new(), Vec::new());
    let (mut agg_langs, mut fus_langs) = (Vec::new(), Vec::new());
    for r in reports {
        let ty = profile
            .get(&r.lang)
            .ok_or_else(|| Error::Input(format!("no morphological type for {}", r.lang)))?;
        let v = field.get(r);
        if v.is_nan() {
            return Err(Error::Stat(format!("{} has an undefined {field:?}", r.lang)));
        }
        match ty {
            MorphType::Agglutinative => {
                agg.push(v);
                agg_langs.push(r.lang.clone());
            }
            MorphType::Fusional => {
                fus.push(v);
                fus_langs.push(r.lang.clone());
            }
        }
    }
    Ok(GroupComparison {
        field,
        agglutinative: agg_langs,
        fusional: fus_langs,
        test: welch_t(&agg, &fus)?,
    })
}

/// Reads a dataset TSV with header `word, boundary, lang, source`.
pub fn read_dataset(path: impl AsRef<Path>) -> Result<Vec<MorphItem>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset_from(file).map_err(|e| match e {
        Error::Format { context, message } => Error::Format {
            context: format!("{}: {context}", path.display()),
            message,
        },
        other => other,
    })
}

pub fn read_dataset_from(reader: impl io::Read) -> Result<Vec<MorphItem>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::format("line 1", e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::format("line 1", format!("missing column {name:?}")))
    };
    let (cw, cb, cl, cs) = (col("word")?, col("boundary")?, col("lang")?, col("source")?);
    let mut items = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::format(format!("line {line}"), e.to_string()))?;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let boundary: usize = field(cb)
            .parse()
            .map_err(|_| Error::format(format!("line {line}"), format!("bad boundary {:?}", field(cb))))?;
        let source: Source = field(cs)
            .parse()
            .map_err(|e: Error| Error::format(format!("line {line}"), e.to_string()))?;
        let item = MorphItem::new(field(cw), boundary, field(cl), source)
            .map_err(|e| Error::format(format!("line {line}"), e.to_string()))?;
        items.push(item);
    }
    Ok(items)
}

pub fn write_dataset(path: impl AsRef<Path>, items: &[MorphItem]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset_to(file, items).map_err(|e| Error::io(path, e))
}

pub fn write_dataset_to(writer: impl io::Write, items: &[MorphItem]) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Never)
        .from_writer(writer);
    w.write_record(["word", "boundary", "lang", "source"])?;
    for it in items {
        w.write_record([
            it.word.as_str(),
            &it.boundary.to_string(),
            &it.lang,
            &it.source.to_string(),
        ])?;
    }
    w.flush()
}

/// One CSV row per report, all fields, header first.
pub fn write_reports_csv(writer: impl io::Write, reports: &[MorphScoreReport]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(word: &str, boundary: usize) -> MorphItem {
        MorphItem::new(word, boundary, "xx", Source::Synthetic).unwrap()
    }

    fn seg(word: &str, toks: &[&str]) -> Segmentation {
        Segmentation::from_tokens(word, toks).unwrap()
    }

    #[test]
    fn table_rows() {
        let aldiz = item("aldiz", 4);
        assert_eq!(
            score_item(&seg("aldiz", &["al", "diz"]), &aldiz, Mode::Strict).unwrap(),
            Outcome::Incorrect
        );
        assert_eq!(
            score_item(&seg("aldiz", &["aldi", "z"]), &aldiz, Mode::Strict).unwrap(),
            Outcome::Correct
        );
        let samrads = item("samráðs", 6);
        let whole = seg("samráðs", &["samráðs"]);
        assert_eq!(score_item(&whole, &samrads, Mode::Strict).unwrap(), Outcome::Excluded);
        assert_eq!(score_item(&whole, &samrads, Mode::Lenient).unwrap(), Outcome::Correct);
        let s = seg("suučesnika", &["su", "u", "če", "s", "nika"]);
        assert_eq!(s.boundaries.len(), 4);
        assert_eq!(
            score_item(&s, &item("suučesnika", 9), Mode::Strict).unwrap(),
            Outcome::Incorrect
        );
    }

    #[test]
    fn word_mismatch_is_an_input_error() {
        let r = score_item(&seg("books", &["book", "s"]), &item("cooks", 4), Mode::Strict);
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn item_boundary_must_be_interior() {
        assert!(MorphItem::new("books", 0, "eng", Source::Ud).is_err());
        assert!(MorphItem::new("books", 5, "eng", Source::Ud).is_err());
        assert!(MorphItem::new("bo oks", 2, "eng", Source::Ud).is_err());
    }

    #[test]
    fn four_outcomes_arithmetic() {
        // Correct, Incorrect, Excluded, Correct.
        let seg = LookupSegmenter::new()
            .with("abcd", &["ab", "cd"])
            .unwrap()
            .with("efgh", &["e", "fgh"])
            .unwrap()
            .with("ijkl", &["ijkl"])
            .unwrap()
            .with("mnop", &["m", "n", "op"])
            .unwrap();
        let items = [item("abcd", 2), item("efgh", 2), item("ijkl", 2), item("mnop", 2)];
        let r = morphscore(&seg, &items).unwrap();
        // Oracle: strict = 2 correct / 3 scored; lenient = (2 + 1) / 4.
        assert_eq!(r.score_strict, 2.0 / 3.0);
        assert_eq!(r.score_lenient, 3.0 / 4.0);
        assert_eq!((r.n_total, r.n_scored, r.n_excluded_single_token), (4, 3, 1));
        assert_eq!(r.mean_fertility, 8.0 / 4.0);
        assert_eq!(r.mean_word_len, 4.0);
        assert_eq!(r.one_token_prop, 0.25);
    }

    #[test]
    fn all_excluded_is_flagged_nan() {
        let seg = LookupSegmenter::new().with("abcd", &["abcd"]).unwrap();
        let r = morphscore(&seg, &[item("abcd", 1)]).unwrap();
        assert_eq!(r.n_scored, 0);
        assert!(r.score_strict.is_nan());
        assert!(!r.strict_defined());
        assert_eq!(r.score_lenient, 1.0);
    }

    #[test]
    fn empty_and_mixed_inputs() {
        let seg = LookupSegmenter::new();
        assert!(matches!(morphscore(&seg, &[]), Err(Error::Input(_))));
        let a = MorphItem::new("ab", 1, "x", Source::Ud).unwrap();
        let b = MorphItem::new("ab", 1, "y", Source::Ud).unwrap();
        assert!(morphscore(&seg, &[a, b]).is_err());
    }

    #[test]
    fn identical_groups_compare_to_zero() {
        let mk = |lang: &str, s: f64| MorphScoreReport {
            lang: lang.into(),
            n_total: 10,
            n_excluded_single_token: 0,
            n_scored: 10,
            score_strict: s,
            score_lenient: s,
            mean_fertility: 2.0,
            mean_word_len: 5.0,
            one_token_count: 0,
            one_token_prop: 0.0,
        };
        let reports = vec![mk("a1", 0.5), mk("a2", 0.7), mk("f1", 0.5), mk("f2", 0.7)];
        let profile: HashMap<String, MorphType> = [
            ("a1", MorphType::Agglutinative),
            ("a2", MorphType::Agglutinative),
            ("f1", MorphType::Fusional),
            ("f2", MorphType::Fusional),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        let c = compare_groups(&reports, &profile, ScoreField::ScoreStrict).unwrap();
        assert_eq!((c.test.t, c.test.p), (0.0, 1.0));

        let c = compare_groups(&reports[..3], &profile, ScoreField::ScoreStrict);
        assert!(matches!(c, Err(Error::Stat(_))));
    }

    #[test]
    fn dataset_tsv_round_trip() {
        let items = vec![
            MorphItem::new("books", 4, "eng_latn", Source::Ud).unwrap(),
            MorphItem::new("Αδριανής", 7, "ell_grek", Source::Ud).unwrap(),
            MorphItem::new("aldiz", 4, "eus_latn", Source::UniMorph).unwrap(),
        ];
        let mut buf = Vec::new();
        write_dataset_to(&mut buf, &items).unwrap();
        assert_eq!(read_dataset_from(buf.as_slice()).unwrap(), items);
    }

    #[test]
    fn dataset_errors_name_the_line() {
        let tsv = "word\tboundary\tlang\tsource\nbooks\t4\teng\tUD\nbooks\tx\teng\tUD\n";
        match read_dataset_from(tsv.as_bytes()) {
            Err(Error::Format { context, .. }) => assert_eq!(context, "line 3"),
            other => panic!("{other:?}"),
        }
    }
}
