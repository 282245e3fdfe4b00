//! Building evaluation datasets and reading parallel corpora.
//!
//! Items come from UD treebanks (CoNLL-U) or UniMorph tables. A word yields
//! an item only when it is its lemma followed by a non-empty suffix, compared
//! character by character and case-sensitively. The boundary is the lemma's
//! length in characters. This drops umlaut, suppletion and prefixing forms;
//! prefix boundaries only enter through explicit UniMorph segmentations.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::morphscore::{MorphItem, Source};

/// Datasets larger than this are down-sampled.
pub const MAX_ITEMS: usize = 2000;
/// Datasets smaller than this are rejected.
pub const MIN_ITEMS: usize = 100;
/// Identifies the sampling procedure used by [`finalize_dataset`]:
/// ChaCha8 seeded with `seed_from_u64`, then `rand::seq::index::sample`,
/// indices kept in ascending order.
pub const SAMPLER_ID: &str = "chacha8-seed_from_u64/rand-0.9-index-sample/sorted";

/// One syntactic word from a CoNLL-U file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConlluToken {
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub feats: String,
}

pub fn parse_conllu(path: impl AsRef<Path>) -> Result<Vec<ConlluToken>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_conllu_str(&text).map_err(|e| prefix_context(e, path))
}

/// Parses CoNLL-U text, skipping comments, multiword-token ranges (`3-4`)
/// and empty nodes (`5.1`).
pub fn parse_conllu_str(text: &str) -> Result<Vec<ConlluToken>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::format(
                format!("line {}", i + 1),
                format!("expected 10 tab-separated columns, found {}", cols.len()),
            ));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        if cols[1].is_empty() || cols[2].is_empty() {
            continue;
        }
        out.push(ConlluToken {
            form: cols[1].to_owned(),
            lemma: cols[2].to_owned(),
            upos: cols[3].to_owned(),
            feats: cols[5].to_owned(),
        });
    }
    Ok(out)
}

/// Boundary for a (lemma, form) pair under the lemma-prefix rule.
pub fn prefix_boundary(lemma: &str, form: &str) -> Option<usize> {
    if lemma.is_empty() || form == lemma || form.chars().any(char::is_whitespace) {
        return None;
    }
    let rest = form.strip_prefix(lemma)?;
    (!rest.is_empty()).then(|| lemma.chars().count())
}

/// Items from treebank tokens, in input order.
pub fn derive_items(tokens: &[ConlluToken], lang: &str) -> Vec<MorphItem> {
    tokens
        .iter()
        .filter_map(|t| {
            let b = prefix_boundary(&t.lemma, &t.form)?;
            MorphItem::new(t.form.clone(), b, lang, Source::Ud).ok()
        })
        .collect()
}

pub fn parse_unimorph(path: impl AsRef<Path>, lang: &str) -> Result<Vec<MorphItem>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_unimorph_str(&text, lang).map_err(|e| prefix_context(e, path))
}

/// Parses `lemma<TAB>form<TAB>features[<TAB>segmentation]` rows.
///
/// A segmentation column with `|` separators (`aldi|z`) gives an explicit
/// cut; with several separators the left-most is used. Otherwise the
/// lemma-prefix rule applies.
pub fn parse_unimorph_str(text: &str, lang: &str) -> Result<Vec<MorphItem>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let ctx = || format!("line {}", i + 1);
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 3 {
            return Err(Error::format(
                ctx(),
                format!("expected at least 3 columns, found {}", cols.len()),
            ));
        }
        let (lemma, form) = (cols[0], cols[1]);
        if form.is_empty() {
            return Err(Error::format(ctx(), "empty form"));
        }
        let explicit = cols.get(3).filter(|s| s.contains('|'));
        let boundary = match explicit {
            Some(seg) => {
                let pieces: Vec<&str> = seg.split('|').collect();
                if pieces.iter().any(|p| p.is_empty()) || pieces.concat() != form {
                    return Err(Error::format(
                        ctx(),
                        format!("segmentation {seg:?} does not spell {form:?}"),
                    ));
                }
                Some(pieces[0].chars().count())
            }
            None => prefix_boundary(lemma, form),
        };
        if let Some(b) = boundary {
            if let Ok(item) = MorphItem::new(form, b, lang, Source::UniMorph) {
                out.push(item);
            }
        }
    }
    Ok(out)
}

/// Collapses each (lang, word) to its left-most boundary, keeping the
/// position of its first occurrence. Exact duplicates disappear with it.
pub fn dedup_items(items: Vec<MorphItem>) -> Vec<MorphItem> {
    let mut pos: HashMap<(String, String), usize> = HashMap::new();
    let mut out: Vec<MorphItem> = Vec::new();
    for it in items {
        let key = (it.lang.clone(), it.word.clone());
        match pos.get(&key) {
            Some(&i) => {
                if it.boundary < out[i].boundary {
                    out[i].boundary = it.boundary;
                }
            }
            None => {
                pos.insert(key, out.len());
                out.push(it);
            }
        }
    }
    out
}

/// Deduplicates, enforces the size floor, and down-samples to
/// [`MAX_ITEMS`] with a seeded uniform sample that keeps input order.
pub fn finalize_dataset(items: Vec<MorphItem>, seed: u64) -> Result<Vec<MorphItem>> {
    let items = dedup_items(items);
    if items.len() < MIN_ITEMS {
        return Err(Error::DatasetTooSmall(items.len()));
    }
    if items.len() <= MAX_ITEMS {
        return Ok(items);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = index::sample(&mut rng, items.len(), MAX_ITEMS).into_vec();
    keep.sort_unstable();
    let mut slots: Vec<Option<MorphItem>> = items.into_iter().map(Some).collect();
    Ok(keep
        .into_iter()
        .map(|i| slots[i].take().expect("indices are distinct"))
        .collect())
}

fn prefix_context(e: Error, path: &Path) -> Error {
    match e {
        Error::Format { context, message } => Error::Format {
            context: format!("{}: {context}", path.display()),
            message,
        },
        other => other,
    }
}

/// Line-aligned texts in several languages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    langs: Vec<String>,
    lines: Vec<Vec<String>>,
}

impl ParallelCorpus {
    pub fn new(langs: Vec<String>, lines: Vec<Vec<String>>) -> Result<Self> {
        if langs.len() != lines.len() {
            return Err(Error::Input(format!(
                "{} languages but {} line sets",
                langs.len(),
                lines.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = langs.iter().find(|l| !seen.insert(*l)) {
            return Err(Error::Input(format!("language {dup} appears twice")));
        }
        if let Some(first) = lines.first() {
            for (l, set) in langs.iter().zip(&lines) {
                if set.len() != first.len() {
                    return Err(Error::Input(format!(
                        "{l} has {} lines, {} has {}",
                        set.len(),
                        langs[0],
                        first.len()
                    )));
                }
            }
        }
        Ok(ParallelCorpus { langs, lines })
    }

    /// Reads one file per language.
    pub fn from_files(files: &[(String, PathBuf)]) -> Result<Self> {
        let mut langs = Vec::new();
        let mut lines = Vec::new();
        for (lang, path) in files {
            langs.push(lang.clone());
            lines.push(read_lines(path)?);
        }
        Self::new(langs, lines)
    }

    /// Reads every regular file in `dir`; the language code is the file
    /// name up to its first dot (`eng_latn.devtest` → `eng_latn`).
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut files = Vec::new();
        for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let path = entry.path();
            if !path.is_file() {
                continue;
            }
            if entry.file_name().to_string_lossy().starts_with('.') {
                continue;
            }
            files.push((lang_from_path(&path), path));
        }
        files.sort();
        Self::from_files(&files)
    }

    /// Writes `<lang>.txt` per language, newline-terminated lines.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (lang, lines) in self.langs.iter().zip(&self.lines) {
            let path = dir.join(format!("{lang}.txt"));
            fs::write(&path, join_lines(lines)).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }

    pub fn langs(&self) -> &[String] {
        &self.langs
    }

    pub fn lines(&self, lang: &str) -> Option<&[String]> {
        self.langs
            .iter()
            .position(|l| l == lang)
            .map(|i| self.lines[i].as_slice())
    }

    pub fn n_lines(&self) -> usize {
        self.lines.first().map_or(0, Vec::len)
    }
}

/// Language code of a corpus file: its name up to the first dot.
pub fn lang_from_path(path: impl AsRef<Path>) -> String {
    let name = path
        .as_ref()
        .file_name()
        .map(|n| n.to_string_lossy())
        .unwrap_or_default();
    name.split('.').next().unwrap_or_default().to_owned()
}

/// Lines of a UTF-8 text file without terminators.
pub fn read_lines(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(|l| l.trim_end_matches('\r').to_owned()).collect())
}

pub fn join_lines<S: AsRef<str>>(lines: &[S]) -> String {
    let mut out = String::new();
    for l in lines {
        out.push_str(l.as_ref());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONLLU: &str = "# sent_id = 1\n\
        # text = The books du\n\
        1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_\n\
        2\tbooks\tbook\tNOUN\tNNS\tNumber=Plur\t0\troot\t_\t_\n\
        3-4\tdu\t_\t_\t_\t_\t_\t_\t_\t_\n\
        3\tde\tde\tADP\t_\t_\t2\tcase\t_\t_\n\
        4\tle\tle\tDET\t_\t_\t2\tdet\t_\t_\n\
        4.1\tran\trun\tVERB\t_\t_\t_\t_\t_\t_\n\
        \n";

    #[test]
    fn conllu_skips_comments_ranges_and_empty_nodes() {
        let toks = parse_conllu_str(CONLLU).unwrap();
        let forms: Vec<_> = toks.iter().map(|t| t.form.as_str()).collect();
        assert_eq!(forms, vec!["The", "books", "de", "le"]);
        assert_eq!(toks[1].lemma, "book");
        assert_eq!(toks[1].upos, "NOUN");
        assert_eq!(toks[1].feats, "Number=Plur");
        assert!(parse_conllu_str("").unwrap().is_empty());
    }

    #[test]
    fn conllu_column_errors_carry_the_line() {
        let bad = "# c\n1\tbooks\tbook\tNOUN\n";
        match parse_conllu_str(bad) {
            Err(Error::Format { context, .. }) => assert_eq!(context, "line 2"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lemma_prefix_rule() {
        assert_eq!(prefix_boundary("book", "books"), Some(4));
        assert_eq!(prefix_boundary("run", "ran"), None);
        assert_eq!(prefix_boundary("book", "book"), None);
        assert_eq!(prefix_boundary("Book", "books"), None);
        assert_eq!(prefix_boundary("tarla", "tarlaları"), Some(5));
        let toks = parse_conllu_str(CONLLU).unwrap();
        let items = derive_items(&toks, "eng_latn");
        assert_eq!(items.len(), 1);
        assert_eq!((items[0].word.as_str(), items[0].boundary), ("books", 4));
    }

    #[test]
    fn unimorph_rows() {
        let text = "tarla\ttarlaları\tN;ACC;PL\n\
                    git\tgitti\tV;PST\n\
                    go\twent\tV;PST\n\
                    aldi\taldiz\tN;INS\taldi|z\n\
                    yap\tyapamadı\tV\tyap|a|ma|dı\n";
        let items = parse_unimorph_str(text, "tur_latn").unwrap();
        let got: Vec<_> = items.iter().map(|i| (i.word.as_str(), i.boundary)).collect();
        assert_eq!(got, vec![("tarlaları", 5), ("gitti", 3), ("aldiz", 4), ("yapamadı", 3)]);
        assert!(items.iter().all(|i| i.source == Source::UniMorph));
    }

    #[test]
    fn unimorph_malformed_rows() {
        assert!(parse_unimorph_str("tarla\ttarlalar\n", "x").is_err());
        assert!(parse_unimorph_str("a\tab\tN\tx|y\n", "x").is_err());
    }

    fn synthetic(n: usize) -> Vec<MorphItem> {
        (0..n)
            .map(|i| MorphItem::new(format!("w{i}x"), 1, "xx", Source::Synthetic).unwrap())
            .collect()
    }

    #[test]
    fn dedup_and_leftmost() {
        let mk = |w: &str, b| MorphItem::new(w, b, "xx", Source::Ud).unwrap();
        let out = dedup_items(vec![mk("xxxx", 2), mk("xxxx", 2), mk("yyyy", 3)]);
        assert_eq!(out.len(), 2);
        let out = dedup_items(vec![mk("abcde", 3), mk("abcde", 1), mk("abcde", 2)]);
        assert_eq!(out, vec![mk("abcde", 1)]);
    }

    #[test]
    fn floor_and_cap() {
        assert!(matches!(
            finalize_dataset(synthetic(99), 1),
            Err(Error::DatasetTooSmall(99))
        ));
        assert_eq!(finalize_dataset(synthetic(100), 1).unwrap().len(), 100);
        let a = finalize_dataset(synthetic(2500), 7).unwrap();
        let b = finalize_dataset(synthetic(2500), 7).unwrap();
        assert_eq!(a.len(), MAX_ITEMS);
        assert_eq!(a, b);
        assert_ne!(a, finalize_dataset(synthetic(2500), 8).unwrap());
        assert_eq!(finalize_dataset(a.clone(), 99).unwrap(), a);
    }

    #[test]
    fn parallel_corpus_checks_alignment_and_round_trips() {
        let c = ParallelCorpus::new(
            vec!["eng".into(), "ell".into()],
            vec![vec!["ab".into(), "cd".into()], vec!["αβ".into(), "γδ".into()]],
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        c.write_dir(dir.path()).unwrap();
        let back = ParallelCorpus::from_dir(dir.path()).unwrap();
        assert_eq!(back.lines("eng"), c.lines("eng"));
        assert_eq!(back.lines("ell"), c.lines("ell"));
        assert_eq!(back.n_lines(), 2);

        let bad = ParallelCorpus::new(vec!["a".into(), "b".into()], vec![vec!["x".into()], vec![]]);
        assert!(matches!(bad, Err(Error::Input(_))));
    }
}
