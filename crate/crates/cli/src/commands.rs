use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use morphalign::byte_premium::{self, BytePremium};
use morphalign::dataset::{self, lang_from_path, ParallelCorpus};
use morphalign::metrics::{self, MetricsReport};
use morphalign::morphscore::{self, MorphItem, MorphScoreReport, ScoreField};
use morphalign::report::{self, ResultSet};
use morphalign::stats::{self, DataTable, Formula};
use morphalign::synth::{self, SynthSpec};
use morphalign::tokenizer::{self, TokenizerModel};
use morphalign::typology;
use morphalign::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::*;
use crate::manifest::{beside, RunManifest};

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>, path: &Path) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| Error::io(path, e))?;
    Ok(buf)
}

fn json_bytes(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    Ok(text.into_bytes())
}

pub fn run(cmd: &Command) -> Result<()> {
    match cmd {
        Command::TrainTokenizer(a) => train_tokenizer(cmd, a),
        Command::Tokenize(a) => tokenize(cmd, a),
        Command::Morphscore(a) => score(cmd, a),
        Command::BuildDataset(a) => build_dataset(cmd, a),
        Command::Metrics(a) => corpus_metrics(cmd, a),
        Command::BytePremium(a) => premiums(cmd, a),
        Command::ScaleCorpus(a) => scale(cmd, a),
        Command::Synth(a) => synthesize(cmd, a),
        Command::Analyze(a) => analyze(cmd, a),
        Command::Report(a) => make_report(cmd, a),
    }
}

fn train_tokenizer(cmd: &Command, a: &TrainArgs) -> Result<()> {
    let specials = tokenizer::default_specials();
    let (model, inputs) = if let Some(vocab) = &a.vocab_file {
        let model = tokenizer::import_vocab_merges(vocab, a.merges_file.as_deref(), a.marker, specials)?;
        let mut inputs = vec![vocab.clone()];
        inputs.extend(a.merges_file.clone());
        (model, inputs)
    } else {
        let mut lines = Vec::new();
        for path in &a.corpus {
            let mut l = dataset::read_lines(path)?;
            if let Some(n) = a.max_lines {
                l.truncate(n);
            }
            lines.extend(l);
        }
        let target = a
            .vocab_size
            .ok_or_else(|| Error::Config("--vocab-size is required when training".into()))?;
        (
            tokenizer::train_bpe(&lines, target, a.marker, &specials)?,
            a.corpus.clone(),
        )
    };
    write_file(&a.output, model.to_json().as_bytes())?;
    RunManifest::new(cmd.name(), cmd, &inputs, None)?.write(&beside(&a.output))
}

fn tokenize(cmd: &Command, a: &TokenizeArgs) -> Result<()> {
    let model = tokenizer::load_model(&a.model)?;
    let lines = dataset::read_lines(&a.input)?;
    let out: Vec<String> = lines
        .par_iter()
        .map(|line| {
            if a.ids {
                let ids = model.encode_text(line, a.add_specials);
                ids.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
            } else {
                let mut toks: Vec<String> = model
                    .encode_text_pieces(line)
                    .into_iter()
                    .flatten()
                    .map(|p| match model.id_to_token(p.id) {
                        Some(t) if !p.unknown => t.to_owned(),
                        _ => p.text,
                    })
                    .collect();
                if a.add_specials {
                    toks.insert(0, tokenizer::BOS.to_owned());
                    toks.push(tokenizer::EOS.to_owned());
                }
                toks.join(" ")
            }
        })
        .collect();
    write_file(&a.output, dataset::join_lines(&out).as_bytes())?;
    RunManifest::new(cmd.name(), cmd, &[a.model.clone(), a.input.clone()], None)?.write(&beside(&a.output))
}

/// Items grouped by language, languages in order of first appearance.
fn by_lang(items: Vec<MorphItem>) -> Vec<(String, Vec<MorphItem>)> {
    let mut order: Vec<(String, Vec<MorphItem>)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for it in items {
        let i = *index.entry(it.lang.clone()).or_insert_with(|| {
            order.push((it.lang.clone(), Vec::new()));
            order.len() - 1
        });
        order[i].1.push(it);
    }
    order
}

fn score(cmd: &Command, a: &MorphscoreArgs) -> Result<()> {
    let model = tokenizer::load_model(&a.model)?;
    let items = morphscore::read_dataset(&a.dataset)?;
    if items.is_empty() {
        return Err(Error::Input(format!("{} has no items", a.dataset.display())));
    }
    let reports: Vec<MorphScoreReport> = by_lang(items)
        .par_iter()
        .map(|(_, items)| morphscore::morphscore(&model, items))
        .collect::<Result<_>>()?;
    let csv = csv_bytes(|w| morphscore::write_reports_csv(w, &reports), &a.output)?;
    write_file(&a.output, &csv)?;
    let mut inputs = vec![a.model.clone(), a.dataset.clone()];
    if let (Some(profile), Some(out)) = (&a.profile, &a.compare_output) {
        let profile_map = typology::read_profile(profile)?;
        let comparisons = [ScoreField::ScoreStrict, ScoreField::ScoreLenient]
            .into_iter()
            .map(|f| morphscore::compare_groups(&reports, &profile_map, f))
            .collect::<Result<Vec<_>>>()?;
        write_file(out, &json_bytes(&comparisons)?)?;
        inputs.push(profile.clone());
    }
    RunManifest::new(cmd.name(), cmd, &inputs, None)?.write(&beside(&a.output))
}

fn build_dataset(cmd: &Command, a: &BuildDatasetArgs) -> Result<()> {
    if a.conllu.is_empty() && a.unimorph.is_empty() {
        return Err(Error::Config("give at least one --conllu or --unimorph file".into()));
    }
    let mut items = Vec::new();
    for path in &a.conllu {
        items.extend(dataset::derive_items(&dataset::parse_conllu(path)?, &a.lang));
    }
    for path in &a.unimorph {
        items.extend(dataset::parse_unimorph(path, &a.lang)?);
    }
    let items = dataset::finalize_dataset(items, a.seed)?;
    let tsv = csv_bytes(|w| morphscore::write_dataset_to(w, &items), &a.output)?;
    write_file(&a.output, &tsv)?;
    let inputs: Vec<PathBuf> = a.conllu.iter().chain(&a.unimorph).cloned().collect();
    let mut m = RunManifest::new(cmd.name(), cmd, &inputs, Some(a.seed))?;
    m.sampler = Some(dataset::SAMPLER_ID.to_owned());
    m.write(&beside(&a.output))
}

fn write_metrics(rows: &[(String, MetricsReport)], path: &Path) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::io(path, e.into());
    w.write_record([
        "model",
        "lang",
        "ctc",
        "n_words",
        "fertility",
        "mean_token_len",
        "renyi_alpha",
        "renyi_entropy",
        "renyi_efficiency",
        "n_token_types",
    ])
    .map_err(io)?;
    for (model, r) in rows {
        w.write_record([
            model.clone(),
            r.lang.clone(),
            r.ctc.to_string(),
            r.n_words.to_string(),
            r.fertility.to_string(),
            r.mean_token_len.to_string(),
            r.renyi_alpha.to_string(),
            r.renyi_entropy.to_string(),
            r.renyi_efficiency.to_string(),
            r.n_token_types.to_string(),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::io(path, e.into_error()))
}

fn corpus_metrics(cmd: &Command, a: &MetricsArgs) -> Result<()> {
    let models: Vec<(String, TokenizerModel)> = a
        .model
        .iter()
        .map(|p| {
            let name = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((name, tokenizer::load_model(p)?))
        })
        .collect::<Result<_>>()?;
    let corpora: Vec<(String, Vec<String>)> = a
        .corpus
        .iter()
        .map(|p| Ok((lang_from_path(p), dataset::read_lines(p)?)))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|m| (0..corpora.len()).map(move |c| (m, c)))
        .collect();
    let rows: Vec<(String, MetricsReport)> = jobs
        .par_iter()
        .map(|&(m, c)| {
            let (name, model) = &models[m];
            let (lang, lines) = &corpora[c];
            Ok((name.clone(), metrics::compute_metrics(model, lang, lines, a.alpha)?))
        })
        .collect::<Result<_>>()?;
    write_file(&a.output, &write_metrics(&rows, &a.output)?)?;
    let inputs: Vec<PathBuf> = a.model.iter().chain(&a.corpus).cloned().collect();
    RunManifest::new(cmd.name(), cmd, &inputs, None)?.write(&beside(&a.output))
}

fn premiums(cmd: &Command, a: &BytePremiumArgs) -> Result<()> {
    let (corpus, inputs) = match &a.corpus_dir {
        Some(dir) => {
            let corpus = ParallelCorpus::from_dir(dir)?;
            let inputs = corpus
                .langs()
                .iter()
                .map(|l| dir.join(format!("{l}.txt")))
                .filter(|p| p.is_file())
                .collect();
            (corpus, inputs)
        }
        None => {
            let files: Vec<(String, PathBuf)> = a.corpus.iter().map(|p| (lang_from_path(p), p.clone())).collect();
            (ParallelCorpus::from_files(&files)?, a.corpus.clone())
        }
    };
    let premiums = byte_premium::all_premiums(&corpus, &a.pivot)?;
    let csv = csv_bytes(|w| byte_premium::write_premiums_csv(w, &premiums), &a.output)?;
    write_file(&a.output, &csv)?;
    RunManifest::new(cmd.name(), cmd, &inputs, None)?.write(&beside(&a.output))
}

fn read_premium(path: &Path, lang: &str) -> Result<f64> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    for (i, rec) in rdr.deserialize::<BytePremium>().enumerate() {
        let p = rec.map_err(|e| Error::format(format!("{}: line {}", path.display(), i + 2), e.to_string()))?;
        if p.lang == lang {
            return Ok(p.ratio);
        }
    }
    Err(Error::Input(format!("no premium for {lang} in {}", path.display())))
}

fn scale(cmd: &Command, a: &ScaleCorpusArgs) -> Result<()> {
    let mut inputs = vec![a.input.clone()];
    let ratio = match (a.premium, &a.premiums, &a.lang) {
        (Some(r), _, _) => r,
        (None, Some(path), Some(lang)) => {
            inputs.push(path.clone());
            read_premium(path, lang)?
        }
        _ => return Err(Error::Config("give --premium or --premiums with --lang".into())),
    };
    let lines = dataset::read_lines(&a.input)?;
    let out = byte_premium::scale_corpus(&lines, ratio, a.budget_bytes, a.shuffle.then_some(a.seed))?;
    write_file(&a.output, dataset::join_lines(&out).as_bytes())?;
    RunManifest::new(cmd.name(), cmd, &inputs, a.shuffle.then_some(a.seed))?.write(&beside(&a.output))
}

fn synthesize(cmd: &Command, a: &SynthArgs) -> Result<()> {
    let mut inputs = Vec::new();
    let mut spec = match &a.spec {
        Some(path) => {
            inputs.push(path.clone());
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str::<SynthSpec>(&text).map_err(|e| {
                Error::format(
                    format!("{}: line {} column {}", path.display(), e.line(), e.column()),
                    e.to_string(),
                )
            })?
        }
        None => {
            let typology = a
                .typology
                .ok_or_else(|| Error::Config("--typology is required without --spec".into()))?;
            SynthSpec::new(typology, 0)
        }
    };
    if let Some(t) = a.typology {
        spec.typology = t;
    }
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    if let Some(n) = a.n_roots {
        spec.n_roots = n;
    }
    if let Some(n) = a.n_slots {
        spec.n_slots = n;
    }
    if let Some(n) = a.n_affixes_per_slot {
        spec.n_affixes_per_slot = n;
    }
    if let Some(n) = a.paradigm_size {
        spec.paradigm_size = n;
    }
    if let Some(s) = a.zipf_s {
        spec.zipf_s = s;
    }
    let corpus = synth::generate(&spec, a.n_words)?;
    let lang = corpus.lang();
    let dir = &a.out_dir;
    write_file(
        &dir.join(format!("{lang}.txt")),
        dataset::join_lines(&corpus.lines).as_bytes(),
    )?;
    let gold_path = dir.join(format!("{lang}.gold.tsv"));
    let gold = csv_bytes(|w| morphscore::write_dataset_to(w, &corpus.gold), &gold_path)?;
    write_file(&gold_path, &gold)?;
    write_file(&dir.join(format!("{lang}.spec.json")), &json_bytes(&spec)?)?;
    RunManifest::new(cmd.name(), cmd, &inputs, Some(spec.seed))?.write(&dir.join(format!("{lang}.manifest.json")))
}

#[derive(Serialize)]
struct RegressionOutput {
    full: stats::RegressionResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    reduced: Option<stats::RegressionResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nested_f: Option<stats::NestedFTest>,
}

fn analyze(cmd: &Command, a: &AnalyzeArgs) -> Result<()> {
    let table = DataTable::from_csv_path(&a.data)?;
    let json = if let Some(f) = &a.formula {
        let full: Formula = f.parse()?;
        let mut used: Vec<&str> = vec![full.response.as_str()];
        used.extend(full.terms.iter().map(String::as_str));
        let table = table.complete_rows(&used)?;
        let (y, design) = table.model_frame(&full)?;
        let full_fit = stats::ols_fit(&y, &design)?;
        let (reduced, nested) = match &a.reduced {
            Some(r) => {
                let red: Formula = r.parse()?;
                if red.response != full.response || red.terms.iter().any(|t| !full.terms.contains(t)) {
                    return Err(Error::Config(format!("{r:?} is not nested in {f:?}")));
                }
                let (y_r, design_r) = table.model_frame(&red)?;
                let fit = stats::ols_fit(&y_r, &design_r)?;
                let test = stats::nested_f(&full_fit, &fit)?;
                (Some(fit), Some(test))
            }
            None => (None, None),
        };
        json_bytes(&RegressionOutput {
            full: full_fit,
            reduced,
            nested_f: nested,
        })?
    } else if let (Some(value), Some(group)) = (&a.welch, &a.by) {
        let mut test = table.welch_by_group(value, group)?;
        if a.pooled {
            let t = table.complete_rows(&[value, group])?;
            let groups = t.column(group)?;
            let vals = t.numeric_column(value)?;
            let pick = |lvl: &str| -> Vec<f64> {
                vals.iter()
                    .zip(&groups)
                    .filter(|(_, g)| **g == lvl)
                    .filter_map(|(v, _)| *v)
                    .collect()
            };
            test.result = stats::student_t(&pick(&test.group_a), &pick(&test.group_b))?;
        }
        json_bytes(&test)?
    } else if let [x, y] = a.pearson.as_slice() {
        let t = table.complete_rows(&[x, y])?;
        let col = |c: &str| -> Result<Vec<f64>> { Ok(t.numeric_column(c)?.into_iter().flatten().collect()) };
        json_bytes(&stats::pearson_r(&col(x)?, &col(y)?)?)?
    } else {
        return Err(Error::Config(
            "give --formula, --welch with --by, or --pearson X Y".into(),
        ));
    };
    write_file(&a.output, &json)?;
    RunManifest::new(cmd.name(), cmd, std::slice::from_ref(&a.data), None)?.write(&beside(&a.output))
}

fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn make_report(cmd: &Command, a: &ReportArgs) -> Result<()> {
    let profile = typology::read_profile(&a.profile)?;
    let tables = a
        .input
        .iter()
        .map(DataTable::from_csv_path)
        .collect::<Result<Vec<_>>>()?;
    let metrics = (!a.metrics.is_empty()).then_some(a.metrics.as_slice());
    let set = ResultSet::from_tables(&tables, &profile, metrics)?;
    let summary = report::summarize(&set)?;
    let charts: Vec<(String, String)> = set
        .metrics
        .par_iter()
        .map(|m| Ok((m.clone(), report::bar_chart_svg(&set, m)?)))
        .collect::<Result<_>>()?;
    write_file(&a.out_dir.join("summary.json"), &json_bytes(&summary)?)?;
    for (metric, svg) in &charts {
        write_file(&a.out_dir.join(format!("{}.svg", file_safe(metric))), svg.as_bytes())?;
    }
    let mut inputs = a.input.clone();
    inputs.push(a.profile.clone());
    RunManifest::new(cmd.name(), cmd, &inputs, None)?.write(&a.out_dir.join("manifest.json"))
}
