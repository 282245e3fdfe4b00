//! Group summaries and SVG bar charts over per-language result tables.
//!
//! Any CSV with a `lang` column works as input: metric tables, MorphScore
//! reports, or hand-made tables. Every other numeric column is a metric.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{welch_t, DataTable, TTestResult};
use crate::typology::{MorphType, Profile};

/// One row of a result table.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub lang: String,
    pub morph_type: MorphType,
    pub values: Vec<f64>,
}

/// Rows from one or more tables, aligned on a shared list of metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    pub metrics: Vec<String>,
    pub rows: Vec<Row>,
}

impl ResultSet {
    /// Collects rows from `tables`. Without `metrics`, uses the numeric
    /// columns of the first table other than `lang`.
    pub fn from_tables(tables: &[DataTable], profile: &Profile, metrics: Option<&[String]>) -> Result<Self> {
        let first = tables
            .first()
            .ok_or_else(|| Error::Input("no result tables given".into()))?;
        let metrics: Vec<String> = match metrics {
            Some(m) => m.to_vec(),
            None => {
                let mut out = Vec::new();
                for h in first.headers() {
                    if h != "lang" && first.n_rows() > 0 && first.is_numeric(h)? {
                        out.push(h.clone());
                    }
                }
                out
            }
        };
        let mut rows = Vec::new();
        for (t, table) in tables.iter().enumerate() {
            let ctx = format!("table {}", t + 1);
            if !table.has_column("lang") {
                return Err(Error::format(ctx, "missing column \"lang\""));
            }
            for m in &metrics {
                if !table.has_column(m) {
                    return Err(Error::format(&ctx, format!("missing column {m:?}")));
                }
            }
            let langs = table.column("lang")?;
            let cols = metrics
                .iter()
                .map(|m| table.numeric_column(m))
                .collect::<Result<Vec<_>>>()?;
            for (i, lang) in langs.iter().enumerate() {
                let morph_type = *profile
                    .get(*lang)
                    .ok_or_else(|| Error::Input(format!("no morphological type for {lang}")))?;
                let values = cols.iter().map(|c| c[i].unwrap_or(f64::NAN)).collect();
                rows.push(Row {
                    lang: lang.to_string(),
                    morph_type,
                    values,
                });
            }
        }
        if rows.is_empty() {
            return Err(Error::Input("result tables contain no rows".into()));
        }
        if metrics.is_empty() {
            return Err(Error::format("header", "no numeric metric columns"));
        }
        Ok(ResultSet { metrics, rows })
    }

    fn group(&self, metric: usize, ty: MorphType) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.morph_type == ty)
            .map(|r| r.values[metric])
            .filter(|v| !v.is_nan())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub n: usize,
    /// `null` for an empty group.
    pub mean: Option<f64>,
}

impl GroupStats {
    fn of(values: &[f64]) -> Self {
        let mean = (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64);
        GroupStats { n: values.len(), mean }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: String,
    pub agglutinative: GroupStats,
    pub fusional: GroupStats,
    /// Welch test, agglutinative first; absent unless both groups have two
    /// values.
    pub welch: Option<TTestResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub metrics: Vec<MetricSummary>,
}

pub fn summarize(set: &ResultSet) -> Result<Summary> {
    let metrics = set
        .metrics
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let agg = set.group(i, MorphType::Agglutinative);
            let fus = set.group(i, MorphType::Fusional);
            let welch = if agg.len() >= 2 && fus.len() >= 2 {
                Some(welch_t(&agg, &fus)?)
            } else {
                None
            };
            Ok(MetricSummary {
                metric: name.clone(),
                agglutinative: GroupStats::of(&agg),
                fusional: GroupStats::of(&fus),
                welch,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Summary { metrics })
}

const BAR_WIDTH: f64 = 30.0;
const BAR_STEP: f64 = 40.0;
const PLOT_HEIGHT: f64 = 200.0;
const LEFT: f64 = 50.0;
const TOP: f64 = 40.0;

fn color(ty: MorphType) -> &'static str {
    match ty {
        MorphType::Agglutinative => "#4477aa",
        MorphType::Fusional => "#cc6677",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Bar chart of one metric, agglutinative languages first, each group in
/// input order. Bars are drawn in data units: every `rect` has `height`
/// equal to the absolute value, inside a group scaled to the plot area.
/// Rows with a missing value are skipped.
pub fn bar_chart_svg(set: &ResultSet, metric: &str) -> Result<String> {
    let idx = set
        .metrics
        .iter()
        .position(|m| m == metric)
        .ok_or_else(|| Error::Input(format!("unknown metric {metric:?}")))?;
    let bars: Vec<&Row> = [MorphType::Agglutinative, MorphType::Fusional]
        .into_iter()
        .flat_map(|ty| set.rows.iter().filter(move |r| r.morph_type == ty))
        .filter(|r| !r.values[idx].is_nan())
        .collect();
    let max_abs = bars.iter().map(|r| r.values[idx].abs()).fold(0.0, f64::max);
    let max_pos = bars.iter().map(|r| r.values[idx]).fold(0.0, f64::max);
    let scale = if max_abs > 0.0 { PLOT_HEIGHT / max_abs } else { 1.0 };
    let neg_extent = bars.iter().map(|r| -r.values[idx]).fold(0.0, f64::max) * scale;
    let baseline = TOP + max_pos * scale;
    let width = LEFT + BAR_STEP * bars.len() as f64 + 20.0;
    let height = baseline + neg_extent + 40.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="20" font-family="sans-serif" font-size="14">{}</text>"#,
        escape(metric)
    );
    let _ = writeln!(s, r#"<g transform="translate({LEFT},{baseline}) scale(1,-{scale})">"#);
    for (i, r) in bars.iter().enumerate() {
        let v = r.values[idx];
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{BAR_WIDTH}" height="{}" fill="{}"><title>{} {}</title></rect>"#,
            i as f64 * BAR_STEP,
            v.min(0.0),
            v.abs(),
            color(r.morph_type),
            escape(&r.lang),
            v
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{baseline}" x2="{}" y2="{baseline}" stroke="black"/>"#,
        width - 20.0
    );
    for (i, r) in bars.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"#,
            LEFT + i as f64 * BAR_STEP + BAR_WIDTH / 2.0,
            baseline + neg_extent + 15.0,
            escape(&r.lang)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile() -> Profile {
        [
            ("tur", MorphType::Agglutinative),
            ("fin", MorphType::Agglutinative),
            ("spa", MorphType::Fusional),
        ]
        .into_iter()
        .map(|(l, t)| (l.to_string(), t))
        .collect()
    }

    fn table(csv: &str) -> DataTable {
        DataTable::from_reader(csv.as_bytes()).unwrap()
    }

    #[test]
    fn bars_carry_raw_values() {
        let set = ResultSet::from_tables(&[table("lang,ctc\ntur,120\nspa,80\n")], &profile(), None).unwrap();
        let svg = bar_chart_svg(&set, "ctc").unwrap();
        let heights: Vec<&str> = svg
            .lines()
            .filter(|l| l.starts_with("<rect"))
            .map(|l| l.split("height=\"").nth(1).unwrap().split('"').next().unwrap())
            .collect();
        assert_eq!(heights, vec!["120", "80"]);
        assert_eq!(svg, bar_chart_svg(&set, "ctc").unwrap());
    }

    #[test]
    fn summary_means_and_missing_welch() {
        let set = ResultSet::from_tables(&[table("lang,x\ntur,1\nfin,3\nspa,5\n")], &profile(), None).unwrap();
        let s = summarize(&set).unwrap();
        assert_eq!(s.metrics[0].agglutinative, GroupStats { n: 2, mean: Some(2.0) });
        assert_eq!(s.metrics[0].fusional.mean, Some(5.0));
        assert!(s.metrics[0].welch.is_none());
    }

    #[test]
    fn errors() {
        let p = profile();
        assert!(matches!(
            ResultSet::from_tables(&[table("language,x\ntur,1\n")], &p, Some(&["x".into()])),
            Err(Error::Format { .. })
        ));
        assert!(matches!(
            ResultSet::from_tables(&[table("lang,x\ntur,1\n")], &p, Some(&["y".into()])),
            Err(Error::Format { .. })
        ));
        assert!(ResultSet::from_tables(&[table("lang,x\n")], &p, None).is_err());
        assert!(matches!(
            ResultSet::from_tables(&[table("lang,x\nxyz,1\n")], &p, None),
            Err(Error::Input(_))
        ));
    }
}
