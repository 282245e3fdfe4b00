//! Column-oriented CSV tables and `y ~ a + b` model formulas.

use std::collections::BTreeSet;
use std::path::Path;

use super::ols::Design;
use super::ttest::{welch_t, TTestResult};
use crate::error::{Error, Result};

/// A string-valued table read from a CSV file with a header row.
///
/// Columns whose non-empty values all parse as numbers are numeric; any
/// other column is categorical. Empty cells are missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl DataTable {
    pub fn new(headers: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != headers.len() {
                return Err(Error::format(
                    format!("row {}", i + 2),
                    format!("{} fields, header has {}", r.len(), headers.len()),
                ));
            }
        }
        Ok(DataTable { headers, rows })
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file).map_err(|e| match e {
            Error::Format { context, message } => Error::Format {
                context: format!("{}: {context}", path.display()),
                message,
            },
            other => other,
        })
    }

    pub fn from_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
        let csv_err = |e: csv::Error| {
            let ctx = e
                .position()
                .map_or_else(|| "csv".to_string(), |p| format!("line {}", p.line()));
            Error::format(ctx, e.to_string())
        };
        let headers: Vec<String> = rdr
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            rows.push(rec.iter().map(|v| v.trim().to_string()).collect());
        }
        Self::new(headers, rows)
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.headers.iter().any(|h| h == name)
    }

    fn col_index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::format("header", format!("missing column {name:?}")))
    }

    pub fn column(&self, name: &str) -> Result<Vec<&str>> {
        let i = self.col_index(name)?;
        Ok(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn is_numeric(&self, name: &str) -> Result<bool> {
        let col = self.column(name)?;
        let mut any = false;
        for v in col.into_iter().filter(|v| !v.is_empty()) {
            any = true;
            if v.parse::<f64>().is_err() {
                return Ok(false);
            }
        }
        Ok(any)
    }

    /// Numeric view of a column; missing cells become `None`.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        self.column(name)?
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                if v.is_empty() {
                    return Ok(None);
                }
                v.parse::<f64>().map(Some).map_err(|_| {
                    Error::format(
                        format!("row {}, column {name:?}", i + 2),
                        format!("not a number: {v:?}"),
                    )
                })
            })
            .collect()
    }

    /// Keeps rows where every named column is non-empty.
    pub fn complete_rows(&self, names: &[&str]) -> Result<DataTable> {
        let idx: Vec<usize> = names.iter().map(|n| self.col_index(n)).collect::<Result<_>>()?;
        Ok(DataTable {
            headers: self.headers.clone(),
            rows: self
                .rows
                .iter()
                .filter(|r| idx.iter().all(|&i| !r[i].is_empty()))
                .cloned()
                .collect(),
        })
    }

    /// Response vector and design matrix for `formula`, intercept included.
    /// Rows with a missing value in any used column are dropped.
    pub fn model_frame(&self, formula: &Formula) -> Result<(Vec<f64>, Design)> {
        let mut used: Vec<&str> = vec![formula.response.as_str()];
        used.extend(formula.terms.iter().map(String::as_str));
        let t = self.complete_rows(&used)?;
        let y: Vec<f64> = t
            .numeric_column(&formula.response)?
            .into_iter()
            .map(|v| v.expect("complete"))
            .collect();
        let mut design = Design::intercept_only(t.n_rows());
        for term in &formula.terms {
            design = if t.is_numeric(term)? {
                let x: Vec<f64> = t
                    .numeric_column(term)?
                    .into_iter()
                    .map(|v| v.expect("complete"))
                    .collect();
                design.with_numeric(term, &x)?
            } else {
                design.with_categorical(term, &t.column(term)?)?
            };
        }
        Ok((y, design))
    }

    /// Welch test of `value` between the two levels of `group` (sorted, so
    /// "agglutinative" is group a and "fusional" group b).
    pub fn welch_by_group(&self, value: &str, group: &str) -> Result<GroupTest> {
        let t = self.complete_rows(&[value, group])?;
        let groups = t.column(group)?;
        let levels: BTreeSet<&str> = groups.iter().copied().collect();
        if levels.len() != 2 {
            return Err(Error::Stat(format!(
                "column {group:?} must have exactly 2 levels, found {}",
                levels.len()
            )));
        }
        let levels: Vec<&str> = levels.into_iter().collect();
        let vals: Vec<f64> = t
            .numeric_column(value)?
            .into_iter()
            .map(|v| v.expect("complete"))
            .collect();
        let pick = |lvl: &str| -> Vec<f64> {
            vals.iter()
                .zip(&groups)
                .filter(|(_, g)| **g == lvl)
                .map(|(v, _)| *v)
                .collect()
        };
        let result = welch_t(&pick(levels[0]), &pick(levels[1]))?;
        Ok(GroupTest {
            value: value.to_string(),
            group_a: levels[0].to_string(),
            group_b: levels[1].to_string(),
            result,
        })
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GroupTest {
    pub value: String,
    pub group_a: String,
    pub group_b: String,
    pub result: TTestResult,
}

/// `response ~ term + term + ...`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub response: String,
    pub terms: Vec<String>,
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lhs, rhs) = s
            .split_once('~')
            .ok_or_else(|| Error::Input(format!("formula {s:?} has no '~'")))?;
        let response = lhs.trim().to_string();
        if response.is_empty() {
            return Err(Error::Input(format!("formula {s:?} has no response")));
        }
        let mut terms = Vec::new();
        for t in rhs.split('+').map(str::trim) {
            match t {
                "" => return Err(Error::Input(format!("formula {s:?} has an empty term"))),
                "1" => {}
                t if terms.iter().any(|x| x == t) => {}
                t => terms.push(t.to_string()),
            }
        }
        Ok(Formula { response, terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> DataTable {
        let csv = "lang,morph_type,score,ppl\n\
                   a,agg,0.5,10\n\
                   b,agg,0.7,\n\
                   c,fus,0.4,12\n\
                   d,fus,0.2,15\n\
                   e,agg,0.9,9\n";
        DataTable::from_reader(csv.as_bytes()).unwrap()
    }

    #[test]
    fn parses_formulas() {
        let f: Formula = "ppl ~ morph_type + score + 1".parse().unwrap();
        assert_eq!(f.response, "ppl");
        assert_eq!(f.terms, vec!["morph_type", "score"]);
        assert!("ppl morph_type".parse::<Formula>().is_err());
        assert!("ppl ~ a + ".parse::<Formula>().is_err());
    }

    #[test]
    fn model_frame_drops_incomplete_rows() {
        let f: Formula = "ppl ~ morph_type + score".parse().unwrap();
        let (y, d) = table().model_frame(&f).unwrap();
        assert_eq!(y, vec![10.0, 12.0, 15.0, 9.0]);
        assert_eq!(d.names(), &["(Intercept)", "morph_type[fus]", "score"]);
    }

    #[test]
    fn welch_by_group_orders_levels() {
        let g = table().welch_by_group("score", "morph_type").unwrap();
        assert_eq!((g.group_a.as_str(), g.group_b.as_str()), ("agg", "fus"));
        assert!((g.result.mean_a - 0.7).abs() < 1e-12);
        assert!((g.result.mean_b - 0.3).abs() < 1e-12);
    }

    #[test]
    fn missing_column_is_a_format_error() {
        assert!(matches!(table().column("family"), Err(Error::Format { .. })));
    }
}
