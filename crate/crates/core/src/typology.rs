use std::collections::HashMap;
use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coarse morphological type of a language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphType {
    Agglutinative,
    Fusional,
}

impl MorphType {
    pub fn as_str(self) -> &'static str {
        match self {
            MorphType::Agglutinative => "agglutinative",
            MorphType::Fusional => "fusional",
        }
    }
}

impl fmt::Display for MorphType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MorphType {
    type Err = Error;

    /// Accepts the full names and the `agg`/`fus` abbreviations, any case.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "agglutinative" | "agg" => Ok(MorphType::Agglutinative),
            "fusional" | "fus" => Ok(MorphType::Fusional),
            other => Err(Error::Input(format!("unknown morphological type {other:?}"))),
        }
    }
}

/// Language to morphological type, read from a CSV with `lang` and
/// `morph_type` columns.
pub type Profile = HashMap<String, MorphType>;

pub fn read_profile(path: impl AsRef<Path>) -> Result<Profile> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_profile_from(file).map_err(|e| match e {
        Error::Format { context, message } => Error::Format {
            context: format!("{}: {context}", path.display()),
            message,
        },
        other => other,
    })
}

pub fn read_profile_from(reader: impl io::Read) -> Result<Profile> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::format("header", e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::format("header", format!("missing column {name:?}")))
    };
    let (lang_col, type_col) = (col("lang")?, col("morph_type")?);
    let mut out = Profile::new();
    for (i, rec) in rdr.records().enumerate() {
        let ctx = format!("line {}", i + 2);
        let rec = rec.map_err(|e| Error::format(&ctx, e.to_string()))?;
        let lang = rec.get(lang_col).unwrap_or_default();
        let ty: MorphType = rec
            .get(type_col)
            .unwrap_or_default()
            .parse()
            .map_err(|e: Error| Error::format(&ctx, e.to_string()))?;
        if out.insert(lang.to_owned(), ty).is_some_and(|prev| prev != ty) {
            return Err(Error::format(ctx, format!("conflicting types for {lang}")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names_and_abbreviations() {
        assert_eq!("AGG".parse::<MorphType>().unwrap(), MorphType::Agglutinative);
        assert_eq!(" fusional ".parse::<MorphType>().unwrap(), MorphType::Fusional);
        assert!("isolating".parse::<MorphType>().is_err());
    }

    #[test]
    fn profile_csv() {
        let p = read_profile_from("lang,morph_type\ntur,agglutinative\nspa,fus\n".as_bytes()).unwrap();
        assert_eq!(p["tur"], MorphType::Agglutinative);
        assert_eq!(p["spa"], MorphType::Fusional);
        let err = read_profile_from("lang,type\ntur,agg\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("morph_type"));
        let err = read_profile_from("lang,morph_type\ntur,agg\ntur,fus\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 3"));
    }
}
