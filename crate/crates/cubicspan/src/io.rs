//! Line-oriented corpus format and panic-free parsers for everything that
//! crosses the CLI boundary: surface records, point strings, and filter
//! strings.  Malformed input is always an error value, never a panic.

use crate::forms::CubicForm;
use crate::gf::{Field, FieldError};
use crate::projgeom::{normalize_point, ProjPoint};
use serde::{Deserialize, Serialize};
use std::io::BufRead;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("bad record: {0}")]
    BadRecord(String),
    #[error("bad point: {0}")]
    BadPoint(String),
    #[error("bad filter: {0}")]
    BadFilter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Field description as serialized: `{"p": …, "k": …, "modulus": […]}` with
/// the modulus constant-term first; omitted modulus means the default one.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct FieldDesc {
    pub p: u64,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modulus: Option<Vec<u32>>,
}

impl FieldDesc {
    pub fn of_field(f: &Field) -> FieldDesc {
        FieldDesc {
            p: f.characteristic() as u64,
            k: f.degree(),
            modulus: Some(f.modulus().to_vec()),
        }
    }

    pub fn to_field(&self) -> Result<Field, IoError> {
        Ok(Field::new(self.p, self.k, self.modulus.clone())?)
    }
}

/// One surface per line: 20 coefficient vectors in descending-lexicographic
/// monomial order, each a length-k residue vector, constant term first.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct CorpusRecord {
    pub field: FieldDesc,
    pub coeffs: Vec<Vec<u32>>,
}

impl CorpusRecord {
    pub fn from_surface(f: &Field, form: &CubicForm) -> CorpusRecord {
        CorpusRecord {
            field: FieldDesc::of_field(f),
            coeffs: form.coeffs().iter().map(|&c| f.to_coeffs(c)).collect(),
        }
    }

    /// Reconstruct the field and the form, validating everything.
    pub fn build(&self) -> Result<(Field, CubicForm), IoError> {
        let f = self.field.to_field()?;
        if self.coeffs.len() != 20 {
            return Err(IoError::BadRecord(format!(
                "expected 20 coefficient vectors, got {}",
                self.coeffs.len()
            )));
        }
        let mut c = [f.zero(); 20];
        for (i, v) in self.coeffs.iter().enumerate() {
            c[i] = f.from_coeffs(v)?;
        }
        let form = CubicForm::new(c)
            .map_err(|_| IoError::BadRecord("zero form".into()))?;
        Ok((f, form))
    }
}

pub fn parse_corpus_line(line: &str) -> Result<CorpusRecord, IoError> {
    Ok(serde_json::from_str(line)?)
}

pub fn write_corpus_line(rec: &CorpusRecord) -> String {
    serde_json::to_string(rec).expect("plain data serializes")
}

/// All records of a corpus stream, one JSON object per non-blank line.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<CorpusRecord>, IoError> {
    let mut out = Vec::new();
    for (ln, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = parse_corpus_line(&line)
            .map_err(|e| IoError::BadRecord(format!("line {}: {e}", ln + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_corpus_file(path: &std::path::Path) -> Result<Vec<CorpusRecord>, IoError> {
    let file = std::fs::File::open(path)?;
    read_corpus(std::io::BufReader::new(file))
}

/// Parse "a:b:c:d" into a projective point.  Each component is the element's
/// index: the coefficient vector read as a base-p integer, constant term as
/// the least significant digit.
pub fn parse_point(f: &Field, s: &str) -> Result<ProjPoint, IoError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(IoError::BadPoint(format!(
            "expected 4 components separated by ':', got {}",
            parts.len()
        )));
    }
    let mut v = [f.zero(); 4];
    for (i, part) in parts.iter().enumerate() {
        let idx: u32 = part
            .trim()
            .parse()
            .map_err(|_| IoError::BadPoint(format!("component {:?} is not an integer", part)))?;
        v[i] = f
            .from_index(idx)
            .ok_or_else(|| IoError::BadPoint(format!("component {idx} exceeds the field size")))?;
    }
    normalize_point(f, v).map_err(|_| IoError::BadPoint("all components are zero".into()))
}

/// Acceptance predicate for corpus sampling.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CorpusFilter {
    pub require_smooth: bool,
    pub min_klines: usize,
    pub forbid_skew_pair: bool,
    pub require_inseparable_line: bool,
    pub max_attempts: u64,
}

impl Default for CorpusFilter {
    fn default() -> Self {
        CorpusFilter {
            require_smooth: false,
            min_klines: 0,
            forbid_skew_pair: false,
            require_inseparable_line: false,
            max_attempts: 10_000,
        }
    }
}

impl CorpusFilter {
    /// Whether any predicate needs a constructed surface model.
    pub fn needs_model(&self) -> bool {
        self.require_smooth
            || self.min_klines > 0
            || self.forbid_skew_pair
            || self.require_inseparable_line
    }
}

/// Parse a comma-separated filter: `smooth`, `lines>=N`, `no-skew`,
/// `insep-line`.  The empty string is the pass-everything filter.
pub fn parse_filter(s: &str) -> Result<CorpusFilter, IoError> {
    let mut filter = CorpusFilter::default();
    for token in s.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        if token == "smooth" {
            filter.require_smooth = true;
        } else if token == "no-skew" {
            filter.forbid_skew_pair = true;
        } else if token == "insep-line" {
            filter.require_inseparable_line = true;
        } else if let Some(n) = token.strip_prefix("lines>=") {
            filter.min_klines = n
                .trim()
                .parse()
                .map_err(|_| IoError::BadFilter(format!("bad line count in {token:?}")))?;
        } else {
            return Err(IoError::BadFilter(format!("unknown token {token:?}")));
        }
    }
    Ok(filter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{gf, lcg_form};

    #[test]
    fn field_desc_round_trip_and_default_modulus() {
        let f = gf(2, 3);
        let desc = FieldDesc::of_field(&f);
        assert_eq!(desc.modulus.as_deref(), Some(&[1, 1, 0, 1][..]));
        let back = desc.to_field().unwrap();
        assert_eq!(back.modulus(), f.modulus());
        // Omitted modulus selects the same default.
        let implicit: FieldDesc = serde_json::from_str(r#"{"p":2,"k":3}"#).unwrap();
        assert_eq!(implicit.to_field().unwrap().modulus(), f.modulus());
    }

    #[test]
    fn corpus_record_round_trip() {
        for f in [gf(2, 3), gf(3, 2), gf(17, 1)] {
            let form = lcg_form(&f, 42);
            let rec = CorpusRecord::from_surface(&f, &form);
            let line = write_corpus_line(&rec);
            let parsed = parse_corpus_line(&line).unwrap();
            assert_eq!(parsed, rec);
            let (f2, form2) = parsed.build().unwrap();
            assert_eq!(f2.order(), f.order());
            assert_eq!(form2.coeffs(), form.coeffs());
        }
    }

    #[test]
    fn malformed_records_error_without_panic() {
        for bad in [
            "",
            "{",
            "[1,2,3]",
            r#"{"field":{"p":4,"k":1},"coeffs":[]}"#,
            r#"{"field":{"p":5,"k":1},"coeffs":[[1]]}"#,
            r#"{"field":{"p":5,"k":1},"coeffs":[[7],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0]]}"#,
            r#"{"field":{"p":5,"k":1,"modulus":[1,1]},"coeffs":[]}"#,
            r#"{"field":{"p":2,"k":2,"modulus":[1,1,1,1]},"coeffs":[]}"#,
            r#"{"field":{"p":99999999999,"k":1},"coeffs":[]}"#,
        ] {
            let parsed = parse_corpus_line(bad);
            if let Ok(rec) = parsed {
                assert!(rec.build().is_err(), "accepted: {bad}");
            }
        }
        // A zero form parses but cannot build.
        let zero = r#"{"field":{"p":5,"k":1},"coeffs":[[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0],[0]]}"#;
        assert!(parse_corpus_line(zero).unwrap().build().is_err());
    }

    #[test]
    fn point_parsing() {
        let f = gf(2, 3);
        let p = parse_point(&f, "1:0:7:3").unwrap();
        assert_eq!(parse_point(&f, " 1 : 0 : 7 : 3 ").unwrap(), p);
        assert!(parse_point(&f, "1:0:7").is_err());
        assert!(parse_point(&f, "1:0:7:3:2").is_err());
        assert!(parse_point(&f, "1:0:7:x").is_err());
        assert!(parse_point(&f, "8:0:0:0").is_err(), "index 8 out of range for GF(8)");
        assert!(parse_point(&f, "0:0:0:0").is_err());
        // Scaling collapses to the same canonical point.
        let a = parse_point(&f, "2:2:0:0").unwrap();
        let b = parse_point(&f, "1:1:0:0").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn filter_parsing() {
        let filter = parse_filter("smooth, lines>=2 ,no-skew,insep-line").unwrap();
        assert!(filter.require_smooth);
        assert_eq!(filter.min_klines, 2);
        assert!(filter.forbid_skew_pair);
        assert!(filter.require_inseparable_line);
        assert!(filter.needs_model());
        let empty = parse_filter("").unwrap();
        assert_eq!(empty, CorpusFilter::default());
        assert!(!empty.needs_model());
        assert!(parse_filter("bogus").is_err());
        assert!(parse_filter("lines>=x").is_err());
    }

    #[test]
    fn corpus_stream_skips_blank_lines_and_reports_position() {
        let f = gf(5, 1);
        let rec = CorpusRecord::from_surface(&f, &lcg_form(&f, 7));
        let text = format!("{}\n\n{}\n", write_corpus_line(&rec), write_corpus_line(&rec));
        let records = read_corpus(text.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        let bad = format!("{}\nnot json\n", write_corpus_line(&rec));
        let err = read_corpus(bad.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
