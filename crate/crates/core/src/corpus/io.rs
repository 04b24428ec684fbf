use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Deserialize;

use super::{Corpus, Epoch, PaperRecord};
use crate::error::{Error, Result};

#[derive(Deserialize)]
struct RawRecord {
    paper_id: String,
    #[serde(default)]
    date: Option<String>,
    #[serde(default)]
    month: Option<i64>,
    authors: Vec<String>,
    #[serde(default)]
    references: Vec<String>,
}

/// Loads a line-delimited JSON corpus, mapping `date` fields with the default epoch.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    load_corpus_with_epoch(path, Epoch::default())
}

pub fn load_corpus_with_epoch(path: impl AsRef<Path>, epoch: Epoch) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(file, path, epoch)
}

/// Reads JSONL records; `origin` only labels errors.
pub fn read_corpus(reader: impl Read, origin: &Path, epoch: Epoch) -> Result<Corpus> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    let mut papers = Vec::new();
    let mut first_line: HashMap<String, usize> = HashMap::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord =
            serde_json::from_str(&line).map_err(|e| parse_err(lineno, e.to_string()))?;

        let from_date = raw
            .date
            .as_deref()
            .map(|d| epoch.month_index(d))
            .transpose()
            .map_err(|e| parse_err(lineno, e.to_string()))?;
        let from_index = raw
            .month
            .map(|m| u32::try_from(m).map_err(|_| parse_err(lineno, format!("negative month {m}"))))
            .transpose()?;
        let month = match (from_date, from_index) {
            (Some(a), Some(b)) if a != b => {
                return Err(parse_err(
                    lineno,
                    format!("`date` gives month {a} but `month` is {b}"),
                ))
            }
            (Some(m), _) | (None, Some(m)) => m,
            (None, None) => return Err(parse_err(lineno, "missing `date` or `month`".into())),
        };

        if let Some(prev) = first_line.insert(raw.paper_id.clone(), lineno) {
            return Err(parse_err(
                lineno,
                format!(
                    "duplicate paper_id `{}` (first on line {prev})",
                    raw.paper_id
                ),
            ));
        }
        let record = PaperRecord {
            paper_id: raw.paper_id,
            month,
            author_ids: raw.authors,
            reference_ids: raw.references,
        };
        record
            .check()
            .map_err(|e| parse_err(lineno, e.to_string()))?;
        papers.push(record);
    }
    Corpus::new(papers)
}

/// Writes one JSON object per line with integer `month` fields.
pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for p in corpus.papers() {
        serde_json::to_writer(&mut w, p)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<Corpus> {
        read_corpus(text.as_bytes(), Path::new("mem.jsonl"), Epoch::default())
    }

    #[test]
    fn loads_and_sorts() {
        let c = read(concat!(
            r#"{"paper_id":"c","month":5,"authors":["z"],"references":["a","b"]}"#,
            "\n",
            r#"{"paper_id":"a","date":"1893-01","authors":["x","y"],"references":[]}"#,
            "\n\n",
            r#"{"paper_id":"b","month":2,"authors":["y"]}"#,
            "\n"
        ))
        .unwrap();
        let ids: Vec<_> = c.papers().iter().map(|p| p.paper_id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert!(c.get("b").unwrap().reference_ids.is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err =
            read("{\"paper_id\":\"a\",\"month\":0,\"authors\":[\"x\"]}\nnot json\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let err = read(concat!(
            r#"{"paper_id":"a","month":0,"authors":["x"]}"#,
            "\n",
            r#"{"paper_id":"a","month":1,"authors":["y"]}"#
        ))
        .unwrap_err();
        assert!(err.to_string().contains("duplicate paper_id `a`"), "{err}");
        assert!(matches!(err, Error::Parse { line: 2, .. }));

        let err = read(r#"{"paper_id":"a","month":0,"authors":[]}"#).unwrap_err();
        assert!(err.to_string().contains("empty author list"), "{err}");

        let err = read(r#"{"paper_id":"a","month":-1,"authors":["x"]}"#).unwrap_err();
        assert!(err.to_string().contains("negative month"), "{err}");

        let err = read(r#"{"paper_id":"a","authors":["x"]}"#).unwrap_err();
        assert!(err.to_string().contains("missing"), "{err}");

        let err =
            read(r#"{"paper_id":"a","date":"1893-02","month":0,"authors":["x"]}"#).unwrap_err();
        assert!(err.to_string().contains("gives month 1"), "{err}");
    }

    #[test]
    fn write_then_load_round_trips() {
        let c = Corpus::new(vec![
            PaperRecord::new("a", 0, &["x", "y"], &[]),
            PaperRecord::new("b", 3, &["y"], &["a", "ghost"]),
        ])
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        write_corpus(&c, &path).unwrap();
        assert_eq!(load_corpus(&path).unwrap(), c);
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_corpus("/no/such/corpus.jsonl").unwrap_err();
        assert!(err.to_string().contains("/no/such/corpus.jsonl"));
        assert_eq!(err.exit_code(), 2);
    }
}
