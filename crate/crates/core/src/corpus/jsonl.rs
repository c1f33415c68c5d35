//! One-record-per-line JSON corpus files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::CorpusError;

/// Reads every non-blank line of `path` as one record.
pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>, CorpusError> {
    let file = File::open(path.as_ref())?;
    parse_jsonl(BufReader::new(file))
}

pub fn parse_jsonl<T: DeserializeOwned, R: BufRead>(reader: R) -> Result<Vec<T>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|e| CorpusError::MalformedRecord { line: i + 1, reason: e.to_string() })?;
        out.push(record);
    }
    Ok(out)
}

/// Writes records in canonical compact form, one per line, each newline-terminated.
pub fn write_jsonl<T: Serialize>(records: &[T], path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{LabeledUtterance, Lang, PunctClass, RawUtterance};

    #[test]
    fn raw_record_line() {
        let text = "{\"text\":\"Mire, quería ver si me podían ayudar.\"}\n";
        let v: Vec<RawUtterance> = parse_jsonl(text.as_bytes()).unwrap();
        assert_eq!(v, [RawUtterance::new("Mire, quería ver si me podían ayudar.").unwrap()]);
    }

    #[test]
    fn empty_input() {
        let v: Vec<RawUtterance> = parse_jsonl(&b""[..]).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn malformed_line_reports_number() {
        let text = "{\"text\":\"hola\"}\n{\"text\":\"  \"}\n";
        let err = parse_jsonl::<RawUtterance, _>(text.as_bytes()).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedRecord { line: 2, .. }));

        let text = "{\"tokens\":[\"a\"],\"labels\":[\"NONE\",\"COMMA\"]}\n";
        let err = parse_jsonl::<LabeledUtterance, _>(text.as_bytes()).unwrap_err();
        assert!(matches!(err, CorpusError::MalformedRecord { line: 1, .. }));

        let text = "{\"tokens\":[\"a\"],\"labels\":[\"QUESTION\"]}\n";
        assert!(parse_jsonl::<LabeledUtterance, _>(text.as_bytes()).is_err());
    }

    #[test]
    fn golden_file_round_trip_is_byte_identical() {
        let golden = concat!(
            "{\"text\":\"Buenas tardes, ¿cómo le puedo ayudar?\",\"source\":\"indomain\",\"lang\":\"es\"}\n",
            "{\"text\":\"Hi, this is Tom, how can I help you today?\",\"lang\":\"en\"}\n",
            "{\"text\":\"Sí, da un poco de tristeza.\"}\n",
        );
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("golden.jsonl");
        std::fs::write(&p, golden).unwrap();
        let v: Vec<RawUtterance> = read_jsonl(&p).unwrap();
        assert_eq!(v[0].lang, Some(Lang::Es));
        let q = dir.path().join("out.jsonl");
        write_jsonl(&v, &q).unwrap();
        assert_eq!(std::fs::read_to_string(&q).unwrap(), golden);

        let golden = "{\"tokens\":[\"Hola\",\"cómo\"],\"labels\":[\"COMMA\",\"FULL_QUESTION\"],\"source\":\"x\"}\n";
        std::fs::write(&p, golden).unwrap();
        let v: Vec<LabeledUtterance> = read_jsonl(&p).unwrap();
        assert_eq!(v[0].labels(), [PunctClass::Comma, PunctClass::FullQuestion]);
        write_jsonl(&v, &q).unwrap();
        assert_eq!(std::fs::read_to_string(&q).unwrap(), golden);
    }

    #[test]
    fn missing_file_is_io_failure() {
        let err = read_jsonl::<RawUtterance>("/nonexistent/x.jsonl").unwrap_err();
        assert!(matches!(err, CorpusError::Io(_)));
    }
}
