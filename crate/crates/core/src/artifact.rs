//! Artifact output: atomic file writes and the JSON-lines / TSV formats for
//! recommendation lists.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::diffusion::RecommendationList;
use crate::error::{Error, Result};

/// Writes `bytes` to `path` through a temporary file in the same directory
/// followed by a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Formats `x` with `digits` significant digits, in the style of C's `%.*g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One JSON object per list:
/// `{"author":..,"recommendations":[{"topic":..,"score":..,"rank":..}]}` with
/// scores at 12 significant digits. An optional leading `{"meta":..}` line
/// carries run provenance.
pub fn recommendations_jsonl(lists: &[RecommendationList], meta: Option<&serde_json::Value>) -> String {
    let mut out = String::new();
    if let Some(meta) = meta {
        let _ = writeln!(out, "{}", serde_json::json!({ "meta": meta }));
    }
    for list in lists {
        let author = serde_json::to_string(&list.target).expect("string serialises");
        let _ = write!(out, "{{\"author\":{author},\"recommendations\":[");
        for (i, e) in list.entries.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let topic = serde_json::to_string(&e.topic).expect("string serialises");
            let _ = write!(
                out,
                "{{\"topic\":{topic},\"score\":{},\"rank\":{}}}",
                format_significant(e.score, 12),
                i + 1
            );
        }
        out.push_str("]}\n");
    }
    out
}

/// `author<TAB>topic<TAB>score` rows, one per recommendation entry.
pub fn recommendations_tsv(lists: &[RecommendationList], header: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        let _ = writeln!(out, "# {h}");
    }
    out.push_str("author\ttopic\tscore\n");
    for list in lists {
        for e in &list.entries {
            let _ = writeln!(
                out,
                "{}\t{}\t{}",
                list.target.replace(['\t', '\n'], " "),
                e.topic.replace(['\t', '\n'], " "),
                format_significant(e.score, 12)
            );
        }
    }
    out
}

/// Parses recommendation JSON lines back into lists; a leading meta line is
/// skipped. Topic indices are not part of the format and are set to the
/// entry's position.
pub fn read_recommendations_jsonl(path: &Path) -> Result<Vec<RecommendationList>> {
    #[derive(serde::Deserialize)]
    struct Entry {
        topic: String,
        score: f64,
    }
    #[derive(serde::Deserialize)]
    struct Line {
        author: String,
        recommendations: Vec<Entry>,
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with("{\"meta\"") {
            continue;
        }
        let parsed: Line = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: path.to_owned(),
            line: n + 1,
            message: e.to_string(),
        })?;
        out.push(RecommendationList {
            target: parsed.author,
            entries: parsed
                .recommendations
                .into_iter()
                .enumerate()
                .map(|(i, e)| crate::diffusion::RecEntry {
                    topic: e.topic,
                    topic_index: i as u32,
                    score: e.score,
                })
                .collect(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::RecEntry;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.75, 12), "0.75");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(2.0 / 3.0, 12), "0.666666666667");
        assert_eq!(format_significant(123456.0, 12), "123456");
        assert_eq!(format_significant(1.5e-7, 12), "1.5e-07");
        assert_eq!(format_significant(1.0e15, 12), "1e+15");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(0.001234, 3), "0.00123");
    }

    #[test]
    fn jsonl_shape_and_round_trip() {
        let lists = vec![RecommendationList {
            target: "A \"x\"".into(),
            entries: vec![
                RecEntry { topic: "T2".into(), topic_index: 1, score: 0.75 },
                RecEntry { topic: "T3".into(), topic_index: 2, score: 0.75 },
            ],
        }];
        let text = recommendations_jsonl(&lists, Some(&serde_json::json!({"seed": 7})));
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), r#"{"meta":{"seed":7}}"#);
        assert_eq!(
            lines.next().unwrap(),
            r#"{"author":"A \"x\"","recommendations":[{"topic":"T2","score":0.75,"rank":1},{"topic":"T3","score":0.75,"rank":2}]}"#
        );
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.jsonl");
        write_atomic(&p, text.as_bytes()).unwrap();
        let back = read_recommendations_jsonl(&p).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].target, "A \"x\"");
        assert_eq!(back[0].entries[1].topic, "T3");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn atomic_write_to_missing_dir_fails() {
        assert!(write_atomic(Path::new("/nonexistent/dir/x"), b"x").is_err());
    }
}
