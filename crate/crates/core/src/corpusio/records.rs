use std::path::Path;

use crate::corpusio::{TokenizedSentence, Tokenizer};
use crate::error::{Error, Result};

/// One human-judged segment.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub source: String,
    pub hypothesis: String,
    pub human_score: f64,
    pub reference: Option<String>,
}

pub fn load_eval_dataset(path: impl AsRef<Path>) -> Result<Vec<EvalRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_eval_dataset(&text)
}

/// Parses `source \t hypothesis \t human_score [\t reference]` rows. A first
/// row whose third field is not numeric is taken to be a header.
pub fn parse_eval_dataset(text: &str) -> Result<Vec<EvalRecord>> {
    let mut out = Vec::new();
    let mut first = true;
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(Error::Parse {
                row,
                message: format!("expected 3 or 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let parsed = fields[2].trim().parse::<f64>();
        if first {
            first = false;
            if parsed.is_err() {
                continue;
            }
        }
        let human_score = parsed.map_err(|_| Error::Parse {
            row,
            message: format!("score {:?} is not a number", fields[2]),
        })?;
        if !human_score.is_finite() {
            return Err(Error::Parse {
                row,
                message: "score is not finite".into(),
            });
        }
        out.push(EvalRecord {
            source: fields[0].to_owned(),
            hypothesis: fields[1].to_owned(),
            human_score,
            reference: fields.get(3).map(|s| s.to_string()),
        });
    }
    Ok(out)
}

/// A mined or judged sentence pair. The indices point into the source and
/// target pools the pair was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPair {
    pub source_index: usize,
    pub target_index: usize,
    pub source: TokenizedSentence,
    pub target: TokenizedSentence,
    pub score: f64,
}

/// Writes `source \t target \t score` lines. Tabs and newlines inside the
/// sentence text are replaced by spaces.
pub fn write_scored_pairs(path: impl AsRef<Path>, pairs: &[ScoredPair]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_scored_pairs(pairs)).map_err(|e| Error::io(path, e))
}

pub fn format_scored_pairs(pairs: &[ScoredPair]) -> String {
    let clean = |s: &str| s.replace(['\t', '\n', '\r'], " ");
    let mut out = String::new();
    for p in pairs {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            clean(&p.source.text),
            clean(&p.target.text),
            p.score
        ));
    }
    out
}

/// Reads a scored-pair TSV. Pool indices are not stored in the file; the
/// row number is used for both.
pub fn read_scored_pairs(path: impl AsRef<Path>, tokenizer: Tokenizer) -> Result<Vec<ScoredPair>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [src, tgt, score] = fields[..] else {
            return Err(Error::Parse {
                row: i + 1,
                message: "expected source, target, score".into(),
            });
        };
        let score: f64 = score.trim().parse().map_err(|_| Error::Parse {
            row: i + 1,
            message: format!("score {score:?} is not a number"),
        })?;
        if !score.is_finite() {
            return Err(Error::Parse {
                row: i + 1,
                message: "score is not finite".into(),
            });
        }
        let idx = out.len();
        out.push(ScoredPair {
            source_index: idx,
            target_index: idx,
            source: TokenizedSentence::new(src, tokenizer),
            target: TokenizedSentence::new(tgt, tokenizer),
            score,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_numeric_rows() {
        let r = parse_eval_dataset("a\tb\t1.0\nc\td\t-2\ne\tf\t0.5\tref\n").unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r[1].human_score, -2.0);
        assert_eq!(r[2].reference.as_deref(), Some("ref"));
    }

    #[test]
    fn header_is_detected() {
        let r = parse_eval_dataset("src\thyp\tscore\nx\ty\t0.3\n").unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].source, "x");
    }

    #[test]
    fn bad_score_names_row() {
        let err = parse_eval_dataset("a\tb\t1\nc\td\tabc\n").unwrap_err();
        match err {
            Error::Parse { row, message } => {
                assert_eq!(row, 2);
                assert!(message.contains("abc"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scored_pairs_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pairs.tsv");
        let pairs = vec![ScoredPair {
            source_index: 3,
            target_index: 9,
            source: TokenizedSentence::new("a b\tc", Tokenizer::Default),
            target: TokenizedSentence::new("x y", Tokenizer::Default),
            score: -0.1234567890123,
        }];
        write_scored_pairs(&p, &pairs).unwrap();
        let back = read_scored_pairs(&p, Tokenizer::Default).unwrap();
        assert_eq!(back[0].source.text, "a b c");
        assert_eq!(back[0].score, pairs[0].score);
    }
}
