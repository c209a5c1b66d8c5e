//! One JSON object per line:
//!
//! ```text
//! {"tokens":[..],"lemmas":[..],"pos":[..],"dep_heads":[..],"dep_rels":[..],
//!  "constituents":[[start,end,label],..],
//!  "frames":[{"predicate":2,"sense":"run.01","style":"dep","args":[[1,"A0"]]}],
//!  "ext_vectors":[[..],..]}
//! ```
//!
//! `dep_heads`/`dep_rels`, `constituents` and `ext_vectors` are optional.

use serde::{Deserialize, Serialize};

use super::sentence::{Arguments, DepArg, Frame, Sentence, SpanArg, Style, Token};
use super::tree::{Bracket, ConstTree, DepTree};
use super::CorpusError;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonSentence {
    tokens: Vec<String>,
    lemmas: Vec<String>,
    pos: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dep_heads: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dep_rels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constituents: Option<Vec<(usize, usize, String)>>,
    frames: Vec<JsonFrame>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ext_vectors: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonFrame {
    predicate: usize,
    #[serde(default)]
    sense: String,
    style: Style,
    args: Vec<JsonArg>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonArg {
    Dep(usize, String),
    Span(usize, usize, String),
}

pub fn read_jsonl(text: &str) -> Result<Vec<Sentence>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let at = |msg: String| CorpusError::Format { line: i + 1, msg };
        let js: JsonSentence = serde_json::from_str(line).map_err(|e| at(e.to_string()))?;
        let s = from_json(js).map_err(|e| at(e.to_string()))?;
        s.validate().map_err(|e| at(e.to_string()))?;
        out.push(s);
    }
    Ok(out)
}

pub fn write_jsonl(sentences: &[Sentence]) -> Result<String, CorpusError> {
    let mut out = String::new();
    for s in sentences {
        let line = serde_json::to_string(&to_json(s)).map_err(|e| CorpusError::Invalid(e.to_string()))?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn from_json(js: JsonSentence) -> Result<Sentence, CorpusError> {
    let n = js.tokens.len();
    if js.lemmas.len() != n || js.pos.len() != n {
        return Err(CorpusError::Invalid(format!(
            "{} tokens, {} lemmas, {} pos tags",
            n,
            js.lemmas.len(),
            js.pos.len()
        )));
    }
    let tokens = (0..n)
        .map(|i| Token::new(&js.tokens[i], &js.lemmas[i], &js.pos[i]))
        .collect();
    let mut s = Sentence::new(tokens);
    s.dep = match (js.dep_heads, js.dep_rels) {
        (None, None) => None,
        (Some(h), Some(r)) => Some(DepTree::new(h, r).map_err(|e| CorpusError::Invalid(e.to_string()))?),
        _ => {
            return Err(CorpusError::Invalid(
                "dep_heads and dep_rels must appear together".into(),
            ))
        }
    };
    if let Some(cs) = js.constituents {
        let brackets = cs.into_iter().map(|(s, e, l)| Bracket::new(s, e, &l)).collect();
        s.consts = Some(ConstTree::new(brackets, n).map_err(|e| CorpusError::Invalid(e.to_string()))?);
    }
    for f in js.frames {
        let args = match f.style {
            Style::Dep => Arguments::Dep(
                f.args
                    .into_iter()
                    .map(|a| match a {
                        JsonArg::Dep(index, role) => Ok(DepArg { index, role }),
                        JsonArg::Span(..) => Err(CorpusError::Invalid("span argument in a dep frame".into())),
                    })
                    .collect::<Result<_, _>>()?,
            ),
            Style::Span => Arguments::Span(
                f.args
                    .into_iter()
                    .map(|a| match a {
                        JsonArg::Span(start, end, role) => Ok(SpanArg { start, end, role }),
                        JsonArg::Dep(..) => Err(CorpusError::Invalid("dep argument in a span frame".into())),
                    })
                    .collect::<Result<_, _>>()?,
            ),
        };
        s.frames.push(Frame {
            predicate: f.predicate,
            sense: f.sense,
            args,
        });
    }
    s.ext_vectors = js.ext_vectors;
    Ok(s)
}

fn to_json(s: &Sentence) -> JsonSentence {
    JsonSentence {
        tokens: s.tokens.iter().map(|t| t.form.clone()).collect(),
        lemmas: s.tokens.iter().map(|t| t.lemma.clone()).collect(),
        pos: s.tokens.iter().map(|t| t.pos.clone()).collect(),
        dep_heads: s.dep.as_ref().map(|t| t.heads().to_vec()),
        dep_rels: s.dep.as_ref().map(|t| t.rels().to_vec()),
        constituents: s
            .consts
            .as_ref()
            .map(|c| c.brackets().iter().map(|b| (b.start, b.end, b.label.clone())).collect()),
        frames: s
            .frames
            .iter()
            .map(|f| JsonFrame {
                predicate: f.predicate,
                sense: f.sense.clone(),
                style: f.style(),
                args: match &f.args {
                    Arguments::Dep(a) => a.iter().map(|a| JsonArg::Dep(a.index, a.role.clone())).collect(),
                    Arguments::Span(a) => a
                        .iter()
                        .map(|a| JsonArg::Span(a.start, a.end, a.role.clone()))
                        .collect(),
                },
            })
            .collect(),
        ext_vectors: s.ext_vectors.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_sentence() {
        let s = read_jsonl(r#"{"tokens":["a"],"lemmas":["a"],"pos":["X"],"frames":[]}"#).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].len(), 1);
        assert!(s[0].dep.is_none() && s[0].consts.is_none());
    }

    #[test]
    fn span_frame() {
        let line = r#"{"tokens":["a","b","c","d"],"lemmas":["a","b","c","d"],"pos":["X","X","X","X"],"frames":[{"predicate":2,"style":"span","args":[[3,4,"A1"]]}]}"#;
        let s = read_jsonl(line).unwrap();
        assert_eq!(s[0].frames[0].span_args(), [SpanArg::new(3, 4, "A1")]);
        assert_eq!(read_jsonl(&write_jsonl(&s).unwrap()).unwrap(), s);
    }

    #[test]
    fn rejects_unknown_and_missing_fields() {
        let unknown = r#"{"tokens":["a"],"lemmas":["a"],"pos":["X"],"frames":[],"colour":1}"#;
        assert!(matches!(read_jsonl(unknown), Err(CorpusError::Format { line: 1, .. })));
        let missing = r#"{"tokens":["a"],"pos":["X"],"frames":[]}"#;
        let err = read_jsonl(missing).unwrap_err().to_string();
        assert!(err.contains("lemmas"), "{}", err);
    }

    #[test]
    fn rejects_out_of_range_argument() {
        let line =
            r#"{"tokens":["a"],"lemmas":["a"],"pos":["X"],"frames":[{"predicate":1,"style":"dep","args":[[2,"A0"]]}]}"#;
        assert!(read_jsonl(line).is_err());
    }
}
