use serde::{Deserialize, Serialize};

use super::tree::{ConstTree, DepTree};
use super::CorpusError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub form: String,
    pub lemma: String,
    pub pos: String,
    chars: Vec<char>,
}

impl Token {
    pub fn new(form: &str, lemma: &str, pos: &str) -> Self {
        Token {
            form: form.to_string(),
            lemma: lemma.to_string(),
            pos: pos.to_string(),
            chars: form.chars().collect(),
        }
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    Dep,
    Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DepArg {
    pub index: usize,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpanArg {
    pub start: usize,
    pub end: usize,
    pub role: String,
}

impl SpanArg {
    pub fn new(start: usize, end: usize, role: &str) -> Self {
        SpanArg {
            start,
            end,
            role: role.to_string(),
        }
    }

    pub fn overlaps(&self, other: &SpanArg) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arguments {
    Dep(Vec<DepArg>),
    Span(Vec<SpanArg>),
}

/// One predicate with its role-labeled arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub predicate: usize,
    pub sense: String,
    pub args: Arguments,
}

impl Frame {
    pub fn dep(predicate: usize, sense: &str, args: Vec<(usize, &str)>) -> Self {
        Frame {
            predicate,
            sense: sense.to_string(),
            args: Arguments::Dep(
                args.into_iter()
                    .map(|(index, role)| DepArg {
                        index,
                        role: role.to_string(),
                    })
                    .collect(),
            ),
        }
    }

    pub fn span(predicate: usize, sense: &str, args: Vec<(usize, usize, &str)>) -> Self {
        Frame {
            predicate,
            sense: sense.to_string(),
            args: Arguments::Span(args.into_iter().map(|(s, e, r)| SpanArg::new(s, e, r)).collect()),
        }
    }

    pub fn style(&self) -> Style {
        match self.args {
            Arguments::Dep(_) => Style::Dep,
            Arguments::Span(_) => Style::Span,
        }
    }

    pub fn dep_args(&self) -> &[DepArg] {
        match &self.args {
            Arguments::Dep(a) => a,
            Arguments::Span(_) => &[],
        }
    }

    pub fn span_args(&self) -> &[SpanArg] {
        match &self.args {
            Arguments::Span(a) => a,
            Arguments::Dep(_) => &[],
        }
    }

    pub fn num_args(&self) -> usize {
        match &self.args {
            Arguments::Dep(a) => a.len(),
            Arguments::Span(a) => a.len(),
        }
    }

    fn validate(&self, n: usize) -> Result<(), String> {
        if self.predicate < 1 || self.predicate > n {
            return Err(format!("predicate {} outside [1, {}]", self.predicate, n));
        }
        match &self.args {
            Arguments::Dep(args) => {
                for a in args {
                    if a.index < 1 || a.index > n {
                        return Err(format!("argument {} outside [1, {}]", a.index, n));
                    }
                }
            }
            Arguments::Span(args) => {
                for (i, a) in args.iter().enumerate() {
                    if a.start < 1 || a.start > a.end || a.end > n {
                        return Err(format!("span ({}, {}) outside [1, {}]", a.start, a.end, n));
                    }
                    if let Some(b) = args[i + 1..].iter().find(|b| a.overlaps(b)) {
                        return Err(format!(
                            "spans ({}, {}) and ({}, {}) overlap",
                            a.start, a.end, b.start, b.end
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// CoNLL-2009 columns that have no slot in [`Sentence`], kept so that
/// parse/write round-trips byte for byte.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConllExtras {
    pub plemma: Vec<String>,
    pub ppos: Vec<String>,
    pub feat: Vec<String>,
    pub pfeat: Vec<String>,
    /// The primary lemma/pos/tree fields were read from the predicted columns.
    pub predicted_primary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    /// The syntax models consume.
    pub dep: Option<DepTree>,
    /// The alternate dependency columns (PHEAD/PDEPREL when `dep` is gold).
    pub alt_dep: Option<DepTree>,
    pub consts: Option<ConstTree>,
    pub frames: Vec<Frame>,
    pub ext_vectors: Option<Vec<Vec<f64>>>,
    pub conll: Option<ConllExtras>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence {
            tokens,
            dep: None,
            alt_dep: None,
            consts: None,
            frames: Vec::new(),
            ext_vectors: None,
            conll: None,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Checks every cross-field invariant (index bounds, tree sizes, vector rows).
    pub fn validate(&self) -> Result<(), CorpusError> {
        let n = self.len();
        let invalid = |msg: String| CorpusError::Invalid(msg);
        if n == 0 {
            return Err(invalid("sentence has no tokens".into()));
        }
        if let Some(t) = self.tokens.iter().find(|t| t.form.is_empty()) {
            return Err(invalid(format!("empty form (lemma {:?})", t.lemma)));
        }
        for (name, tree) in [("dep", &self.dep), ("alt_dep", &self.alt_dep)] {
            if let Some(t) = tree {
                if t.len() != n {
                    return Err(invalid(format!("{} tree has {} nodes for {} tokens", name, t.len(), n)));
                }
            }
        }
        if let Some(c) = &self.consts {
            if c.len() != n {
                return Err(invalid(format!("constituency tree over {} tokens for {}", c.len(), n)));
            }
        }
        if let Some(v) = &self.ext_vectors {
            if v.len() != n {
                return Err(invalid(format!("{} external vectors for {} tokens", v.len(), n)));
            }
        }
        for f in &self.frames {
            f.validate(n).map_err(invalid)?;
        }
        Ok(())
    }

    pub fn frame_for(&self, predicate: usize) -> Option<&Frame> {
        self.frames.iter().find(|f| f.predicate == predicate)
    }

    /// Style shared by all frames, `None` when there are no frames.
    pub fn style(&self) -> Option<Style> {
        self.frames.first().map(Frame::style)
    }
}
