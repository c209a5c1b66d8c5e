use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::sentence::Sentence;

pub const PAD: usize = 0;
pub const UNK: usize = 1;

const PAD_SYMBOL: &str = "<pad>";
const UNK_SYMBOL: &str = "<unk>";

/// Dense symbol table with `PAD = 0` and `UNK = 1` reserved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "VocabRepr", into = "VocabRepr")]
pub struct Vocab {
    symbols: Vec<String>,
    counts: Vec<usize>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabRepr {
    symbols: Vec<String>,
    counts: Vec<usize>,
}

impl From<VocabRepr> for Vocab {
    fn from(r: VocabRepr) -> Self {
        let index = r.symbols.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Vocab {
            symbols: r.symbols,
            counts: r.counts,
            index,
        }
    }
}

impl From<Vocab> for VocabRepr {
    fn from(v: Vocab) -> Self {
        VocabRepr {
            symbols: v.symbols,
            counts: v.counts,
        }
    }
}

impl Default for Vocab {
    fn default() -> Self {
        Vocab::from(VocabRepr {
            symbols: vec![PAD_SYMBOL.into(), UNK_SYMBOL.into()],
            counts: vec![0, 0],
        })
    }
}

impl Vocab {
    /// Symbols seen at least `min_count` times, ordered by descending count
    /// and then by first occurrence.
    pub fn build<I, S>(symbols: I, min_count: usize) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut order: Vec<(String, usize)> = Vec::new();
        let mut seen: HashMap<String, usize> = HashMap::new();
        for s in symbols {
            let s = s.as_ref();
            match seen.get(s) {
                Some(&i) => order[i].1 += 1,
                None => {
                    seen.insert(s.to_string(), order.len());
                    order.push((s.to_string(), 1));
                }
            }
        }
        // stable sort keeps first-occurrence order among equal counts
        order.sort_by_key(|e| std::cmp::Reverse(e.1));
        let mut v = Vocab::default();
        for (s, c) in order {
            if c >= min_count.max(1) && !v.index.contains_key(&s) {
                v.index.insert(s.clone(), v.symbols.len());
                v.symbols.push(s);
                v.counts.push(c);
            }
        }
        v
    }

    /// Id of `symbol`, or `UNK`.
    pub fn id(&self, symbol: &str) -> usize {
        self.get(symbol).unwrap_or(UNK)
    }

    pub fn get(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn symbol(&self, id: usize) -> &str {
        &self.symbols[id]
    }

    pub fn count(&self, id: usize) -> usize {
        self.counts[id]
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Non-reserved symbols in id order.
    pub fn symbols(&self) -> &[String] {
        &self.symbols[2..]
    }
}

/// One vocabulary per input or label field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabularies {
    pub form: Vocab,
    pub lemma: Vocab,
    pub pos: Vocab,
    pub role: Vocab,
    pub relation: Vocab,
    pub sense: Vocab,
    pub character: Vocab,
    pub constituent: Vocab,
}

/// `min_count` thresholds forms, lemmas and characters; tag and label
/// vocabularies keep every symbol.
pub fn build_vocab(sentences: &[Sentence], min_count: usize) -> Vocabularies {
    let tokens = || sentences.iter().flat_map(|s| &s.tokens);
    let frames = || sentences.iter().flat_map(|s| &s.frames);
    let roles = frames().flat_map(|f| {
        f.dep_args()
            .iter()
            .map(|a| a.role.as_str())
            .chain(f.span_args().iter().map(|a| a.role.as_str()))
            .collect::<Vec<_>>()
    });
    let relations = sentences
        .iter()
        .flat_map(|s| s.dep.iter().chain(&s.alt_dep))
        .flat_map(|t| t.rels().iter().map(String::as_str));
    Vocabularies {
        form: Vocab::build(tokens().map(|t| t.form.as_str()), min_count),
        lemma: Vocab::build(tokens().map(|t| t.lemma.as_str()), min_count),
        pos: Vocab::build(tokens().map(|t| t.pos.as_str()), 1),
        role: Vocab::build(roles, 1),
        relation: Vocab::build(relations, 1),
        sense: Vocab::build(frames().filter(|f| !f.sense.is_empty()).map(|f| f.sense.as_str()), 1),
        character: Vocab::build(
            tokens().flat_map(|t| t.chars().iter().map(|c| c.to_string())),
            min_count,
        ),
        constituent: Vocab::build(
            sentences
                .iter()
                .filter_map(|s| s.consts.as_ref())
                .flat_map(|c| c.brackets().iter().map(|b| b.label.as_str())),
            1,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_count_sends_rare_symbols_to_unk() {
        let v = Vocab::build(["a", "a", "b"], 2);
        assert_eq!(v.id("a"), 2);
        assert_eq!(v.id("b"), UNK);
        let v = Vocab::build(["a", "a", "b"], 1);
        assert_eq!(v.id("b"), 3);
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn ties_keep_first_occurrence() {
        let v = Vocab::build(["z", "y", "x", "y"], 1);
        assert_eq!(v.symbols(), ["y", "z", "x"]);
        assert_eq!(Vocab::build(["z", "y", "x", "y"], 1), v);
    }

    #[test]
    fn serde_rebuilds_index() {
        let v = Vocab::build(["q", "r", "r"], 1);
        let back: Vocab = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.id("q"), 3);
    }
}
