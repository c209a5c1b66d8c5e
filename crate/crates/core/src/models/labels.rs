use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Style, Vocabularies, OUTSIDE};

/// Id 0 of every label set: no role / no predicate / `O`.
pub const NULL: usize = 0;
pub const NULL_LABEL: &str = "<null>";
/// Stand-in for an empty sense string.
pub const EMPTY_SENSE: &str = "_";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct LabelSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl From<Vec<String>> for LabelSet {
    fn from(labels: Vec<String>) -> Self {
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        LabelSet { labels, index }
    }
}

impl From<LabelSet> for Vec<String> {
    fn from(s: LabelSet) -> Self {
        s.labels
    }
}

impl LabelSet {
    pub fn id(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Output label inventories of every factorization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    /// Sequence tags: `null ∪ roles` (dep) or `O ∪ B-r ∪ I-r` (span).
    pub tags: LabelSet,
    /// Predicate-argument pairs: `null ∪ roles`.
    pub roles: LabelSet,
    /// Tree pairs: `null ∪ roles ∪ senses`; senses start at `roles.len()`.
    pub tree: LabelSet,
    /// Predicate decisions: `null ∪ senses`.
    pub senses: LabelSet,
}

pub fn sense_label(sense: &str) -> &str {
    if sense.is_empty() {
        EMPTY_SENSE
    } else {
        sense
    }
}

pub fn sense_string(label: &str) -> String {
    if label == EMPTY_SENSE {
        String::new()
    } else {
        label.to_string()
    }
}

impl Labels {
    pub fn new(style: Style, vocabs: &Vocabularies, has_empty_sense: bool) -> Self {
        let roles: Vec<String> = vocabs.role.symbols().to_vec();
        let mut senses: Vec<String> = vocabs.sense.symbols().to_vec();
        if has_empty_sense || senses.is_empty() {
            senses.push(EMPTY_SENSE.to_string());
        }
        let tags: Vec<String> = match style {
            Style::Dep => std::iter::once(NULL_LABEL.to_string())
                .chain(roles.iter().cloned())
                .collect(),
            Style::Span => std::iter::once(OUTSIDE.to_string())
                .chain(roles.iter().map(|r| format!("B-{}", r)))
                .chain(roles.iter().map(|r| format!("I-{}", r)))
                .collect(),
        };
        let with_null = |xs: &[String]| -> Vec<String> {
            std::iter::once(NULL_LABEL.to_string())
                .chain(xs.iter().cloned())
                .collect()
        };
        let mut tree = with_null(&roles);
        tree.extend(senses.iter().cloned());
        Labels {
            tags: LabelSet::from(tags),
            roles: LabelSet::from(with_null(&roles)),
            tree: LabelSet::from(tree),
            senses: LabelSet::from(with_null(&senses)),
        }
    }

    /// First sense id in the tree label set.
    pub fn tree_sense_offset(&self) -> usize {
        self.roles.len()
    }
}
