use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree has {heads} heads but {rels} relations")]
    LengthMismatch { heads: usize, rels: usize },
    #[error("token {token}: head {head} outside [0, {n}]")]
    HeadOutOfRange { token: usize, head: usize, n: usize },
    #[error("token {0} is its own head")]
    SelfLoop(usize),
    #[error("cycle through token {0}")]
    Cycle(usize),
    #[error("empty tree")]
    Empty,
    #[error("bracket ({start}, {end}) outside [1, {n}]")]
    BracketOutOfRange { start: usize, end: usize, n: usize },
    #[error("brackets ({0}, {1}) and ({2}, {3}) cross")]
    Crossing(usize, usize, usize, usize),
    #[error("no root bracket spanning (1, {0})")]
    MissingRoot(usize),
}

/// Dependency tree over tokens `1..=n`; head `0` is the virtual ROOT.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepTree {
    heads: Vec<usize>,
    rels: Vec<String>,
}

impl DepTree {
    pub fn new(heads: Vec<usize>, rels: Vec<String>) -> Result<Self, TreeError> {
        if heads.len() != rels.len() {
            return Err(TreeError::LengthMismatch {
                heads: heads.len(),
                rels: rels.len(),
            });
        }
        validate_heads(&heads)?;
        Ok(DepTree { heads, rels })
    }

    /// Tree with every relation set to `rel`.
    pub fn unlabeled(heads: Vec<usize>, rel: &str) -> Result<Self, TreeError> {
        let rels = vec![rel.to_string(); heads.len()];
        DepTree::new(heads, rels)
    }

    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    /// Head of token `i` (1-based).
    pub fn head(&self, i: usize) -> usize {
        self.heads[i - 1]
    }

    /// Relation of the arc into token `i` (1-based).
    pub fn rel(&self, i: usize) -> &str {
        &self.rels[i - 1]
    }

    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn rels(&self) -> &[String] {
        &self.rels
    }

    /// Number of tokens attached directly to ROOT.
    pub fn root_children(&self) -> usize {
        self.heads.iter().filter(|&&h| h == 0).count()
    }

    pub fn is_single_rooted(&self) -> bool {
        self.root_children() == 1
    }

    /// Nodes on the path from `i` up to and including ROOT (0).
    pub fn path_to_root(&self, i: usize) -> Vec<usize> {
        let mut path = vec![i];
        let mut c = i;
        while c != 0 {
            c = self.heads[c - 1];
            path.push(c);
        }
        path
    }

    /// Distance from `i` to ROOT.
    pub fn depth(&self, i: usize) -> usize {
        self.path_to_root(i).len() - 1
    }

    /// Same tree with new heads, relations unchanged.
    pub fn with_heads(&self, heads: Vec<usize>) -> Result<Self, TreeError> {
        DepTree::new(heads, self.rels.clone())
    }
}

/// Checks that `heads` (1-based tokens, 0 = ROOT) describes a tree:
/// every head in range, no self-loops, and every token reaches ROOT.
pub fn validate_heads(heads: &[usize]) -> Result<(), TreeError> {
    let n = heads.len();
    if n == 0 {
        return Err(TreeError::Empty);
    }
    for (i, &h) in heads.iter().enumerate() {
        if h > n {
            return Err(TreeError::HeadOutOfRange {
                token: i + 1,
                head: h,
                n,
            });
        }
        if h == i + 1 {
            return Err(TreeError::SelfLoop(h));
        }
    }
    // 0 = unvisited, 1 = on current path, 2 = reaches root
    let mut state = vec![0u8; n + 1];
    state[0] = 2;
    for start in 1..=n {
        let mut path = Vec::new();
        let mut c = start;
        while state[c] == 0 {
            state[c] = 1;
            path.push(c);
            c = heads[c - 1];
        }
        if state[c] == 1 {
            return Err(TreeError::Cycle(c));
        }
        for p in path {
            state[p] = 2;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bracket {
    pub start: usize,
    pub end: usize,
    pub label: String,
}

impl Bracket {
    pub fn new(start: usize, end: usize, label: &str) -> Self {
        Bracket {
            start,
            end,
            label: label.to_string(),
        }
    }

    pub fn width(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn contains(&self, other: &Bracket) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// Labeled constituency brackets over tokens `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstTree {
    brackets: Vec<Bracket>,
    n: usize,
}

impl ConstTree {
    pub fn new(brackets: Vec<Bracket>, n: usize) -> Result<Self, TreeError> {
        for b in &brackets {
            if b.start < 1 || b.start > b.end || b.end > n {
                return Err(TreeError::BracketOutOfRange {
                    start: b.start,
                    end: b.end,
                    n,
                });
            }
        }
        for (i, a) in brackets.iter().enumerate() {
            for b in &brackets[i + 1..] {
                let disjoint = a.end < b.start || b.end < a.start;
                if !disjoint && !a.contains(b) && !b.contains(a) {
                    return Err(TreeError::Crossing(a.start, a.end, b.start, b.end));
                }
            }
        }
        if !brackets.iter().any(|b| b.start == 1 && b.end == n) {
            return Err(TreeError::MissingRoot(n));
        }
        Ok(ConstTree { brackets, n })
    }

    pub fn brackets(&self) -> &[Bracket] {
        &self.brackets
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_is_rejected() {
        assert_eq!(validate_heads(&[2, 1]), Err(TreeError::Cycle(1)));
    }

    #[test]
    fn detached_cycle_is_rejected() {
        // 1 -> ROOT, 2 <-> 3
        assert!(matches!(validate_heads(&[0, 3, 2]), Err(TreeError::Cycle(_))));
    }

    #[test]
    fn out_of_range_and_self_loop() {
        assert!(matches!(
            validate_heads(&[0, 5]),
            Err(TreeError::HeadOutOfRange {
                token: 2,
                head: 5,
                n: 2
            })
        ));
        assert_eq!(validate_heads(&[0, 2]), Err(TreeError::SelfLoop(2)));
    }

    #[test]
    fn paths_reach_root() {
        let t = DepTree::unlabeled(vec![2, 0, 2, 5, 3], "x").unwrap();
        assert_eq!(t.path_to_root(4), vec![4, 5, 3, 2, 0]);
        assert_eq!(t.depth(2), 1);
    }

    #[test]
    fn crossing_brackets_rejected() {
        let b = vec![
            Bracket::new(1, 4, "S"),
            Bracket::new(1, 2, "NP"),
            Bracket::new(2, 3, "VP"),
        ];
        assert!(matches!(ConstTree::new(b, 4), Err(TreeError::Crossing(..))));
        assert!(matches!(
            ConstTree::new(vec![Bracket::new(1, 2, "NP")], 3),
            Err(TreeError::MissingRoot(3))
        ));
    }
}
