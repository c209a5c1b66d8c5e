//! Distance-tuple statistics of gold arguments and the soft-pruning mask
//! they induce.

use std::path::Path;

use srllab::corpus::{read_corpus, ConllOptions};
use srllab::pruning::{build_syntactic_rule, soft_prune_mask};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_dep.jsonl");
    let corpus = read_corpus(&path, ConllOptions::default())?;
    let table = build_syntactic_rule(&corpus, 3);
    for (t, c) in table.entries() {
        let mark = if table.contains(*t) { "*" } else { " " };
        println!("{} ({}, {}) {}", mark, t.d_p, t.d_a, c);
    }

    let s = &corpus[1];
    let tree = s.dep.as_ref().unwrap();
    for f in &s.frames {
        let mask = soft_prune_mask(tree, f.predicate, &table)?;
        let kept: Vec<&str> = s
            .tokens
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .map(|(t, _)| t.form.as_str())
            .collect();
        println!("predicate {}: {:?}", s.tokens[f.predicate - 1].form, kept);
    }
    Ok(())
}
