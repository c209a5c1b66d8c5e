//! Coverage and reduction of k-order hard pruning, and the candidates it
//! keeps for one predicate.

use std::path::Path;

use srllab::corpus::{read_corpus, ConllOptions};
use srllab::pruning::{hard_prune_candidates, prune_statistics, statistics_csv, HardPruneOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_dep.conll09");
    let corpus = read_corpus(&path, ConllOptions::default())?;

    let s = &corpus[0];
    let tree = s.dep.as_ref().unwrap();
    for f in &s.frames {
        for k in 1..=3 {
            let hp = hard_prune_candidates(tree, f.predicate, k)?;
            println!("predicate {} k={} candidates {:?}", f.predicate, k, hp.candidates);
        }
    }

    for root_children in [false, true] {
        let opts = HardPruneOptions {
            include_root_children: root_children,
        };
        println!("include_root_children = {}", root_children);
        print!("{}", statistics_csv(&prune_statistics(&corpus, 1..=4, opts)?));
    }
    Ok(())
}
