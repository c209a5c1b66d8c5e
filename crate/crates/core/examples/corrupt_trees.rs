//! Degrades gold trees at several error rates and reports the measured
//! head-change rate and LAS.

use std::path::Path;

use srllab::corpus::{read_corpus, ConllOptions};
use srllab::eval::las;
use srllab::stg::{corrupt_corpus, corruption_rate, CorruptionConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_dep.jsonl");
    let corpus = read_corpus(&path, ConllOptions::default())?;
    println!("{:>4} {:>8} {:>8}", "p", "changed", "LAS");
    for p in [0.0, 0.1, 0.3, 0.5, 0.9] {
        let out = corrupt_corpus(&corpus, &CorruptionConfig::new(p, 42)?);
        let gold: Vec<_> = out.iter().map(|s| s.dep.as_ref().unwrap()).collect();
        let bad: Vec<_> = out.iter().map(|s| s.alt_dep.as_ref().unwrap()).collect();
        let rate: f64 = gold
            .iter()
            .zip(&bad)
            .map(|(g, b)| corruption_rate(g, b).map(|r| r * g.len() as f64))
            .sum::<Result<f64, _>>()?
            / gold.iter().map(|g| g.len() as f64).sum::<f64>();
        println!("{:>4.1} {:>8.3} {:>8.2}", p, rate, las(&gold, &bad)?);
    }
    Ok(())
}
