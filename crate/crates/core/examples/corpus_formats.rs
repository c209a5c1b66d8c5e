//! Reads the shipped corpora, converts JSON lines to CoNLL-2009 and shows
//! BIO tags for span frames.

use std::path::Path;

use srllab::corpus::{build_vocab, read_corpus, spans_to_bio, write_conll09, ConllOptions, Style};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let dep = read_corpus(&data.join("toy_dep.jsonl"), ConllOptions::default())?;
    let span = read_corpus(&data.join("toy_span.jsonl"), ConllOptions::default())?;
    let conll = read_corpus(
        &data.join("toy_dep.conll09"),
        ConllOptions {
            predicted_columns: true,
        },
    )?;
    println!(
        "{} dep, {} span, {} CoNLL sentences",
        dep.len(),
        span.len(),
        conll.len()
    );

    let v = build_vocab(&dep, 1);
    println!(
        "forms {} roles {:?} senses {}",
        v.form.len(),
        v.role.symbols(),
        v.sense.len()
    );

    print!("{}", write_conll09(&dep[..1])?);

    let s = &span[0];
    let words: Vec<&str> = s.tokens.iter().map(|t| t.form.as_str()).collect();
    for f in s.frames.iter().filter(|f| f.style() == Style::Span) {
        println!("predicate {} ({})", f.predicate, f.sense);
        for (w, t) in words.iter().zip(spans_to_bio(f, s.len())?) {
            println!("  {:<10} {}", w, t);
        }
    }
    Ok(())
}
