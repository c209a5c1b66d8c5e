//! Scoring: dependency and span F1, LAS, the F1/syntax ratio and span
//! predictions scored against dependency gold.

use srllab::corpus::{DepTree, Frame, Sentence, Token};
use srllab::eval::{dep_srl_score, las, ratio, span_srl_score, span_to_dep_eval};
use srllab::treeops::HeadChoice;

fn sentence(frames: Vec<Frame>) -> Sentence {
    let words = [
        ("the", "DT"),
        ("dog", "NN"),
        ("chased", "VBD"),
        ("a", "DT"),
        ("cat", "NN"),
    ];
    let mut s = Sentence::new(words.iter().map(|(w, p)| Token::new(w, w, p)).collect());
    s.dep = Some(DepTree::unlabeled(vec![2, 3, 0, 5, 3], "dep").unwrap());
    s.frames = frames;
    s
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gold = sentence(vec![Frame::dep(3, "chase.01", vec![(2, "A0"), (5, "A1")])]);
    let pred = sentence(vec![Frame::dep(3, "chase.02", vec![(2, "A0"), (4, "A1")])]);
    println!(
        "dep, senses:\n{}",
        dep_srl_score(std::slice::from_ref(&gold), std::slice::from_ref(&pred), true)?.to_table()
    );
    println!(
        "dep, no senses:\n{}",
        dep_srl_score(std::slice::from_ref(&gold), &[pred], false)?.to_table()
    );

    let span_gold = sentence(vec![Frame::span(3, "", vec![(1, 2, "A0"), (4, 5, "A1")])]);
    let span_pred = sentence(vec![Frame::span(3, "", vec![(1, 2, "A0"), (5, 5, "A1")])]);
    println!(
        "span:\n{}",
        span_srl_score(&[span_gold], std::slice::from_ref(&span_pred))?.to_table()
    );
    println!(
        "span vs dep gold:\n{}",
        span_to_dep_eval(std::slice::from_ref(&gold), &[span_pred], HeadChoice::Leftmost)?.to_table()
    );

    let tree = gold.dep.as_ref().unwrap();
    let flat = DepTree::unlabeled(vec![3, 3, 0, 3, 3], "dep")?;
    let syntax = las(&[tree], &[&flat])?;
    let r = dep_srl_score(std::slice::from_ref(&gold), std::slice::from_ref(&gold), true)?.with_syntax(syntax)?;
    println!("with syntax:\n{}", r.to_table());
    println!("ratio(89.5, 86.0) = {:.2}", ratio(89.5, 86.0)?);
    Ok(())
}
