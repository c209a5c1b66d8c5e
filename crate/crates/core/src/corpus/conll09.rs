//! CoNLL-2009 column format.
//!
//! Token lines carry at least 14 tab-separated columns:
//! `ID FORM LEMMA PLEMMA POS PPOS FEAT PFEAT HEAD PHEAD DEPREL PDEPREL FILLPRED PRED`
//! followed by one `APRED` column per predicate of the sentence. `_` marks
//! an empty cell and sentences are separated by blank lines.

use super::sentence::{ConllExtras, DepArg, Frame, Sentence, Style, Token};
use super::tree::DepTree;
use super::CorpusError;

const FIXED_COLUMNS: usize = 14;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConllOptions {
    /// Read LEMMA/POS/HEAD/DEPREL from the predicted columns
    /// (PLEMMA/PPOS/PHEAD/PDEPREL); the gold columns go to the alternate slots.
    pub predicted_columns: bool,
}

pub fn parse_conll09(text: &str) -> Result<Vec<Sentence>, CorpusError> {
    parse_conll09_with(text, ConllOptions::default())
}

pub fn parse_conll09_with(text: &str, opts: ConllOptions) -> Result<Vec<Sentence>, CorpusError> {
    let text = text.replace("\r\n", "\n");
    let mut sentences = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.split('\n').enumerate() {
        if line.trim().is_empty() {
            if !block.is_empty() {
                sentences.push(parse_block(&block, opts)?);
                block.clear();
            }
        } else {
            block.push((i + 1, line));
        }
    }
    if !block.is_empty() {
        sentences.push(parse_block(&block, opts)?);
    }
    Ok(sentences)
}

fn format_err(line: usize, msg: impl Into<String>) -> CorpusError {
    CorpusError::Format { line, msg: msg.into() }
}

fn parse_head(line: usize, cell: &str, what: &str) -> Result<Option<usize>, CorpusError> {
    if cell == "_" {
        return Ok(None);
    }
    cell.parse::<usize>()
        .map(Some)
        .map_err(|_| format_err(line, format!("non-integer {} {:?}", what, cell)))
}

fn build_tree(
    block: &[(usize, &str)],
    heads: Vec<Option<usize>>,
    rels: Vec<String>,
    what: &str,
) -> Result<Option<DepTree>, CorpusError> {
    let first = block[0].0;
    if heads.iter().all(Option::is_none) {
        return Ok(None);
    }
    if let Some(pos) = heads.iter().position(Option::is_none) {
        return Err(format_err(
            block[pos].0,
            format!("missing {} in a sentence that has them", what),
        ));
    }
    let heads = heads.into_iter().map(Option::unwrap).collect();
    DepTree::new(heads, rels)
        .map(Some)
        .map_err(|source| CorpusError::Tree { line: first, source })
}

fn parse_block(block: &[(usize, &str)], opts: ConllOptions) -> Result<Sentence, CorpusError> {
    let rows: Vec<Vec<&str>> = block.iter().map(|(_, l)| l.split('\t').collect()).collect();
    let mut tokens = Vec::with_capacity(rows.len());
    let mut extras = ConllExtras::default();
    let (mut heads, mut pheads) = (Vec::new(), Vec::new());
    let (mut rels, mut prels) = (Vec::new(), Vec::new());
    let mut predicates = Vec::new();

    for (k, (cols, &(line, _))) in rows.iter().zip(block).enumerate() {
        if cols.len() < FIXED_COLUMNS {
            return Err(format_err(
                line,
                format!("expected at least {} columns, found {}", FIXED_COLUMNS, cols.len()),
            ));
        }
        let id: usize = cols[0]
            .parse()
            .map_err(|_| format_err(line, format!("non-integer ID {:?}", cols[0])))?;
        if id != k + 1 {
            return Err(format_err(line, format!("expected ID {}, found {}", k + 1, id)));
        }
        tokens.push(Token::new(cols[1], cols[2], cols[4]));
        extras.plemma.push(cols[3].to_string());
        extras.ppos.push(cols[5].to_string());
        extras.feat.push(cols[6].to_string());
        extras.pfeat.push(cols[7].to_string());
        heads.push(parse_head(line, cols[8], "HEAD")?);
        pheads.push(parse_head(line, cols[9], "PHEAD")?);
        rels.push(cols[10].to_string());
        prels.push(cols[11].to_string());
        match (cols[12], cols[13]) {
            ("Y", sense) => predicates.push((k + 1, if sense == "_" { "" } else { sense })),
            ("_", "_") => {}
            ("_", _) => return Err(format_err(line, "PRED set without FILLPRED")),
            (other, _) => return Err(format_err(line, format!("FILLPRED must be Y or _, found {:?}", other))),
        }
    }

    for (cols, &(line, _)) in rows.iter().zip(block) {
        let apreds = cols.len() - FIXED_COLUMNS;
        if apreds != predicates.len() {
            return Err(format_err(
                line,
                format!("{} APRED columns for {} predicates", apreds, predicates.len()),
            ));
        }
    }

    let frames = predicates
        .iter()
        .enumerate()
        .map(|(j, &(pred, sense))| {
            let args = rows
                .iter()
                .enumerate()
                .filter(|(_, cols)| cols[FIXED_COLUMNS + j] != "_")
                .map(|(i, cols)| DepArg {
                    index: i + 1,
                    role: cols[FIXED_COLUMNS + j].to_string(),
                })
                .collect();
            Frame {
                predicate: pred,
                sense: sense.to_string(),
                args: super::sentence::Arguments::Dep(args),
            }
        })
        .collect();

    let mut sentence = Sentence::new(tokens);
    sentence.dep = build_tree(block, heads, rels, "HEAD")?;
    sentence.alt_dep = build_tree(block, pheads, prels, "PHEAD")?;
    sentence.frames = frames;
    if opts.predicted_columns {
        swap_columns(&mut sentence, &mut extras);
        extras.predicted_primary = true;
    }
    sentence.conll = Some(extras);
    Ok(sentence)
}

fn swap_columns(sentence: &mut Sentence, extras: &mut ConllExtras) {
    for (i, t) in sentence.tokens.iter_mut().enumerate() {
        std::mem::swap(&mut t.lemma, &mut extras.plemma[i]);
        std::mem::swap(&mut t.pos, &mut extras.ppos[i]);
    }
    std::mem::swap(&mut sentence.dep, &mut sentence.alt_dep);
}

/// Serializes dependency-style sentences. Frames are emitted in predicate
/// order, so `parse_conll09(write_conll09(s))` reproduces sentences whose
/// frames and arguments are sorted by token index.
pub fn write_conll09(sentences: &[Sentence]) -> Result<String, CorpusError> {
    let mut out = String::new();
    for s in sentences {
        write_sentence(s, &mut out)?;
    }
    Ok(out)
}

fn write_sentence(s: &Sentence, out: &mut String) -> Result<(), CorpusError> {
    let n = s.len();
    if s.frames.iter().any(|f| f.style() == Style::Span) {
        return Err(CorpusError::UnsupportedStyle(Style::Span));
    }
    let mut frames: Vec<&Frame> = s.frames.iter().collect();
    frames.sort_by_key(|f| f.predicate);
    if frames.windows(2).any(|w| w[0].predicate == w[1].predicate) {
        return Err(CorpusError::Invalid("two frames share a predicate".into()));
    }

    let mut s = s.clone();
    let mut extras = s.conll.clone().unwrap_or_else(|| ConllExtras {
        plemma: vec!["_".into(); n],
        ppos: vec!["_".into(); n],
        feat: vec!["_".into(); n],
        pfeat: vec!["_".into(); n],
        predicted_primary: false,
    });
    if extras.predicted_primary {
        swap_columns(&mut s, &mut extras);
    }
    let tree_cells = |t: &Option<DepTree>, i: usize| match t {
        Some(t) => (t.head(i).to_string(), t.rel(i).to_string()),
        None => ("_".to_string(), "_".to_string()),
    };

    for i in 1..=n {
        let tok = &s.tokens[i - 1];
        let (head, rel) = tree_cells(&s.dep, i);
        let (phead, prel) = tree_cells(&s.alt_dep, i);
        let (fill, sense) = match frames.iter().find(|f| f.predicate == i) {
            Some(f) if f.sense.is_empty() => ("Y", "_"),
            Some(f) => ("Y", f.sense.as_str()),
            None => ("_", "_"),
        };
        let mut cols: Vec<&str> = vec![
            "",
            &tok.form,
            &tok.lemma,
            &extras.plemma[i - 1],
            &tok.pos,
            &extras.ppos[i - 1],
            &extras.feat[i - 1],
            &extras.pfeat[i - 1],
            &head,
            &phead,
            &rel,
            &prel,
            fill,
            sense,
        ];
        let id = i.to_string();
        cols[0] = &id;
        for f in &frames {
            let role = f
                .dep_args()
                .iter()
                .find(|a| a.index == i)
                .map(|a| a.role.as_str())
                .unwrap_or("_");
            cols.push(role);
        }
        out.push_str(&cols.join("\t"));
        out.push('\n');
    }
    out.push('\n');
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(cols: &[&str]) -> String {
        cols.join("\t")
    }

    fn two_token_file() -> String {
        format!(
            "{}\n{}\n\n",
            line(&["1", "The", "the", "the", "DT", "DT", "_", "_", "2", "2", "NMOD", "NMOD", "_", "_", "A0"]),
            line(&["2", "cat", "cat", "cat", "NN", "NN", "_", "_", "0", "0", "ROOT", "ROOT", "Y", "cat.01", "_"]),
        )
    }

    #[test]
    fn reads_a_single_frame() {
        let s = parse_conll09(&two_token_file()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].frames, vec![Frame::dep(2, "cat.01", vec![(1, "A0")])]);
        assert_eq!(s[0].dep.as_ref().unwrap().heads(), &[2, 0]);
    }

    #[test]
    fn empty_input_gives_no_sentences() {
        assert!(parse_conll09("").unwrap().is_empty());
    }

    #[test]
    fn head_cycle_is_a_tree_error() {
        let text = two_token_file().replacen("\t0\t0\tROOT", "\t1\t0\tROOT", 1);
        assert!(matches!(parse_conll09(&text), Err(CorpusError::Tree { .. })));
    }

    #[test]
    fn non_integer_head_reports_line() {
        let text = two_token_file().replacen("\t2\t2\tNMOD", "\tx\t2\tNMOD", 1);
        match parse_conll09(&text) {
            Err(CorpusError::Format { line, msg }) => {
                assert_eq!(line, 1);
                assert!(msg.contains("HEAD"));
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn apred_count_must_match_predicates() {
        let text = two_token_file().replace("\tA0\n", "\tA0\tA1\n");
        assert!(matches!(parse_conll09(&text), Err(CorpusError::Format { line: 1, .. })));
    }

    #[test]
    fn roundtrip_is_byte_identical() {
        let text = two_token_file();
        let parsed = parse_conll09(&text).unwrap();
        assert_eq!(write_conll09(&parsed).unwrap(), text);
        let predicted = parse_conll09_with(
            &text,
            ConllOptions {
                predicted_columns: true,
            },
        )
        .unwrap();
        assert_eq!(write_conll09(&predicted).unwrap(), text);
    }

    #[test]
    fn predicted_columns_swap_into_primary_slots() {
        let text = two_token_file().replacen("\t2\t2\tNMOD\tNMOD", "\t2\t2\tNMOD\tAMOD", 1);
        let s = &parse_conll09_with(
            &text,
            ConllOptions {
                predicted_columns: true,
            },
        )
        .unwrap()[0];
        assert_eq!(s.dep.as_ref().unwrap().rel(1), "AMOD");
        assert_eq!(s.alt_dep.as_ref().unwrap().rel(1), "NMOD");
    }

    #[test]
    fn zero_frames_means_fourteen_columns() {
        let mut s = parse_conll09(&two_token_file()).unwrap();
        s[0].frames.clear();
        let text = write_conll09(&s).unwrap();
        for l in text.lines().filter(|l| !l.is_empty()) {
            let cols: Vec<&str> = l.split('\t').collect();
            assert_eq!(cols.len(), 14);
            assert_eq!(cols[12], "_");
        }
    }

    #[test]
    fn two_predicates_give_two_apred_columns() {
        let mut s = Sentence::new(vec![
            Token::new("dogs", "dog", "NNS"),
            Token::new("bark", "bark", "VBP"),
            Token::new("loudly", "loudly", "RB"),
        ]);
        s.dep = Some(DepTree::new(vec![2, 0, 2], vec!["SBJ".into(), "ROOT".into(), "ADV".into()]).unwrap());
        s.frames = vec![
            Frame::dep(1, "dog.01", vec![]),
            Frame::dep(2, "bark.01", vec![(1, "A0"), (3, "AM-MNR")]),
        ];
        let text = write_conll09(std::slice::from_ref(&s)).unwrap();
        for l in text.lines().filter(|l| !l.is_empty()) {
            assert_eq!(l.split('\t').count(), 16);
        }
        let back = parse_conll09(&text).unwrap();
        assert_eq!(back[0].frames, s.frames);
        assert_eq!(back[0].dep, s.dep);
    }

    #[test]
    fn span_frames_cannot_be_written() {
        let mut s = Sentence::new(vec![Token::new("a", "a", "X")]);
        s.frames = vec![Frame::span(1, "", vec![])];
        assert!(matches!(
            write_conll09(&[s]),
            Err(CorpusError::UnsupportedStyle(Style::Span))
        ));
    }

    #[test]
    fn crlf_is_normalized() {
        let text = two_token_file().replace('\n', "\r\n");
        let parsed = parse_conll09(&text).unwrap();
        assert_eq!(write_conll09(&parsed).unwrap(), two_token_file());
    }
}
