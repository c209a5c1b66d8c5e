use super::sentence::{Frame, SpanArg, Style};
use super::CorpusError;

pub const OUTSIDE: &str = "O";

/// Linearizes a span frame into `n` BIO tags.
pub fn spans_to_bio(frame: &Frame, n: usize) -> Result<Vec<String>, CorpusError> {
    if frame.style() != Style::Span {
        return Err(CorpusError::UnsupportedStyle(Style::Dep));
    }
    let args = frame.span_args();
    let mut tags = vec![OUTSIDE.to_string(); n];
    for (i, a) in args.iter().enumerate() {
        if a.start < 1 || a.start > a.end || a.end > n {
            return Err(CorpusError::Invalid(format!(
                "span ({}, {}) outside [1, {}]",
                a.start, a.end, n
            )));
        }
        if let Some(b) = args[i + 1..].iter().find(|b| a.overlaps(b)) {
            return Err(CorpusError::OverlappingSpans(a.start, a.end, b.start, b.end));
        }
        tags[a.start - 1] = format!("B-{}", a.role);
        for t in &mut tags[a.start..a.end] {
            *t = format!("I-{}", a.role);
        }
    }
    Ok(tags)
}

/// Reads spans back from BIO tags. Never fails: an `I-X` that does not
/// continue an `X` span opens a new one, and unrecognized tags count as `O`.
pub fn bio_to_spans<S: AsRef<str>>(labels: &[S]) -> Vec<SpanArg> {
    let mut spans: Vec<SpanArg> = Vec::new();
    let mut open = false;
    for (i, label) in labels.iter().enumerate() {
        let pos = i + 1;
        let label = label.as_ref();
        if let Some(role) = label.strip_prefix("B-") {
            spans.push(SpanArg::new(pos, pos, role));
            open = true;
        } else if let Some(role) = label.strip_prefix("I-") {
            match spans.last_mut() {
                Some(last) if open && last.role == role => last.end = pos,
                _ => spans.push(SpanArg::new(pos, pos, role)),
            }
            open = true;
        } else {
            open = false;
        }
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_to_tags() {
        let f = Frame::span(1, "", vec![(2, 4, "A0")]);
        assert_eq!(spans_to_bio(&f, 5).unwrap(), ["O", "B-A0", "I-A0", "I-A0", "O"]);
        assert_eq!(spans_to_bio(&Frame::span(1, "", vec![]), 3).unwrap(), ["O", "O", "O"]);
        let f = Frame::span(2, "", vec![(1, 1, "A0"), (3, 5, "AM-TMP")]);
        assert_eq!(
            spans_to_bio(&f, 5).unwrap(),
            ["B-A0", "O", "B-AM-TMP", "I-AM-TMP", "I-AM-TMP"]
        );
    }

    #[test]
    fn overlap_is_an_error() {
        let f = Frame::span(1, "", vec![(1, 3, "A0"), (3, 4, "A1")]);
        assert!(matches!(
            spans_to_bio(&f, 5),
            Err(CorpusError::OverlappingSpans(1, 3, 3, 4))
        ));
    }

    #[test]
    fn repairs() {
        assert_eq!(
            bio_to_spans(&["O", "B-A0", "I-A0", "I-A0", "O"]),
            [SpanArg::new(2, 4, "A0")]
        );
        assert_eq!(bio_to_spans(&["I-A0", "O"]), [SpanArg::new(1, 1, "A0")]);
        assert_eq!(
            bio_to_spans(&["B-A0", "I-A1"]),
            [SpanArg::new(1, 1, "A0"), SpanArg::new(2, 2, "A1")]
        );
        assert_eq!(
            bio_to_spans(&["B-A0", "O", "I-A0"]),
            [SpanArg::new(1, 1, "A0"), SpanArg::new(3, 3, "A0")]
        );
        assert!(bio_to_spans(&["junk", "O"]).is_empty());
    }
}
