//! Tolerant reader for `[("q", "a"), ('q', 'a'), ...]` lists embedded in
//! free text.

use crate::curate::{Provenance, QAPair};

pub const TEACHER_TEMPLATE_ID: &str = "teacher";

/// No list with at least one well-formed pair was found.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no question/answer list found in teacher output ({} bytes)", raw.len())]
pub struct ParseFailure {
    pub raw: String,
}

struct Cursor<'a> {
    chars: &'a [char],
    pos: usize,
}

fn closing_quote(open: char) -> Option<char> {
    match open {
        '"' => Some('"'),
        '\'' => Some('\''),
        '\u{201C}' => Some('\u{201D}'),
        '\u{2018}' => Some('\u{2019}'),
        _ => None,
    }
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn string(&mut self) -> Option<String> {
        self.skip_ws();
        let close = closing_quote(self.peek()?)?;
        self.pos += 1;
        let mut out = String::new();
        loop {
            let c = self.peek()?;
            self.pos += 1;
            if c == close {
                return Some(out);
            }
            if c == '\\' {
                let e = self.peek()?;
                self.pos += 1;
                out.push(match e {
                    'n' => '\n',
                    't' => '\t',
                    'r' => '\r',
                    other => other,
                });
            } else {
                out.push(c);
            }
        }
    }

    /// `( str , str [,] )` or the same with square brackets.
    fn tuple(&mut self) -> Option<(String, String)> {
        self.skip_ws();
        let close = match self.peek()? {
            '(' => ')',
            '[' => ']',
            _ => return None,
        };
        self.pos += 1;
        let q = self.string()?;
        if !self.eat(',') {
            return None;
        }
        let a = self.string()?;
        self.eat(',');
        self.eat(close).then_some((q, a))
    }

    /// A whole list starting at the current `[`.
    fn list(&mut self) -> Option<Vec<(String, String)>> {
        if !self.eat('[') {
            return None;
        }
        let mut out = Vec::new();
        loop {
            if self.eat(']') {
                return Some(out);
            }
            out.push(self.tuple()?);
            if !self.eat(',') {
                return self.eat(']').then_some(out);
            }
        }
    }
}

/// Extracts every pair from the first parseable non-empty list in `raw`.
/// Surrounding prose, either quote style, escaped quotes and trailing
/// commas are accepted. Pairs with an empty question or answer are dropped.
pub fn parse_qa_tuples(raw: &str) -> Result<Vec<QAPair>, ParseFailure> {
    let chars: Vec<char> = raw.chars().collect();
    for start in (0..chars.len()).filter(|&i| chars[i] == '[') {
        let mut cur = Cursor {
            chars: &chars,
            pos: start,
        };
        let Some(tuples) = cur.list() else { continue };
        let pairs: Vec<QAPair> = tuples
            .iter()
            .filter_map(|(q, a)| QAPair::new(q, a, TEACHER_TEMPLATE_ID, Provenance::Teacher).ok())
            .collect();
        if !pairs.is_empty() {
            return Ok(pairs);
        }
    }
    Err(ParseFailure { raw: raw.to_owned() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_list() {
        let p = parse_qa_tuples(r#"[("footgpt, Q1?","A1"), ("footgpt, Q2?","A2")]"#).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].question, "Question : footgpt, Q1?");
        assert_eq!(p[1].answer, "Answer : A2");
        assert!(p.iter().all(|x| x.provenance == Provenance::Teacher));
    }

    #[test]
    fn prose_quotes_escapes_and_trailing_commas() {
        let raw = "Sure! Here you go:\n[\n ('footgpt, Isn\\'t it?', \"He said \\\"yes\\\"\",),\n (\"footgpt, b\", 'c'),\n]\nHope it helps [really].";
        let p = parse_qa_tuples(raw).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].question, "Question : footgpt, Isn't it?");
        assert_eq!(p[0].answer, "Answer : He said \"yes\"");
    }

    #[test]
    fn skips_non_list_brackets() {
        let raw = "see [region 4 , 3] then [(\"footgpt, q\", \"a\")]";
        assert_eq!(parse_qa_tuples(raw).unwrap().len(), 1);
    }

    #[test]
    fn failure_preserves_raw() {
        let raw = "[(\"unterminated,";
        assert_eq!(parse_qa_tuples(raw).unwrap_err().raw, raw);
        assert!(parse_qa_tuples("[]").is_err());
        assert!(parse_qa_tuples("").is_err());
    }
}
