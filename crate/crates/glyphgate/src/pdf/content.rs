//! Content stream tokenizer: splits a decoded stream into operators with
//! their operands.

use super::lexer::{Lexer, Token};
use super::object::Object;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct ContentOp {
    pub operands: Vec<Object>,
    pub operator: String,
}

/// Tokenize a decoded content stream. Inline images are skipped whole.
pub fn parse_content(data: &[u8]) -> Result<Vec<ContentOp>> {
    let mut lex = Lexer::new(data);
    let mut ops = Vec::new();
    let mut operands = Vec::new();
    loop {
        let tok = match lex.next_token() {
            Ok(Some(t)) => t,
            Ok(None) => break,
            // Content streams in the wild can hold junk between ops;
            // resync on the next whitespace.
            Err(_) => {
                lex.pos += 1;
                operands.clear();
                continue;
            }
        };
        match tok {
            Token::Obj(o) => operands.push(o),
            Token::Keyword(kw) => {
                if kw == "BI" {
                    skip_inline_image(&mut lex);
                    operands.clear();
                    continue;
                }
                ops.push(ContentOp {
                    operands: std::mem::take(&mut operands),
                    operator: kw,
                });
            }
        }
    }
    Ok(ops)
}

fn skip_inline_image(lex: &mut Lexer) {
    // Scan forward to "EI" delimited by whitespace.
    let data = lex.data;
    let mut i = lex.pos;
    while i + 2 <= data.len() {
        if &data[i..i + 2] == b"EI"
            && (i == 0 || data[i - 1].is_ascii_whitespace())
            && (i + 2 == data.len() || data[i + 2].is_ascii_whitespace())
        {
            lex.pos = i + 2;
            return;
        }
        i += 1;
    }
    lex.pos = data.len();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_text_ops() {
        let ops = parse_content(b"BT /F1 12 Tf 72 700 Td [(Hi)-2(there)] TJ ET").unwrap();
        let names: Vec<&str> = ops.iter().map(|o| o.operator.as_str()).collect();
        assert_eq!(names, ["BT", "Tf", "Td", "TJ", "ET"]);
        assert_eq!(ops[1].operands[0], Object::Name("F1".into()));
        assert_eq!(ops[2].operands, vec![Object::Int(72), Object::Int(700)]);
        match &ops[3].operands[0] {
            Object::Array(items) => assert_eq!(items.len(), 3),
            other => panic!("expected array, got {other:?}"),
        }
    }

    #[test]
    fn skips_inline_images() {
        let ops = parse_content(b"q BI /W 1 /H 1 ID \x00\xff\x01 EI Q 1 0 0 RG").unwrap();
        let names: Vec<&str> = ops.iter().map(|o| o.operator.as_str()).collect();
        assert_eq!(names, ["q", "Q", "RG"]);
    }
}
