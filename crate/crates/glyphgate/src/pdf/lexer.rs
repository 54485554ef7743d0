//! Tokenizer for PDF object syntax and content streams.

use super::object::{Dict, ObjRef, Object};
use crate::error::{Error, Result};

pub struct Lexer<'a> {
    pub data: &'a [u8],
    pub pos: usize,
}

fn is_whitespace(b: u8) -> bool {
    matches!(b, b'\0' | b'\t' | b'\n' | b'\x0c' | b'\r' | b' ')
}

fn is_delimiter(b: u8) -> bool {
    matches!(b, b'(' | b')' | b'<' | b'>' | b'[' | b']' | b'{' | b'}' | b'/' | b'%')
}

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Obj(Object),
    /// Bare keyword such as `obj`, `endobj`, `stream`, or a content operator.
    Keyword(String),
}

impl<'a> Lexer<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Lexer { data, pos: 0 }
    }

    pub fn at(data: &'a [u8], pos: usize) -> Self {
        Lexer { data, pos }
    }

    fn err(&self, msg: &str) -> Error {
        Error::MalformedPdf(format!("{msg} at byte {}", self.pos))
    }

    pub fn skip_whitespace(&mut self) {
        loop {
            while self.pos < self.data.len() && is_whitespace(self.data[self.pos]) {
                self.pos += 1;
            }
            if self.pos < self.data.len() && self.data[self.pos] == b'%' {
                while self.pos < self.data.len() && !matches!(self.data[self.pos], b'\n' | b'\r') {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    pub fn peek_byte(&mut self) -> Option<u8> {
        self.skip_whitespace();
        self.data.get(self.pos).copied()
    }

    /// Next token; `None` at end of input.
    pub fn next_token(&mut self) -> Result<Option<Token>> {
        self.skip_whitespace();
        let Some(&b) = self.data.get(self.pos) else {
            return Ok(None);
        };
        match b {
            b'/' => Ok(Some(Token::Obj(Object::Name(self.read_name()?)))),
            b'(' => Ok(Some(Token::Obj(Object::Str(self.read_literal_string()?)))),
            b'<' => {
                if self.data.get(self.pos + 1) == Some(&b'<') {
                    let d = self.read_dict()?;
                    Ok(Some(Token::Obj(d)))
                } else {
                    Ok(Some(Token::Obj(Object::Str(self.read_hex_string()?))))
                }
            }
            b'[' => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_whitespace();
                    if self.data.get(self.pos) == Some(&b']') {
                        self.pos += 1;
                        break;
                    }
                    items.push(self.read_object()?);
                }
                Ok(Some(Token::Obj(Object::Array(items))))
            }
            b']' | b'>' | b')' | b'}' => Err(self.err("unexpected delimiter")),
            b'{' => {
                self.pos += 1;
                Ok(Some(Token::Keyword("{".into())))
            }
            b'+' | b'-' | b'.' | b'0'..=b'9' => {
                let n = self.read_number()?;
                Ok(Some(Token::Obj(n)))
            }
            _ => {
                let start = self.pos;
                while self.pos < self.data.len()
                    && !is_whitespace(self.data[self.pos])
                    && !is_delimiter(self.data[self.pos])
                {
                    self.pos += 1;
                }
                if self.pos == start {
                    return Err(self.err("stray byte"));
                }
                let word = String::from_utf8_lossy(&self.data[start..self.pos]).into_owned();
                match word.as_str() {
                    "true" => Ok(Some(Token::Obj(Object::Bool(true)))),
                    "false" => Ok(Some(Token::Obj(Object::Bool(false)))),
                    "null" => Ok(Some(Token::Obj(Object::Null))),
                    _ => Ok(Some(Token::Keyword(word))),
                }
            }
        }
    }

    /// Read a full object, resolving `n g R` reference triples.
    pub fn read_object(&mut self) -> Result<Object> {
        let tok = self
            .next_token()?
            .ok_or_else(|| self.err("unexpected end of input"))?;
        match tok {
            Token::Obj(Object::Int(num)) => {
                // Lookahead for "gen R".
                let save = self.pos;
                if let Ok(Some(Token::Obj(Object::Int(gen)))) = self.next_token() {
                    let save2 = self.pos;
                    if let Ok(Some(Token::Keyword(ref k))) = self.next_token() {
                        if k == "R" && num >= 0 && gen >= 0 {
                            return Ok(Object::Ref(ObjRef::new(num as u32, gen as u16)));
                        }
                    }
                    self.pos = save2;
                    let _ = gen;
                }
                self.pos = save;
                Ok(Object::Int(num))
            }
            Token::Obj(o) => Ok(o),
            Token::Keyword(k) => Err(self.err(&format!("expected object, found keyword {k}"))),
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        match self.next_token()? {
            Some(Token::Keyword(k)) if k == kw => Ok(()),
            other => Err(self.err(&format!("expected {kw}, found {other:?}"))),
        }
    }

    fn read_name(&mut self) -> Result<String> {
        self.pos += 1; // consume '/'
        let mut out = Vec::new();
        while self.pos < self.data.len() {
            let b = self.data[self.pos];
            if is_whitespace(b) || is_delimiter(b) {
                break;
            }
            if b == b'#' && self.pos + 2 < self.data.len() {
                let hex = std::str::from_utf8(&self.data[self.pos + 1..self.pos + 3])
                    .ok()
                    .and_then(|s| u8::from_str_radix(s, 16).ok());
                if let Some(v) = hex {
                    out.push(v);
                    self.pos += 3;
                    continue;
                }
            }
            out.push(b);
            self.pos += 1;
        }
        Ok(String::from_utf8_lossy(&out).into_owned())
    }

    fn read_number(&mut self) -> Result<Object> {
        let start = self.pos;
        if matches!(self.data.get(self.pos), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        let mut seen_dot = false;
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'0'..=b'9' => self.pos += 1,
                b'.' if !seen_dot => {
                    seen_dot = true;
                    self.pos += 1;
                }
                _ => break,
            }
        }
        let text = std::str::from_utf8(&self.data[start..self.pos])
            .map_err(|_| self.err("bad number"))?;
        if seen_dot {
            text.parse::<f64>()
                .map(Object::Real)
                .map_err(|_| self.err("bad real"))
        } else {
            text.parse::<i64>()
                .map(Object::Int)
                .map_err(|_| self.err("bad integer"))
        }
    }

    fn read_literal_string(&mut self) -> Result<Vec<u8>> {
        self.pos += 1; // consume '('
        let mut out = Vec::new();
        let mut depth = 1usize;
        while self.pos < self.data.len() {
            let b = self.data[self.pos];
            self.pos += 1;
            match b {
                b'\\' => {
                    let Some(&esc) = self.data.get(self.pos) else { break };
                    self.pos += 1;
                    match esc {
                        b'n' => out.push(b'\n'),
                        b'r' => out.push(b'\r'),
                        b't' => out.push(b'\t'),
                        b'b' => out.push(0x08),
                        b'f' => out.push(0x0c),
                        b'(' | b')' | b'\\' => out.push(esc),
                        b'\n' => {}
                        b'\r' => {
                            if self.data.get(self.pos) == Some(&b'\n') {
                                self.pos += 1;
                            }
                        }
                        b'0'..=b'7' => {
                            let mut v = (esc - b'0') as u32;
                            for _ in 0..2 {
                                match self.data.get(self.pos) {
                                    Some(&d @ b'0'..=b'7') => {
                                        v = v * 8 + (d - b'0') as u32;
                                        self.pos += 1;
                                    }
                                    _ => break,
                                }
                            }
                            out.push(v as u8);
                        }
                        _ => out.push(esc),
                    }
                }
                b'(' => {
                    depth += 1;
                    out.push(b);
                }
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(out);
                    }
                    out.push(b);
                }
                _ => out.push(b),
            }
        }
        Err(self.err("unterminated string"))
    }

    fn read_hex_string(&mut self) -> Result<Vec<u8>> {
        self.pos += 1; // consume '<'
        let mut digits = Vec::new();
        while self.pos < self.data.len() {
            let b = self.data[self.pos];
            self.pos += 1;
            match b {
                b'>' => {
                    if digits.len() % 2 == 1 {
                        digits.push(b'0');
                    }
                    let mut out = Vec::with_capacity(digits.len() / 2);
                    for pair in digits.chunks(2) {
                        let s = std::str::from_utf8(pair).map_err(|_| self.err("bad hex"))?;
                        out.push(u8::from_str_radix(s, 16).map_err(|_| self.err("bad hex"))?);
                    }
                    return Ok(out);
                }
                _ if is_whitespace(b) => {}
                _ if b.is_ascii_hexdigit() => digits.push(b),
                _ => return Err(self.err("bad hex digit")),
            }
        }
        Err(self.err("unterminated hex string"))
    }

    fn read_dict(&mut self) -> Result<Object> {
        self.pos += 2; // consume '<<'
        let mut dict = Dict::new();
        loop {
            self.skip_whitespace();
            if self.data[self.pos..].starts_with(b">>") {
                self.pos += 2;
                break;
            }
            let key = match self.next_token()? {
                Some(Token::Obj(Object::Name(n))) => n,
                other => return Err(self.err(&format!("expected name key, found {other:?}"))),
            };
            let value = self.read_object()?;
            dict.insert(key, value);
        }
        Ok(Object::Dict(dict))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scans_basic_objects() {
        let mut lex = Lexer::new(b"/Name 42 -3.5 (str\\)ing) <414243> [1 2 R /X] <</A 1/B[true]>>");
        assert_eq!(lex.read_object().unwrap(), Object::Name("Name".into()));
        assert_eq!(lex.read_object().unwrap(), Object::Int(42));
        assert_eq!(lex.read_object().unwrap(), Object::Real(-3.5));
        assert_eq!(lex.read_object().unwrap(), Object::Str(b"str)ing".to_vec()));
        assert_eq!(lex.read_object().unwrap(), Object::Str(b"ABC".to_vec()));
        let arr = lex.read_object().unwrap();
        match arr {
            Object::Array(items) => {
                assert_eq!(items[0], Object::Ref(ObjRef::new(1, 2)));
                assert_eq!(items[1], Object::Name("X".into()));
            }
            _ => panic!(),
        }
        let d = lex.read_object().unwrap();
        assert_eq!(d.as_dict().unwrap()["A"], Object::Int(1));
    }

    #[test]
    fn distinguishes_refs_from_ints() {
        let mut lex = Lexer::new(b"[10 0 R 10 0 7]");
        match lex.read_object().unwrap() {
            Object::Array(items) => {
                assert_eq!(items.len(), 4);
                assert_eq!(items[0], Object::Ref(ObjRef::new(10, 0)));
                assert_eq!(items[1], Object::Int(10));
                assert_eq!(items[2], Object::Int(0));
                assert_eq!(items[3], Object::Int(7));
            }
            _ => panic!(),
        }
    }
}
