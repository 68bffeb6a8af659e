//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := ('-')? power
//! power  := atom ('^' integer)?
//! atom   := number | ident | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers are decimals with an optional exponent. Identifiers must be
//! declared variables or one of the built-in function names.

use super::ast::{Func, Node};
use super::VecFieldError;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, bytes: src.as_bytes(), pos: 0 }
    }

    fn tokenize(mut self) -> Result<Vec<(Token, usize)>, VecFieldError> {
        let mut out = Vec::new();
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            let start = self.pos;
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.pos += 1;
                }
                b'+' => {
                    out.push((Token::Plus, start));
                    self.pos += 1;
                }
                b'-' => {
                    out.push((Token::Minus, start));
                    self.pos += 1;
                }
                b'*' => {
                    out.push((Token::Star, start));
                    self.pos += 1;
                }
                b'/' => {
                    out.push((Token::Slash, start));
                    self.pos += 1;
                }
                b'^' => {
                    out.push((Token::Caret, start));
                    self.pos += 1;
                }
                b'(' => {
                    out.push((Token::LParen, start));
                    self.pos += 1;
                }
                b')' => {
                    out.push((Token::RParen, start));
                    self.pos += 1;
                }
                b'0'..=b'9' => {
                    out.push((self.number()?, start));
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while self.pos < self.bytes.len()
                        && (self.bytes[self.pos].is_ascii_alphanumeric()
                            || self.bytes[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    out.push((Token::Ident(self.src[start..self.pos].to_string()), start));
                }
                other => {
                    return Err(VecFieldError::Syntax {
                        offset: start,
                        msg: format!("unexpected character `{}`", other as char),
                    });
                }
            }
        }
        Ok(out)
    }

    fn number(&mut self) -> Result<Token, VecFieldError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.bytes.len() && (self.bytes[self.pos] | 0x20) == b'e' {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.bytes.len()
                && (self.bytes[self.pos] == b'+' || self.bytes[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // `e` belongs to a following identifier, not this number
                self.pos = mark;
            }
        }
        let text = &self.src[start..self.pos];
        let value: f64 = text.parse().map_err(|_| VecFieldError::Syntax {
            offset: start,
            msg: format!("invalid number `{text}`"),
        })?;
        Ok(Token::Num(value))
    }
}

pub(crate) fn parse(source: &str, vars: &[String]) -> Result<Node, VecFieldError> {
    let tokens = Lexer::new(source).tokenize()?;
    let mut p = Parser { tokens, idx: 0, vars, eof: source.len() };
    let node = p.expr()?;
    if let Some((_, offset)) = p.peek() {
        return Err(VecFieldError::Syntax { offset, msg: "unexpected trailing input".into() });
    }
    Ok(node)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    idx: usize,
    vars: &'a [String],
    eof: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<(Token, usize)> {
        self.tokens.get(self.idx).cloned()
    }

    fn bump(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), VecFieldError> {
        match self.bump() {
            Some((t, _)) if t == want => Ok(()),
            Some((_, offset)) => {
                Err(VecFieldError::Syntax { offset, msg: format!("expected {what}") })
            }
            None => {
                Err(VecFieldError::Syntax { offset: self.eof, msg: format!("expected {what}") })
            }
        }
    }

    fn expr(&mut self) -> Result<Node, VecFieldError> {
        let mut node = self.term()?;
        while let Some((t, _)) = self.peek() {
            match t {
                Token::Plus => {
                    self.bump();
                    node = Node::Add(Box::new(node), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.bump();
                    node = Node::Sub(Box::new(node), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(node)
    }

    fn term(&mut self) -> Result<Node, VecFieldError> {
        let mut node = self.factor()?;
        while let Some((t, _)) = self.peek() {
            match t {
                Token::Star => {
                    self.bump();
                    node = Node::Mul(Box::new(node), Box::new(self.factor()?));
                }
                Token::Slash => {
                    self.bump();
                    node = Node::Div(Box::new(node), Box::new(self.factor()?));
                }
                _ => break,
            }
        }
        Ok(node)
    }

    fn factor(&mut self) -> Result<Node, VecFieldError> {
        if let Some((Token::Minus, _)) = self.peek() {
            self.bump();
            return Ok(Node::Neg(Box::new(self.power()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, VecFieldError> {
        let base = self.atom()?;
        if let Some((Token::Caret, _)) = self.peek() {
            self.bump();
            let k = self.integer_exponent()?;
            return Ok(Node::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn integer_exponent(&mut self) -> Result<i32, VecFieldError> {
        let mut sign = 1i32;
        if let Some((Token::Minus, _)) = self.peek() {
            self.bump();
            sign = -1;
        }
        match self.bump() {
            Some((Token::Num(v), offset)) => {
                if v.fract() != 0.0 || v.abs() > i32::MAX as f64 {
                    return Err(VecFieldError::NonIntegerExponent { offset });
                }
                Ok(sign * v as i32)
            }
            Some((_, offset)) => Err(VecFieldError::NonIntegerExponent { offset }),
            None => Err(VecFieldError::Syntax { offset: self.eof, msg: "expected exponent".into() }),
        }
    }

    fn atom(&mut self) -> Result<Node, VecFieldError> {
        match self.bump() {
            Some((Token::Num(v), _)) => Ok(Node::Num(v)),
            Some((Token::Ident(name), offset)) => {
                if let Some(func) = Func::from_name(&name) {
                    self.expect(Token::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen, "`)`")?;
                    return Ok(Node::Call(func, Box::new(arg)));
                }
                match self.vars.iter().position(|v| v == &name) {
                    Some(i) => Ok(Node::Var(i)),
                    None => Err(VecFieldError::UnknownIdentifier { name, offset }),
                }
            }
            Some((Token::LParen, _)) => {
                let node = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(node)
            }
            Some((_, offset)) => {
                Err(VecFieldError::Syntax { offset, msg: "expected expression".into() })
            }
            None => {
                Err(VecFieldError::Syntax { offset: self.eof, msg: "expected expression".into() })
            }
        }
    }
}
