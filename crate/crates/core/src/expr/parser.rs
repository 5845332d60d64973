//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := ('-' | '+') unary | power
//! power    := atom ('^' exponent)*
//! exponent := ('-' | '+') exponent | atom
//! atom     := number | 'pi' | var | func '(' expr ')' | '(' expr ')'
//! ```

use thiserror::Error;

use super::{BinaryOp, Node, UnaryOp, VarSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },
}

impl ParseError {
    /// Byte offset into the source, when the error has one.
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::Syntax { pos, .. } | ParseError::UnknownIdentifier { pos, .. } => {
                Some(*pos)
            }
        }
    }
}

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
    End,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn syntax(&self, pos: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos,
            message: message.into(),
        }
    }

    fn tokenize(mut self) -> Result<Vec<(usize, Token)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            let start = self.pos;
            let Some(&c) = self.bytes.get(self.pos) else {
                out.push((start, Token::End));
                return Ok(out);
            };
            let tok = match c {
                b'+' => Token::Plus,
                b'-' => Token::Minus,
                b'*' => Token::Star,
                b'/' => Token::Slash,
                b'^' => Token::Caret,
                b'(' => Token::LParen,
                b')' => Token::RParen,
                b'0'..=b'9' | b'.' => {
                    out.push((start, self.number()?));
                    continue;
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while self
                        .bytes
                        .get(self.pos)
                        .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
                    {
                        self.pos += 1;
                    }
                    out.push((start, Token::Ident(self.src[start..self.pos].to_string())));
                    continue;
                }
                _ => {
                    let ch = self.src[start..].chars().next().unwrap_or('?');
                    return Err(self.syntax(start, format!("unexpected character `{ch}`")));
                }
            };
            self.pos += 1;
            out.push((start, tok));
        }
    }

    fn number(&mut self) -> Result<Token, ParseError> {
        let start = self.pos;
        let digits = |lx: &mut Self| {
            let from = lx.pos;
            while lx.bytes.get(lx.pos).is_some_and(u8::is_ascii_digit) {
                lx.pos += 1;
            }
            lx.pos - from
        };
        let mut count = digits(self);
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return Err(self.syntax(start, "malformed number"));
        }
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(self.syntax(mark, "malformed exponent"));
            }
        }
        let text = &self.src[start..self.pos];
        let value: f64 = text
            .parse()
            .map_err(|_| self.syntax(start, format!("malformed number `{text}`")))?;
        if !value.is_finite() {
            return Err(self.syntax(start, format!("number `{text}` overflows")));
        }
        Ok(Token::Num(value))
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    idx: usize,
    vars: VarSet,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.idx].1
    }

    fn pos(&self) -> usize {
        self.tokens[self.idx].0
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.idx].1.clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        tok
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinaryOp::Add,
                Token::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinaryOp::Mul,
                Token::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Token::Minus => {
                self.bump();
                Ok(Node::Unary(UnaryOp::Neg, Box::new(self.unary()?)))
            }
            Token::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let mut base = self.atom()?;
        while *self.peek() == Token::Caret {
            self.bump();
            let exponent = self.exponent()?;
            base = Node::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Token::Minus => {
                self.bump();
                Ok(Node::Unary(UnaryOp::Neg, Box::new(self.exponent()?)))
            }
            Token::Plus => {
                self.bump();
                self.exponent()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Token::Num(x) => Ok(Node::Const(x)),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(name) => {
                if let Some(op) = UnaryOp::from_function_name(&name) {
                    self.expect(Token::LParen, &format!("`(` after `{name}`"))?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen, "`)`")?;
                    return Ok(Node::Unary(op, Box::new(arg)));
                }
                if name == "pi" {
                    return Ok(Node::Const(std::f64::consts::PI));
                }
                match self.vars.lookup(&name) {
                    Some(var) => Ok(Node::Var(var)),
                    None => Err(ParseError::UnknownIdentifier { pos, name }),
                }
            }
            Token::End => Err(ParseError::Syntax {
                pos,
                message: "unexpected end of input".into(),
            }),
            tok => Err(ParseError::Syntax {
                pos,
                message: format!("unexpected token {tok:?}"),
            }),
        }
    }
}

pub(super) fn parse(source: &str, vars: VarSet) -> Result<Node, ParseError> {
    if source.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let tokens = Lexer::new(source).tokenize()?;
    let mut parser = Parser {
        tokens,
        idx: 0,
        vars,
    };
    let node = parser.expr()?;
    if *parser.peek() != Token::End {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(node)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(src: &str) -> ParseError {
        parse(src, VarSet::Tuv).unwrap_err()
    }

    #[test]
    fn reports_positions() {
        assert_eq!(err(""), ParseError::Empty);
        assert_eq!(err("   "), ParseError::Empty);
        assert_eq!(err("1 + * 2").position(), Some(4));
        assert_eq!(err("(1 + 2").position(), Some(6));
        assert_eq!(err("t u").position(), Some(2));
        assert_eq!(err("sin t").position(), Some(4));
        assert_eq!(err("2 # 3").position(), Some(2));
        assert_eq!(err("1e").position(), Some(1));
        assert_eq!(err("1e999").position(), Some(0));
        assert_eq!(
            err("t*foo(u)"),
            ParseError::UnknownIdentifier {
                pos: 2,
                name: "foo".into()
            }
        );
        assert!(matches!(err("x"), ParseError::UnknownIdentifier { pos: 0, .. }));
    }

    #[test]
    fn builds_left_associative_trees() {
        let node = parse("1 - 2 - 3", VarSet::Tuv).unwrap();
        let Node::Binary(BinaryOp::Sub, lhs, rhs) = node else {
            panic!("expected subtraction");
        };
        assert_eq!(*rhs, Node::Const(3.0));
        assert!(matches!(*lhs, Node::Binary(BinaryOp::Sub, _, _)));
    }
}
