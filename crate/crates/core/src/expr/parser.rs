//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term  { ('+'|'-') term }
//! term     := unary { ('*'|'/') unary }
//! unary    := '-' unary | power
//! power    := atom  { '^' exponent }          exponent is a literal constant
//! exponent := ['-'] number
//! atom     := number | 'pi' | 'e' | func '(' expr ')' | 'x'digits | '(' expr ')'
//! ```

use super::{BinaryOp, Node, ParseError, UnaryOp};

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
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

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Offset of the next token, after whitespace.
    fn peek_pos(&mut self) -> usize {
        self.skip_ws();
        self.pos
    }

    fn next_tok(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::End, start));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' | b'.' => self.lex_number(start)?,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[self.pos..end])
                    .expect("identifier is ascii")
                    .to_string();
                self.pos = end;
                Tok::Ident(name)
            }
            other => {
                return Err(ParseError::Syntax {
                    position: start,
                    message: format!("unexpected character `{}`", other as char),
                })
            }
        };
        Ok((tok, start))
    }

    fn lex_number(&mut self, start: usize) -> Result<Tok, ParseError> {
        let mut end = self.pos;
        while end < self.src.len() && self.src[end].is_ascii_digit() {
            end += 1;
        }
        if end < self.src.len() && self.src[end] == b'.' {
            end += 1;
            while end < self.src.len() && self.src[end].is_ascii_digit() {
                end += 1;
            }
        }
        // `1e-3` consumes the exponent only when digits follow; `2*e` keeps
        // `e` as an identifier.
        if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
            let mut probe = end + 1;
            if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                end = probe;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..end]).expect("number is ascii");
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            position: start,
            message: format!("invalid number `{}`", text),
        })?;
        self.pos = end;
        Ok(Tok::Num(value))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_pos: usize,
    dim: usize,
}

pub fn parse(src: &str, dim: usize) -> Result<Node, ParseError> {
    let mut lexer = Lexer::new(src);
    let (tok, tok_pos) = lexer.next_tok()?;
    let mut p = Parser {
        lexer,
        tok,
        tok_pos,
        dim,
    };
    let node = p.parse_expr()?;
    if p.tok != Tok::End {
        return Err(ParseError::Syntax {
            position: p.tok_pos,
            message: format!("unexpected trailing input"),
        });
    }
    Ok(node)
}

impl Parser<'_> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, pos) = self.lexer.next_tok()?;
        self.tok = tok;
        self.tok_pos = pos;
        Ok(())
    }

    fn parse_expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.parse_term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn parse_term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.parse_unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn parse_unary(&mut self) -> Result<Node, ParseError> {
        if self.tok == Tok::Minus {
            self.bump()?;
            let inner = self.parse_unary()?;
            // Fold literal negation so printing stays invertible.
            if let Node::Const(c) = inner {
                return Ok(Node::Const(-c));
            }
            return Ok(Node::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Node, ParseError> {
        let mut base = self.parse_atom()?;
        while self.tok == Tok::Caret {
            self.bump()?;
            let exponent = self.parse_exponent()?;
            base = Node::Pow(Box::new(base), exponent);
        }
        Ok(base)
    }

    fn parse_exponent(&mut self) -> Result<f64, ParseError> {
        let mut sign = 1.0;
        if self.tok == Tok::Minus {
            sign = -1.0;
            self.bump()?;
        }
        match self.tok {
            Tok::Num(v) => {
                self.bump()?;
                Ok(sign * v)
            }
            _ => Err(ParseError::Syntax {
                position: self.tok_pos,
                message: "exponent must be a literal constant".to_string(),
            }),
        }
    }

    fn parse_atom(&mut self) -> Result<Node, ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Node::Const(v))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.parse_expr()?;
                if self.tok != Tok::RParen {
                    return Err(ParseError::Syntax {
                        position: self.tok_pos,
                        message: "expected `)`".to_string(),
                    });
                }
                self.bump()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let pos = self.tok_pos;
                self.bump()?;
                self.parse_ident(name, pos)
            }
            _ => Err(ParseError::Syntax {
                position: self.tok_pos,
                message: "expected a number, coordinate, function or `(`".to_string(),
            }),
        }
    }

    fn parse_ident(&mut self, name: String, pos: usize) -> Result<Node, ParseError> {
        match name.as_str() {
            "pi" => return Ok(Node::Const(std::f64::consts::PI)),
            "e" => return Ok(Node::Const(std::f64::consts::E)),
            _ => {}
        }
        let func = match name.as_str() {
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "exp" => Some(UnaryOp::Exp),
            "sqrt" => Some(UnaryOp::Sqrt),
            "log" => Some(UnaryOp::Log),
            _ => None,
        };
        if let Some(op) = func {
            if self.tok != Tok::LParen {
                return Err(ParseError::Syntax {
                    position: self.lexer.peek_pos(),
                    message: format!("expected `(` after `{}`", name),
                });
            }
            self.bump()?;
            let arg = self.parse_expr()?;
            if self.tok != Tok::RParen {
                return Err(ParseError::Syntax {
                    position: self.tok_pos,
                    message: "expected `)`".to_string(),
                });
            }
            self.bump()?;
            return Ok(Node::Unary(op, Box::new(arg)));
        }
        // Coordinates look like `x12`.
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = rest.parse().map_err(|_| ParseError::Syntax {
                    position: pos,
                    message: format!("coordinate index `{}` too large", rest),
                })?;
                if index >= self.dim {
                    return Err(ParseError::IndexOutOfRange {
                        index,
                        dim: self.dim,
                        position: pos,
                    });
                }
                return Ok(Node::Var(index));
            }
        }
        Err(ParseError::UnknownSymbol {
            name,
            position: pos,
        })
    }
}
