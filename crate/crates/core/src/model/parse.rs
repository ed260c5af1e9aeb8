//! Recursive-descent parser for model expressions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | ident | ident '(' sum (',' sum)* ')' | '(' sum ')'
//! ```

use std::fmt;

use thiserror::Error;

use super::{BinOp, Expr, Func, ModelAst};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{message} at line {line}, column {column}")]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::Op(c) => write!(f, "'{c}'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| ParseError {
                message: format!("malformed number '{text}'"),
                line: pos.line,
                column: pos.column,
            })?;
            Tok::Num(value)
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => {
                    return Err(ParseError {
                        message: format!("unexpected character '{c}'"),
                        line: pos.line,
                        column: pos.column,
                    })
                }
            }
        };
        column += i - start;
        toks.push((tok, pos));
    }
    toks.push((Tok::End, Pos { line, column }));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    variables: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error_here(&self, message: String) -> ParseError {
        let pos = self.toks[self.at].1;
        ParseError { message, line: pos.line, column: pos.column }
    }

    fn unexpected(&self) -> ParseError {
        self.error_here(format!("unexpected {}", self.peek()))
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {want}, found {}", self.peek())))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.next();
            let rhs = self.product()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.next();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.next();
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.next();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.next();
                let e = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let (_, pos) = self.next();
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name).ok_or_else(|| ParseError {
                        message: format!("unknown function '{name}'"),
                        line: pos.line,
                        column: pos.column,
                    })?;
                    self.next();
                    let mut args = vec![self.sum()?];
                    while *self.peek() == Tok::Comma {
                        self.next();
                        args.push(self.sum()?);
                    }
                    self.expect(Tok::RParen)?;
                    if !func.accepts(args.len()) {
                        return Err(ParseError {
                            message: format!("function '{name}' does not take {} argument(s)", args.len()),
                            line: pos.line,
                            column: pos.column,
                        });
                    }
                    Ok(Expr::Call(func, args))
                } else {
                    let slot = match self.variables.iter().position(|v| *v == name) {
                        Some(i) => i,
                        None => {
                            self.variables.push(name);
                            self.variables.len() - 1
                        }
                    };
                    Ok(Expr::Var(slot))
                }
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses a model expression.
pub fn parse(source: &str) -> Result<ModelAst, ParseError> {
    let toks = lex(source)?;
    let mut p = Parser { toks, at: 0, variables: Vec::new() };
    let root = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected());
    }
    Ok(ModelAst { root, variables: p.variables, source: source.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let ast = parse("1+2*3").unwrap();
        assert_eq!(ast.point_at(&[]).unwrap(), 7.0);
        assert_eq!(parse("-2^2").unwrap().point_at(&[]).unwrap(), -4.0);
        assert_eq!(parse("2^3^2").unwrap().point_at(&[]).unwrap(), 512.0);
        assert_eq!(parse("2^-1").unwrap().point_at(&[]).unwrap(), 0.5);
        assert_eq!(parse("8 - 3 - 2").unwrap().point_at(&[]).unwrap(), 3.0);
        assert_eq!(parse("8 / 4 / 2").unwrap().point_at(&[]).unwrap(), 1.0);
        assert_eq!(parse(" ( 1 +\n 2 ) * 3 ").unwrap().point_at(&[]).unwrap(), 9.0);
        assert_eq!(parse("1.5e1 + 2E-1").unwrap().point_at(&[]).unwrap(), 15.2);
    }

    #[test]
    fn variables_in_order() {
        let ast = parse("x1 + 2*sin(x2)").unwrap();
        assert_eq!(ast.variables(), ["x1", "x2"]);
        assert_eq!(parse("a*b + a").unwrap().variables(), ["a", "b"]);
    }

    #[test]
    fn syntax_error_position() {
        let err = parse("x1 + * 2").unwrap_err();
        assert_eq!((err.line, err.column), (1, 6));
        assert!(err.message.contains("'*'"), "{}", err.message);
        let err = parse("x +\n  )").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        assert!(parse("(1 + 2").is_err());
        assert!(parse("1 2").is_err());
        assert!(parse("x $ y").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn unknown_function_and_arity() {
        let err = parse("1 + tan(x)").unwrap_err();
        assert!(err.message.contains("unknown function 'tan'"));
        assert_eq!(err.column, 5);
        assert!(parse("sin(x, y)").is_err());
        assert!(parse("min(x)").is_err());
        assert!(parse("max(x, y, z)").is_ok());
    }
}
