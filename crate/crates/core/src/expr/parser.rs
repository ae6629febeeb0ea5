//! Recursive-descent parser for the expression language.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-'* base ('^' factor)?
//! base   := number | 'pi' | identifier | func '(' expr ')' | '(' expr ')'
//! func   := 'ln' | 'atan' | 'acot' | 'cos' | 'sin'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! reads as `-(x^2)` and `x^-2` is accepted. Decimal literals are exact
//! rationals (`0.1` is 1/10). The caller names the integration variable;
//! every other identifier becomes a parameter.

use thiserror::Error;

use crate::rational::{rat_from_decimal, Rational};

use super::Expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: unexpected character '{ch}'")]
    UnexpectedChar { line: usize, col: usize, ch: char },
    #[error("line {line}, column {col}: unexpected end of input")]
    UnexpectedEnd { line: usize, col: usize },
    #[error("line {line}, column {col}: expected {expected}, found '{found}'")]
    UnexpectedToken {
        line: usize,
        col: usize,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}, column {col}: unknown function '{name}'")]
    UnknownFunction {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("line {line}, column {col}: malformed number literal")]
    BadNumber { line: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_) => "number".to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".to_string(),
            Tok::Minus => "-".to_string(),
            Tok::Star => "*".to_string(),
            Tok::Slash => "/".to_string(),
            Tok::Caret => "^".to_string(),
            Tok::LParen => "(".to_string(),
            Tok::RParen => ")".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(input: &str) -> Result<(Vec<Spanned>, usize, usize), ParseError> {
    let mut toks = Vec::new();
    let mut chars = input.chars().peekable();
    let mut line = 1usize;
    let mut col = 1usize;
    while let Some(&ch) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match ch {
            c if c.is_whitespace() => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                chars.next();
                bump(ch, &mut line, &mut col);
                let tok = match ch {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    _ => Tok::RParen,
                };
                toks.push(Spanned {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
            c if c.is_ascii_digit() => {
                let mut whole = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        whole.push(d);
                        chars.next();
                        bump(d, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                let mut frac = String::new();
                if chars.peek() == Some(&'.') {
                    chars.next();
                    bump('.', &mut line, &mut col);
                    while let Some(&d) = chars.peek() {
                        if d.is_ascii_digit() {
                            frac.push(d);
                            chars.next();
                            bump(d, &mut line, &mut col);
                        } else {
                            break;
                        }
                    }
                    if frac.is_empty() {
                        return Err(ParseError::BadNumber {
                            line: tline,
                            col: tcol,
                        });
                    }
                }
                let r = rat_from_decimal(&whole, &frac).ok_or(ParseError::BadNumber {
                    line: tline,
                    col: tcol,
                })?;
                toks.push(Spanned {
                    tok: Tok::Num(r),
                    line: tline,
                    col: tcol,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        name.push(d);
                        chars.next();
                        bump(d, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                toks.push(Spanned {
                    tok: Tok::Ident(name),
                    line: tline,
                    col: tcol,
                });
            }
            other => {
                return Err(ParseError::UnexpectedChar {
                    line,
                    col,
                    ch: other,
                })
            }
        }
    }
    Ok((toks, line, col))
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    var: &'a str,
    end_line: usize,
    end_col: usize,
}

const FUNCTIONS: [&str; 5] = ["ln", "atan", "acot", "cos", "sin"];

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn unexpected_end(&self) -> ParseError {
        ParseError::UnexpectedEnd {
            line: self.end_line,
            col: self.end_col,
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.next() {
            Some(Spanned {
                tok: Tok::RParen, ..
            }) => Ok(()),
            Some(s) => Err(ParseError::UnexpectedToken {
                line: s.line,
                col: s.col,
                expected: "')'",
                found: s.tok.describe(),
            }),
            None => Err(self.unexpected_end()),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        while let Some(s) = self.peek() {
            match s.tok {
                Tok::Plus => {
                    self.next();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    terms.push(self.term()?.neg());
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        while let Some(s) = self.peek() {
            match s.tok {
                Tok::Star => {
                    self.next();
                    factors.push(self.factor()?);
                }
                Tok::Slash => {
                    self.next();
                    factors.push(self.factor()?.recip());
                }
                _ => break,
            }
        }
        Ok(Expr::product(factors))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let mut negate = false;
        while matches!(self.peek().map(|s| &s.tok), Some(Tok::Minus)) {
            self.next();
            negate = !negate;
        }
        let base = self.base()?;
        let e = if matches!(self.peek().map(|s| &s.tok), Some(Tok::Caret)) {
            self.next();
            let exp = self.factor()?;
            Expr::power(base, exp)
        } else {
            base
        };
        Ok(if negate { e.neg() } else { e })
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let s = self.next().ok_or_else(|| self.unexpected_end())?;
        match s.tok {
            Tok::Num(r) => Ok(Expr::number(r)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let call = matches!(self.peek().map(|t| &t.tok), Some(Tok::LParen));
                if call {
                    if !FUNCTIONS.contains(&name.as_str()) {
                        return Err(ParseError::UnknownFunction {
                            line: s.line,
                            col: s.col,
                            name,
                        });
                    }
                    self.next();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(match name.as_str() {
                        "ln" => Expr::ln(arg),
                        "atan" => Expr::atan(arg),
                        "acot" => Expr::acot(arg),
                        "cos" => Expr::cos(arg),
                        _ => Expr::sin(arg),
                    })
                } else if name == "pi" {
                    Ok(Expr::pi())
                } else if name == self.var {
                    Ok(Expr::var(&name))
                } else {
                    Ok(Expr::param(&name))
                }
            }
            other => Err(ParseError::UnexpectedToken {
                line: s.line,
                col: s.col,
                expected: "a number, symbol, function call, or '('",
                found: other.describe(),
            }),
        }
    }
}

/// Parses `input` with `var` designated as the integration variable. The
/// result is in canonical form.
pub fn parse(input: &str, var: &str) -> Result<Expr, ParseError> {
    let (toks, end_line, end_col) = lex(input)?;
    let mut p = Parser {
        toks,
        pos: 0,
        var,
        end_line,
        end_col,
    };
    let e = p.expr()?;
    if let Some(s) = p.peek() {
        return Err(ParseError::UnexpectedToken {
            line: s.line,
            col: s.col,
            expected: "end of input",
            found: s.tok.describe(),
        });
    }
    Ok(e)
}
