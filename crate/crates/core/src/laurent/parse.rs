//! Text and JSON readers for polynomials and systems.
//!
//! Polynomial grammar (whitespace between tokens is ignored):
//!
//! ```text
//! poly    := term (('+'|'-') term)*
//! term    := [coeff '*'] factor ('*' factor)* | coeff
//! factor  := ident ('^' int)?
//! coeff   := decimal | '(' decimal (('+'|'-') decimal 'i')? ')'
//! decimal := '-'? digits ('.' digits)? (('e'|'E') int)?
//! int     := '-'? digits
//! ```
//!
//! A system file is a `vars: x, y[, ...]` line followed by one `f<k>: <poly>`
//! line per polynomial. Blank lines and lines starting with `#` are skipped.

use num_complex::Complex64;
use serde::Deserialize;

use super::{ExponentVector, LaurentPolynomial, PolySystem};
use crate::error::{Error, Result};

/// Parse-time validation limits.
#[derive(Clone, Debug)]
pub struct ParseOptions {
    /// Bound on `|exponent|`; keeps downstream exact hull arithmetic small.
    pub max_exponent: i64,
    /// Bound on coefficient magnitude.
    pub max_coefficient: f64,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            max_exponent: 64,
            max_coefficient: 1e12,
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Number(f64),
    Ident(String),
    ImagSuffixNumber(f64), // decimal immediately followed by `i`
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn next_token(&mut self) -> Result<Spanned> {
        while matches!(
            self.peek(),
            Some(b' ') | Some(b'\t') | Some(b'\r') | Some(b'\n')
        ) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let spanned = |tok| Spanned { tok, line, col };
        let Some(b) = self.peek() else {
            return Ok(spanned(Tok::End));
        };
        match b {
            b'+' => {
                self.bump();
                Ok(spanned(Tok::Plus))
            }
            b'-' => {
                // A '-' directly before a digit could begin a signed decimal;
                // the parser decides from context, so the lexer always emits
                // Minus and numbers are unsigned here.
                self.bump();
                Ok(spanned(Tok::Minus))
            }
            b'*' => {
                self.bump();
                Ok(spanned(Tok::Star))
            }
            b'^' => {
                self.bump();
                Ok(spanned(Tok::Caret))
            }
            b'(' => {
                self.bump();
                Ok(spanned(Tok::LParen))
            }
            b')' => {
                self.bump();
                Ok(spanned(Tok::RParen))
            }
            b'0'..=b'9' | b'.' => {
                let start = self.pos;
                while matches!(self.peek(), Some(b'0'..=b'9')) {
                    self.bump();
                }
                if self.peek() == Some(b'.') {
                    self.bump();
                    while matches!(self.peek(), Some(b'0'..=b'9')) {
                        self.bump();
                    }
                }
                if matches!(self.peek(), Some(b'e') | Some(b'E')) {
                    // Only treat as exponent if followed by digits or sign+digits;
                    // otherwise `e` starts an identifier (e.g. `2*e1` is an error
                    // anyway since implicit products are not in the grammar).
                    let save = (self.pos, self.line, self.col);
                    self.bump();
                    if self.peek() == Some(b'-') || self.peek() == Some(b'+') {
                        self.bump();
                    }
                    if matches!(self.peek(), Some(b'0'..=b'9')) {
                        while matches!(self.peek(), Some(b'0'..=b'9')) {
                            self.bump();
                        }
                    } else {
                        (self.pos, self.line, self.col) = save;
                    }
                }
                let textual = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let value: f64 = textual.parse().map_err(|_| Error::Parse {
                    line,
                    col,
                    message: format!("invalid number `{textual}`"),
                })?;
                if self.peek() == Some(b'i')
                    && !matches!(
                        self.src.get(self.pos + 1),
                        Some(c) if c.is_ascii_alphanumeric() || *c == b'_'
                    )
                {
                    self.bump();
                    return Ok(spanned(Tok::ImagSuffixNumber(value)));
                }
                Ok(spanned(Tok::Number(value)))
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                let start = self.pos;
                while matches!(
                    self.peek(),
                    Some(c) if c.is_ascii_alphanumeric() || c == b'_'
                ) {
                    self.bump();
                }
                let name = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .to_string();
                Ok(spanned(Tok::Ident(name)))
            }
            other => Err(self.error(format!("unexpected character `{}`", other as char))),
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    current: Spanned,
    vars: Vec<String>,
    discover: bool,
    opts: &'a ParseOptions,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, expected_vars: Option<&[String]>, opts: &'a ParseOptions) -> Result<Self> {
        let mut lexer = Lexer::new(src);
        let current = lexer.next_token()?;
        Ok(Parser {
            lexer,
            current,
            vars: expected_vars.map(|v| v.to_vec()).unwrap_or_default(),
            discover: expected_vars.is_none(),
            opts,
        })
    }

    fn advance(&mut self) -> Result<Spanned> {
        let next = self.lexer.next_token()?;
        Ok(std::mem::replace(&mut self.current, next))
    }

    fn error_here(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.current.line,
            col: self.current.col,
            message: message.into(),
        }
    }

    fn var_index(&mut self, name: &str, line: usize, col: usize) -> Result<usize> {
        if let Some(idx) = self.vars.iter().position(|v| v == name) {
            return Ok(idx);
        }
        if self.discover {
            self.vars.push(name.to_string());
            Ok(self.vars.len() - 1)
        } else {
            Err(Error::UnknownVariable {
                name: name.to_string(),
                line,
                col,
            })
        }
    }

    /// decimal with optional leading minus (already split off by the lexer).
    fn signed_decimal(&mut self) -> Result<f64> {
        let mut sign = 1.0;
        if self.current.tok == Tok::Minus {
            self.advance()?;
            sign = -1.0;
        } else if self.current.tok == Tok::Plus {
            self.advance()?;
        }
        match self.advance()?.tok {
            Tok::Number(v) => Ok(sign * v),
            other => Err(self.error_here(format!("expected a number, found {other:?}"))),
        }
    }

    /// `'(' decimal (('+'|'-') decimal 'i')? ')'` with the '(' consumed.
    fn complex_tail(&mut self) -> Result<Complex64> {
        let re = self.signed_decimal()?;
        let im = match self.current.tok {
            Tok::Plus | Tok::Minus => {
                let neg = self.current.tok == Tok::Minus;
                self.advance()?;
                match self.advance()?.tok {
                    Tok::ImagSuffixNumber(v) => {
                        if neg {
                            -v
                        } else {
                            v
                        }
                    }
                    other => {
                        return Err(
                            self.error_here(format!("expected imaginary part, found {other:?}"))
                        )
                    }
                }
            }
            _ => 0.0,
        };
        if self.current.tok != Tok::RParen {
            return Err(self.error_here("expected `)` after complex coefficient"));
        }
        self.advance()?;
        Ok(Complex64::new(re, im))
    }

    fn exponent_int(&mut self) -> Result<i64> {
        let neg = if self.current.tok == Tok::Minus {
            self.advance()?;
            true
        } else {
            false
        };
        let sp = self.advance()?;
        match sp.tok {
            Tok::Number(v) => {
                if v.fract() != 0.0 || v.abs() > i64::MAX as f64 {
                    return Err(Error::Parse {
                        line: sp.line,
                        col: sp.col,
                        message: format!("exponent `{v}` is not an integer"),
                    });
                }
                let e = if neg { -(v as i64) } else { v as i64 };
                if e.abs() > self.opts.max_exponent {
                    return Err(Error::ExponentOutOfRange {
                        value: e,
                        bound: self.opts.max_exponent,
                    });
                }
                Ok(e)
            }
            other => Err(self.error_here(format!("expected integer exponent, found {other:?}"))),
        }
    }

    /// One term: optional coefficient, then `*`-joined variable factors.
    /// Returns (coefficient, exponents-by-var-index).
    fn term(&mut self, leading_sign: f64) -> Result<(Complex64, Vec<(usize, i64)>)> {
        let mut coeff = Complex64::new(leading_sign, 0.0);
        let mut factors: Vec<(usize, i64)> = Vec::new();
        let mut saw_coeff = false;

        // optional coefficient
        match self.current.tok.clone() {
            Tok::Number(v) => {
                self.advance()?;
                coeff *= v;
                saw_coeff = true;
            }
            Tok::LParen => {
                self.advance()?;
                coeff *= self.complex_tail()?;
                saw_coeff = true;
            }
            Tok::Minus => {
                // a sign opening the term: `-2*x`, or bare `-x` with an
                // implicit coefficient of one
                self.advance()?;
                coeff = -coeff;
                match self.current.tok {
                    Tok::Number(v) => {
                        self.advance()?;
                        coeff *= v;
                        saw_coeff = true;
                    }
                    Tok::LParen => {
                        self.advance()?;
                        coeff *= self.complex_tail()?;
                        saw_coeff = true;
                    }
                    _ => {}
                }
            }
            _ => {}
        }

        if saw_coeff {
            if self.current.tok == Tok::Star {
                self.advance()?;
            } else {
                // bare coefficient term
                return Ok((coeff, factors));
            }
        }

        loop {
            let sp = self.advance()?;
            match sp.tok {
                Tok::Ident(name) => {
                    let idx = self.var_index(&name, sp.line, sp.col)?;
                    let exp = if self.current.tok == Tok::Caret {
                        self.advance()?;
                        self.exponent_int()?
                    } else {
                        1
                    };
                    factors.push((idx, exp));
                }
                other => {
                    return Err(Error::Parse {
                        line: sp.line,
                        col: sp.col,
                        message: format!("expected a variable factor, found {other:?}"),
                    })
                }
            }
            if self.current.tok == Tok::Star {
                self.advance()?;
            } else {
                break;
            }
        }
        Ok((coeff, factors))
    }

    fn poly(&mut self) -> Result<Vec<(Complex64, Vec<(usize, i64)>)>> {
        let mut terms = Vec::new();
        terms.push(self.term(1.0)?);
        loop {
            match self.current.tok {
                Tok::Plus => {
                    self.advance()?;
                    terms.push(self.term(1.0)?);
                }
                Tok::Minus => {
                    self.advance()?;
                    terms.push(self.term(-1.0)?);
                }
                Tok::End => break,
                _ => return Err(self.error_here("expected `+`, `-` or end of polynomial")),
            }
        }
        Ok(terms)
    }
}

/// Parse one polynomial. With `expected_vars = None`, variables are
/// discovered in order of first appearance; the discovered list is returned
/// alongside the polynomial.
pub fn parse_polynomial(
    text: &str,
    expected_vars: Option<&[String]>,
    opts: &ParseOptions,
) -> Result<(LaurentPolynomial, Vec<String>)> {
    let mut parser = Parser::new(text, expected_vars, opts)?;
    let raw_terms = parser.poly()?;
    let num_vars = parser.vars.len();
    if num_vars == 0 && expected_vars.is_none() {
        return Err(Error::InvalidInput(
            "cannot infer variables from a constant polynomial".into(),
        ));
    }
    let mut terms = Vec::with_capacity(raw_terms.len());
    for (coeff, factors) in raw_terms {
        if !coeff.re.is_finite() || !coeff.im.is_finite() {
            return Err(Error::NonFiniteCoefficient);
        }
        if coeff.norm() > opts.max_coefficient {
            return Err(Error::CoefficientOutOfRange {
                value: coeff.norm(),
                bound: opts.max_coefficient,
            });
        }
        let mut exps = vec![0i64; num_vars];
        for (idx, e) in factors {
            exps[idx] += e;
            if exps[idx].abs() > opts.max_exponent {
                return Err(Error::ExponentOutOfRange {
                    value: exps[idx],
                    bound: opts.max_exponent,
                });
            }
        }
        terms.push((ExponentVector::new(exps), coeff));
    }
    let poly = LaurentPolynomial::from_terms(num_vars, terms)?;
    Ok((poly, parser.vars))
}

/// Parse a system file: a `vars:` line, then one `f<k>:` line per polynomial.
pub fn parse_system(text: &str, opts: &ParseOptions) -> Result<PolySystem> {
    let mut vars: Option<Vec<String>> = None;
    let mut polys = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((head, body)) = line.split_once(':') else {
            return Err(Error::Parse {
                line: lineno + 1,
                col: 1,
                message: "expected `vars:` or `f<k>: <poly>`".into(),
            });
        };
        let head = head.trim();
        if head == "vars" {
            if vars.is_some() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    col: 1,
                    message: "duplicate `vars:` line".into(),
                });
            }
            let names: Vec<String> = body
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            if names.is_empty() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    col: 1,
                    message: "empty variable list".into(),
                });
            }
            vars = Some(names);
        } else if head.starts_with('f') {
            let Some(vars) = vars.as_ref() else {
                return Err(Error::Parse {
                    line: lineno + 1,
                    col: 1,
                    message: "`vars:` line must come before the polynomials".into(),
                });
            };
            let (poly, _) = parse_polynomial(body, Some(vars), opts).map_err(|e| match e {
                Error::Parse { line, col, message } => Error::Parse {
                    line: lineno + line,
                    col,
                    message,
                },
                other => other,
            })?;
            polys.push(poly);
        } else {
            return Err(Error::Parse {
                line: lineno + 1,
                col: 1,
                message: format!("unknown line head `{head}`"),
            });
        }
    }
    let vars = vars.ok_or_else(|| Error::InvalidInput("missing `vars:` line".into()))?;
    PolySystem::new(polys, vars)
}

#[derive(Deserialize)]
struct JsonTerm {
    exp: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Deserialize)]
struct JsonPoly {
    terms: Vec<JsonTerm>,
}

#[derive(Deserialize)]
struct JsonSystem {
    vars: Vec<String>,
    polys: Vec<JsonPoly>,
}

/// Read the canonical JSON system format
/// `{"vars":[...],"polys":[{"terms":[{"exp":[...],"re":r,"im":i}]}]}`.
pub fn system_from_json(text: &str) -> Result<PolySystem> {
    let parsed: JsonSystem = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("invalid system JSON: {e}")))?;
    let num_vars = parsed.vars.len();
    let polys = parsed
        .polys
        .into_iter()
        .map(|p| {
            LaurentPolynomial::from_terms(
                num_vars,
                p.terms
                    .into_iter()
                    .map(|t| (ExponentVector::new(t.exp), Complex64::new(t.re, t.im))),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    PolySystem::new(polys, parsed.vars)
}
