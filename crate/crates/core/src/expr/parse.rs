//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' INT)?
//! atom   := INT | IDENT | '(' expr ')'
//! ```
//!
//! A rational literal `p/q` is the division of two integer literals.

use num_bigint::BigInt;

use super::poly::VarList;
use super::ratfun::RationalExpr;
use super::{ExprError, Rational};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().expect("digits")), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            let t = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(ExprError::Parse {
                        column: col,
                        message: format!("unexpected character '{c}'"),
                    })
                }
            };
            out.push((t, col));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    vars: &'a VarList,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Parse {
            column: self.col(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<RationalExpr, ExprError> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc.add_expr(&rhs) } else { acc.sub_expr(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalExpr, ExprError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            let col = self.col();
            self.pos += 1;
            acc = if op == '*' {
                acc.mul_expr(&self.unary()?)
            } else {
                let inv = self.unary_recip().map_err(|e| match e {
                    ExprError::ZeroDenominator => ExprError::Parse {
                        column: col,
                        message: "zero denominator".into(),
                    },
                    e => e,
                })?;
                acc.mul_expr(&inv)
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalExpr, ExprError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.unary()?.neg_expr())
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    /// Reciprocal of a unary operand. `1/b^k` is formed as `(1/b)^k` so the
    /// denominator keeps `b` as a factor instead of its expanded power.
    fn unary_recip(&mut self) -> Result<RationalExpr, ExprError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.unary_recip()?.neg_expr())
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary_recip()
            }
            _ => {
                let base = self.atom()?;
                let e = self.exponent()?;
                Ok(base.recip()?.pow(e))
            }
        }
    }

    fn power(&mut self) -> Result<RationalExpr, ExprError> {
        let base = self.atom()?;
        let e = self.exponent()?;
        Ok(if e == 1 { base } else { base.pow(e) })
    }

    fn exponent(&mut self) -> Result<u32, ExprError> {
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    let e: u32 = match n.try_into() {
                        Ok(e) => e,
                        Err(_) => return self.err("exponent too large"),
                    };
                    self.pos += 1;
                    Ok(e)
                }
                _ => self.err("exponent must be a non-negative integer literal"),
            }
        } else {
            Ok(1)
        }
    }

    fn atom(&mut self) -> Result<RationalExpr, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(RationalExpr::constant(self.vars, Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => match RationalExpr::var(self.vars, &name) {
                Ok(v) => {
                    self.pos += 1;
                    Ok(v)
                }
                Err(_) => self.err(format!("unknown identifier '{name}'")),
            },
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some(Tok::RParen) => self.err("unexpected ')'"),
            Some(Tok::Op(c)) => self.err(format!("unexpected operator '{c}'")),
            None => Err(ExprError::Parse {
                // point at the operator left dangling, if any
                column: self.toks.last().map_or(1, |(_, c)| *c),
                message: "unexpected end of expression".into(),
            }),
        }
    }
}

/// Parses `text` over a fixed variable list; unknown identifiers are errors.
pub fn parse_expr(text: &str, vars: &VarList) -> Result<RationalExpr, ExprError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_col: text.chars().count() + 1,
        vars,
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Parses `text`, taking the variable list from identifiers in order of appearance.
pub fn parse_expr_free(text: &str) -> Result<RationalExpr, ExprError> {
    let mut names: Vec<String> = Vec::new();
    for (t, _) in lex(text)? {
        if let Tok::Ident(n) = t {
            if !names.contains(&n) {
                names.push(n);
            }
        }
    }
    parse_expr(text, &VarList::new(names))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let v = VarList::new(["x"]);
        let e = parse_expr("-x^2 + 2*x/4 - 3/4", &v).unwrap();
        assert_eq!(e.to_string(), "-x^2 + 1/2*x - 3/4");
    }

    #[test]
    fn dangling_operator_reports_column() {
        let v = VarList::new(["u", "x"]);
        match parse_expr("-2*", &v) {
            Err(ExprError::Parse { column, .. }) => assert_eq!(column, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        let v = VarList::new(["u"]);
        assert!(matches!(parse_expr("u + w", &v), Err(ExprError::Parse { column: 5, .. })));
    }

    #[test]
    fn negative_exponent_rejected() {
        let v = VarList::new(["u"]);
        assert!(parse_expr("u^-1", &v).is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        let e = parse_expr_free("4/(1 + y1^2 + y2^2)^2 - y1*y2/(3 - y1)").unwrap();
        let again = parse_expr(&e.to_string(), e.vars()).unwrap();
        assert!(again.equals(&e));
    }
}
