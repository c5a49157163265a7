//! Rational expressions in the chart coordinates, with `sqrt`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' ['-'] integer)?
//! atom  := number | name | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, k) => a.eval(x).powi(*k),
            Expr::Sqrt(a) => a.eval(x).sqrt(),
        }
    }
}

/// A parse failure at a 1-based column.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Op(char),
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-3
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
            let v = text.parse::<f64>().map_err(|_| ParseError {
                column: col,
                message: format!("bad number '{text}'"),
            })?;
            out.push((Tok::Num(v), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Name(chars[start..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), col));
            i += 1;
        } else {
            return Err(ParseError {
                column: col,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [String],
    constants: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            column: self.col(),
            message: message.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if *self.peek() == Tok::Op(op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else {
            self.err(format!("expected '{op}'"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match *self.peek() {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= 64.0 => {
                self.pos += 1;
                let k = v as i32;
                Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }))
            }
            _ => self.err("exponent must be an integer literal"),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Tok::Name(name) => {
                if name == "sqrt" {
                    self.pos += 1;
                    self.expect('(')?;
                    let inner = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Sqrt(Box::new(inner)));
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    self.pos += 1;
                    return Ok(Expr::Var(i));
                }
                if let Some(v) = self.constants.get(&name) {
                    self.pos += 1;
                    return Ok(Expr::Num(*v));
                }
                self.err(format!("unknown name '{name}'"))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::End => self.err("unexpected end of expression"),
            Tok::Op(c) => self.err(format!("unexpected '{c}'")),
        }
    }
}

/// Parses `src` with coordinate names `vars` and named constants.
pub fn parse(src: &str, vars: &[String], constants: &BTreeMap<String, f64>) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        vars,
        constants,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn eval(src: &str, at: &[f64]) -> f64 {
        parse(src, &vars(), &BTreeMap::new()).unwrap().eval(at)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2*3", &[0.0, 0.0]), 7.0);
        assert_eq!(eval("8 / 4 / 2", &[0.0, 0.0]), 1.0);
        assert_eq!(eval("2 - 3 - 4", &[0.0, 0.0]), -5.0);
        assert_eq!(eval("-x^2", &[3.0, 0.0]), -9.0);
        assert_eq!(eval("(1 + x)^-2", &[1.0, 0.0]), 0.25);
    }

    #[test]
    fn coordinates_constants_and_sqrt() {
        let mut c = BTreeMap::new();
        c.insert("eps".to_string(), 0.5);
        let e = parse("1 + eps*y^2 / sqrt(4 + x)", &vars(), &c).unwrap();
        assert_eq!(e.eval(&[0.0, 2.0]), 2.0);
        assert_eq!(eval("1.5e-1 * 2", &[0.0, 0.0]), 0.3);
    }

    #[test]
    fn errors_carry_columns() {
        let c = BTreeMap::new();
        let e = parse("1 + * x", &vars(), &c).unwrap_err();
        assert_eq!(e.column, 5);
        let e = parse("1 + z", &vars(), &c).unwrap_err();
        assert_eq!((e.column, e.message.as_str()), (5, "unknown name 'z'"));
        assert_eq!(parse("x^y", &vars(), &c).unwrap_err().column, 3);
        assert_eq!(parse("(x", &vars(), &c).unwrap_err().column, 3);
        assert_eq!(parse("x $", &vars(), &c).unwrap_err().column, 3);
        assert_eq!(parse("x y", &vars(), &c).unwrap_err().message, "trailing input");
    }
}
