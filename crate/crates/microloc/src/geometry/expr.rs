//! Arithmetic expression grammar for custom metric components.
//!
//! Grammar (over coordinates `t,x,y,z` or `t,r,theta,phi`):
//!   expr   := term (('+'|'-') term)*
//!   term   := factor (('*'|'/') factor)*
//!   factor := unary ('^' factor)?
//!   unary  := '-' unary | atom
//!   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! with the functions sin, cos, exp, log, sqrt.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("unexpected character '{0}' at offset {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unknown identifier '{0}'")]
    UnknownIdent(String),
    #[error("expected '{0}' at offset {1}")]
    Expected(char, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Coord(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let mut p = Parser {
            chars: src.char_indices().collect(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            let (off, c) = p.chars[p.pos];
            return Err(ExprError::UnexpectedChar(c, off));
        }
        Ok(e)
    }

    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        match self {
            Expr::Const(v) => *v,
            Expr::Coord(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => a.eval(x).powf(b.eval(x)),
            Expr::Sin(a) => a.eval(x).sin(),
            Expr::Cos(a) => a.eval(x).cos(),
            Expr::Exp(a) => a.eval(x).exp(),
            Expr::Log(a) => a.eval(x).ln(),
            Expr::Sqrt(a) => a.eval(x).sqrt(),
        }
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some('/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // unary minus binds looser than '^', so -r^2 means -(r^2)
    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exp = self.factor()?; // right-associative
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let c = self.peek().ok_or(ExprError::UnexpectedEnd)?;
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() || c == '_' {
            return self.ident();
        }
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        let (off, c) = self.chars[self.pos];
        Err(ExprError::UnexpectedChar(c, off))
    }

    fn expect(&mut self, want: char) -> Result<(), ExprError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            let off = self
                .chars
                .get(self.pos)
                .map(|&(o, _)| o)
                .unwrap_or_else(|| self.chars.len());
            Err(ExprError::Expected(want, off))
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos].1;
            if c.is_ascii_digit() || c == '.' {
                self.pos += 1;
            } else if (c == 'e' || c == 'E')
                && self.pos > start
                && self
                    .chars
                    .get(self.pos + 1)
                    .map(|&(_, d)| d.is_ascii_digit() || d == '+' || d == '-')
                    .unwrap_or(false)
            {
                self.pos += 2;
            } else {
                break;
            }
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        s.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| ExprError::UnexpectedChar(self.chars[start].1, self.chars[start].0))
    }

    fn ident(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos].1;
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        // coordinate names: cartesian-like and spherical-like charts share slots
        let coord = match name.as_str() {
            "t" => Some(0),
            "x" | "r" => Some(1),
            "y" | "theta" => Some(2),
            "z" | "phi" => Some(3),
            _ => None,
        };
        if let Some(i) = coord {
            return Ok(Expr::Coord(i));
        }
        if self.peek() == Some('(') {
            self.pos += 1;
            let arg = Box::new(self.expr()?);
            self.expect(')')?;
            let e = match name.as_str() {
                "sin" => Expr::Sin(arg),
                "cos" => Expr::Cos(arg),
                "exp" => Expr::Exp(arg),
                "log" => Expr::Log(arg),
                "sqrt" => Expr::Sqrt(arg),
                _ => return Err(ExprError::UnknownIdent(name)),
            };
            return Ok(e);
        }
        match name.as_str() {
            "pi" => Ok(Expr::Const(std::f64::consts::PI)),
            _ => Err(ExprError::UnknownIdent(name)),
        }
    }
}
