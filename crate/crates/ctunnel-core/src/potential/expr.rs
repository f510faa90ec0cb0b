//! Closed-form expression evaluation with derivatives up to order 3.
//!
//! Custom potentials are supplied as expression strings over
//! `{x, +, -, *, /, ^, exp, sqrt}`. A small forward-mode jet type carries the
//! value and the first three derivatives through the arithmetic, so no
//! external CAS is needed.

use crate::{Error, Result};

/// Value together with first three derivatives with respect to `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet3 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub fn constant(c: f64) -> Self {
        Jet3 {
            v: c,
            d1: 0.0,
            d2: 0.0,
            d3: 0.0,
        }
    }

    pub fn variable(x: f64) -> Self {
        Jet3 {
            v: x,
            d1: 1.0,
            d2: 0.0,
            d3: 0.0,
        }
    }

    pub fn deriv(&self, order: usize) -> f64 {
        match order {
            0 => self.v,
            1 => self.d1,
            2 => self.d2,
            3 => self.d3,
            _ => panic!("Jet3 carries derivatives up to order 3"),
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        // chain rule through third order
        Jet3 {
            v: e,
            d1: e * self.d1,
            d2: e * (self.d2 + self.d1 * self.d1),
            d3: e * (self.d3 + 3.0 * self.d1 * self.d2 + self.d1.powi(3)),
        }
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let inv = 0.5 / s;
        let d1 = self.d1 * inv;
        let d2 = (self.d2 - 2.0 * d1 * d1) * inv;
        let d3 = (self.d3 - 6.0 * d1 * d2) * inv;
        Jet3 { v: s, d1, d2, d3 }
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        let d1 = -self.d1 * r * r;
        // d2(1/u) = (2 u'^2 - u u'') / u^3
        let d2 = (2.0 * self.d1 * self.d1 - self.v * self.d2) * r * r * r;
        // d3(1/u) = (-6 u'^3 + 6 u u' u'' - u^2 u''') / u^4
        let d3 = (-6.0 * self.d1.powi(3) + 6.0 * self.v * self.d1 * self.d2
            - self.v * self.v * self.d3)
            * r.powi(4);
        Jet3 { v: r, d1, d2, d3 }
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Jet3::constant(1.0),
            n if n < 0 => self.powi(-n).recip(),
            _ => {
                let mut out = self;
                for _ in 1..n {
                    out = out * self;
                }
                out
            }
        }
    }

    /// Real power via exp(p·ln u); requires u > 0.
    pub fn powf(self, p: f64) -> Self {
        let lnu = Jet3 {
            v: self.v.ln(),
            d1: self.d1 / self.v,
            d2: (self.d2 * self.v - self.d1 * self.d1) / (self.v * self.v),
            d3: (self.d3 * self.v * self.v - 3.0 * self.v * self.d1 * self.d2
                + 2.0 * self.d1.powi(3))
                / self.v.powi(3),
        };
        (lnu * Jet3::constant(p)).exp()
    }
}

impl std::ops::Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3 {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            d3: self.d3 + o.d3,
        }
    }
}

impl std::ops::Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3 {
            v: self.v - o.v,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
            d3: self.d3 - o.d3,
        }
    }
}

impl std::ops::Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, o: Jet3) -> Jet3 {
        Jet3 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
            d3: self.d3 * o.v + 3.0 * self.d2 * o.d1 + 3.0 * self.d1 * o.d2 + self.v * o.d3,
        }
    }
}

impl std::ops::Div for Jet3 {
    type Output = Jet3;
    fn div(self, o: Jet3) -> Jet3 {
        self * o.recip()
    }
}

impl std::ops::Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3 {
            v: -self.v,
            d1: -self.d1,
            d2: -self.d2,
            d3: -self.d3,
        }
    }
}

/// Parsed expression tree.
#[derive(Clone, Debug)]
pub enum Expr {
    Num(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Exp(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: Jet3) -> Jet3 {
        match self {
            Expr::Num(c) => Jet3::constant(*c),
            Expr::Var => x,
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => {
                let base = a.eval(x);
                match **b {
                    Expr::Num(p) if p == p.round() && p.abs() < 64.0 => base.powi(p as i32),
                    Expr::Num(p) => base.powf(p),
                    _ => {
                        // non-constant exponent: go through exp/ln
                        let e = b.eval(x);
                        (e * base.powf(1.0).lnify()).exp()
                    }
                }
            }
            Expr::Neg(a) => -a.eval(x),
            Expr::Exp(a) => a.eval(x).exp(),
            Expr::Sqrt(a) => a.eval(x).sqrt(),
        }
    }
}

impl Jet3 {
    fn lnify(self) -> Jet3 {
        Jet3 {
            v: self.v.ln(),
            d1: self.d1 / self.v,
            d2: (self.d2 * self.v - self.d1 * self.d1) / (self.v * self.v),
            d3: (self.d3 * self.v * self.v - 3.0 * self.v * self.d1 * self.d2
                + 2.0 * self.d1.powi(3))
                / self.v.powi(3),
        }
    }
}

/// Recursive-descent parser for the expression grammar.
pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(Error::Contract(format!(
            "trailing input in expression at byte {}",
            p.pos
        )));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
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

    fn term(&mut self) -> Result<Expr> {
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

    fn factor(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            _ => {
                let base = self.atom()?;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    // right-associative
                    let exp = self.factor()?;
                    Ok(Expr::Pow(Box::new(base), Box::new(exp)))
                } else {
                    Ok(base)
                }
            }
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::Contract("unbalanced parenthesis".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .chars
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match name.as_str() {
                    "x" => Ok(Expr::Var),
                    "exp" | "sqrt" => {
                        if self.peek() != Some('(') {
                            return Err(Error::Contract(format!("{name} expects parentheses")));
                        }
                        self.pos += 1;
                        let arg = self.expr()?;
                        if self.peek() != Some(')') {
                            return Err(Error::Contract("unbalanced parenthesis".into()));
                        }
                        self.pos += 1;
                        Ok(match name.as_str() {
                            "exp" => Expr::Exp(Box::new(arg)),
                            _ => Expr::Sqrt(Box::new(arg)),
                        })
                    }
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    _ => Err(Error::Contract(format!("unknown identifier `{name}`"))),
                }
            }
            other => Err(Error::Contract(format!(
                "unexpected token {other:?} in expression"
            ))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| {
            c.is_ascii_digit()
                || *c == '.'
                || *c == 'e'
                || *c == 'E'
                || ((*c == '+' || *c == '-')
                    && self
                        .chars
                        .get(self.pos.wrapping_sub(1))
                        .is_some_and(|p| *p == 'e' || *p == 'E'))
        }) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| Error::Contract(format!("bad number literal `{text}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet_at(src: &str, x: f64) -> Jet3 {
        parse(src).unwrap().eval(Jet3::variable(x))
    }

    #[test]
    fn quartic_derivatives_match_hand_differentiation() {
        // V = (1-x^2)^2: V' = 4x^3-4x, V'' = 12x^2-4, V''' = 24x
        for &x in &[-1.3, -1.0, -0.2, 0.0, 0.7, 2.1] {
            let j = jet_at("(1 - x^2)^2", x);
            assert!((j.v - (1.0 - x * x).powi(2)).abs() < 1e-13);
            assert!((j.d1 - (4.0 * x.powi(3) - 4.0 * x)).abs() < 1e-12);
            assert!((j.d2 - (12.0 * x * x - 4.0)).abs() < 1e-12);
            assert!((j.d3 - 24.0 * x).abs() < 1e-12);
        }
    }

    #[test]
    fn exp_sqrt_div() {
        // f = exp(-x)/sqrt(1+x^2)
        let x = 0.43;
        let j = jet_at("exp(-x)/sqrt(1 + x^2)", x);
        let f = |x: f64| (-x).exp() / (1.0 + x * x).sqrt();
        assert!((j.v - f(x)).abs() < 1e-14);
        // central differences as an independent check
        let d = 1e-4;
        let d1 = (f(x + d) - f(x - d)) / (2.0 * d);
        let d2 = (f(x + d) - 2.0 * f(x) + f(x - d)) / (d * d);
        let d3 = (f(x + 2.0 * d) - 2.0 * f(x + d) + 2.0 * f(x - d) - f(x - 2.0 * d))
            / (2.0 * d * d * d);
        assert!((j.d1 - d1).abs() < 1e-7);
        assert!((j.d2 - d2).abs() < 1e-6);
        assert!((j.d3 - d3).abs() < 1e-4);
    }

    #[test]
    fn parse_errors() {
        assert!(parse("(1 + x").is_err());
        assert!(parse("x + y").is_err());
        assert!(parse("1 2").is_err());
    }
}
