//! Closed-form expressions of a single radial variable.
//!
//! A small grammar over `r`: literals, `+ - * / ^`, parentheses and the
//! functions `exp, log, sin, cos, sinh, cosh, tanh, sqrt`. Expressions
//! evaluate exactly and differentiate symbolically, so closed-form
//! profiles expose machine-accurate first and second derivatives.

use crate::num::{c, Scalar};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr<T> {
    Num(T),
    Var,
    Add(Box<Expr<T>>, Box<Expr<T>>),
    Sub(Box<Expr<T>>, Box<Expr<T>>),
    Mul(Box<Expr<T>>, Box<Expr<T>>),
    Div(Box<Expr<T>>, Box<Expr<T>>),
    Pow(Box<Expr<T>>, Box<Expr<T>>),
    Neg(Box<Expr<T>>),
    Fn(Func, Box<Expr<T>>),
}

impl<T: Scalar> Expr<T> {
    pub fn num(v: T) -> Self {
        Expr::Num(v)
    }

    pub fn var() -> Self {
        Expr::Var
    }

    pub fn func(f: Func, arg: Expr<T>) -> Self {
        Expr::Fn(f, Box::new(arg))
    }

    /// `scale * exp(alpha * (r + shift))`.
    pub fn exp_warp(alpha: T, shift: T, scale: T) -> Self {
        let arg = Expr::Mul(
            Box::new(Expr::Num(alpha)),
            Box::new(Expr::Add(Box::new(Expr::Var), Box::new(Expr::Num(shift)))),
        );
        Expr::Mul(Box::new(Expr::Num(scale)), Box::new(Expr::func(Func::Exp, arg)))
    }

    /// `f(r + shift)` for a single builtin function.
    pub fn shifted(f: Func, shift: T) -> Self {
        Expr::func(
            f,
            Expr::Add(Box::new(Expr::Var), Box::new(Expr::Num(shift))),
        )
    }

    pub fn eval(&self, r: T) -> T {
        match self {
            Expr::Num(v) => *v,
            Expr::Var => r,
            Expr::Add(a, b) => a.eval(r) + b.eval(r),
            Expr::Sub(a, b) => a.eval(r) - b.eval(r),
            Expr::Mul(a, b) => a.eval(r) * b.eval(r),
            Expr::Div(a, b) => a.eval(r) / b.eval(r),
            Expr::Pow(a, b) => a.eval(r).powf(b.eval(r)),
            Expr::Neg(a) => -a.eval(r),
            Expr::Fn(f, a) => {
                let x = a.eval(r);
                match f {
                    Func::Exp => x.exp(),
                    Func::Log => x.ln(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Tanh => x.tanh(),
                    Func::Sqrt => x.sqrt(),
                }
            }
        }
    }

    /// Symbolic derivative with light constant folding.
    pub fn diff(&self) -> Expr<T> {
        match self {
            Expr::Num(_) => Expr::Num(T::zero()),
            Expr::Var => Expr::Num(T::one()),
            Expr::Add(a, b) => add(a.diff(), b.diff()),
            Expr::Sub(a, b) => sub(a.diff(), b.diff()),
            Expr::Mul(a, b) => add(
                mul(a.diff(), (**b).clone()),
                mul((**a).clone(), b.diff()),
            ),
            Expr::Div(a, b) => {
                // (a/b)' = (a' b - a b') / b^2
                let num = sub(
                    mul(a.diff(), (**b).clone()),
                    mul((**a).clone(), b.diff()),
                );
                div(num, mul((**b).clone(), (**b).clone()))
            }
            Expr::Pow(a, b) => {
                // General a^b = exp(b log a); constant exponents fold to
                // the power rule.
                if let Expr::Num(p) = **b {
                    let pm1 = Expr::Pow(a.clone(), Box::new(Expr::Num(p - T::one())));
                    mul(mul(Expr::Num(p), pm1), a.diff())
                } else {
                    let this = Expr::Pow(a.clone(), b.clone());
                    let inner = add(
                        mul(b.diff(), Expr::func(Func::Log, (**a).clone())),
                        div(mul((**b).clone(), a.diff()), (**a).clone()),
                    );
                    mul(this, inner)
                }
            }
            Expr::Neg(a) => neg(a.diff()),
            Expr::Fn(f, a) => {
                let da = a.diff();
                let outer = match f {
                    Func::Exp => Expr::func(Func::Exp, (**a).clone()),
                    Func::Log => return div(da, (**a).clone()),
                    Func::Sin => Expr::func(Func::Cos, (**a).clone()),
                    Func::Cos => neg(Expr::func(Func::Sin, (**a).clone())),
                    Func::Sinh => Expr::func(Func::Cosh, (**a).clone()),
                    Func::Cosh => Expr::func(Func::Sinh, (**a).clone()),
                    Func::Tanh => {
                        // 1 - tanh^2
                        let t = Expr::func(Func::Tanh, (**a).clone());
                        sub(Expr::Num(T::one()), mul(t.clone(), t))
                    }
                    Func::Sqrt => {
                        let den = mul(
                            Expr::Num(c(2.0)),
                            Expr::func(Func::Sqrt, (**a).clone()),
                        );
                        return div(da, den);
                    }
                };
                mul(outer, da)
            }
        }
    }

    pub fn parse(src: &str) -> Result<Expr<T>> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0, src };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected trailing input at byte {} in `{src}`",
                p.offset()
            )));
        }
        Ok(e)
    }
}

fn is_zero<T: Scalar>(e: &Expr<T>) -> bool {
    matches!(e, Expr::Num(v) if *v == T::zero())
}

fn is_one<T: Scalar>(e: &Expr<T>) -> bool {
    matches!(e, Expr::Num(v) if *v == T::one())
}

fn add<T: Scalar>(a: Expr<T>, b: Expr<T>) -> Expr<T> {
    if is_zero(&a) {
        return b;
    }
    if is_zero(&b) {
        return a;
    }
    if let (Expr::Num(x), Expr::Num(y)) = (&a, &b) {
        return Expr::Num(*x + *y);
    }
    Expr::Add(Box::new(a), Box::new(b))
}

fn sub<T: Scalar>(a: Expr<T>, b: Expr<T>) -> Expr<T> {
    if is_zero(&b) {
        return a;
    }
    if let (Expr::Num(x), Expr::Num(y)) = (&a, &b) {
        return Expr::Num(*x - *y);
    }
    if is_zero(&a) {
        return neg(b);
    }
    Expr::Sub(Box::new(a), Box::new(b))
}

fn mul<T: Scalar>(a: Expr<T>, b: Expr<T>) -> Expr<T> {
    if is_zero(&a) || is_zero(&b) {
        return Expr::Num(T::zero());
    }
    if is_one(&a) {
        return b;
    }
    if is_one(&b) {
        return a;
    }
    if let (Expr::Num(x), Expr::Num(y)) = (&a, &b) {
        return Expr::Num(*x * *y);
    }
    Expr::Mul(Box::new(a), Box::new(b))
}

fn div<T: Scalar>(a: Expr<T>, b: Expr<T>) -> Expr<T> {
    if is_zero(&a) {
        return Expr::Num(T::zero());
    }
    if is_one(&b) {
        return a;
    }
    Expr::Div(Box::new(a), Box::new(b))
}

fn neg<T: Scalar>(a: Expr<T>) -> Expr<T> {
    if let Expr::Num(x) = &a {
        return Expr::Num(-*x);
    }
    Expr::Neg(Box::new(a))
}

#[derive(Clone, Debug, PartialEq)]
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

fn lex(src: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        match ch {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((Token::Plus, i));
                i += 1;
            }
            '-' => {
                out.push((Token::Minus, i));
                i += 1;
            }
            '*' => {
                out.push((Token::Star, i));
                i += 1;
            }
            '/' => {
                out.push((Token::Slash, i));
                i += 1;
            }
            '^' => {
                out.push((Token::Caret, i));
                i += 1;
            }
            '(' => {
                out.push((Token::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Token::RParen, i));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, '0'..='9' | '.' | 'e' | 'E' | '+' | '-')
                {
                    // Signs are part of the literal only right after an exponent marker.
                    if matches!(bytes[i] as char, '+' | '-')
                        && !matches!(bytes[i - 1] as char, 'e' | 'E')
                    {
                        break;
                    }
                    i += 1;
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| {
                    Error::Parse(format!("bad numeric literal `{text}` at byte {start} in `{src}`"))
                })?;
                out.push((Token::Num(v), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                out.push((Token::Ident(src[start..i].to_string()), start));
            }
            _ => {
                return Err(Error::Parse(format!(
                    "unexpected character `{ch}` at byte {i} in `{src}`"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.1)
            .unwrap_or(self.src.len())
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.0)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|t| t.0.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Token) -> Result<()> {
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::Parse(format!(
                "expected {want:?} at byte {} in `{}`",
                self.offset(),
                self.src
            ))),
        }
    }

    fn expr<T: Scalar>(&mut self) -> Result<Expr<T>> {
        let mut lhs = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Token::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term<T: Scalar>(&mut self) -> Result<Expr<T>> {
        let mut lhs = self.factor()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Token::Slash => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn factor<T: Scalar>(&mut self) -> Result<Expr<T>> {
        let base = self.unary()?;
        if let Some(Token::Caret) = self.peek() {
            self.bump();
            let exp = self.factor()?; // right associative
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary<T: Scalar>(&mut self) -> Result<Expr<T>> {
        if let Some(Token::Minus) = self.peek() {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.primary()
    }

    fn primary<T: Scalar>(&mut self) -> Result<Expr<T>> {
        let at = self.offset();
        match self.bump() {
            Some(Token::Num(v)) => Ok(Expr::Num(T::from_f64(v).ok_or_else(|| {
                Error::Parse(format!("literal {v} not representable in scalar type"))
            })?)),
            Some(Token::Ident(name)) => {
                if name == "r" {
                    return Ok(Expr::Var);
                }
                let f = match name.as_str() {
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "sinh" => Func::Sinh,
                    "cosh" => Func::Cosh,
                    "tanh" => Func::Tanh,
                    "sqrt" => Func::Sqrt,
                    _ => {
                        return Err(Error::Parse(format!(
                            "unknown identifier `{name}` at byte {at} in `{}` \
                             (variable is `r`; functions: exp log sin cos sinh cosh tanh sqrt)",
                            self.src
                        )))
                    }
                };
                self.expect(Token::LParen)?;
                let arg = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(Expr::Fn(f, Box::new(arg)))
            }
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            other => Err(Error::Parse(format!(
                "expected a value at byte {at} in `{}`, found {other:?}",
                self.src
            ))),
        }
    }
}

impl<T: Scalar> std::fmt::Display for Expr<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => write!(f, "r"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Fn(g, a) => write!(f, "{}({a})", g.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d2(e: &Expr<f64>) -> Expr<f64> {
        e.diff().diff()
    }

    #[test]
    fn parses_and_evaluates() {
        let e: Expr<f64> = Expr::parse("1 + exp(-2*r)*sin(exp(r))").unwrap();
        let r: f64 = 1.3;
        let want = 1.0 + (-2.0 * r).exp() * (r.exp()).sin();
        assert!((e.eval(r) - want).abs() < 1e-15);
    }

    #[test]
    fn parses_powers_and_scientific_literals() {
        let e: Expr<f64> = Expr::parse("r^3 - 2.5e-1*r").unwrap();
        assert!((e.eval(2.0) - (8.0 - 0.5)).abs() < 1e-15);
        let nested: Expr<f64> = Expr::parse("2^r^2").unwrap(); // right assoc: 2^(r^2)
        assert!((nested.eval(2.0) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Expr::<f64>::parse("sin r").is_err());
        assert!(Expr::<f64>::parse("1 + ").is_err());
        assert!(Expr::<f64>::parse("foo(r)").is_err());
        assert!(Expr::<f64>::parse("1,2").is_err());
    }

    #[test]
    fn derivative_matches_central_differences() {
        let sources = [
            "exp(-0.5*r)*sin(r)",
            "cosh(r + 0.25)",
            "(1 + r^2)^1.5",
            "log(1 + r^2) / (2 + sin(r))",
            "tanh(r) * sqrt(1 + r^2)",
        ];
        for src in sources {
            let e: Expr<f64> = Expr::parse(src).unwrap();
            let de = e.diff();
            let dde = d2(&e);
            for k in 0..7 {
                let r = 0.3 + 0.45 * k as f64;
                let h = 1e-5;
                let fd1 = (e.eval(r + h) - e.eval(r - h)) / (2.0 * h);
                let fd2 = (e.eval(r + h) - 2.0 * e.eval(r) + e.eval(r - h)) / (h * h);
                assert!(
                    (de.eval(r) - fd1).abs() < 1e-8 * (1.0 + fd1.abs()),
                    "{src} d1 at {r}"
                );
                assert!(
                    (dde.eval(r) - fd2).abs() < 2e-5 * (1.0 + fd2.abs()),
                    "{src} d2 at {r}"
                );
            }
        }
    }

    #[test]
    fn variable_exponent_differentiates() {
        let e: Expr<f64> = Expr::parse("(1+r)^r").unwrap();
        let de = e.diff();
        let r = 0.7;
        let h = 1e-6;
        let fd = (e.eval(r + h) - e.eval(r - h)) / (2.0 * h);
        assert!((de.eval(r) - fd).abs() < 1e-7);
    }
}
