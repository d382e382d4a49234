//! Sparse multivariate polynomials over the rationals, plus the tiny
//! trace-word grammar used to describe conjugation-equivariant matrix
//! maps.
//!
//! Polynomials are exponent-vector maps with no zero coefficients
//! stored; every operation keeps that normal form, so equality is
//! structural.  Variable count is fixed per polynomial and must agree
//! across operands.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{ToPrimitive, Zero};

use crate::exactlin::{rat, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = MultiPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut expo = vec![0u32; nvars];
        expo[i] = 1;
        let mut p = MultiPoly::zero(nvars);
        p.terms.insert(expo, rat(1));
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn coefficient(&self, expo: &[u32]) -> Rational {
        self.terms.get(expo).cloned().unwrap_or_else(Rational::zero)
    }

    fn insert(&mut self, expo: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(expo);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let next = o.get() + &c;
                if next.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = next;
                }
            }
        }
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch("polynomial variable counts differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let expo: Vec<u32> = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.insert(expo, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = MultiPoly::constant(self.nvars, rat(1));
        for _ in 0..e {
            out = out.mul(self).expect("same arity");
        }
        out
    }

    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.nvars, "variable index out of range");
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut expo = e.clone();
            expo[i] -= 1;
            out.insert(expo, c * rat(e[i] as i64));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch("evaluation point length".into()));
        }
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, &p) in point.iter().zip(e.iter()) {
                for _ in 0..p {
                    m *= x;
                }
            }
            total += m;
        }
        Ok(total)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut total = 0.0;
        for (e, c) in &self.terms {
            let mut m = c.to_f64().unwrap_or(f64::NAN);
            for (x, &p) in point.iter().zip(e.iter()) {
                m *= x.powi(p as i32);
            }
            total += m;
        }
        total
    }

    /// Plug a polynomial in for each variable.  All replacements share
    /// one variable count, which becomes the result's.
    pub fn substitute(&self, subs: &[MultiPoly]) -> Result<Self> {
        if subs.len() != self.nvars {
            return Err(Error::DimensionMismatch("one replacement per variable".into()));
        }
        let m = match subs.first() {
            Some(p) => p.nvars,
            None => 0,
        };
        if subs.iter().any(|p| p.nvars != m) {
            return Err(Error::DimensionMismatch("replacements must share arity".into()));
        }
        let mut out = MultiPoly::zero(m);
        for (e, c) in &self.terms {
            let mut prod = MultiPoly::constant(m, c.clone());
            for (p, &expo) in subs.iter().zip(e.iter()) {
                if expo > 0 {
                    prod = prod.mul(&p.pow(expo))?;
                }
            }
            out = out.add(&prod)?;
        }
        Ok(out)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{p}")?,
                }
            }
        }
        Ok(())
    }
}

/// One summand of a trace expression: a rational coefficient, scalar
/// trace factors tr(word), and a matrix word (empty word = identity).
/// Variable indices are zero-based internally; the surface syntax is
/// X1, X2, ...
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceTerm {
    pub coeff: Rational,
    pub traces: Vec<Vec<usize>>,
    pub word: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceExpr {
    pub terms: Vec<TraceTerm>,
}

impl TraceExpr {
    /// Number of matrix variables: the highest index mentioned.
    pub fn variable_count(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.word.iter().chain(t.traces.iter().flatten()))
            .map(|&v| v + 1)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Slash,
    Int(i64),
    Var(usize),
    Tr,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |msg: String| Error::Parse(msg);
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                let n = text.parse::<i64>().map_err(|_| err(format!("integer '{text}' too large")))?;
                out.push(Token::Int(n));
            }
            'X' | 'x' => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == start + 1 {
                    return Err(err("matrix variables are written X1, X2, ...".into()));
                }
                let text: String = bytes[start + 1..i].iter().collect();
                let idx = text.parse::<usize>().map_err(|_| err(format!("bad variable index '{text}'")))?;
                if idx == 0 {
                    return Err(err("variable indices start at 1".into()));
                }
                out.push(Token::Var(idx - 1));
            }
            't' | 'T' => {
                if i + 1 < bytes.len() && (bytes[i + 1] == 'r' || bytes[i + 1] == 'R') {
                    out.push(Token::Tr);
                    i += 2;
                } else {
                    return Err(err(format!("unexpected character '{c}'")));
                }
            }
            _ => return Err(err(format!("unexpected character '{c}'"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Token, what: &str) -> Result<()> {
        match self.bump() {
            Some(found) if found == t => Ok(()),
            other => Err(Error::Parse(format!("expected {what}, found {other:?}"))),
        }
    }

    /// number := INT ('/' INT)?
    fn number(&mut self, first: i64) -> Result<Rational> {
        if matches!(self.peek(), Some(Token::Slash)) {
            self.bump();
            match self.bump() {
                Some(Token::Int(d)) if d != 0 => Ok(Rational::new(first.into(), d.into())),
                Some(Token::Int(_)) => Err(Error::Parse("zero denominator".into())),
                other => Err(Error::Parse(format!("expected denominator, found {other:?}"))),
            }
        } else {
            Ok(rat(first))
        }
    }

    /// power := VAR ('^' INT)?, appended to the word with the exponent
    /// expanded.
    fn var_power(&mut self, idx: usize, word: &mut Vec<usize>) -> Result<()> {
        let mut e = 1i64;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.bump();
            match self.bump() {
                Some(Token::Int(p)) if p >= 1 => e = p,
                other => Err(Error::Parse(format!("expected positive exponent, found {other:?}")))?,
            }
        }
        for _ in 0..e {
            word.push(idx);
        }
        Ok(())
    }

    /// trace := 'tr' '(' word ')'
    fn trace(&mut self) -> Result<Vec<usize>> {
        self.expect(Token::LParen, "'(' after tr")?;
        let mut word = Vec::new();
        loop {
            match self.bump() {
                Some(Token::Var(idx)) => {
                    self.var_power(idx, &mut word)?;
                    if matches!(self.peek(), Some(Token::Star)) {
                        self.bump();
                    }
                }
                Some(Token::RParen) => break,
                other => return Err(Error::Parse(format!("expected variable in trace, found {other:?}"))),
            }
        }
        if word.is_empty() {
            return Err(Error::Parse("empty trace".into()));
        }
        Ok(word)
    }

    /// term := factor (('*')? factor)* where factor is a number, a
    /// variable power, or a trace; adjacency multiplies.
    fn term(&mut self, sign: i64) -> Result<TraceTerm> {
        let mut coeff = rat(sign);
        let mut traces = Vec::new();
        let mut word = Vec::new();
        let mut saw_factor = false;
        loop {
            match self.peek() {
                Some(Token::Int(_)) => {
                    let n = match self.bump() {
                        Some(Token::Int(n)) => n,
                        _ => unreachable!(),
                    };
                    coeff *= self.number(n)?;
                    saw_factor = true;
                }
                Some(Token::Var(_)) => {
                    let idx = match self.bump() {
                        Some(Token::Var(i)) => i,
                        _ => unreachable!(),
                    };
                    self.var_power(idx, &mut word)?;
                    saw_factor = true;
                }
                Some(Token::Tr) => {
                    self.bump();
                    traces.push(self.trace()?);
                    saw_factor = true;
                }
                Some(Token::Star) => {
                    self.bump();
                    if !saw_factor {
                        return Err(Error::Parse("'*' without a left factor".into()));
                    }
                }
                _ => break,
            }
        }
        if !saw_factor {
            return Err(Error::Parse("empty term".into()));
        }
        Ok(TraceTerm { coeff, traces, word })
    }
}

/// Parse a trace expression: sums of terms, each a product of rational
/// scalars, tr(word) factors, and a matrix word over X1..Xm.
pub fn parse_trace_expr(src: &str) -> Result<TraceExpr> {
    let mut p = Parser { tokens: tokenize(src)?, pos: 0 };
    let mut terms = Vec::new();
    let mut sign = 1i64;
    if matches!(p.peek(), Some(Token::Minus)) {
        p.bump();
        sign = -1;
    } else if matches!(p.peek(), Some(Token::Plus)) {
        p.bump();
    }
    loop {
        terms.push(p.term(sign)?);
        match p.bump() {
            None => break,
            Some(Token::Plus) => sign = 1,
            Some(Token::Minus) => sign = -1,
            Some(other) => return Err(Error::Parse(format!("expected '+' or '-', found {other:?}"))),
        }
    }
    Ok(TraceExpr { terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ratio;

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    #[test]
    fn arithmetic_and_partials() {
        let p = x(2, 0).add(&x(2, 1)).unwrap().pow(2);
        assert_eq!(p.term_count(), 3);
        assert_eq!(p.coefficient(&[1, 1]), rat(2));
        assert_eq!(p.degree(), 2);
        let dp = p.partial(0);
        // d/dx (x+y)^2 = 2x + 2y.
        assert_eq!(dp, x(2, 0).add(&x(2, 1)).unwrap().scale(&rat(2)));
        assert_eq!(p.eval(&[rat(3), rat(-1)]).unwrap(), rat(4));
        assert!(p.sub(&p).unwrap().is_zero());
        assert_eq!(MultiPoly::zero(2).degree(), 0);
        assert!(p.eval(&[rat(1)]).is_err());
    }

    #[test]
    fn substitution_matches_composed_evaluation() {
        let p = x(2, 0).pow(2).add(&x(2, 1).scale(&rat(3))).unwrap();
        let q0 = x(1, 0).scale(&rat(2)).add(&MultiPoly::constant(1, rat(1))).unwrap();
        let q1 = x(1, 0).pow(3);
        let composed = p.substitute(&[q0.clone(), q1.clone()]).unwrap();
        for t in -3i64..=3 {
            let inner = vec![q0.eval(&[rat(t)]).unwrap(), q1.eval(&[rat(t)]).unwrap()];
            assert_eq!(composed.eval(&[rat(t)]).unwrap(), p.eval(&inner).unwrap());
        }
    }

    #[test]
    fn float_evaluation_tracks_exact() {
        let p = x(2, 0).pow(3).sub(&x(2, 1).scale(&ratio(1, 4))).unwrap();
        let exact = p.eval(&[ratio(1, 2), rat(6)]).unwrap();
        let float = p.eval_f64(&[0.5, 6.0]);
        let expect = num_traits::ToPrimitive::to_f64(&exact).unwrap();
        assert!((float - expect).abs() < 1e-12);
    }

    #[test]
    fn parses_the_reference_expression() {
        let e = parse_trace_expr("X1^2*X2 - tr(X3)*X1 + tr(X2^3)").unwrap();
        assert_eq!(e.terms.len(), 3);
        assert_eq!(e.terms[0], TraceTerm { coeff: rat(1), traces: vec![], word: vec![0, 0, 1] });
        assert_eq!(e.terms[1], TraceTerm { coeff: rat(-1), traces: vec![vec![2]], word: vec![0] });
        assert_eq!(e.terms[2], TraceTerm { coeff: rat(1), traces: vec![vec![1, 1, 1]], word: vec![] });
        assert_eq!(e.variable_count(), 3);
    }

    #[test]
    fn parses_adjacency_fractions_and_signs() {
        let e = parse_trace_expr("-2/3 X1 X2 + tr(X1)tr(X2)X1^2").unwrap();
        assert_eq!(e.terms[0], TraceTerm { coeff: ratio(-2, 3), traces: vec![], word: vec![0, 1] });
        assert_eq!(
            e.terms[1],
            TraceTerm { coeff: rat(1), traces: vec![vec![0], vec![1]], word: vec![0, 0] }
        );
        let scalar = parse_trace_expr("5").unwrap();
        assert_eq!(scalar.terms[0], TraceTerm { coeff: rat(5), traces: vec![], word: vec![] });
        assert_eq!(scalar.variable_count(), 0);
    }

    #[test]
    fn rejects_malformed_expressions() {
        for bad in ["X0", "tr(", "tr()", "X1 +", "+", "X", "X1 ^ 0", "1/0", "y1", "X1)"] {
            assert!(parse_trace_expr(bad).is_err(), "{bad} should fail");
        }
    }
}
