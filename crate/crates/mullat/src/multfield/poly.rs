//! Exact multivariate polynomials over ℚ or a prime field F_p, with a
//! graded-lexicographic canonical form, a small expression parser, and the
//! divisibility / substitution helpers the factored-element layer needs.
//!
//! Coefficients are stored as `BigRational` in both cases; over F_p they are
//! kept reduced to integer residues in [0, p). All coefficient arithmetic
//! goes through [`BaseField`] so closure under the field operations is
//! maintained by construction.

use crate::epmod::Characteristic;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// The coefficient field: ℚ, or F_p for a prime p.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BaseField {
    Q,
    Fp(u64),
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    // Extended Euclid; a need not be reduced.
    let (mut r0, mut r1) = (p.clone(), a.mod_floor(p));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
    }
    if r0.is_one() {
        Some(s0.mod_floor(p))
    } else {
        None
    }
}

impl BaseField {
    pub fn fp(p: u64) -> Result<Self, String> {
        match Characteristic::new(p) {
            Ok(c) if !c.is_zero() => Ok(BaseField::Fp(p)),
            _ => Err(format!("{p} is not prime")),
        }
    }

    pub fn from_p(p: u64) -> Result<Self, String> {
        if p == 0 {
            Ok(BaseField::Q)
        } else {
            BaseField::fp(p)
        }
    }

    pub fn p(&self) -> u64 {
        match self {
            BaseField::Q => 0,
            BaseField::Fp(p) => *p,
        }
    }

    pub fn chr(&self) -> Characteristic {
        Characteristic::new(self.p()).expect("validated at construction")
    }

    /// Brings a rational into the canonical coefficient form for this field.
    /// Over F_p the result is the integer residue in [0, p); rational inputs
    /// with denominator prime to p are resolved by modular inversion.
    pub fn reduce(&self, q: &BigRational) -> BigRational {
        match self {
            BaseField::Q => q.clone(),
            BaseField::Fp(p) => {
                let pb = BigInt::from(*p);
                let num = q.numer().mod_floor(&pb);
                if q.denom().is_one() {
                    return BigRational::from(num);
                }
                let inv = mod_inverse(q.denom(), &pb)
                    .expect("denominator divisible by the field characteristic");
                BigRational::from((num * inv).mod_floor(&pb))
            }
        }
    }

    pub fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.reduce(&(a + b))
    }

    pub fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.reduce(&(a - b))
    }

    pub fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.reduce(&(a * b))
    }

    pub fn neg(&self, a: &BigRational) -> BigRational {
        self.reduce(&(-a))
    }

    pub fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            return None;
        }
        match self {
            BaseField::Q => Some(a.recip()),
            BaseField::Fp(p) => {
                let pb = BigInt::from(*p);
                let r = self.reduce(a);
                mod_inverse(r.numer(), &pb).map(BigRational::from)
            }
        }
    }

    pub fn div(&self, a: &BigRational, b: &BigRational) -> Option<BigRational> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// a^e for integer e (negative allowed when a ≠ 0).
    pub fn pow_int(&self, a: &BigRational, e: i64) -> Option<BigRational> {
        if e == 0 {
            return Some(BigRational::one());
        }
        let base = if e < 0 { self.inv(a)? } else { self.reduce(a) };
        let mut acc = BigRational::one();
        for _ in 0..e.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        Some(acc)
    }
}

/// A monomial: variable → positive exponent, empty map = 1.
/// Ordered graded-lexicographically (total degree first, then earlier
/// variables with higher exponents compare greater).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono(pub BTreeMap<String, u32>);

impl Mono {
    pub fn one() -> Self {
        Mono(BTreeMap::new())
    }

    pub fn var(name: &str) -> Self {
        let mut m = BTreeMap::new();
        m.insert(name.to_string(), 1);
        Mono(m)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut m = self.0.clone();
        for (v, e) in &other.0 {
            *m.entry(v.clone()).or_insert(0) += e;
        }
        Mono(m)
    }

    /// self / other when other divides self.
    pub fn try_div(&self, other: &Mono) -> Option<Mono> {
        let mut m = self.0.clone();
        for (v, e) in &other.0 {
            let slot = m.get_mut(v)?;
            if *slot < *e {
                return None;
            }
            *slot -= e;
            if *slot == 0 {
                m.remove(v);
            }
        }
        Some(Mono(m))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Lexicographic with alphabetically earlier variables dominant:
        // at the first variable where exponents differ, higher wins.
        let vars: BTreeSet<&String> = self.0.keys().chain(other.0.keys()).collect();
        for v in vars {
            let a = self.0.get(v).copied().unwrap_or(0);
            let b = other.0.get(v).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Exact multivariate polynomial; zero coefficients never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    field: BaseField,
    terms: BTreeMap<Mono, BigRational>,
}

impl Poly {
    pub fn zero(field: BaseField) -> Self {
        Poly { field, terms: BTreeMap::new() }
    }

    pub fn constant(field: BaseField, q: &BigRational) -> Self {
        let mut p = Poly::zero(field);
        let r = field.reduce(q);
        if !r.is_zero() {
            p.terms.insert(Mono::one(), r);
        }
        p
    }

    pub fn one(field: BaseField) -> Self {
        Poly::constant(field, &BigRational::one())
    }

    pub fn var(field: BaseField, name: &str) -> Self {
        let mut p = Poly::zero(field);
        p.terms.insert(Mono::var(name), BigRational::one());
        p
    }

    pub fn from_terms(field: BaseField, terms: Vec<(Mono, BigRational)>) -> Self {
        let mut p = Poly::zero(field);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn terms(&self) -> &BTreeMap<Mono, BigRational> {
        &self.terms
    }

    fn add_term(&mut self, m: Mono, c: BigRational) {
        let c = self.field.reduce(&c);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = self.field.add(e.get(), &c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Some(value) when the polynomial is a constant (including zero).
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Mono::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Mono::total_degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> Vec<String> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            for v in m.0.keys() {
                s.insert(v.clone());
            }
        }
        s.into_iter().collect()
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms
            .keys()
            .map(|m| m.0.get(var).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Leading (monomial, coefficient) in graded-lex order.
    pub fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.field, other.field, "field mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = Poly::zero(self.field);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), self.field.neg(c));
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.field, other.field, "field mismatch");
        let mut out = Poly::zero(self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), self.field.mul(c1, c2));
            }
        }
        out
    }

    pub fn mul_scalar(&self, c: &BigRational) -> Poly {
        let c = self.field.reduce(c);
        if c.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = Poly::zero(self.field);
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), self.field.mul(a, &c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact division test: Some(q) with self = q·divisor, else None.
    /// Repeated leading-term cancellation in graded-lex order; complete for
    /// any monomial order since leading terms are multiplicative.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        assert_eq!(self.field, divisor.field, "field mismatch");
        let (dm, dc) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quo = Poly::zero(self.field);
        while !rem.is_zero() {
            let (rm, rc) = rem.leading().expect("nonzero");
            let qm = rm.try_div(dm)?;
            let qc = self.field.div(rc, dc).expect("unit leading coefficient");
            let mut t = Poly::zero(self.field);
            t.terms.insert(qm, qc);
            quo = quo.add(&t);
            rem = rem.sub(&t.mul(divisor));
        }
        Some(quo)
    }

    /// Replaces `var` by an arbitrary polynomial (Horner over `var`).
    pub fn substitute(&self, var: &str, value: &Poly) -> Poly {
        assert_eq!(self.field, value.field, "field mismatch");
        // Group coefficients by the exponent of `var`.
        let mut layers: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0.get(var).copied().unwrap_or(0);
            let mut rest = m.clone();
            rest.0.remove(var);
            layers
                .entry(e)
                .or_insert_with(|| Poly::zero(self.field))
                .add_term(rest, c.clone());
        }
        let mut out = Poly::zero(self.field);
        let mut acc = Poly::one(self.field);
        let mut at = 0u32;
        for (e, coeff) in layers {
            for _ in at..e {
                acc = acc.mul(value);
            }
            at = e;
            out = out.add(&coeff.mul(&acc));
        }
        out
    }

    /// Substitutes constants for each mapped variable; unmapped variables
    /// remain symbolic.
    pub fn eval_partial(&self, assignment: &BTreeMap<String, BigRational>) -> Poly {
        let mut out = self.clone();
        for (v, q) in assignment {
            out = out.substitute(v, &Poly::constant(self.field, q));
        }
        out
    }

    pub fn derivative(&self, var: &str) -> Poly {
        let mut out = Poly::zero(self.field);
        for (m, c) in &self.terms {
            let e = m.0.get(var).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            if e == 1 {
                dm.0.remove(var);
            } else {
                dm.0.insert(var.to_string(), e - 1);
            }
            out.add_term(dm, c * BigRational::from(BigInt::from(e)));
        }
        out
    }

    /// Splits off the scalar that makes the remainder canonical:
    /// over ℚ — integer coefficients, content 1, positive leading
    /// coefficient; over F_p — monic. Returns (scalar, canonical) with
    /// self = scalar · canonical. Zero polynomial maps to (0, 0).
    pub fn content_primitive(&self) -> (BigRational, Poly) {
        if self.is_zero() {
            return (BigRational::zero(), self.clone());
        }
        match self.field {
            BaseField::Fp(_) => {
                let lc = self.leading().expect("nonzero").1.clone();
                let inv = self.field.inv(&lc).expect("nonzero in prime field");
                (lc, self.mul_scalar(&inv))
            }
            BaseField::Q => {
                let mut den_lcm = BigInt::one();
                for c in self.terms.values() {
                    den_lcm = den_lcm.lcm(c.denom());
                }
                let mut num_gcd = BigInt::zero();
                for c in self.terms.values() {
                    num_gcd = num_gcd.gcd(&(c.numer() * &den_lcm / c.denom()));
                }
                let mut content = BigRational::new(num_gcd, den_lcm);
                let lead = self.leading().expect("nonzero").1;
                if lead.is_negative() {
                    content = -content;
                }
                let inv = content.recip();
                (content, self.mul_scalar(&inv))
            }
        }
    }

    /// Dense coefficient vector (degree 0 upward) when univariate in
    /// exactly one variable; constants give None.
    pub fn to_dense_univariate(&self) -> Option<(String, Vec<BigRational>)> {
        let vars = self.vars();
        if vars.len() != 1 {
            return None;
        }
        let v = vars.into_iter().next().expect("one var");
        let d = self.degree_in(&v) as usize;
        let mut coeffs = vec![BigRational::zero(); d + 1];
        for (m, c) in &self.terms {
            coeffs[m.0.get(&v).copied().unwrap_or(0) as usize] = c.clone();
        }
        Some((v, coeffs))
    }

    pub fn from_dense(field: BaseField, var: &str, coeffs: &[BigRational]) -> Poly {
        let mut p = Poly::zero(field);
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = if i == 0 {
                Mono::one()
            } else {
                Mono(std::iter::once((var.to_string(), i as u32)).collect())
            };
            p.add_term(m, c.clone());
        }
        p
    }
}

fn format_coeff(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            if m.0.is_empty() {
                write!(f, "{}", format_coeff(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_coeff(&mag))?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Expression parsing: + - * / ^ ( ), integer literals, [a-z][0-9]* variables.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(BigInt),
    Var(String),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let mut toks = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '/' => {
                toks.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                toks.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = bytes[start..i].iter().collect();
                toks.push(Tok::Num(s.parse().map_err(|e| format!("bad integer: {e}"))?));
            }
            'a'..='z' => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                toks.push(Tok::Var(bytes[start..i].iter().collect()));
            }
            _ => return Err(format!("unexpected character '{c}'")),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<(), String> {
        match self.bump() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(format!("expected {t:?}, got {got:?}")),
        }
    }

    fn expr(&mut self) -> Result<Ast, String> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Ast::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, String> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Ast::Div(Box::new(lhs), Box::new(rhs));
                }
                // Implicit multiplication: "2t", "2(t+1)", "x y".
                Some(Tok::Var(_)) | Some(Tok::LParen) | Some(Tok::Num(_)) => {
                    let rhs = self.unary()?;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, String> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.unary()?;
            return Ok(Ast::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, String> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let e = self.exponent()?;
            return Ok(Ast::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64, String> {
        let parenthesized = matches!(self.peek(), Some(Tok::LParen));
        if parenthesized {
            self.bump();
        }
        let mut sign = 1i64;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            sign = -1;
        }
        let n = match self.bump() {
            Some(Tok::Num(n)) => n,
            got => return Err(format!("expected integer exponent, got {got:?}")),
        };
        if parenthesized {
            self.expect(Tok::RParen)?;
        }
        let v: i64 = n.to_string().parse().map_err(|_| "exponent too large".to_string())?;
        Ok(sign * v)
    }

    fn atom(&mut self) -> Result<Ast, String> {
        match self.bump() {
            Some(Tok::Num(n)) => Ok(Ast::Num(n)),
            Some(Tok::Var(v)) => Ok(Ast::Var(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            got => Err(format!("expected value, got {got:?}")),
        }
    }
}

pub fn parse_ast(src: &str) -> Result<Ast, String> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err("empty expression".to_string());
    }
    let mut p = Parser { toks, pos: 0 };
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input at token {}", p.pos));
    }
    Ok(ast)
}

/// Expands an expression into a single polynomial. Division is only allowed
/// by nonzero constants; negative powers are rejected.
pub fn ast_to_poly(ast: &Ast, field: BaseField) -> Result<Poly, String> {
    match ast {
        Ast::Num(n) => Ok(Poly::constant(field, &BigRational::from(n.clone()))),
        Ast::Var(v) => Ok(Poly::var(field, v)),
        Ast::Add(a, b) => Ok(ast_to_poly(a, field)?.add(&ast_to_poly(b, field)?)),
        Ast::Sub(a, b) => Ok(ast_to_poly(a, field)?.sub(&ast_to_poly(b, field)?)),
        Ast::Neg(a) => Ok(ast_to_poly(a, field)?.neg()),
        Ast::Mul(a, b) => Ok(ast_to_poly(a, field)?.mul(&ast_to_poly(b, field)?)),
        Ast::Div(a, b) => {
            let den = ast_to_poly(b, field)?;
            let c = den
                .as_constant()
                .ok_or_else(|| "division by a non-constant polynomial".to_string())?;
            let inv = field.inv(&c).ok_or_else(|| "division by zero".to_string())?;
            Ok(ast_to_poly(a, field)?.mul_scalar(&inv))
        }
        Ast::Pow(a, e) => {
            if *e < 0 {
                return Err("negative exponent in polynomial context".to_string());
            }
            Ok(ast_to_poly(a, field)?.pow(*e as u32))
        }
    }
}

/// A formal product: constant × Π baseᵢ^{eᵢ} with the bases expanded to
/// polynomials but deliberately not multiplied out.
#[derive(Clone, Debug)]
pub struct FormalProduct {
    pub constant: BigRational,
    pub factors: Vec<(Poly, i64)>,
}

impl FormalProduct {
    fn one(field: BaseField) -> Self {
        let _ = field;
        FormalProduct { constant: BigRational::one(), factors: Vec::new() }
    }

    fn mul(mut self, other: FormalProduct, field: BaseField) -> Result<Self, String> {
        self.constant = field.mul(&self.constant, &other.constant);
        self.factors.extend(other.factors);
        Ok(self)
    }

    fn pow(mut self, e: i64, field: BaseField) -> Result<Self, String> {
        self.constant = field
            .pow_int(&self.constant, e)
            .ok_or_else(|| "zero raised to a negative power".to_string())?;
        for (_, exp) in &mut self.factors {
            *exp = exp.checked_mul(e).ok_or_else(|| "exponent overflow".to_string())?;
        }
        Ok(self)
    }
}

/// Interprets an expression as a product of polynomial factors with integer
/// (possibly negative) exponents times a constant, expanding only the
/// summand-level subexpressions.
pub fn ast_to_product(ast: &Ast, field: BaseField) -> Result<FormalProduct, String> {
    match ast {
        Ast::Mul(a, b) => {
            ast_to_product(a, field)?.mul(ast_to_product(b, field)?, field)
        }
        Ast::Div(a, b) => {
            let rhs = ast_to_product(b, field)?.pow(-1, field)?;
            ast_to_product(a, field)?.mul(rhs, field)
        }
        Ast::Pow(a, e) => ast_to_product(a, field)?.pow(*e, field),
        Ast::Neg(a) => {
            let mut p = ast_to_product(a, field)?;
            p.constant = field.neg(&p.constant);
            Ok(p)
        }
        Ast::Num(n) => {
            let mut p = FormalProduct::one(field);
            p.constant = field.reduce(&BigRational::from(n.clone()));
            Ok(p)
        }
        other => {
            let poly = ast_to_poly(other, field)?;
            let mut p = FormalProduct::one(field);
            match poly.as_constant() {
                Some(c) => p.constant = c,
                None => p.factors.push((poly, 1)),
            }
            Ok(p)
        }
    }
}

pub fn parse_poly(src: &str, field: BaseField) -> Result<Poly, String> {
    ast_to_poly(&parse_ast(src)?, field)
}

pub fn parse_product(src: &str, field: BaseField) -> Result<FormalProduct, String> {
    ast_to_product(&parse_ast(src)?, field)
}
