//! Exact coefficient arithmetic: Gaussian rationals, the bivariate
//! polynomial ring in `a` and `h`, and Laurent polynomials in `q` (and `t`).
//!
//! The grading follows deg(a) = 4, deg(h) = 2, with deg(i) = 0.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character `{ch}` at column {col}")]
    UnexpectedChar { ch: char, col: usize },
    #[error("unexpected end of input at column {col}")]
    UnexpectedEnd { col: usize },
    #[error("malformed number at column {col}")]
    BadNumber { col: usize },
    #[error("unknown variable `{name}` at column {col}")]
    UnknownVariable { name: String, col: usize },
    #[error("zero denominator at column {col}")]
    ZeroDenominator { col: usize },
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A Gaussian rational `re + im*i`, stored exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(big(n), big(0))
    }

    pub fn from_pair(re: i64, im: i64) -> Self {
        GaussRat::new(big(re), big(im))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::from_pair(0, 1)
    }

    /// i^k for any integer exponent.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => -Self::one(),
            _ => -Self::i(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// True exactly for the units of Z[i]: 1, -1, i, -i.
    pub fn is_zi_unit(&self) -> bool {
        let one = big(1);
        (self.im.is_zero() && (self.re == one || self.re == -one.clone()))
            || (self.re.is_zero() && (self.im == one || self.im == -one))
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Self {
        let norm = &self.re * &self.re + &self.im * &self.im;
        assert!(!norm.is_zero(), "division by zero Gaussian rational");
        GaussRat::new(&self.re / &norm, -&self.im / &norm)
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if !self.re.is_zero() {
            parts.push(fmt_rat(&self.re));
        }
        if !self.im.is_zero() {
            let mag = self.im.abs();
            let body = if mag.is_one() {
                "i".to_string()
            } else {
                format!("{}i", fmt_rat(&mag))
            };
            if self.im.is_negative() {
                if parts.is_empty() {
                    parts.push(format!("-{body}"));
                } else {
                    parts.push(format!("- {body}"));
                    return write!(f, "{}", parts.join(" "));
                }
            } else if parts.is_empty() {
                parts.push(body);
            } else {
                parts.push(format!("+ {body}"));
                return write!(f, "{}", parts.join(" "));
            }
        }
        write!(f, "{}", parts.join(""))
    }
}

impl FromStr for GaussRat {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let poly: GaussPoly = s.parse()?;
        poly.as_constant().ok_or(ParseError::UnknownVariable {
            name: "a/h".into(),
            col: 0,
        })
    }
}

/// Result of a homogeneous-degree query on a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyDegree {
    Zero,
    Homogeneous(i64),
    Inhomogeneous,
}

/// An element of Z[i][a, h] (with Gaussian rational coefficients), stored as
/// a sparse map `(exp_a, exp_h) -> coefficient` with no zero entries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GaussPoly {
    terms: BTreeMap<(u32, u32), GaussRat>,
}

impl GaussPoly {
    pub fn zero() -> Self {
        GaussPoly::default()
    }

    pub fn one() -> Self {
        GaussPoly::constant(GaussRat::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((0, 0), c);
        }
        GaussPoly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        GaussPoly::constant(GaussRat::from_int(n))
    }

    /// The imaginary unit as a constant polynomial.
    pub fn i() -> Self {
        GaussPoly::constant(GaussRat::i())
    }

    pub fn var_a() -> Self {
        GaussPoly::monomial(1, 0, GaussRat::one())
    }

    pub fn var_h() -> Self {
        GaussPoly::monomial(0, 1, GaussRat::one())
    }

    pub fn monomial(exp_a: u32, exp_h: u32, c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((exp_a, exp_h), c);
        }
        GaussPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&(0, 0)).map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &GaussRat)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<GaussRat> {
        if self.terms.is_empty() {
            return Some(GaussRat::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&(0, 0)) {
                return Some(c.clone());
            }
        }
        None
    }

    /// Returns the coefficient when the polynomial is a unit of Z[i][a,h],
    /// i.e. a constant in {1, -1, i, -i}.
    pub fn as_zi_unit(&self) -> Option<GaussRat> {
        self.as_constant().filter(|c| c.is_zi_unit())
    }

    fn insert_term(terms: &mut BTreeMap<(u32, u32), GaussRat>, key: (u32, u32), c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return GaussPoly::zero();
        }
        GaussPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Evaluation homomorphism at exact values of a and h.
    pub fn specialize(&self, a_val: &GaussRat, h_val: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for (&(pa, ph), c) in &self.terms {
            let mut term = c.clone();
            for _ in 0..pa {
                term = &term * a_val;
            }
            for _ in 0..ph {
                term = &term * h_val;
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Graded degree with deg(a) = 4 and deg(h) = 2.
    pub fn degree(&self) -> PolyDegree {
        let mut deg = None;
        for &(pa, ph) in self.terms.keys() {
            let d = 4 * pa as i64 + 2 * ph as i64;
            match deg {
                None => deg = Some(d),
                Some(existing) if existing == d => {}
                Some(_) => return PolyDegree::Inhomogeneous,
            }
        }
        match deg {
            None => PolyDegree::Zero,
            Some(d) => PolyDegree::Homogeneous(d),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = GaussPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &GaussPoly {
    type Output = GaussPoly;
    fn add(self, rhs: &GaussPoly) -> GaussPoly {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            GaussPoly::insert_term(&mut terms, *k, v.clone());
        }
        GaussPoly { terms }
    }
}

impl Sub for &GaussPoly {
    type Output = GaussPoly;
    fn sub(self, rhs: &GaussPoly) -> GaussPoly {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            GaussPoly::insert_term(&mut terms, *k, -v);
        }
        GaussPoly { terms }
    }
}

impl Mul for &GaussPoly {
    type Output = GaussPoly;
    fn mul(self, rhs: &GaussPoly) -> GaussPoly {
        let mut terms = BTreeMap::new();
        for (&(pa, ph), c) in &self.terms {
            for (&(qa, qh), d) in &rhs.terms {
                GaussPoly::insert_term(&mut terms, (pa + qa, ph + qh), c * d);
            }
        }
        GaussPoly { terms }
    }
}

impl Neg for &GaussPoly {
    type Output = GaussPoly;
    fn neg(self) -> GaussPoly {
        GaussPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

impl fmt::Display for GaussPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest total degree first, then lower powers of a first within a degree.
        let mut keys: Vec<&(u32, u32)> = self.terms.keys().collect();
        keys.sort_by(|x, y| {
            let dx = 4 * x.0 as i64 + 2 * x.1 as i64;
            let dy = 4 * y.0 as i64 + 2 * y.1 as i64;
            match dy.cmp(&dx) {
                Ordering::Equal => x.0.cmp(&y.0),
                other => other,
            }
        });
        let mut out = String::new();
        for (idx, key) in keys.iter().enumerate() {
            let c = &self.terms[*key];
            let (pa, ph) = **key;
            let mut mono = String::new();
            if pa > 0 {
                mono.push('a');
                if pa > 1 {
                    mono.push_str(&format!("^{pa}"));
                }
            }
            if ph > 0 {
                if !mono.is_empty() {
                    mono.push('*');
                }
                mono.push('h');
                if ph > 1 {
                    mono.push_str(&format!("^{ph}"));
                }
            }
            let coeff_str = {
                let pure_re = c.im.is_zero();
                let pure_im = c.re.is_zero();
                if mono.is_empty() {
                    format!("{c}")
                } else if pure_re && c.re.abs().is_one() {
                    if c.re.is_negative() {
                        "-".into()
                    } else {
                        String::new()
                    }
                } else if pure_re || pure_im {
                    format!("{c}*")
                } else {
                    format!("({c})*")
                }
            };
            let term = format!("{coeff_str}{mono}");
            if idx == 0 {
                out.push_str(&term);
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        write!(f, "{out}")
    }
}

impl FromStr for GaussPoly {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_poly(s, &["a", "h"]).map(|terms| {
            let mut out = BTreeMap::new();
            for (exps, c) in terms {
                GaussPoly::insert_term(&mut out, (exps[0] as u32, exps[1] as u32), c);
            }
            GaussPoly { terms: out }
        })
    }
}

/// A Laurent polynomial in q with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentQ {
    terms: BTreeMap<i64, i64>,
}

impl LaurentQ {
    pub fn zero() -> Self {
        LaurentQ::default()
    }

    pub fn one() -> Self {
        LaurentQ::monomial(0, 1)
    }

    pub fn monomial(exp: i64, coeff: i64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0 {
            terms.insert(exp, coeff);
        }
        LaurentQ { terms }
    }

    /// q + q^{-1}, the value of a plain circle.
    pub fn circle() -> Self {
        &LaurentQ::monomial(1, 1) + &LaurentQ::monomial(-1, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &i64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = LaurentQ::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes q -> 1/q.
    pub fn invert_q(&self) -> Self {
        LaurentQ {
            terms: self.terms.iter().map(|(e, c)| (-e, *c)).collect(),
        }
    }

    fn insert(terms: &mut BTreeMap<i64, i64>, exp: i64, c: i64) {
        if c == 0 {
            return;
        }
        let entry = terms.entry(exp).or_insert(0);
        *entry += c;
        if *entry == 0 {
            terms.remove(&exp);
        }
    }
}

impl Add for &LaurentQ {
    type Output = LaurentQ;
    fn add(self, rhs: &LaurentQ) -> LaurentQ {
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            LaurentQ::insert(&mut terms, *e, *c);
        }
        LaurentQ { terms }
    }
}

impl Sub for &LaurentQ {
    type Output = LaurentQ;
    fn sub(self, rhs: &LaurentQ) -> LaurentQ {
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            LaurentQ::insert(&mut terms, *e, -c);
        }
        LaurentQ { terms }
    }
}

impl Mul for &LaurentQ {
    type Output = LaurentQ;
    fn mul(self, rhs: &LaurentQ) -> LaurentQ {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            for (e2, c2) in &rhs.terms {
                LaurentQ::insert(&mut terms, e + e2, c * c2);
            }
        }
        LaurentQ { terms }
    }
}

impl Neg for &LaurentQ {
    type Output = LaurentQ;
    fn neg(self) -> LaurentQ {
        LaurentQ {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl fmt::Display for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (idx, (&e, &c)) in self.terms.iter().enumerate() {
            let body = match (c.abs(), e) {
                (_, 0) => format!("{}", c.abs()),
                (1, 1) => "q".to_string(),
                (1, _) => format!("q^{e}"),
                (_, 1) => format!("{}*q", c.abs()),
                (_, _) => format!("{}*q^{e}", c.abs()),
            };
            if idx == 0 {
                if c < 0 {
                    out.push('-');
                }
                out.push_str(&body);
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
                out.push_str(&body);
            }
        }
        write!(f, "{out}")
    }
}

impl FromStr for LaurentQ {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let terms = parse_poly(s, &["q"])?;
        let mut out = BTreeMap::new();
        for (exps, c) in terms {
            if !c.im.is_zero() || !c.re.denom().is_one() {
                return Err(ParseError::BadNumber { col: 0 });
            }
            let c_int: i64 =
                c.re.numer()
                    .try_into()
                    .map_err(|_| ParseError::BadNumber { col: 0 })?;
            LaurentQ::insert(&mut out, exps[0], c_int);
        }
        Ok(LaurentQ { terms: out })
    }
}

/// A bigraded Laurent polynomial in q (quantum) and t (homological).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentBi {
    terms: BTreeMap<(i64, i64), i64>,
}

impl LaurentBi {
    pub fn zero() -> Self {
        LaurentBi::default()
    }

    /// Adds `coeff * q^j t^i`.
    pub fn add_term(&mut self, exp_q: i64, exp_t: i64, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry((exp_t, exp_q)).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&(exp_t, exp_q));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as ((exp_t, exp_q), coeff), sorted by (t, q).
    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &i64)> {
        self.terms.iter()
    }

    /// The ring homomorphism t -> -1, landing in Laurent polynomials in q.
    pub fn specialize_t_minus_one(&self) -> LaurentQ {
        let mut out = BTreeMap::new();
        for (&(et, eq), &c) in &self.terms {
            let sign = if et.rem_euclid(2) == 0 { 1 } else { -1 };
            LaurentQ::insert(&mut out, eq, sign * c);
        }
        LaurentQ { terms: out }
    }
}

impl Add for &LaurentBi {
    type Output = LaurentBi;
    fn add(self, rhs: &LaurentBi) -> LaurentBi {
        let mut out = self.clone();
        for (&(et, eq), &c) in &rhs.terms {
            out.add_term(eq, et, c);
        }
        out
    }
}

impl Mul for &LaurentBi {
    type Output = LaurentBi;
    fn mul(self, rhs: &LaurentBi) -> LaurentBi {
        let mut out = LaurentBi::zero();
        for (&(et, eq), &c) in &self.terms {
            for (&(ft, fq), &d) in &rhs.terms {
                out.add_term(eq + fq, et + ft, c * d);
            }
        }
        out
    }
}

impl fmt::Display for LaurentBi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (idx, (&(et, eq), &c)) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            if eq != 0 {
                factors.push(if eq == 1 {
                    "q".into()
                } else {
                    format!("q^{eq}")
                });
            }
            if et != 0 {
                factors.push(if et == 1 {
                    "t".into()
                } else {
                    format!("t^{et}")
                });
            }
            let mag = c.abs();
            let body = if factors.is_empty() {
                format!("{mag}")
            } else if mag == 1 {
                factors.join("*")
            } else {
                format!("{mag}*{}", factors.join("*"))
            };
            if idx == 0 {
                if c < 0 {
                    out.push('-');
                }
                out.push_str(&body);
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
                out.push_str(&body);
            }
        }
        write!(f, "{out}")
    }
}

// ---------------------------------------------------------------------------
// Shared term parser for the textual grammar: sums of terms, where a term is
// an optional Gaussian rational coefficient times variable powers such as
// `a^2*h`, `q^-3`, `i`, `(1+2i)*a`. `*` between factors is optional.
// ---------------------------------------------------------------------------

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            src,
        }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn parse_uint(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ParseError::BadNumber { col: self.col() });
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<BigInt>()
            .map_err(|_| ParseError::BadNumber { col: start + 1 })
    }

    fn parse_int(&mut self) -> Result<i64, ParseError> {
        let mut sign = 1i64;
        if self.peek() == Some('-') {
            sign = -1;
            self.bump();
        } else if self.peek() == Some('+') {
            self.bump();
        }
        let n = self.parse_uint()?;
        let v: i64 = n
            .try_into()
            .map_err(|_| ParseError::BadNumber { col: self.col() })?;
        Ok(sign * v)
    }

    fn parse_rational(&mut self) -> Result<BigRational, ParseError> {
        let numer = self.parse_uint()?;
        if self.peek() == Some('/') {
            self.bump();
            let denom = self.parse_uint()?;
            if denom.is_zero() {
                return Err(ParseError::ZeroDenominator { col: self.col() });
            }
            Ok(BigRational::new(numer, denom))
        } else {
            Ok(BigRational::from_integer(numer))
        }
    }
}

type RawTerm = (Vec<i64>, GaussRat);

/// Parses a sum of monomial terms over the given variable names.
/// Exponent vector entries follow the order of `vars`.
fn parse_poly(src: &str, vars: &[&str]) -> Result<Vec<RawTerm>, ParseError> {
    let mut lx = Lexer::new(src);
    let mut terms: Vec<RawTerm> = Vec::new();
    lx.skip_ws();
    if lx.peek().is_none() {
        return Err(ParseError::UnexpectedEnd { col: lx.col() });
    }
    let mut first = true;
    loop {
        lx.skip_ws();
        if lx.peek().is_none() {
            if first {
                return Err(ParseError::UnexpectedEnd { col: lx.col() });
            }
            break;
        }
        let mut sign = GaussRat::one();
        if !first {
            match lx.bump() {
                Some('+') => {}
                Some('-') => sign = -GaussRat::one(),
                Some(ch) => {
                    return Err(ParseError::UnexpectedChar {
                        ch,
                        col: lx.col() - 1,
                    })
                }
                None => break,
            }
        } else if lx.peek() == Some('-') {
            lx.bump();
            sign = -GaussRat::one();
        } else if lx.peek() == Some('+') {
            lx.bump();
        }
        first = false;
        lx.skip_ws();

        let mut coeff = sign;
        let mut exps = vec![0i64; vars.len()];
        let mut saw_factor = false;
        loop {
            lx.skip_ws();
            let c = match lx.peek() {
                Some(c) => c,
                None => break,
            };
            if c == '+' || c == '-' {
                break;
            }
            if c == '*' {
                lx.bump();
                continue;
            }
            if c == '(' {
                lx.bump();
                let mut inner = String::new();
                let mut depth = 1;
                loop {
                    match lx.bump() {
                        Some(')') => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                            inner.push(')');
                        }
                        Some('(') => {
                            depth += 1;
                            inner.push('(');
                        }
                        Some(ch) => inner.push(ch),
                        None => return Err(ParseError::UnexpectedEnd { col: lx.col() }),
                    }
                }
                let inner_terms = parse_poly(&inner, &[])?;
                let mut val = GaussRat::zero();
                for (_, c) in inner_terms {
                    val = &val + &c;
                }
                coeff = &coeff * &val;
                saw_factor = true;
                continue;
            }
            if c.is_ascii_digit() {
                let r = lx.parse_rational()?;
                if lx.peek() == Some('i') {
                    lx.bump();
                    coeff = &coeff * &GaussRat::new(big(0) * big(0), r);
                } else {
                    coeff = &coeff * &GaussRat::new(r, big(0));
                }
                saw_factor = true;
                continue;
            }
            if c == 'i' {
                lx.bump();
                coeff = &coeff * &GaussRat::i();
                saw_factor = true;
                continue;
            }
            if c.is_ascii_alphabetic() {
                let start = lx.pos;
                while matches!(lx.peek(), Some(ch) if ch.is_ascii_alphabetic()) {
                    lx.bump();
                }
                let name: String = lx.chars[start..lx.pos].iter().collect();
                let var_idx = vars.iter().position(|v| *v == name).ok_or_else(|| {
                    ParseError::UnknownVariable {
                        name: name.clone(),
                        col: start + 1,
                    }
                })?;
                let mut exp = 1i64;
                if lx.peek() == Some('^') {
                    lx.bump();
                    exp = lx.parse_int()?;
                }
                exps[var_idx] += exp;
                saw_factor = true;
                continue;
            }
            return Err(ParseError::UnexpectedChar {
                ch: c,
                col: lx.col(),
            });
        }
        if !saw_factor {
            return Err(ParseError::UnexpectedEnd { col: lx.col() });
        }
        terms.push((exps, coeff));
    }
    let _ = lx.src;
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gp(s: &str) -> GaussPoly {
        s.parse().unwrap()
    }

    fn gr(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    #[test]
    fn arith_examples() {
        let a = GaussPoly::var_a();
        let h = GaussPoly::var_h();
        assert!((&a - &a).is_zero());
        assert_eq!(&h * &h, gp("h^2"));
        let i = GaussPoly::i();
        assert_eq!(&i * &i, gp("-1"));
    }

    #[test]
    fn specialize_examples() {
        let p = gp("h^2 + 4a");
        assert_eq!(
            p.specialize(&GaussRat::zero(), &GaussRat::zero()),
            GaussRat::zero()
        );
        assert_eq!(
            p.specialize(&GaussRat::one(), &GaussRat::zero()),
            GaussRat::from_int(4)
        );
        let p2 = gp("2a + h*i");
        assert_eq!(
            p2.specialize(&gr("1/2"), &gr("2")),
            GaussRat::from_pair(1, 2)
        );
    }

    #[test]
    fn degree_examples() {
        assert_eq!(gp("h^2 + 4a").degree(), PolyDegree::Homogeneous(4));
        assert_eq!(gp("1 + a").degree(), PolyDegree::Inhomogeneous);
        assert_eq!(GaussPoly::zero().degree(), PolyDegree::Zero);
    }

    #[test]
    fn display_round_trip() {
        for s in ["2*h^2 + 8*a", "a^2*h - i", "(1+2i)*a + 1/2", "-h", "0", "1"] {
            let p = gp(s);
            let again = gp(&p.to_string());
            assert_eq!(p, again, "round trip failed for {s}");
        }
    }

    #[test]
    fn laurent_display_parse() {
        let p: LaurentQ = "q + q^3 + q^5 - q^9".parse().unwrap();
        assert_eq!(p.coeff(9), -1);
        assert_eq!(p.coeff(5), 1);
        let rt: LaurentQ = p.to_string().parse().unwrap();
        assert_eq!(p, rt);
    }

    #[test]
    fn laurent_bi_t_specialization() {
        let mut p = LaurentBi::zero();
        p.add_term(1, 0, 1);
        p.add_term(5, -2, 1);
        p.add_term(9, -3, 1);
        let q = p.specialize_t_minus_one();
        assert_eq!(q.coeff(1), 1);
        assert_eq!(q.coeff(5), 1);
        assert_eq!(q.coeff(9), -1);
    }

    #[test]
    fn gauss_rat_inverse() {
        let z = GaussRat::from_pair(3, -2);
        let w = &z * &z.inv();
        assert!(w.is_one());
        assert!(GaussRat::i().is_zi_unit());
        assert!(!GaussRat::from_int(2).is_zi_unit());
    }

    fn arb_gauss_rat() -> impl Strategy<Value = GaussRat> {
        (-6i64..7, -6i64..7, 1i64..4).prop_map(|(re, im, d)| {
            GaussRat::new(
                BigRational::new(BigInt::from(re), BigInt::from(d)),
                BigRational::new(BigInt::from(im), BigInt::from(d)),
            )
        })
    }

    fn arb_poly() -> impl Strategy<Value = GaussPoly> {
        proptest::collection::vec(((0u32..3, 0u32..3), arb_gauss_rat()), 0..5).prop_map(|ts| {
            let mut p = GaussPoly::zero();
            for ((pa, ph), c) in ts {
                p = &p + &GaussPoly::monomial(pa, ph, c);
            }
            p
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(x in arb_poly(), y in arb_poly(), z in arb_poly()) {
            let assoc_l = &(&x * &y) * &z;
            let assoc_r = &x * &(&y * &z);
            prop_assert_eq!(assoc_l, assoc_r);
            let dist_l = &x * &(&y + &z);
            let dist_r = &(&x * &y) + &(&x * &z);
            prop_assert_eq!(dist_l, dist_r);
            let comm_l = &x * &y;
            let comm_r = &y * &x;
            prop_assert_eq!(comm_l, comm_r);
        }

        #[test]
        fn specialize_is_ring_hom(x in arb_poly(), y in arb_poly(), a in arb_gauss_rat(), h in arb_gauss_rat()) {
            let lhs = (&x * &y).specialize(&a, &h);
            let rhs = &x.specialize(&a, &h) * &y.specialize(&a, &h);
            prop_assert_eq!(lhs, rhs);
            let lhs2 = (&x + &y).specialize(&a, &h);
            let rhs2 = &x.specialize(&a, &h) + &y.specialize(&a, &h);
            prop_assert_eq!(lhs2, rhs2);
        }

        #[test]
        fn degree_additive(x in arb_poly(), y in arb_poly()) {
            if let (PolyDegree::Homogeneous(dx), PolyDegree::Homogeneous(dy)) = (x.degree(), y.degree()) {
                let prod = &x * &y;
                if !prod.is_zero() {
                    prop_assert_eq!(prod.degree(), PolyDegree::Homogeneous(dx + dy));
                }
            }
        }

        #[test]
        fn laurent_t_minus_one_is_hom(
            xs in proptest::collection::vec(((-4i64..5, -2i64..3), -3i64..4), 0..5),
            ys in proptest::collection::vec(((-4i64..5, -2i64..3), -3i64..4), 0..5),
        ) {
            let mk = |ts: &[((i64, i64), i64)]| {
                let mut p = LaurentBi::zero();
                for ((q, t), c) in ts {
                    p.add_term(*q, *t, *c);
                }
                p
            };
            let x = mk(&xs);
            let y = mk(&ys);
            let lhs = (&x * &y).specialize_t_minus_one();
            let rhs = &x.specialize_t_minus_one() * &y.specialize_t_minus_one();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
