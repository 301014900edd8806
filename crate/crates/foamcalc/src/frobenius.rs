//! The rank-two Frobenius algebra A = Z[i][a,h][X]/(X^2 - hX - a), the dotted
//! TQFT it generates, and evaluation of closed foams.
//!
//! Elements of A are kept reduced to the basis {1, X}. The grading puts
//! deg(1) = -1 and deg(X) = +1, so that multiplication and comultiplication
//! raise degree by 1 while unit and counit lower it by 1.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::coeff::{GaussPoly, GaussRat, PolyDegree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoamError {
    #[error("factor index {index} out of range for {n} tensor factors")]
    FactorOutOfRange { index: usize, n: usize },
    #[error("generator needs two distinct factors")]
    DegenerateFactors,
    #[error("word is not composable: expected {expected} factors, found {found}")]
    NotComposable { expected: usize, found: usize },
}

/// Which side the preferred facet of a singular circle lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering2 {
    Left,
    Right,
}

/// An element c0*1 + c1*X of the algebra A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgElem {
    pub c0: GaussPoly,
    pub c1: GaussPoly,
}

impl AlgElem {
    pub fn zero() -> Self {
        AlgElem {
            c0: GaussPoly::zero(),
            c1: GaussPoly::zero(),
        }
    }

    pub fn one() -> Self {
        AlgElem {
            c0: GaussPoly::one(),
            c1: GaussPoly::zero(),
        }
    }

    pub fn x() -> Self {
        AlgElem {
            c0: GaussPoly::zero(),
            c1: GaussPoly::one(),
        }
    }

    pub fn basis(is_x: bool) -> Self {
        if is_x {
            Self::x()
        } else {
            Self::one()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    pub fn scale(&self, c: &GaussPoly) -> Self {
        AlgElem {
            c0: &self.c0 * c,
            c1: &self.c1 * c,
        }
    }

    /// Multiplication by X, reduced through X^2 = hX + a.
    pub fn dot(&self) -> Self {
        let a = GaussPoly::var_a();
        let h = GaussPoly::var_h();
        AlgElem {
            c0: &self.c1 * &a,
            c1: &self.c0 + &(&self.c1 * &h),
        }
    }

    /// The root-swap involution: 1 -> 1, X -> h - X.
    pub fn sigma(&self) -> Self {
        let h = GaussPoly::var_h();
        AlgElem {
            c0: &self.c0 + &(&self.c1 * &h),
            c1: -&self.c1,
        }
    }

    pub fn sigma_pow(&self, parity: u8) -> Self {
        if parity % 2 == 0 {
            self.clone()
        } else {
            self.sigma()
        }
    }

    /// The counit: 1 -> 0, X -> 1.
    pub fn counit(&self) -> GaussPoly {
        self.c1.clone()
    }
}

impl Add for &AlgElem {
    type Output = AlgElem;
    fn add(self, rhs: &AlgElem) -> AlgElem {
        AlgElem {
            c0: &self.c0 + &rhs.c0,
            c1: &self.c1 + &rhs.c1,
        }
    }
}

impl Sub for &AlgElem {
    type Output = AlgElem;
    fn sub(self, rhs: &AlgElem) -> AlgElem {
        AlgElem {
            c0: &self.c0 - &rhs.c0,
            c1: &self.c1 - &rhs.c1,
        }
    }
}

impl Neg for &AlgElem {
    type Output = AlgElem;
    fn neg(self) -> AlgElem {
        AlgElem {
            c0: -&self.c0,
            c1: -&self.c1,
        }
    }
}

impl Mul for &AlgElem {
    type Output = AlgElem;
    fn mul(self, rhs: &AlgElem) -> AlgElem {
        // (c0 + c1 X)(d0 + d1 X) with X^2 = hX + a.
        let a = GaussPoly::var_a();
        let h = GaussPoly::var_h();
        let xx = &self.c1 * &rhs.c1;
        AlgElem {
            c0: &(&self.c0 * &rhs.c0) + &(&xx * &a),
            c1: &(&(&self.c0 * &rhs.c1) + &(&self.c1 * &rhs.c0)) + &(&xx * &h),
        }
    }
}

impl fmt::Display for AlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if !self.c0.is_zero() {
            parts.push(format!("({})*1", self.c0));
        }
        if !self.c1.is_zero() {
            parts.push(format!("({})*X", self.c1));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Multiplication m: A (x) A -> A.
pub fn alg_mul(x: &AlgElem, y: &AlgElem) -> AlgElem {
    x * y
}

/// Counit applied to an element.
pub fn alg_counit(x: &AlgElem) -> GaussPoly {
    x.counit()
}

/// The map of the annulus carrying one singular circle. With the preferred
/// facet on the left this is -i*sigma; on the right it is i*sigma.
pub fn sing_annulus(x: &AlgElem, ordering: Ordering2) -> AlgElem {
    let unit = match ordering {
        Ordering2::Left => -GaussRat::i(),
        Ordering2::Right => GaussRat::i(),
    };
    x.sigma().scale(&GaussPoly::constant(unit))
}

/// A vector in A^{(x) n}, stored sparsely on the basis words over {1, X}.
/// Bit k of a word is set when factor k is X.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorVec {
    pub n: usize,
    terms: BTreeMap<u64, GaussPoly>,
}

impl TensorVec {
    pub fn zero(n: usize) -> Self {
        assert!(n <= 63, "too many tensor factors");
        TensorVec {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis_word(n: usize, word: u64) -> Self {
        let mut v = TensorVec::zero(n);
        v.add_term(word, GaussPoly::one());
        v
    }

    /// The empty tensor product: the unit scalar of the ground ring.
    pub fn scalar_one() -> Self {
        TensorVec::basis_word(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u64, &GaussPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: u64) -> GaussPoly {
        self.terms
            .get(&word)
            .cloned()
            .unwrap_or_else(GaussPoly::zero)
    }

    pub fn add_term(&mut self, word: u64, c: GaussPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(word) {
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

    pub fn scale(&self, c: &GaussPoly) -> Self {
        let mut out = TensorVec::zero(self.n);
        for (w, v) in &self.terms {
            out.add_term(*w, v * c);
        }
        out
    }

    /// Applies an A-linear endomorphism to one factor.
    pub fn map_factor(&self, k: usize, f: impl Fn(&AlgElem) -> AlgElem) -> Result<Self, FoamError> {
        if k >= self.n {
            return Err(FoamError::FactorOutOfRange {
                index: k,
                n: self.n,
            });
        }
        let image_of_one = f(&AlgElem::one());
        let image_of_x = f(&AlgElem::x());
        let mut out = TensorVec::zero(self.n);
        for (&w, c) in &self.terms {
            let img = if w & (1 << k) != 0 {
                &image_of_x
            } else {
                &image_of_one
            };
            let base = w & !(1 << k);
            out.add_term(base, &c.clone() * &img.c0);
            out.add_term(base | (1 << k), &c.clone() * &img.c1);
        }
        Ok(out)
    }

    /// Merges factors k and l through m; the product lands in position
    /// min(k, l) and indices above max(k, l) shift down by one.
    pub fn merge_factors(&self, k: usize, l: usize) -> Result<Self, FoamError> {
        if k == l {
            return Err(FoamError::DegenerateFactors);
        }
        if k >= self.n || l >= self.n {
            return Err(FoamError::FactorOutOfRange {
                index: k.max(l),
                n: self.n,
            });
        }
        let (lo, hi) = (k.min(l), k.max(l));
        let mut out = TensorVec::zero(self.n - 1);
        for (&w, c) in &self.terms {
            let xk = w & (1 << k) != 0;
            let xl = w & (1 << l) != 0;
            let prod = alg_mul(&AlgElem::basis(xk), &AlgElem::basis(xl));
            let base = remove_bit(w & !(1 << lo) & !(1 << hi), hi);
            out.add_term(clear(base, lo), &c.clone() * &prod.c0);
            out.add_term(set(base, lo), &c.clone() * &prod.c1);
        }
        Ok(out)
    }

    /// Splits factor k through the comultiplication; the two outputs sit at
    /// positions k and k+1, indices above k shift up by one.
    pub fn split_factor(&self, k: usize) -> Result<Self, FoamError> {
        if k >= self.n {
            return Err(FoamError::FactorOutOfRange {
                index: k,
                n: self.n,
            });
        }
        let mut out = TensorVec::zero(self.n + 1);
        for (&w, c) in &self.terms {
            let xk = w & (1 << k) != 0;
            let image = alg_comul(&AlgElem::basis(xk));
            let base = insert_bit(w, k + 1) & !(1 << k);
            for (&pair, d) in &image.terms {
                let mut word = base;
                if pair & 1 != 0 {
                    word |= 1 << k;
                }
                if pair & 2 != 0 {
                    word |= 1 << (k + 1);
                }
                out.add_term(word, &c.clone() * d);
            }
        }
        Ok(out)
    }

    /// Appends a new factor in state 1 (the unit map on a new circle).
    pub fn cup(&self) -> Self {
        let mut out = TensorVec::zero(self.n + 1);
        for (&w, c) in &self.terms {
            out.add_term(w, c.clone());
        }
        out
    }

    /// Closes factor k with the counit.
    pub fn cap(&self, k: usize) -> Result<Self, FoamError> {
        if k >= self.n {
            return Err(FoamError::FactorOutOfRange {
                index: k,
                n: self.n,
            });
        }
        let mut out = TensorVec::zero(self.n - 1);
        for (&w, c) in &self.terms {
            if w & (1 << k) != 0 {
                out.add_term(remove_bit(w, k), c.clone());
            }
        }
        Ok(out)
    }

    /// Quantum degree of the vector when homogeneous: word degree plus
    /// coefficient degree, with deg(1) = -1 and deg(X) = +1 per factor.
    pub fn quantum_degree(&self) -> Option<i64> {
        let mut deg = None;
        for (&w, c) in &self.terms {
            let word_deg = 2 * (w.count_ones() as i64) - self.n as i64;
            let cdeg = match c.degree() {
                PolyDegree::Homogeneous(d) => d,
                PolyDegree::Zero => continue,
                PolyDegree::Inhomogeneous => return None,
            };
            let d = word_deg + cdeg;
            match deg {
                None => deg = Some(d),
                Some(e) if e == d => {}
                Some(_) => return None,
            }
        }
        deg
    }
}

impl Add for &TensorVec {
    type Output = TensorVec;
    fn add(self, rhs: &TensorVec) -> TensorVec {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (&w, c) in &rhs.terms {
            out.add_term(w, c.clone());
        }
        out
    }
}

impl Sub for &TensorVec {
    type Output = TensorVec;
    fn sub(self, rhs: &TensorVec) -> TensorVec {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (&w, c) in &rhs.terms {
            out.add_term(w, -c);
        }
        out
    }
}

fn clear(w: u64, k: usize) -> u64 {
    w & !(1 << k)
}

fn set(w: u64, k: usize) -> u64 {
    w | (1 << k)
}

/// Removes bit k, shifting higher bits down.
fn remove_bit(w: u64, k: usize) -> u64 {
    let low = w & ((1 << k) - 1);
    let high = w >> (k + 1);
    low | (high << k)
}

/// Inserts a zero bit at position k, shifting higher bits up.
fn insert_bit(w: u64, k: usize) -> u64 {
    let low = w & ((1 << k) - 1);
    let high = w >> k;
    low | (high << (k + 1))
}

/// Comultiplication Delta: A -> A (x) A.
pub fn alg_comul(x: &AlgElem) -> TensorVec {
    // Delta(1) = 1 (x) X + X (x) 1 - h 1 (x) 1
    // Delta(X) = X (x) X + a 1 (x) 1
    let mut out = TensorVec::zero(2);
    let h = GaussPoly::var_h();
    let a = GaussPoly::var_a();
    out.add_term(0b10, x.c0.clone());
    out.add_term(0b01, x.c0.clone());
    out.add_term(0b00, -&(&x.c0 * &h));
    out.add_term(0b11, x.c1.clone());
    out.add_term(0b00, &x.c1 * &a);
    out
}

/// Generating foam pieces acting on tensor factors; `unit` is a power of i
/// multiplying the underlying linear map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoamGen {
    pub kind: GenKind,
    pub factors: Vec<usize>,
    pub unit: GaussRat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Cup,
    Cap,
    Merge,
    Split,
    Dot,
    SingAnnulus(Ordering2),
    VPairCreate,
    VPairRemove,
}

impl FoamGen {
    pub fn cup() -> Self {
        FoamGen {
            kind: GenKind::Cup,
            factors: vec![],
            unit: GaussRat::one(),
        }
    }

    pub fn cap(k: usize) -> Self {
        FoamGen {
            kind: GenKind::Cap,
            factors: vec![k],
            unit: GaussRat::one(),
        }
    }

    pub fn merge(k: usize, l: usize) -> Self {
        FoamGen {
            kind: GenKind::Merge,
            factors: vec![k, l],
            unit: GaussRat::one(),
        }
    }

    pub fn split(k: usize) -> Self {
        FoamGen {
            kind: GenKind::Split,
            factors: vec![k],
            unit: GaussRat::one(),
        }
    }

    pub fn dot(k: usize) -> Self {
        FoamGen {
            kind: GenKind::Dot,
            factors: vec![k],
            unit: GaussRat::one(),
        }
    }

    pub fn annulus(k: usize, ordering: Ordering2) -> Self {
        FoamGen {
            kind: GenKind::SingAnnulus(ordering),
            factors: vec![k],
            unit: GaussRat::one(),
        }
    }

    /// Creating a vertex pair on a circle; carries the unit -i.
    pub fn vpair_create(k: usize) -> Self {
        FoamGen {
            kind: GenKind::VPairCreate,
            factors: vec![k],
            unit: -GaussRat::i(),
        }
    }

    /// Removing a vertex pair; carries the unit i, inverse to creation.
    pub fn vpair_remove(k: usize) -> Self {
        FoamGen {
            kind: GenKind::VPairRemove,
            factors: vec![k],
            unit: GaussRat::i(),
        }
    }

    /// Euler characteristic contribution of the piece, and its dot count.
    fn chi_and_dots(&self) -> (i64, i64) {
        match self.kind {
            GenKind::Cup | GenKind::Cap => (1, 0),
            GenKind::Merge | GenKind::Split => (-1, 0),
            GenKind::Dot => (0, 1),
            GenKind::SingAnnulus(_) | GenKind::VPairCreate | GenKind::VPairRemove => (0, 0),
        }
    }

    pub fn apply(&self, v: &TensorVec) -> Result<TensorVec, FoamError> {
        let unit_poly = GaussPoly::constant(self.unit.clone());
        let out = match self.kind {
            GenKind::Cup => v.cup(),
            GenKind::Cap => v.cap(self.factors[0])?,
            GenKind::Merge => v.merge_factors(self.factors[0], self.factors[1])?,
            GenKind::Split => v.split_factor(self.factors[0])?,
            GenKind::Dot => v.map_factor(self.factors[0], |x| x.dot())?,
            GenKind::SingAnnulus(ord) => v.map_factor(self.factors[0], |x| sing_annulus(x, ord))?,
            GenKind::VPairCreate | GenKind::VPairRemove => {
                v.map_factor(self.factors[0], |x| x.sigma())?
            }
        };
        Ok(if self.unit.is_one() {
            out
        } else {
            out.scale(&unit_poly)
        })
    }
}

/// Applies a single generator to a vector.
pub fn apply_gen(g: &FoamGen, v: &TensorVec) -> Result<TensorVec, FoamError> {
    g.apply(v)
}

/// The matrix of a composite of generating pieces, columns indexed by the
/// input basis words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    pub n_in: usize,
    pub n_out: usize,
    pub cols: Vec<TensorVec>,
}

impl LinearMap {
    pub fn identity(n: usize) -> Self {
        let cols = (0..1u64 << n)
            .map(|w| TensorVec::basis_word(n, w))
            .collect();
        LinearMap {
            n_in: n,
            n_out: n,
            cols,
        }
    }

    pub fn zero(n_in: usize, n_out: usize) -> Self {
        let cols = (0..1u64 << n_in).map(|_| TensorVec::zero(n_out)).collect();
        LinearMap { n_in, n_out, cols }
    }

    pub fn apply(&self, v: &TensorVec) -> TensorVec {
        assert_eq!(v.n, self.n_in);
        let mut out = TensorVec::zero(self.n_out);
        for (&w, c) in v.terms() {
            for (&w2, d) in self.cols[w as usize].terms() {
                out.add_term(w2, &c.clone() * d);
            }
        }
        out
    }

    pub fn compose(&self, then: &LinearMap) -> LinearMap {
        assert_eq!(self.n_out, then.n_in);
        let cols = self.cols.iter().map(|c| then.apply(c)).collect();
        LinearMap {
            n_in: self.n_in,
            n_out: then.n_out,
            cols,
        }
    }

    pub fn scale(&self, c: &GaussPoly) -> LinearMap {
        LinearMap {
            n_in: self.n_in,
            n_out: self.n_out,
            cols: self.cols.iter().map(|v| v.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    /// The scalar of a closed (0 -> 0) evaluation.
    pub fn scalar(&self) -> Option<GaussPoly> {
        if self.n_in == 0 && self.n_out == 0 {
            Some(self.cols[0].coeff(0))
        } else {
            None
        }
    }

    /// Quantum degree when all matrix entries agree; input word degrees are
    /// subtracted so that honest foam maps report -chi + 2d.
    pub fn quantum_degree(&self) -> Option<i64> {
        let mut deg = None;
        for (w, col) in self.cols.iter().enumerate() {
            let in_deg = 2 * (w as u64).count_ones() as i64 - self.n_in as i64;
            for (&w2, c) in col.terms() {
                let out_deg = 2 * w2.count_ones() as i64 - self.n_out as i64;
                let cdeg = match c.degree() {
                    PolyDegree::Homogeneous(d) => d,
                    PolyDegree::Zero => continue,
                    PolyDegree::Inhomogeneous => return None,
                };
                let d = out_deg - in_deg + cdeg;
                match deg {
                    None => deg = Some(d),
                    Some(e) if e == d => {}
                    Some(_) => return None,
                }
            }
        }
        deg
    }
}

impl Add for &LinearMap {
    type Output = LinearMap;
    fn add(self, rhs: &LinearMap) -> LinearMap {
        assert_eq!((self.n_in, self.n_out), (rhs.n_in, rhs.n_out));
        LinearMap {
            n_in: self.n_in,
            n_out: self.n_out,
            cols: self
                .cols
                .iter()
                .zip(&rhs.cols)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }
}

impl Sub for &LinearMap {
    type Output = LinearMap;
    fn sub(self, rhs: &LinearMap) -> LinearMap {
        assert_eq!((self.n_in, self.n_out), (rhs.n_in, rhs.n_out));
        LinearMap {
            n_in: self.n_in,
            n_out: self.n_out,
            cols: self
                .cols
                .iter()
                .zip(&rhs.cols)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }
}

/// Compiles a generator word into its matrix, bottom to top. Also returns
/// the expected degree -chi + 2d of the composite foam.
pub fn compile_word(word: &[FoamGen], n_in: usize) -> Result<(LinearMap, i64), FoamError> {
    let mut chi = 0i64;
    let mut dots = 0i64;
    let mut cols = Vec::new();
    let mut n_out = None;
    for w in 0..1u64 << n_in {
        let mut v = TensorVec::basis_word(n_in, w);
        for g in word {
            v = g.apply(&v)?;
        }
        match n_out {
            None => n_out = Some(v.n),
            Some(n) if n == v.n => {}
            Some(n) => {
                return Err(FoamError::NotComposable {
                    expected: n,
                    found: v.n,
                })
            }
        }
        cols.push(v);
    }
    for g in word {
        let (c, d) = g.chi_and_dots();
        chi += c;
        dots += d;
    }
    let map = LinearMap {
        n_in,
        n_out: n_out.unwrap_or(0),
        cols,
    };
    Ok((map, -chi + 2 * dots))
}

/// Evaluates the connected closed orientable surface of the given genus with
/// the given number of dots: counit of X^dots H^genus 1, where H = 2X - h
/// is the handle operator from the genus reduction formula.
pub fn eval_closed_surface(genus: u32, dots: u32) -> GaussPoly {
    let mut z = AlgElem::one();
    let h = GaussPoly::var_h();
    for _ in 0..genus {
        let two_dot = z.dot().scale(&GaussPoly::from_int(2));
        z = &two_dot - &z.scale(&h);
    }
    for _ in 0..dots {
        z = z.dot();
    }
    z.counit()
}

/// Closed two-facet foam (two disks along one singular circle) evaluations,
/// keyed by dot placement and the facet ordering. With the Left ordering a
/// single dot on the bottom facet gives i and on the top facet -i; dotless
/// and doubly dotted copies vanish. Reversing the ordering negates values.
pub fn ufo_value(dot_bottom: bool, dot_top: bool, ordering: Ordering2) -> GaussPoly {
    let mut word = vec![FoamGen::cup()];
    if dot_bottom {
        word.push(FoamGen::dot(0));
    }
    word.push(FoamGen::annulus(0, ordering));
    if dot_top {
        word.push(FoamGen::dot(0));
    }
    word.push(FoamGen::cap(0));
    let (map, _) = compile_word(&word, 0).expect("ufo word is composable");
    map.scalar().expect("closed evaluation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gp(s: &str) -> GaussPoly {
        s.parse().unwrap()
    }

    #[test]
    fn mul_table() {
        assert_eq!(alg_mul(&AlgElem::one(), &AlgElem::x()), AlgElem::x());
        assert_eq!(alg_mul(&AlgElem::one(), &AlgElem::one()), AlgElem::one());
        let xx = alg_mul(&AlgElem::x(), &AlgElem::x());
        assert_eq!(xx.c0, gp("a"));
        assert_eq!(xx.c1, gp("h"));
    }

    #[test]
    fn comul_table() {
        let d1 = alg_comul(&AlgElem::one());
        assert_eq!(d1.coeff(0b01), gp("1"));
        assert_eq!(d1.coeff(0b10), gp("1"));
        assert_eq!(d1.coeff(0b00), gp("-h"));
        assert_eq!(d1.coeff(0b11), gp("0"));
        let dx = alg_comul(&AlgElem::x());
        assert_eq!(dx.coeff(0b11), gp("1"));
        assert_eq!(dx.coeff(0b00), gp("a"));

        let dh = alg_comul(&AlgElem::one().scale(&gp("h")));
        assert_eq!(dh.coeff(0b01), gp("h"));
        assert_eq!(dh.coeff(0b10), gp("h"));
        assert_eq!(dh.coeff(0b00), gp("-h^2"));
    }

    #[test]
    fn counit_table() {
        assert_eq!(alg_counit(&AlgElem::x()), gp("1"));
        assert_eq!(alg_counit(&AlgElem::one()), gp("0"));
        let hx_a = &AlgElem::x().scale(&gp("h")) + &AlgElem::one().scale(&gp("a"));
        assert_eq!(alg_counit(&hx_a), gp("h"));
    }

    #[test]
    fn annulus_values() {
        let l1 = sing_annulus(&AlgElem::one(), Ordering2::Left);
        assert_eq!(l1.c0, gp("-i"));
        assert!(l1.c1.is_zero());
        let lx = sing_annulus(&AlgElem::x(), Ordering2::Left);
        assert_eq!(lx.c0, gp("-i*h"));
        assert_eq!(lx.c1, gp("i"));
        let rx = sing_annulus(&AlgElem::x(), Ordering2::Right);
        assert_eq!(rx.c0, gp("i*h"));
        assert_eq!(rx.c1, gp("-i"));
    }

    #[test]
    fn annulus_compositions() {
        // left then right is the identity; same ordering twice is -id.
        for z in [AlgElem::one(), AlgElem::x()] {
            let lr = sing_annulus(&sing_annulus(&z, Ordering2::Right), Ordering2::Left);
            assert_eq!(lr, z);
            let ll = sing_annulus(&sing_annulus(&z, Ordering2::Left), Ordering2::Left);
            assert_eq!(ll, -&z);
        }
    }

    #[test]
    fn apply_gen_examples() {
        // dot acts on a word by X -> hX + a at the marked factor
        let v = TensorVec::basis_word(1, 0b1);
        let dotted = apply_gen(&FoamGen::dot(0), &v).unwrap();
        assert_eq!(dotted.coeff(0b1), gp("h"));
        assert_eq!(dotted.coeff(0b0), gp("a"));

        // cup on the empty vector creates a circle in state 1
        let unit = apply_gen(&FoamGen::cup(), &TensorVec::scalar_one()).unwrap();
        assert_eq!(unit.coeff(0b0), gp("1"));
        assert_eq!(unit.n, 1);

        // merge of factors 0 and 1 on the word 1 (x) X gives X
        let v = TensorVec::basis_word(2, 0b10);
        let merged = apply_gen(&FoamGen::merge(0, 1), &v).unwrap();
        assert_eq!(merged.coeff(0b1), gp("1"));
        assert_eq!(merged.coeff(0b0), gp("0"));
    }

    #[test]
    fn sphere_values() {
        let (sphere, deg) = compile_word(&[FoamGen::cup(), FoamGen::cap(0)], 0).unwrap();
        assert_eq!(sphere.scalar().unwrap(), gp("0"));
        assert_eq!(deg, -2);
        let (dotted, _) =
            compile_word(&[FoamGen::cup(), FoamGen::dot(0), FoamGen::cap(0)], 0).unwrap();
        assert_eq!(dotted.scalar().unwrap(), gp("1"));
        let (twice, _) = compile_word(
            &[
                FoamGen::cup(),
                FoamGen::dot(0),
                FoamGen::dot(0),
                FoamGen::cap(0),
            ],
            0,
        )
        .unwrap();
        assert_eq!(twice.scalar().unwrap(), gp("h"));
    }

    #[test]
    fn double_annulus_sphere_vanishes() {
        let word = [
            FoamGen::cup(),
            FoamGen::annulus(0, Ordering2::Left),
            FoamGen::annulus(0, Ordering2::Left),
            FoamGen::cap(0),
        ];
        let (map, _) = compile_word(&word, 0).unwrap();
        assert_eq!(map.scalar().unwrap(), gp("0"));
    }

    #[test]
    fn closed_surfaces() {
        assert_eq!(eval_closed_surface(0, 0), gp("0"));
        assert_eq!(eval_closed_surface(0, 1), gp("1"));
        assert_eq!(eval_closed_surface(1, 0), gp("2"));
        assert_eq!(eval_closed_surface(2, 0), gp("0"));
        assert_eq!(eval_closed_surface(3, 0), gp("2*h^2 + 8*a"));
    }

    #[test]
    fn ufo_table() {
        assert_eq!(ufo_value(false, false, Ordering2::Left), gp("0"));
        assert_eq!(ufo_value(true, true, Ordering2::Left), gp("0"));
        assert_eq!(ufo_value(true, false, Ordering2::Left), gp("i"));
        assert_eq!(ufo_value(false, true, Ordering2::Left), gp("-i"));
        // reversing the facet ordering negates the evaluation
        for (b, t) in [(false, false), (true, false), (false, true), (true, true)] {
            let left = ufo_value(b, t, Ordering2::Left);
            let right = ufo_value(b, t, Ordering2::Right);
            assert_eq!(left, -&right);
        }
    }

    #[test]
    fn frobenius_axioms() {
        // (m (x) id)(id (x) Delta) = Delta m = (id (x) m)(Delta (x) id) as 2 -> 2 maps
        let id = |v: &TensorVec| v.clone();
        let _ = id;
        let mut cols_mid = Vec::new();
        let mut cols_left = Vec::new();
        let mut cols_right = Vec::new();
        for w in 0..4u64 {
            let v = TensorVec::basis_word(2, w);
            // Delta m
            let m = v.merge_factors(0, 1).unwrap();
            cols_mid.push(m.split_factor(0).unwrap());
            // (id (x) m)(Delta (x) id): split factor 0, then merge factors 1,2
            let s = v.split_factor(0).unwrap();
            cols_left.push(s.merge_factors(1, 2).unwrap());
            // (m (x) id)(id (x) Delta): split factor 1, then merge factors 0,1
            let s2 = v.split_factor(1).unwrap();
            cols_right.push(s2.merge_factors(0, 1).unwrap());
        }
        assert_eq!(cols_mid, cols_left);
        assert_eq!(cols_mid, cols_right);
    }

    #[test]
    fn pairing_nondegenerate() {
        let pair = |x: &AlgElem, y: &AlgElem| alg_counit(&alg_mul(x, y));
        assert_eq!(pair(&AlgElem::one(), &AlgElem::x()), gp("1"));
        assert_eq!(pair(&AlgElem::x(), &AlgElem::x()), gp("h"));
        assert_eq!(pair(&AlgElem::one(), &AlgElem::one()), gp("0"));
    }

    #[test]
    fn two_dot_relation() {
        // dot twice = h dot + a id
        for z in [AlgElem::one(), AlgElem::x()] {
            let lhs = z.dot().dot();
            let rhs = &z.dot().scale(&gp("h")) + &z.scale(&gp("a"));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn surgery_formula() {
        // id = (dotted cup)(cap) + (cup)(dotted cap) - h (cup)(cap) on A
        for z in [AlgElem::one(), AlgElem::x()] {
            let t1 = AlgElem::x().scale(&z.counit());
            let t2 = AlgElem::one().scale(&z.dot().counit());
            let t3 = AlgElem::one().scale(&(&z.counit() * &gp("h")));
            let rhs = &(&t1 + &t2) - &t3;
            assert_eq!(rhs, z);
        }
        // and split then merge = 2 dot - h id
        for z in [AlgElem::one(), AlgElem::x()] {
            let v = TensorVec {
                n: 1,
                terms: [(if z.c1.is_zero() { 0 } else { 1 }, GaussPoly::one())]
                    .into_iter()
                    .collect(),
            };
            let split = v.split_factor(0).unwrap();
            let merged = split.merge_factors(0, 1).unwrap();
            let expect = &z.dot().scale(&gp("2")) - &z.scale(&gp("h"));
            assert_eq!(merged.coeff(0), expect.c0);
            assert_eq!(merged.coeff(1), expect.c1);
        }
    }

    #[test]
    fn exchange_dots_across_annulus() {
        // dot . ann + ann . dot = h ann, and dot . ann . dot = -a ann
        for ord in [Ordering2::Left, Ordering2::Right] {
            for z in [AlgElem::one(), AlgElem::x()] {
                let lhs = &sing_annulus(&z, ord).dot() + &sing_annulus(&z.dot(), ord);
                let rhs = sing_annulus(&z, ord).scale(&gp("h"));
                assert_eq!(lhs, rhs);
                let lhs2 = sing_annulus(&z.dot(), ord).dot();
                let rhs2 = sing_annulus(&z, ord).scale(&gp("-a"));
                assert_eq!(lhs2, rhs2);
            }
        }
    }

    #[test]
    fn sheet_unit_identities() {
        // cap over a singular circle is +/- i times the plain cap, and
        // a singular circle over a cup is -/+ i times the plain cup.
        for z in [AlgElem::one(), AlgElem::x()] {
            assert_eq!(
                sing_annulus(&z, Ordering2::Left).counit(),
                &z.counit() * &gp("i")
            );
            assert_eq!(
                sing_annulus(&z, Ordering2::Right).counit(),
                &z.counit() * &gp("-i")
            );
        }
        assert_eq!(
            sing_annulus(&AlgElem::one(), Ordering2::Left),
            AlgElem::one().scale(&gp("-i"))
        );
        assert_eq!(
            sing_annulus(&AlgElem::one(), Ordering2::Right),
            AlgElem::one().scale(&gp("i"))
        );
    }

    #[test]
    fn vertex_pair_create_remove_is_identity() {
        let v = TensorVec::basis_word(1, 0b1);
        let created = apply_gen(&FoamGen::vpair_create(0), &v).unwrap();
        let removed = apply_gen(&FoamGen::vpair_remove(0), &created).unwrap();
        assert_eq!(removed, v);
    }

    #[test]
    fn generator_degrees() {
        let deg = |word: &[FoamGen], n_in: usize| {
            let (map, expect) = compile_word(word, n_in).unwrap();
            let got = map.quantum_degree().expect("homogeneous");
            assert_eq!(got, expect);
            got
        };
        assert_eq!(deg(&[FoamGen::cup()], 0), -1);
        assert_eq!(deg(&[FoamGen::cap(0)], 1), -1);
        assert_eq!(deg(&[FoamGen::cup(), FoamGen::dot(0)], 0), 1);
        assert_eq!(deg(&[FoamGen::dot(0), FoamGen::cap(0)], 1), 1);
        assert_eq!(deg(&[FoamGen::merge(0, 1)], 2), 1);
        assert_eq!(deg(&[FoamGen::split(0)], 1), 1);
        assert_eq!(deg(&[FoamGen::annulus(0, Ordering2::Left)], 1), 0);
    }

    fn arb_elem() -> impl Strategy<Value = AlgElem> {
        (-4i64..5, -4i64..5, -4i64..5, -4i64..5).prop_map(|(r0, i0, r1, i1)| AlgElem {
            c0: GaussPoly::constant(GaussRat::from_pair(r0, i0)),
            c1: GaussPoly::constant(GaussRat::from_pair(r1, i1)),
        })
    }

    proptest! {
        #[test]
        fn algebra_is_associative_and_commutative(x in arb_elem(), y in arb_elem(), z in arb_elem()) {
            prop_assert_eq!(alg_mul(&alg_mul(&x, &y), &z), alg_mul(&x, &alg_mul(&y, &z)));
            prop_assert_eq!(alg_mul(&x, &y), alg_mul(&y, &x));
        }

        #[test]
        fn sigma_is_an_involution_and_algebra_map(x in arb_elem(), y in arb_elem()) {
            prop_assert_eq!(x.sigma().sigma(), x.clone());
            prop_assert_eq!(alg_mul(&x.sigma(), &y.sigma()), alg_mul(&x, &y).sigma());
        }

        #[test]
        fn frobenius_compatibility(x in arb_elem(), y in arb_elem()) {
            // Delta(xy) = (x (x) 1) Delta(y)
            let dxy = alg_comul(&alg_mul(&x, &y));
            let dy = alg_comul(&y);
            let mut scaled = TensorVec::zero(2);
            for (&w, c) in dy.terms() {
                let factor = if w & 1 != 0 {
                    alg_mul(&x, &AlgElem::x())
                } else {
                    x.clone()
                };
                scaled.add_term(w & !1, &factor.c0 * c);
                scaled.add_term(w | 1, &factor.c1 * c);
            }
            prop_assert_eq!(dxy, scaled);
        }
    }
}
