//! Free associative algebra over [`Scalar`] on the graded generator alphabets,
//! its tensor powers, and the Z₃-graded commutator.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalars::{Cyclo, Scalar};

/// A letter of one of the generator alphabets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    X,
    XInv,
    Y,
    Dx,
    Dy,
    D2x,
    D2y,
    Theta,
    Phi,
    /// Quantum Lie generator `H`.
    H,
    /// Quantum Lie generator `X` (not the coordinate `x`).
    OpX,
    /// The grouplike `q^-N`.
    K,
    /// The grouplike `q^N`.
    KInv,
    Dax,
    DaxInv,
    Day,
    A,
    B,
    /// The grouplike `q^A` of the dual algebra.
    L,
    LInv,
}

pub const ALL_GENS: [Gen; 20] = [
    Gen::X,
    Gen::XInv,
    Gen::Y,
    Gen::Dx,
    Gen::Dy,
    Gen::D2x,
    Gen::D2y,
    Gen::Theta,
    Gen::Phi,
    Gen::H,
    Gen::OpX,
    Gen::K,
    Gen::KInv,
    Gen::Dax,
    Gen::DaxInv,
    Gen::Day,
    Gen::A,
    Gen::B,
    Gen::L,
    Gen::LInv,
];

/// Alphabet families. Coordinates belong to both `Main` and `Omega`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Main,
    Omega,
    Operator,
    Partial,
    Dual,
}

impl Family {
    fn bit(self) -> u8 {
        1 << (self as u8)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Main => "main",
            Family::Omega => "omega",
            Family::Operator => "operator",
            Family::Partial => "partial",
            Family::Dual => "dual",
        }
    }
}

const ALL_FAMILIES: u8 = 0b1_1111;

impl Gen {
    pub fn grade(self) -> u8 {
        match self {
            Gen::Dx | Gen::Dy | Gen::Theta | Gen::Phi => 1,
            Gen::D2x | Gen::D2y => 2,
            _ => 0,
        }
    }

    /// Canonical text, parseable by [`crate::parse`].
    pub fn name(self) -> &'static str {
        match self {
            Gen::X => "x",
            Gen::XInv => "x^-1",
            Gen::Y => "y",
            Gen::Dx => "dx",
            Gen::Dy => "dy",
            Gen::D2x => "d2x",
            Gen::D2y => "d2y",
            Gen::Theta => "theta",
            Gen::Phi => "phi",
            Gen::H => "H",
            Gen::OpX => "X",
            Gen::K => "q^-N",
            Gen::KInv => "q^N",
            Gen::Dax => "dax",
            Gen::DaxInv => "dax^-1",
            Gen::Day => "day",
            Gen::A => "A",
            Gen::B => "B",
            Gen::L => "q^A",
            Gen::LInv => "q^-A",
        }
    }

    pub fn from_name(s: &str) -> Option<Gen> {
        let g = match s {
            "x" => Gen::X,
            "x^-1" | "xinv" => Gen::XInv,
            "y" => Gen::Y,
            "dx" => Gen::Dx,
            "dy" => Gen::Dy,
            "d2x" => Gen::D2x,
            "d2y" => Gen::D2y,
            "theta" => Gen::Theta,
            "phi" => Gen::Phi,
            "H" => Gen::H,
            "X" => Gen::OpX,
            "q^-N" | "K" => Gen::K,
            "q^N" | "Kinv" => Gen::KInv,
            "dax" => Gen::Dax,
            "dax^-1" | "daxinv" => Gen::DaxInv,
            "day" => Gen::Day,
            "A" => Gen::A,
            "B" => Gen::B,
            "q^A" | "L" => Gen::L,
            "q^-A" | "Linv" => Gen::LInv,
            _ => return None,
        };
        Some(g)
    }

    fn family_mask(self) -> u8 {
        match self {
            Gen::X | Gen::XInv | Gen::Y => Family::Main.bit() | Family::Omega.bit(),
            Gen::Dx | Gen::Dy | Gen::D2x | Gen::D2y => Family::Main.bit(),
            Gen::Theta | Gen::Phi => Family::Omega.bit(),
            Gen::H | Gen::OpX | Gen::K | Gen::KInv => Family::Operator.bit(),
            Gen::Dax | Gen::DaxInv | Gen::Day => Family::Partial.bit(),
            Gen::A | Gen::B | Gen::L | Gen::LInv => Family::Dual.bit(),
        }
    }

    pub fn in_family(self, f: Family) -> bool {
        self.family_mask() & f.bit() != 0
    }

    pub fn is_coordinate(self) -> bool {
        matches!(self, Gen::X | Gen::XInv | Gen::Y)
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A word in the generators. Letters are stored flat.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub SmallVec<[Gen; 8]>);

impl Word {
    pub fn empty() -> Self {
        Word(SmallVec::new())
    }

    pub fn from_slice(gs: &[Gen]) -> Self {
        Word(SmallVec::from_slice(gs))
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn grade(&self) -> u8 {
        (self.0.iter().map(|g| g.grade() as u32).sum::<u32>() % 3) as u8
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    fn family_mask(&self) -> u8 {
        self.0.iter().fold(ALL_FAMILIES, |m, g| m & g.family_mask())
    }

    /// Exponents `(m, n)` when the word is a normal-ordered monomial
    /// `x^m y^n` (with `x^-1` counting as `-1`).
    pub fn coordinate_exponents(&self) -> Option<(i64, i64)> {
        let mut m = 0i64;
        let mut n = 0i64;
        let mut seen_y = false;
        let mut sign = 0i64;
        for &g in &self.0 {
            match g {
                Gen::X | Gen::XInv => {
                    let s = if g == Gen::X { 1 } else { -1 };
                    if seen_y || (sign != 0 && sign != s) {
                        return None;
                    }
                    sign = s;
                    m += s;
                }
                Gen::Y => {
                    seen_y = true;
                    n += 1;
                }
                _ => return None,
            }
        }
        Some((m, n))
    }

    /// The monomial `x^m y^n` as a word.
    pub fn monomial(m: i64, n: i64) -> Word {
        let mut v = SmallVec::new();
        let g = if m >= 0 { Gen::X } else { Gen::XInv };
        for _ in 0..m.unsigned_abs() {
            v.push(g);
        }
        for _ in 0..n.max(0) {
            v.push(Gen::Y);
        }
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, g) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            f.write_str(g.name())?;
        }
        Ok(())
    }
}

/// Finite linear combination of words.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Element {
    terms: BTreeMap<Word, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn one() -> Self {
        Self::scalar(Scalar::one())
    }

    pub fn scalar(s: Scalar) -> Self {
        Self::term(Word::empty(), s)
    }

    pub fn term(w: Word, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        Element { terms }
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, Scalar::one())
    }

    pub fn gen(g: Gen) -> Self {
        Self::word(Word::from_slice(&[g]))
    }

    /// Product of single letters.
    pub fn letters(gs: &[Gen]) -> Self {
        Self::word(Word::from_slice(gs))
    }

    pub fn terms(&self) -> &BTreeMap<Word, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Word, Scalar> {
        self.terms
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, Scalar)>>(it: I) -> Self {
        let mut e = Element::zero();
        for (w, c) in it {
            e.add_term(w, &c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    /// The constant, if the element is a pure scalar.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Word::empty()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, w: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self
                .terms
                .iter()
                .map(|(w, a)| (w.clone(), a * c))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        }
    }

    fn family_mask(&self) -> u8 {
        self.terms
            .keys()
            .fold(ALL_FAMILIES, |m, w| m & w.family_mask())
    }

    /// Checks that all letters share an alphabet family.
    pub fn check_alphabet(&self) -> Result<()> {
        let mut mask = ALL_FAMILIES;
        let mut first: Option<&Word> = None;
        for w in self.terms.keys() {
            let m = mask & w.family_mask();
            if m == 0 {
                return Err(Error::MixedAlphabet {
                    left: first.map(|w| w.to_string()).unwrap_or_default(),
                    right: w.to_string(),
                });
            }
            if w.family_mask() != ALL_FAMILIES {
                first.get_or_insert(w);
            }
            mask = m;
        }
        Ok(())
    }

    pub fn in_family(&self, f: Family) -> bool {
        self.family_mask() & f.bit() != 0
    }

    /// Bilinear concatenation, no reduction.
    pub fn try_mul(&self, other: &Element) -> Result<Element> {
        if self.family_mask() & other.family_mask() == 0 {
            return Err(Error::MixedAlphabet {
                left: self.to_string(),
                right: other.to_string(),
            });
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Element) -> Element {
        let mut out = Element::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), &(a * b));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Result<Element> {
        let mut out = Element::one();
        for _ in 0..n {
            out = out.try_mul(self)?;
        }
        Ok(out)
    }

    /// The common grade of all words.
    pub fn grade_of(&self) -> Result<u8> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Ok(0);
        };
        let g = first.grade();
        for w in it {
            if w.grade() != g {
                return Err(Error::Inhomogeneous {
                    first: first.to_string(),
                    first_grade: g,
                    second: w.to_string(),
                    second_grade: w.grade(),
                });
            }
        }
        Ok(g)
    }

    /// Splits into homogeneous components, indexed by grade.
    pub fn homogeneous_parts(&self) -> [Element; 3] {
        let mut parts: [Element; 3] = Default::default();
        for (w, c) in &self.terms {
            parts[w.grade() as usize].add_term(w.clone(), c);
        }
        parts
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Scalar) -> Element {
        Element::from_terms(self.terms.iter().map(|(w, c)| (w.clone(), f(c))))
    }

    /// Replaces letters by elements (letters mapped to `None` are kept) and
    /// expands, without reduction.
    pub fn substitute(&self, f: impl Fn(Gen) -> Option<Element>) -> Element {
        let mut out = Element::zero();
        for (w, c) in &self.terms {
            let mut acc = Element::scalar(c.clone());
            for &g in w.letters() {
                let img = f(g).unwrap_or_else(|| Element::gen(g));
                acc = acc.mul_unchecked(&img);
            }
            out = &out + &acc;
        }
        out
    }
}

/// `[a, b] = ab − j^{deg a · deg b} ba`, unreduced.
pub fn graded_commutator(a: &Element, b: &Element) -> Result<Element> {
    let ga = a.grade_of()?;
    let gb = b.grade_of()?;
    let ab = a.try_mul(b)?;
    let ba = b.try_mul(a)?;
    let twist = Scalar::from(Cyclo::j_pow((ga as i64) * (gb as i64)));
    Ok(&ab - &ba.scale(&twist))
}

impl<'a> Add<&'a Element> for &'a Element {
    type Output = Element;
    fn add(self, o: &Element) -> Element {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a Element> for &'a Element {
    type Output = Element;
    fn sub(self, o: &Element) -> Element {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), &-c);
        }
        out
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&Scalar::from(-1))
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, o: Element) -> Element {
        &self + &o
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, o: Element) -> Element {
        &self - &o
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

impl Mul<&Element> for &Element {
    type Output = Element;
    /// Panics on mixed alphabets; use [`Element::mul`] for the checked form.
    fn mul(self, o: &Element) -> Element {
        Element::try_mul(self, o).expect("mixed alphabets")
    }
}

impl Mul for Element {
    type Output = Element;
    fn mul(self, o: Element) -> Element {
        &self * &o
    }
}

pub(crate) fn render_term(coeff: &Scalar, body: &str) -> (bool, String) {
    if coeff.is_one() {
        return (false, body.to_string());
    }
    if body == "1" {
        let parts = coeff.signed_parts();
        if parts.len() == 1 {
            return parts.into_iter().next().expect("one part");
        }
        return (false, format!("({coeff})"));
    }
    if coeff.is_simple() {
        let mut parts = coeff.signed_parts();
        let (neg, c) = parts.pop().expect("nonzero");
        if c == "1" {
            return (neg, body.to_string());
        }
        return (neg, format!("{c} * {body}"));
    }
    (false, format!("({coeff}) * {body}"))
}

pub(crate) fn join_terms(parts: Vec<(bool, String)>) -> String {
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (neg, body)) in parts.into_iter().enumerate() {
        match (k, neg) {
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (0, false) => out.push_str(&body),
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
        }
    }
    out
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self
            .terms
            .iter()
            .map(|(w, c)| render_term(c, &w.to_string()))
            .collect();
        f.write_str(&join_terms(parts))
    }
}

/// Multiplication rule for tensor products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum TensorRule {
    /// `(a⊗b)(c⊗d) = ac⊗bd`.
    #[default]
    Untwisted,
    /// `(a⊗b)(c⊗d) = j^{deg b · deg c} ac⊗bd`, the graded rule.
    Twisted,
}

/// Fixed-arity tensor of words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorElement {
    arity: usize,
    terms: BTreeMap<Vec<Word>, Scalar>,
}

impl TensorElement {
    pub fn zero(arity: usize) -> Self {
        assert!(arity > 0, "tensor arity must be positive");
        TensorElement {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::pure(vec![Word::empty(); arity], Scalar::one())
    }

    pub fn pure(legs: Vec<Word>, c: Scalar) -> Self {
        let mut t = Self::zero(legs.len());
        t.add_term(legs, &c);
        t
    }

    /// `e₁ ⊗ … ⊗ e_k` expanded.
    pub fn from_elements(legs: &[&Element]) -> Self {
        let mut acc: BTreeMap<Vec<Word>, Scalar> = BTreeMap::new();
        acc.insert(Vec::new(), Scalar::one());
        for leg in legs {
            let mut next = BTreeMap::new();
            for (ws, a) in &acc {
                for (w, b) in leg.terms() {
                    let mut v = ws.clone();
                    v.push(w.clone());
                    next.insert(v, a * b);
                }
            }
            acc = next;
        }
        let mut t = Self::zero(legs.len());
        for (ws, c) in acc {
            t.add_term(ws, &c);
        }
        t
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<Word>, Scalar)>>(arity: usize, it: I) -> Self {
        let mut t = Self::zero(arity);
        for (ws, c) in it {
            t.add_term(ws, &c);
        }
        t
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Word>, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, legs: Vec<Word>, c: &Scalar) {
        assert_eq!(legs.len(), self.arity, "tensor leg count");
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(legs) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &TensorElement) -> Result<TensorElement> {
        if self.arity != o.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: o.arity,
            });
        }
        let mut out = self.clone();
        for (ws, c) in &o.terms {
            out.add_term(ws.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &TensorElement) -> Result<TensorElement> {
        self.add(&o.scale(&Scalar::from(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> TensorElement {
        TensorElement::from_terms(
            self.arity,
            self.terms.iter().map(|(ws, a)| (ws.clone(), a * c)),
        )
    }

    /// Componentwise product.
    pub fn mul(&self, o: &TensorElement, rule: TensorRule) -> Result<TensorElement> {
        if self.arity != o.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: o.arity,
            });
        }
        let mut out = TensorElement::zero(self.arity);
        for (us, a) in &self.terms {
            for (vs, b) in &o.terms {
                let mut c = a * b;
                if rule == TensorRule::Twisted {
                    let mut e = 0i64;
                    for (r, u) in us.iter().enumerate() {
                        for v in &vs[..r] {
                            e += u.grade() as i64 * v.grade() as i64;
                        }
                    }
                    if e % 3 != 0 {
                        c = &c * &Scalar::from(Cyclo::j_pow(e));
                    }
                }
                let legs = us.iter().zip(vs).map(|(u, v)| u.concat(v)).collect();
                out.add_term(legs, &c);
            }
        }
        Ok(out)
    }

    /// Replaces every leg word by an element and expands.
    pub fn map_legs<F>(&self, mut f: F) -> Result<TensorElement>
    where
        F: FnMut(usize, &Word) -> Result<Element>,
    {
        let mut out = TensorElement::zero(self.arity);
        for (ws, c) in &self.terms {
            let imgs = ws
                .iter()
                .enumerate()
                .map(|(k, w)| f(k, w))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&Element> = imgs.iter().collect();
            let t = TensorElement::from_elements(&refs);
            for (legs, b) in t.terms {
                out.add_term(legs, &(c * &b));
            }
        }
        Ok(out)
    }

    /// Applies a tensor-valued map to one leg, splicing its legs in place.
    pub fn expand_leg<F>(&self, leg: usize, mut f: F) -> Result<TensorElement>
    where
        F: FnMut(&Word) -> Result<TensorElement>,
    {
        let mut out: Option<TensorElement> = None;
        for (ws, c) in &self.terms {
            let img = f(&ws[leg])?;
            let arity = self.arity - 1 + img.arity;
            let acc = out.get_or_insert_with(|| TensorElement::zero(arity));
            for (inner, b) in &img.terms {
                let mut legs = Vec::with_capacity(arity);
                legs.extend_from_slice(&ws[..leg]);
                legs.extend(inner.iter().cloned());
                legs.extend_from_slice(&ws[leg + 1..]);
                acc.add_term(legs, &(c * b));
            }
        }
        Ok(out.unwrap_or_else(|| TensorElement::zero(self.arity + 1)))
    }

    /// Multiplies all legs together: `m(a ⊗ b) = ab`.
    pub fn multiply_legs(&self) -> Element {
        let mut out = Element::zero();
        for (ws, c) in &self.terms {
            let w = ws.iter().fold(Word::empty(), |acc, w| acc.concat(w));
            out.add_term(w, c);
        }
        out
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Scalar) -> TensorElement {
        TensorElement::from_terms(
            self.arity,
            self.terms.iter().map(|(ws, c)| (ws.clone(), f(c))),
        )
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self
            .terms
            .iter()
            .map(|(ws, c)| {
                let body = ws
                    .iter()
                    .map(|w| w.to_string())
                    .collect::<Vec<_>>()
                    .join(" (x) ");
                render_term(c, &body)
            })
            .collect();
        f.write_str(&join_terms(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::QMode;

    fn g(x: Gen) -> Element {
        Element::gen(x)
    }

    #[test]
    fn mul_is_concatenation() {
        let xy = g(Gen::X).try_mul(&g(Gen::Y)).unwrap();
        assert_eq!(xy, Element::letters(&[Gen::X, Gen::Y]));
        let s = (&g(Gen::X) + &g(Gen::Y)).try_mul(&g(Gen::Dx)).unwrap();
        assert_eq!(
            s,
            &Element::letters(&[Gen::X, Gen::Dx]) + &Element::letters(&[Gen::Y, Gen::Dx])
        );
        let q = QMode::Symbolic.q();
        let p = g(Gen::X).scale(&q).try_mul(&g(Gen::Y).scale(&q)).unwrap();
        assert_eq!(
            p,
            Element::letters(&[Gen::X, Gen::Y]).scale(&QMode::Symbolic.q_pow(2))
        );
    }

    #[test]
    fn mixed_alphabets_rejected() {
        assert!(matches!(
            g(Gen::Dx).try_mul(&g(Gen::Theta)),
            Err(Error::MixedAlphabet { .. })
        ));
        assert!(matches!(
            g(Gen::A).try_mul(&g(Gen::X)),
            Err(Error::MixedAlphabet { .. })
        ));
        // coordinates are shared by the main and form alphabets
        assert!(g(Gen::X).try_mul(&g(Gen::Theta)).is_ok());
    }

    #[test]
    fn grades() {
        assert_eq!(Element::letters(&[Gen::X, Gen::Dx]).grade_of().unwrap(), 1);
        assert_eq!(
            Element::letters(&[Gen::Dx, Gen::D2y]).grade_of().unwrap(),
            0
        );
        let err = (&g(Gen::X) + &g(Gen::Dx)).grade_of().unwrap_err();
        assert!(matches!(err, Error::Inhomogeneous { .. }));
    }

    #[test]
    fn graded_commutators() {
        let c = graded_commutator(&g(Gen::X), &g(Gen::Y)).unwrap();
        assert_eq!(
            c,
            &Element::letters(&[Gen::X, Gen::Y]) - &Element::letters(&[Gen::Y, Gen::X])
        );
        let c = graded_commutator(&g(Gen::Dx), &g(Gen::Dy)).unwrap();
        let want = &Element::letters(&[Gen::Dx, Gen::Dy])
            - &Element::letters(&[Gen::Dy, Gen::Dx]).scale(&Scalar::j());
        assert_eq!(c, want);
        let c = graded_commutator(&g(Gen::Dx), &g(Gen::D2x)).unwrap();
        let j2 = Scalar::from(Cyclo::j_pow(2));
        let want = &Element::letters(&[Gen::Dx, Gen::D2x])
            - &Element::letters(&[Gen::D2x, Gen::Dx]).scale(&j2);
        assert_eq!(c, want);
    }

    fn w(gs: &[Gen]) -> Word {
        Word::from_slice(gs)
    }

    #[test]
    fn tensor_products() {
        let xx = TensorElement::pure(vec![w(&[Gen::X]), w(&[Gen::X])], Scalar::one());
        let y1 = TensorElement::pure(vec![w(&[Gen::Y]), w(&[])], Scalar::one());
        let p = xx.mul(&y1, TensorRule::Untwisted).unwrap();
        assert_eq!(
            p,
            TensorElement::pure(vec![w(&[Gen::X, Gen::Y]), w(&[Gen::X])], Scalar::one())
        );

        let th = TensorElement::pure(vec![w(&[Gen::Theta]), w(&[])], Scalar::one())
            .add(&TensorElement::pure(
                vec![w(&[]), w(&[Gen::Theta])],
                Scalar::one(),
            ))
            .unwrap();
        let p = xx.mul(&th, TensorRule::Untwisted).unwrap();
        let want = TensorElement::from_terms(
            2,
            [
                (vec![w(&[Gen::X, Gen::Theta]), w(&[Gen::X])], Scalar::one()),
                (vec![w(&[Gen::X]), w(&[Gen::X, Gen::Theta])], Scalar::one()),
            ],
        );
        assert_eq!(p, want);
        assert_eq!(
            TensorElement::one(2)
                .mul(&th, TensorRule::Untwisted)
                .unwrap(),
            th
        );
        assert!(matches!(
            TensorElement::one(3).mul(&th, TensorRule::Untwisted),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn twisted_rule_picks_up_cube_root() {
        let a = TensorElement::pure(vec![w(&[]), w(&[Gen::Theta])], Scalar::one());
        let b = TensorElement::pure(vec![w(&[Gen::Theta]), w(&[])], Scalar::one());
        let p = a.mul(&b, TensorRule::Twisted).unwrap();
        assert_eq!(
            p,
            TensorElement::pure(vec![w(&[Gen::Theta]), w(&[Gen::Theta])], Scalar::j())
        );
        let p = b.mul(&a, TensorRule::Twisted).unwrap();
        assert_eq!(
            p,
            TensorElement::pure(vec![w(&[Gen::Theta]), w(&[Gen::Theta])], Scalar::one())
        );
    }

    #[test]
    fn rendering() {
        let e = &Element::letters(&[Gen::X, Gen::Y]).scale(&QMode::Specialized.q_pow(-1))
            + &Element::gen(Gen::XInv);
        assert_eq!(e.to_string(), "(-1 - j) * x*y + x^-1");
        let t = TensorElement::pure(vec![w(&[Gen::Dx]), w(&[Gen::X])], Scalar::one());
        assert_eq!(t.to_string(), "dx (x) x");
        assert_eq!(Element::zero().to_string(), "0");
        assert_eq!(Element::scalar(Scalar::from(-2)).to_string(), "-2");
    }
}
