//! Exact coefficients.
//!
//! [`Cyclo`] is an element of the cyclotomic field Q(ζ), ζ a primitive 12th
//! root of unity, stored in the power basis `1, ζ, ζ², ζ³` and reduced with
//! `ζ⁴ = ζ² − 1`. The field contains the cube root `j = ζ⁴` and `i = ζ³`.
//!
//! [`Scalar`] is a Laurent polynomial in an indeterminate `q` with [`Cyclo`]
//! coefficients. In specialized mode every scalar is built with `q = j`, so
//! only the constant term is ever populated.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Element of Q(ζ₁₂) in the power basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cyclo([BigRational; 4]);

impl Cyclo {
    pub fn zero() -> Self {
        Cyclo(std::array::from_fn(|_| BigRational::zero()))
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    pub fn from_rational(r: BigRational) -> Self {
        let mut c = Self::zero();
        c.0[0] = r;
        c
    }

    pub fn from_coords(coords: [BigRational; 4]) -> Self {
        Cyclo(coords)
    }

    /// Coordinates in the power basis `1, ζ, ζ², ζ³`.
    pub fn coords(&self) -> &[BigRational; 4] {
        &self.0
    }

    pub fn zeta() -> Self {
        Self::reduce_poly(&[rat(0), rat(1)])
    }

    /// The primitive cube root of unity `j = ζ⁴ = ζ² − 1`.
    pub fn j() -> Self {
        Self::reduce_poly(&[rat(-1), rat(0), rat(1)])
    }

    /// `i = ζ³`.
    pub fn i() -> Self {
        Self::reduce_poly(&[rat(0), rat(0), rat(0), rat(1)])
    }

    /// `j^k` for any integer `k`.
    pub fn j_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => Self::one(),
            1 => Self::j(),
            _ => Self::reduce_poly(&[rat(0), rat(0), rat(-1)]),
        }
    }

    /// Reduces a polynomial in ζ (coefficients low to high) modulo
    /// `ζ⁴ − ζ² + 1`.
    pub fn reduce_poly(poly: &[BigRational]) -> Self {
        let mut c: Vec<BigRational> = poly.to_vec();
        if c.len() < 4 {
            c.resize(4, BigRational::zero());
        }
        for k in (4..c.len()).rev() {
            let top = std::mem::take(&mut c[k]);
            if top.is_zero() {
                continue;
            }
            c[k - 2] += &top;
            c[k - 4] -= &top;
        }
        c.truncate(4);
        Cyclo([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.0[0].is_one() && self.0[1..].iter().all(Zero::is_zero)
    }

    /// Multiplicative inverse: the product of the three nontrivial Galois
    /// conjugates `ζ ↦ ζᵏ`, k ∈ {5, 7, 11}, divided by the (rational) norm.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let adj = &(&self.conjugate(5) * &self.conjugate(7)) * &self.conjugate(11);
        let norm = (self * &adj).0[0].clone();
        if norm.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(Cyclo(adj.0.map(|c| c / &norm)))
    }

    /// Image under the automorphism `ζ ↦ ζᵏ`.
    fn conjugate(&self, k: usize) -> Self {
        let mut poly = vec![BigRational::zero(); 12];
        for (m, c) in self.0.iter().enumerate() {
            poly[(k * m) % 12] += c;
        }
        Self::reduce_poly(&poly)
    }

    /// Integer numerators over the least common denominator.
    fn integral(&self) -> ([BigInt; 4], BigInt) {
        let den = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = std::array::from_fn(|k| self.0[k].numer() * (&den / self.0[k].denom()));
        (num, den)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut out = Self::one();
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    /// Coordinates `(a, b, c, d)` with `self = a + b·j + c·i + d·i·j`.
    pub fn display_coords(&self) -> [BigRational; 4] {
        // i·j = ζ⁷ = −ζ, so a + b(ζ²−1) + cζ³ − dζ has power coordinates
        // (a − b, −d, b, c).
        let [c0, c1, c2, c3] = &self.0;
        [c0 + c2, c2.clone(), c3.clone(), -c1]
    }

    pub fn from_display_coords(
        a: BigRational,
        b: BigRational,
        c: BigRational,
        d: BigRational,
    ) -> Self {
        Cyclo([&a - &b, -d, b, c])
    }

    /// Number of nonzero display coordinates.
    pub(crate) fn display_len(&self) -> usize {
        self.display_coords()
            .iter()
            .filter(|c| !c.is_zero())
            .count()
    }
}

impl Default for Cyclo {
    fn default() -> Self {
        Self::zero()
    }
}

impl<'a> Add<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn add(self, o: &Cyclo) -> Cyclo {
        Cyclo(std::array::from_fn(|k| &self.0[k] + &o.0[k]))
    }
}

impl<'a> Sub<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn sub(self, o: &Cyclo) -> Cyclo {
        Cyclo(std::array::from_fn(|k| &self.0[k] - &o.0[k]))
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo(std::array::from_fn(|k| -&self.0[k]))
    }
}

impl<'a> Mul<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn mul(self, o: &Cyclo) -> Cyclo {
        let ((a, da), (b, db)) = (self.integral(), o.integral());
        let mut prod: [BigInt; 7] = Default::default();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + k] += x * y;
                }
            }
        }
        for k in (4..7).rev() {
            let top = std::mem::take(&mut prod[k]);
            prod[k - 2] += &top;
            prod[k - 4] -= &top;
        }
        let den = da * db;
        Cyclo(std::array::from_fn(|k| {
            BigRational::new(prod[k].clone(), den.clone())
        }))
    }
}

impl Add for Cyclo {
    type Output = Cyclo;
    fn add(self, o: Cyclo) -> Cyclo {
        &self + &o
    }
}

impl Sub for Cyclo {
    type Output = Cyclo;
    fn sub(self, o: Cyclo) -> Cyclo {
        &self - &o
    }
}

impl Mul for Cyclo {
    type Output = Cyclo;
    fn mul(self, o: Cyclo) -> Cyclo {
        &self * &o
    }
}

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Signed pieces `(negative, magnitude text)` of a sum.
fn join_signed(parts: &[(bool, String)]) -> String {
    let mut out = String::new();
    for (k, (neg, body)) in parts.iter().enumerate() {
        match (k, neg) {
            (0, true) => {
                out.push('-');
                out.push_str(body);
            }
            (0, false) => out.push_str(body),
            (_, true) => {
                out.push_str(" - ");
                out.push_str(body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(body);
            }
        }
    }
    out
}

impl Cyclo {
    fn signed_parts(&self) -> Vec<(bool, String)> {
        let names = ["", "j", "i", "i*j"];
        let mut parts = Vec::new();
        for (c, name) in self.display_coords().iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = if name.is_empty() {
                fmt_rational(&mag)
            } else if mag.is_one() {
                name.to_string()
            } else {
                format!("{}*{}", fmt_rational(&mag), name)
            };
            parts.push((c.is_negative(), body));
        }
        parts
    }

    /// Rendering in the power basis, `c0 + c1*zeta + ...`.
    pub fn render_power_basis(&self) -> String {
        let names = ["", "zeta", "zeta^2", "zeta^3"];
        let mut parts = Vec::new();
        for (c, name) in self.0.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = if name.is_empty() {
                fmt_rational(&mag)
            } else if mag.is_one() {
                name.to_string()
            } else {
                format!("{}*{}", fmt_rational(&mag), name)
            };
            parts.push((c.is_negative(), body));
        }
        if parts.is_empty() {
            return "0".into();
        }
        join_signed(&parts)
    }
}

/// Rendering in the display basis `1, j, i, i*j`.
impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.signed_parts();
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&join_signed(&parts))
    }
}

/// Whether `q` is a free indeterminate or fixed to the cube root `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum QMode {
    Symbolic,
    #[default]
    Specialized,
}

impl QMode {
    pub fn q(self) -> Scalar {
        self.q_pow(1)
    }

    pub fn q_pow(self, k: i32) -> Scalar {
        match self {
            QMode::Symbolic => Scalar::q_pow(k),
            QMode::Specialized => Scalar::from(Cyclo::j_pow(k as i64)),
        }
    }

    /// Brings a scalar built in either mode into this mode.
    pub fn reduce(self, s: &Scalar) -> Scalar {
        match self {
            QMode::Symbolic => s.clone(),
            QMode::Specialized => Scalar::from(s.specialize()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            QMode::Symbolic => "symbolic",
            QMode::Specialized => "specialized",
        }
    }
}

impl std::str::FromStr for QMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symbolic" => Ok(QMode::Symbolic),
            "specialized" => Ok(QMode::Specialized),
            other => Err(Error::Unsupported(format!("unknown q mode `{other}`"))),
        }
    }
}

/// Laurent polynomial `Σ cₖ qᵏ` with cyclotomic coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Scalar {
    terms: BTreeMap<i32, Cyclo>,
}

impl From<Cyclo> for Scalar {
    fn from(c: Cyclo) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(0, c);
        }
        Scalar { terms }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from(Cyclo::from_int(n))
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from(1)
    }

    /// The monomial `qᵏ` in the indeterminate.
    pub fn q_pow(k: i32) -> Self {
        Self::monomial(Cyclo::one(), k)
    }

    pub fn monomial(c: Cyclo, k: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Scalar { terms }
    }

    pub fn j() -> Self {
        Scalar::from(Cyclo::j())
    }

    pub fn i() -> Self {
        Scalar::from(Cyclo::i())
    }

    pub fn terms(&self) -> &BTreeMap<i32, Cyclo> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(Cyclo::is_one)
    }

    /// The constant value, if the scalar has no `q` dependence.
    pub fn as_constant(&self) -> Option<Cyclo> {
        match self.terms.len() {
            0 => Some(Cyclo::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// Substitutes `q ↦ j`.
    pub fn specialize(&self) -> Cyclo {
        let mut acc = Cyclo::zero();
        for (&k, c) in &self.terms {
            acc = &acc + &(c * &Cyclo::j_pow(k as i64));
        }
        acc
    }

    /// Inverse of a unit `c·qᵏ`. Anything with two or more terms is rejected.
    pub fn inv(&self) -> Result<Self> {
        match self.terms.len() {
            0 => Err(Error::ZeroInverse),
            1 => {
                let (&k, c) = self.terms.iter().next().expect("one term");
                Ok(Self::monomial(c.inv()?, -k))
            }
            _ => Err(Error::NonUnit(self.to_string())),
        }
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut out = Self::one();
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    /// Evaluates at `q = value`.
    pub fn eval(&self, value: &Cyclo) -> Result<Cyclo> {
        let mut acc = Cyclo::zero();
        for (&k, c) in &self.terms {
            acc = &acc + &(c * &value.pow(k as i64)?);
        }
        Ok(acc)
    }

    fn add_term(&mut self, k: i32, c: &Cyclo) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(k) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (&k, c) in &o.terms {
            out.add_term(k, c);
        }
        out
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        for (&k, c) in &o.terms {
            self.add_term(k, c);
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (&k, c) in &o.terms {
            out.add_term(k, &-c);
        }
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (&a, x) in &self.terms {
            for (&b, y) in &o.terms {
                out.add_term(a + b, &(x * y));
            }
        }
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Scalar {
    /// Whether the rendering is a single signed atom (no top-level `+`/`-`
    /// between terms), so it can precede `*` without parentheses.
    pub(crate) fn is_simple(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => {
                let (_, c) = self.terms.iter().next().expect("one term");
                c.display_len() <= 1
            }
            _ => false,
        }
    }

    pub(crate) fn signed_parts(&self) -> Vec<(bool, String)> {
        let mut parts = Vec::new();
        for (&k, c) in &self.terms {
            let qpart = match k {
                0 => String::new(),
                1 => "q".to_string(),
                k => format!("q^{k}"),
            };
            if k == 0 {
                parts.extend(c.signed_parts());
                continue;
            }
            let cp = c.signed_parts();
            if cp.len() == 1 {
                let (neg, body) = &cp[0];
                let body = if body == "1" {
                    qpart
                } else {
                    format!("{body}*{qpart}")
                };
                parts.push((*neg, body));
            } else {
                parts.push((false, format!("({c})*{qpart}")));
            }
        }
        parts
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.signed_parts();
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&join_signed(&parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j() -> Cyclo {
        Cyclo::j()
    }

    #[test]
    fn cube_root_identities() {
        assert!((&j() * &(&j() * &j())).is_one());
        let s = &(&(&j() * &j()) + &j()) + &Cyclo::one();
        assert!(s.is_zero());
        let jp1 = &j() + &Cyclo::one();
        assert_eq!(&jp1 * &jp1, j());
        assert_eq!(&Cyclo::i() * &Cyclo::i(), Cyclo::from_int(-1));
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(Cyclo::zero().inv(), Err(Error::ZeroInverse));
    }

    #[test]
    fn inverse_of_one_minus_j_squared() {
        // 1 − j² = 2 + j has norm 3, so its inverse needs a denominator.
        let a = &Cyclo::one() - &Cyclo::j_pow(2);
        let inv = a.inv().unwrap();
        assert!((&a * &inv).is_one());
        assert!(inv.coords().iter().any(|c| !c.is_integer()));
    }

    #[test]
    fn specialization_examples() {
        let s = &(&Scalar::q_pow(2) + &Scalar::q_pow(1)) + &Scalar::one();
        assert!(s.specialize().is_zero());
        let qinv = Scalar::q_pow(-1).specialize();
        assert_eq!(qinv, Cyclo::j_pow(2));
        assert_eq!(qinv, &Cyclo::from_int(-1) - &j());
        assert!(Scalar::one().specialize().is_one());
    }

    #[test]
    fn monomial_inverses() {
        assert_eq!(Scalar::q_pow(1).inv().unwrap(), Scalar::q_pow(-1));
        let two_q3 = Scalar::monomial(Cyclo::from_int(2), 3);
        let half = Cyclo::from_rational(BigRational::new(1.into(), 2.into()));
        assert_eq!(two_q3.inv().unwrap(), Scalar::monomial(half, -3));
    }

    #[test]
    fn non_unit_is_rejected() {
        let s = &Scalar::q_pow(1) + &Scalar::one();
        assert!(matches!(s.inv(), Err(Error::NonUnit(_))));
    }

    #[test]
    fn rendering_uses_display_basis() {
        assert_eq!(Cyclo::j_pow(2).to_string(), "-1 - j");
        assert_eq!(Cyclo::i().to_string(), "i");
        assert_eq!((&Cyclo::i() * &Cyclo::j()).to_string(), "i*j");
        assert_eq!(Scalar::q_pow(-1).to_string(), "q^-1");
        let s = &Scalar::q_pow(-1) - &Scalar::one();
        assert_eq!(s.to_string(), "q^-1 - 1");
        assert_eq!(Cyclo::j().render_power_basis(), "-1 + zeta^2");
    }
}
