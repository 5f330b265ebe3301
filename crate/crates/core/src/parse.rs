//! Text front end: a small expression grammar lowered to scalars, elements
//! and tensors.
//!
//! ```text
//! tensor  := tterm (('+'|'-') tterm)*
//! tterm   := product ('(x)' product)*
//! product := ('+'|'-')? factor ('*' factor)*
//! factor  := atom ('^' '-'? int)?
//! atom    := symbol | rational | '(' tensor ')'
//! ```
//!
//! The literal `(x)` is always the tensor sign. `z`, `zbar`, `dz`, `dzbar`,
//! `d2z`, `d2zbar` are macros for `x ± i*y` and its differentials.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::freealg::{Element, Gen, TensorElement};
use crate::scalars::{Cyclo, QMode, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(BigRational),
    Sym {
        name: String,
        pos: usize,
    },
    Neg(Box<Ast>),
    Sum(Vec<Ast>),
    Product(Vec<Ast>),
    Pow {
        base: Box<Ast>,
        exp: i64,
        pos: usize,
    },
    Tensor(Vec<Ast>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Otimes,
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            b'^' => {
                // q^A, q^-A, q^N, q^-N are single symbols
                if let Some((_, Tok::Ident(prev))) = out.last() {
                    if prev == "q" {
                        let rest = &s[i + 1..];
                        let sym = ["-A", "-N", "A", "N"].into_iter().find(|p| {
                            rest.starts_with(p)
                                && !rest[p.len()..].starts_with(|c: char| c.is_ascii_alphanumeric())
                        });
                        if let Some(p) = sym {
                            out.pop();
                            out.push((i - 1, Tok::Ident(format!("q^{p}"))));
                            i += 1 + p.len();
                            continue;
                        }
                    }
                }
                out.push((i, Tok::Caret));
                i += 1;
            }
            b'(' => {
                if s[i..].starts_with("(x)") {
                    out.push((i, Tok::Otimes));
                    i += 3;
                } else {
                    out.push((i, Tok::LParen));
                    i += 1;
                }
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let numer: BigInt = s[start..i].parse().expect("digits");
                let mut val = BigRational::from_integer(numer);
                if i + 1 < b.len() && b[i] == b'/' && b[i + 1].is_ascii_digit() {
                    let ds = i + 1;
                    i += 1;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                    let denom: BigInt = s[ds..i].parse().expect("digits");
                    if denom == BigInt::from(0) {
                        return Err(err(ds, "zero denominator"));
                    }
                    val /= BigRational::from_integer(denom);
                }
                out.push((start, Tok::Num(val)));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(s[start..i].to_string())));
            }
            _ => {
                let ch = s[i..].chars().next().expect("in bounds");
                return Err(err(i, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn tensor(&mut self) -> Result<Ast> {
        let mut terms = vec![self.tterm()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    terms.push(self.tterm()?);
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    terms.push(Ast::Neg(Box::new(self.tterm()?)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one")
        } else {
            Ast::Sum(terms)
        })
    }

    fn tterm(&mut self) -> Result<Ast> {
        let mut legs = vec![self.product()?];
        while self.peek() == Some(&Tok::Otimes) {
            self.at += 1;
            legs.push(self.product()?);
        }
        Ok(if legs.len() == 1 {
            legs.pop().expect("one")
        } else {
            Ast::Tensor(legs)
        })
    }

    fn product(&mut self) -> Result<Ast> {
        let neg = match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                true
            }
            Some(Tok::Plus) => {
                self.at += 1;
                false
            }
            _ => false,
        };
        let mut fs = vec![self.factor()?];
        while self.peek() == Some(&Tok::Star) {
            self.at += 1;
            fs.push(self.factor()?);
        }
        let p = if fs.len() == 1 {
            fs.pop().expect("one")
        } else {
            Ast::Product(fs)
        };
        Ok(if neg { Ast::Neg(Box::new(p)) } else { p })
    }

    fn factor(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let pos = self.pos();
        self.at += 1;
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            true
        } else {
            false
        };
        let p = self.pos();
        match self.toks.get(self.at) {
            Some((_, Tok::Num(n))) if n.is_integer() => {
                let e: i64 = n
                    .numer()
                    .try_into()
                    .map_err(|_| err(p, "exponent too large"))?;
                self.at += 1;
                Ok(Ast::Pow {
                    base: Box::new(base),
                    exp: if neg { -e } else { e },
                    pos,
                })
            }
            _ => Err(err(p, "expected integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Ast> {
        let pos = self.pos();
        match self.toks.get(self.at).cloned() {
            Some((_, Tok::Num(n))) => {
                self.at += 1;
                Ok(Ast::Num(n))
            }
            Some((_, Tok::Ident(name))) => {
                self.at += 1;
                Ok(Ast::Sym { name, pos })
            }
            Some((_, Tok::LParen)) => {
                self.at += 1;
                let e = self.tensor()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(err(self.pos(), "expected `)`"));
                }
                self.at += 1;
                Ok(e)
            }
            Some((_, t)) => Err(err(pos, format!("unexpected token {t:?}"))),
            None => Err(err(pos, "unexpected end of input")),
        }
    }
}

pub fn parse_ast(s: &str) -> Result<Ast> {
    let toks = tokenize(s)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: s.len(),
    };
    let ast = p.tensor()?;
    if p.at != p.toks.len() {
        return Err(err(p.pos(), "unexpected trailing input"));
    }
    Ok(ast)
}

/// Scalar symbols: `q` (mode dependent), `j`, `i`, `zeta`.
pub fn scalar_symbol(name: &str, mode: QMode) -> Option<Scalar> {
    match name {
        "q" => Some(mode.q()),
        "j" => Some(Scalar::j()),
        "i" => Some(Scalar::i()),
        "zeta" => Some(Scalar::from(Cyclo::zeta())),
        _ => None,
    }
}

fn macro_expansion(name: &str) -> Option<Element> {
    let (re, im) = match name {
        "z" | "zbar" => (Gen::X, Gen::Y),
        "dz" | "dzbar" => (Gen::Dx, Gen::Dy),
        "d2z" | "d2zbar" => (Gen::D2x, Gen::D2y),
        _ => return None,
    };
    let i = if name.ends_with("bar") {
        -&Scalar::i()
    } else {
        Scalar::i()
    };
    Some(&Element::gen(re) + &Element::gen(im).scale(&i))
}

/// Lowers to a scalar; any generator is an error.
pub fn lower_scalar(ast: &Ast, mode: QMode) -> Result<Scalar> {
    match ast {
        Ast::Num(n) => Ok(Scalar::from(Cyclo::from_rational(n.clone()))),
        Ast::Sym { name, pos } => {
            scalar_symbol(name, mode).ok_or_else(|| err(*pos, format!("`{name}` is not a scalar")))
        }
        Ast::Neg(a) => Ok(-&lower_scalar(a, mode)?),
        Ast::Sum(ts) => ts
            .iter()
            .try_fold(Scalar::zero(), |acc, t| Ok(&acc + &lower_scalar(t, mode)?)),
        Ast::Product(fs) => fs
            .iter()
            .try_fold(Scalar::one(), |acc, f| Ok(&acc * &lower_scalar(f, mode)?)),
        Ast::Pow { base, exp, pos } => {
            let b = lower_scalar(base, mode)?;
            let b = mode.reduce(&b);
            b.pow(*exp).map_err(|e| err(*pos, e.to_string()))
        }
        Ast::Tensor(_) => Err(err(0, "tensor where a scalar was expected")),
    }
}

fn inverse_gen(g: Gen) -> Option<Gen> {
    match g {
        Gen::X => Some(Gen::XInv),
        Gen::XInv => Some(Gen::X),
        Gen::K => Some(Gen::KInv),
        Gen::KInv => Some(Gen::K),
        Gen::Dax => Some(Gen::DaxInv),
        Gen::DaxInv => Some(Gen::Dax),
        Gen::L => Some(Gen::LInv),
        Gen::LInv => Some(Gen::L),
        _ => None,
    }
}

fn checked_mul(a: &Element, b: &Element, pos: usize) -> Result<Element> {
    a.try_mul(b).map_err(|e| match e {
        Error::MixedAlphabet { .. } => err(pos, e.to_string()),
        e => e,
    })
}

fn first_pos(ast: &Ast) -> usize {
    match ast {
        Ast::Sym { pos, .. } | Ast::Pow { pos, .. } => *pos,
        Ast::Neg(a) => first_pos(a),
        Ast::Sum(v) | Ast::Product(v) | Ast::Tensor(v) => v.first().map_or(0, first_pos),
        Ast::Num(_) => 0,
    }
}

/// Lowers to an element of the free algebra.
pub fn lower_element(ast: &Ast, mode: QMode) -> Result<Element> {
    lower_element_with(ast, mode, &|_| None)
}

/// Symbol lookup for named sub-expressions, consulted before the built-ins.
pub type Env<'a> = &'a dyn Fn(&str) -> Option<Element>;

pub fn lower_element_with(ast: &Ast, mode: QMode, env: Env<'_>) -> Result<Element> {
    let lower_element = |a: &Ast, mode| lower_element_with(a, mode, env);
    match ast {
        Ast::Num(_) => Ok(Element::scalar(lower_scalar(ast, mode)?)),
        Ast::Sym { name, pos } => {
            if let Some(e) = env(name) {
                return Ok(e);
            }
            if let Some(s) = scalar_symbol(name, mode) {
                return Ok(Element::scalar(s));
            }
            if let Some(e) = macro_expansion(name) {
                return Ok(e.map_scalars(|c| mode.reduce(c)));
            }
            if name == "N" {
                return Err(err(*pos, "`N` is an operator, not an algebra element"));
            }
            Gen::from_name(name)
                .map(Element::gen)
                .ok_or_else(|| err(*pos, format!("unknown symbol `{name}`")))
        }
        Ast::Neg(a) => Ok(-&lower_element(a, mode)?),
        Ast::Sum(ts) => {
            let mut acc = Element::zero();
            for t in ts {
                acc = &acc + &lower_element(t, mode)?;
                acc.check_alphabet()
                    .map_err(|e| err(first_pos(t), e.to_string()))?;
            }
            Ok(acc)
        }
        Ast::Product(fs) => {
            let mut acc = Element::one();
            for f in fs {
                acc = checked_mul(&acc, &lower_element(f, mode)?, first_pos(f))?;
            }
            Ok(acc)
        }
        Ast::Pow { base, exp, pos } => {
            if let Ok(s) = lower_scalar(base, mode) {
                let s = mode.reduce(&s);
                return Ok(Element::scalar(
                    s.pow(*exp).map_err(|e| err(*pos, e.to_string()))?,
                ));
            }
            let mut b = lower_element(base, mode)?;
            if *exp < 0 {
                let inv = match base.as_ref() {
                    Ast::Sym { name, .. } => Gen::from_name(name).and_then(inverse_gen),
                    _ => None,
                };
                let Some(g) = inv else {
                    return Err(err(*pos, "negative power of a non-invertible factor"));
                };
                b = Element::gen(g);
            }
            b.pow(exp.unsigned_abs() as u32)
                .map_err(|e| err(*pos, e.to_string()))
        }
        Ast::Tensor(_) => Err(err(
            first_pos(ast),
            "unexpected `(x)`: expression is a tensor",
        )),
    }
}

fn lower_tensor(ast: &Ast, mode: QMode) -> Result<TensorElement> {
    match ast {
        Ast::Tensor(legs) => {
            let es = legs
                .iter()
                .map(|l| lower_element(l, mode))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&Element> = es.iter().collect();
            Ok(TensorElement::from_elements(&refs))
        }
        Ast::Sum(ts) => {
            let mut acc: Option<TensorElement> = None;
            for t in ts {
                let v = lower_tensor(t, mode)?;
                acc = Some(match acc {
                    None => v,
                    Some(a) => a.add(&v).map_err(|e| err(first_pos(t), e.to_string()))?,
                });
            }
            Ok(acc.expect("nonempty sum"))
        }
        Ast::Neg(a) => Ok(lower_tensor(a, mode)?.scale(&Scalar::from(-1))),
        other => {
            let e = lower_element(other, mode)?;
            Ok(TensorElement::from_elements(&[&e]))
        }
    }
}

fn contains_tensor(ast: &Ast) -> bool {
    match ast {
        Ast::Tensor(_) => true,
        Ast::Neg(a) => contains_tensor(a),
        Ast::Sum(v) => v.iter().any(contains_tensor),
        _ => false,
    }
}

/// Either an algebra element or a tensor of arity ≥ 2.
#[derive(Clone, Debug, PartialEq)]
pub enum Parsed {
    Element(Element),
    Tensor(TensorElement),
}

pub fn parse(s: &str, mode: QMode) -> Result<Parsed> {
    let ast = parse_ast(s)?;
    if contains_tensor(&ast) {
        Ok(Parsed::Tensor(lower_tensor(&ast, mode)?))
    } else {
        Ok(Parsed::Element(lower_element(&ast, mode)?))
    }
}

pub fn parse_element(s: &str, mode: QMode) -> Result<Element> {
    lower_element(&parse_ast(s)?, mode)
}

pub fn parse_element_with(s: &str, mode: QMode, env: Env<'_>) -> Result<Element> {
    lower_element_with(&parse_ast(s)?, mode, env)
}

pub fn parse_tensor(s: &str, mode: QMode) -> Result<TensorElement> {
    lower_tensor(&parse_ast(s)?, mode)
}

pub fn parse_scalar(s: &str, mode: QMode) -> Result<Scalar> {
    lower_scalar(&parse_ast(s)?, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::Word;

    const SP: QMode = QMode::Specialized;
    const SY: QMode = QMode::Symbolic;

    #[test]
    fn words_and_scalars() {
        assert_eq!(
            parse_element("y*x", SP).unwrap(),
            Element::letters(&[Gen::Y, Gen::X])
        );
        let e = parse_element("q^-1 * dx * x", SY).unwrap();
        assert_eq!(
            e,
            Element::letters(&[Gen::Dx, Gen::X]).scale(&Scalar::q_pow(-1))
        );
        let e = parse_element("q^-1 * dx * x", SP).unwrap();
        assert_eq!(
            e,
            Element::letters(&[Gen::Dx, Gen::X]).scale(&Scalar::from(Cyclo::j_pow(2)))
        );
        assert_eq!(
            parse_scalar("1/2*j - 3", SP).unwrap().to_string(),
            "-3 + 1/2*j"
        );
        assert_eq!(
            parse_element("x^-2", SP).unwrap(),
            Element::letters(&[Gen::XInv, Gen::XInv])
        );
        assert_eq!(parse_element("xinv", SP).unwrap(), Element::gen(Gen::XInv));
    }

    #[test]
    fn grouplike_symbols() {
        assert_eq!(
            parse_element("q^A*B", SP).unwrap(),
            Element::letters(&[Gen::L, Gen::B])
        );
        assert_eq!(parse_element("q^-A", SP).unwrap(), Element::gen(Gen::LInv));
        assert_eq!(
            parse_element("q^-N*H", SP).unwrap(),
            Element::letters(&[Gen::K, Gen::H])
        );
        assert_eq!(parse_element("q^N", SP).unwrap(), Element::gen(Gen::KInv));
        assert_eq!(
            parse_element("q^A^-1", SP).unwrap(),
            Element::gen(Gen::LInv)
        );
    }

    #[test]
    fn macros_expand() {
        let z = parse_element("z", SP).unwrap();
        assert_eq!(
            z,
            &Element::gen(Gen::X) + &Element::gen(Gen::Y).scale(&Scalar::i())
        );
        let e = parse_element("z*dz - q^-1*dz*z", SP).unwrap();
        assert_eq!(e.len(), 8);
    }

    #[test]
    fn tensors() {
        let t = parse_tensor("dx (x) x", SP).unwrap();
        let w = |g| Word::from_slice(&[g]);
        assert_eq!(
            t,
            TensorElement::pure(vec![w(Gen::Dx), w(Gen::X)], Scalar::one())
        );
        let t = parse_tensor("y (x) 1 + x (x) y", SP).unwrap();
        assert_eq!(t.terms().len(), 2);
        assert!(matches!(parse("x (x) y (x) 1", SP).unwrap(), Parsed::Tensor(t) if t.arity() == 3));
        assert!(parse_tensor("x (x) y + x", SP).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_element("x + + ", SP) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        match parse_element("x * foo", SP) {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(pos, 4);
                assert!(msg.contains("foo"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_element("dx*theta", SP),
            Err(Error::Parse { pos: 3, .. })
        ));
        assert!(matches!(
            parse_element("y^-1", SP),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_scalar("q + 1", SY).and_then(|s| s.inv()),
            Err(Error::NonUnit(_))
        ));
    }

    #[test]
    fn rendering_round_trips() {
        for s in [
            "(-1 - j) * x*y + x^-1",
            "q^-1 - 1",
            "dx (x) x + 1/2*j * x (x) dx",
            "-theta*phi",
        ] {
            for mode in [SP, SY] {
                match parse(s, mode).unwrap() {
                    Parsed::Element(e) => {
                        assert_eq!(parse_element(&e.to_string(), mode).unwrap(), e)
                    }
                    Parsed::Tensor(t) => assert_eq!(parse_tensor(&t.to_string(), mode).unwrap(), t),
                }
            }
        }
    }
}
