//! Operators acting on coordinate polynomials, the quantum Lie algebra they
//! realize, and the abstract operator Hopf algebras.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::calculus::{d, phi, random_cyclo, theta};
use crate::error::{Error, Result};
use crate::freealg::{Element, Gen, TensorElement, Word};
use crate::hopf::{costructure_operator, costructure_operator_relations, costructure_partial};
use crate::report::Report;
use crate::rewrite::{build_coordinate_system, build_main_system, build_operator_relations_system};
use crate::scalars::{Cyclo, QMode, Scalar};

/// A single operator on the coordinate algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    H,
    X,
    /// Number operator, total degree.
    N,
    /// `q^-N`.
    K,
    /// `q^N`.
    KInv,
    Dax,
    Day,
    /// Left multiplication.
    Mul(Element),
}

impl Op {
    pub fn from_name(s: &str) -> Option<Op> {
        Some(match s {
            "H" => Op::H,
            "X" => Op::X,
            "N" => Op::N,
            "q^-N" | "K" => Op::K,
            "q^N" | "Kinv" => Op::KInv,
            "dax" | "d_x" => Op::Dax,
            "day" | "d_y" => Op::Day,
            "x" => Op::Mul(Element::gen(Gen::X)),
            "y" => Op::Mul(Element::gen(Gen::Y)),
            "x^-1" | "xinv" => Op::Mul(Element::gen(Gen::XInv)),
            _ => return None,
        })
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::H => f.write_str("H"),
            Op::X => f.write_str("X"),
            Op::N => f.write_str("N"),
            Op::K => f.write_str("q^-N"),
            Op::KInv => f.write_str("q^N"),
            Op::Dax => f.write_str("dax"),
            Op::Day => f.write_str("day"),
            Op::Mul(e) => write!(f, "({e})"),
        }
    }
}

/// A linear combination of operator compositions. In `[a, b]` the operator
/// `b` acts first.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OpExpr(pub Vec<(Scalar, Vec<Op>)>);

impl OpExpr {
    pub fn op(o: Op) -> Self {
        OpExpr(vec![(Scalar::one(), vec![o])])
    }

    pub fn identity() -> Self {
        OpExpr(vec![(Scalar::one(), vec![])])
    }

    pub fn mul_by(e: Element) -> Self {
        Self::op(Op::Mul(e))
    }

    /// `self ∘ other`.
    pub fn then(&self, other: &OpExpr) -> OpExpr {
        let mut out = Vec::new();
        for (a, p) in &self.0 {
            for (b, r) in &other.0 {
                let mut v = p.clone();
                v.extend(r.iter().cloned());
                out.push((a * b, v));
            }
        }
        OpExpr(out)
    }

    pub fn plus(&self, other: &OpExpr) -> OpExpr {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        OpExpr(v)
    }

    pub fn scale(&self, c: &Scalar) -> OpExpr {
        OpExpr(self.0.iter().map(|(a, p)| (a * c, p.clone())).collect())
    }

    pub fn minus(&self, other: &OpExpr) -> OpExpr {
        self.plus(&other.scale(&-&Scalar::one()))
    }

    /// Parses a composition such as `X*H` or `x*dax`.
    pub fn parse(s: &str) -> Result<OpExpr> {
        let mut ops = Vec::new();
        for (k, part) in s.split('*').enumerate() {
            let name = part.trim();
            let o = Op::from_name(name).ok_or_else(|| Error::Parse {
                pos: k,
                msg: format!(
                    "unknown operator `{name}` (expected H, X, N, q^-N, q^N, dax, day, x, y, x^-1)"
                ),
            })?;
            ops.push(o);
        }
        Ok(OpExpr(vec![(Scalar::one(), ops)]))
    }
}

fn check_coordinates(f: &Element) -> Result<()> {
    for w in f.terms().keys() {
        if let Some(g) = w.letters().iter().find(|g| !g.is_coordinate()) {
            return Err(Error::Unsupported(format!(
                "operators act on coordinate polynomials, found `{g}`"
            )));
        }
    }
    Ok(())
}

fn prefixed(g: Gen, e: Element) -> Element {
    Element::gen(g).mul_unchecked(&e)
}

fn rest(w: &[Gen]) -> Element {
    Element::letters(w)
}

/// One operator on a word, pushing the operator right through the letters.
fn act_word(op: &Op, w: &[Gen], mode: QMode) -> Element {
    let q = |k| mode.q_pow(k);
    let degree = || {
        w.iter()
            .map(|g| if *g == Gen::XInv { -1 } else { 1 })
            .sum::<i32>()
    };
    match op {
        Op::N => rest(w).scale(&Scalar::from(degree() as i64)),
        Op::K => rest(w).scale(&q(-degree())),
        Op::KInv => rest(w).scale(&q(degree())),
        Op::Mul(e) => e.mul_unchecked(&rest(w)),
        _ if w.is_empty() => Element::zero(),
        Op::H => {
            let (g, tail) = (w[0], &w[1..]);
            let h = act_word(&Op::H, tail, mode);
            match g {
                Gen::XInv => &rest(w).scale(&-&q(1)) + &prefixed(g, h).scale(&q(1)),
                _ => &rest(w) + &prefixed(g, h).scale(&q(-1)),
            }
        }
        Op::X => {
            let (g, tail) = (w[0], &w[1..]);
            let x = prefixed(g, act_word(&Op::X, tail, mode));
            match g {
                Gen::Y => {
                    let h = act_word(&Op::H, tail, mode).scale(&(&q(-1) - &Scalar::one()));
                    &(&rest(tail) + &x) + &h
                }
                _ => x,
            }
        }
        Op::Dax => {
            let (g, tail) = (w[0], &w[1..]);
            let dx = prefixed(g, act_word(&Op::Dax, tail, mode));
            match g {
                Gen::X => &rest(tail) + &dx.scale(&q(-1)),
                Gen::Y => dx.scale(&q(-1)),
                _ => {
                    &dx.scale(&q(1))
                        - &Element::letters(&[Gen::XInv, Gen::XInv])
                            .mul_unchecked(&rest(tail))
                            .scale(&q(1))
                }
            }
        }
        Op::Day => {
            let (g, tail) = (w[0], &w[1..]);
            let dy = prefixed(g, act_word(&Op::Day, tail, mode));
            match g {
                Gen::Y => {
                    let xdx = prefixed(Gen::X, act_word(&Op::Dax, tail, mode))
                        .scale(&(&q(-1) - &Scalar::one()));
                    &(&rest(tail) + &dy.scale(&q(-1))) + &xdx
                }
                _ => dy,
            }
        }
    }
}

/// Applies an operator expression to a coordinate polynomial; the result is
/// in normal form.
pub fn act(op: &OpExpr, f: &Element, mode: QMode) -> Result<Element> {
    check_coordinates(f)?;
    let sys = build_coordinate_system(mode);
    let mut out = Element::zero();
    for (c, chain) in &op.0 {
        let mut cur = f.clone();
        for o in chain.iter().rev() {
            let mut next = Element::zero();
            for (w, k) in cur.terms() {
                next = &next + &act_word(o, w.letters(), mode).scale(k);
            }
            cur = sys.normalize(&next)?;
        }
        out = &out + &cur.scale(c);
    }
    sys.normalize(&out)
}

pub fn act_op(op: Op, f: &Element, mode: QMode) -> Result<Element> {
    act(&OpExpr::op(op), f, mode)
}

/// `[k]_r = (1 − r^k)/(1 − r)` at `r = q⁻¹`. Division is exact in the
/// specialized field; for symbolic `q` the geometric sum is used.
pub fn q_integer(k: i64, mode: QMode) -> Result<Scalar> {
    match mode {
        QMode::Specialized => {
            let r = Cyclo::j().inv()?;
            let num = &Cyclo::one() - &r.pow(k)?;
            let den = &Cyclo::one() - &r;
            Ok(Scalar::from(&num * &den.inv()?))
        }
        QMode::Symbolic => {
            let mut s = Scalar::zero();
            if k >= 0 {
                for i in 0..k {
                    s = &s + &Scalar::q_pow(-(i as i32));
                }
            } else {
                for i in 1..=-k {
                    s = &s - &Scalar::q_pow(i as i32);
                }
            }
            Ok(s)
        }
    }
}

/// Closed-form action values on `x^m y^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForms {
    pub h: Element,
    pub x: Element,
    pub n: Element,
    pub dax: Element,
    pub day: Element,
}

pub fn closed_form_oracle(m: i64, n: i64, mode: QMode) -> Result<ClosedForms> {
    let mono = |a: i64, b: i64| Element::word(Word::monomial(a, b));
    let lower_y = if n > 0 {
        mono(m, n - 1).scale(&q_integer(n, mode)?)
    } else {
        Element::zero()
    };
    let lower_x = if m != 0 {
        mono(m - 1, n).scale(&q_integer(m, mode)?)
    } else {
        Element::zero()
    };
    Ok(ClosedForms {
        h: mono(m, n).scale(&q_integer(m + n, mode)?),
        x: lower_y.clone(),
        n: mono(m, n).scale(&Scalar::from(m + n)),
        dax: lower_x,
        day: lower_y,
    })
}

fn monomials(lo_m: i64, hi_m: i64, max_n: i64, max_total: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for m in lo_m..=hi_m {
        for n in 0..=max_n {
            if m + n <= max_total {
                out.push((m, n));
            }
        }
    }
    out
}

fn mono(m: i64, n: i64) -> Element {
    Element::word(Word::monomial(m, n))
}

/// Records one item for an identity checked on many monomials.
fn sweep<F>(r: &mut Report, id: &str, identity: &str, cases: &[(i64, i64)], f: F) -> Result<()>
where
    F: Fn(i64, i64) -> Result<Element> + Sync,
{
    let results = cases
        .par_iter()
        .map(|&(m, n)| f(m, n).map(|e| (m, n, e)))
        .collect::<Result<Vec<_>>>()?;
    let bad: Vec<_> = results.iter().filter(|(_, _, e)| !e.is_zero()).collect();
    let residual = match bad.first() {
        Some((m, n, e)) => format!("{} failures; at x^{m} y^{n}: {e}", bad.len()),
        None => "0".into(),
    };
    r.record(
        id,
        format!("{identity} on {} monomials", cases.len()),
        bad.is_empty(),
        residual,
    );
    Ok(())
}

fn random_poly(rng: &mut ChaCha8Rng) -> Element {
    let mut e = Element::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let m = rng.gen_range(-3..=3);
        let n = rng.gen_range(0..=3);
        e.add_term(Word::monomial(m, n), &Scalar::from(random_cyclo(rng, 3)));
    }
    e
}

/// Operator identities of the quantum Lie algebra on the monomial basis.
pub fn suite_lie(mode: QMode, max_degree: usize, seed: u64) -> Result<Report> {
    let mut r = Report::new("lie");
    let dd = max_degree as i64;
    let basis = monomials(-dd, dd, dd, dd);
    let q = |k| mode.q_pow(k);
    let c = &q(-1) - &Scalar::one();
    let op = |o: Op| OpExpr::op(o);
    let mx = OpExpr::mul_by(Element::gen(Gen::X));
    let my = OpExpr::mul_by(Element::gen(Gen::Y));
    let (h, x) = (op(Op::H), op(Op::X));
    let zero_on = |e: &OpExpr| {
        let e = e.clone();
        move |m: i64, n: i64| act(&e, &mono(m, n), mode)
    };
    let equal_on = |a: &OpExpr, b: &OpExpr| zero_on(&a.minus(b));

    let bracket = x.then(&h).minus(&h.then(&x).scale(&q(-1))).minus(&x);
    sweep(
        &mut r,
        "XH",
        "(X H - q^-1 H X - X) f = 0",
        &basis,
        zero_on(&bracket),
    )?;

    let small = monomials(-4, 4, 4, 8);
    sweep(
        &mut r,
        "Hx",
        "H x = x + q^-1 x H",
        &small,
        equal_on(&h.then(&mx), &mx.plus(&mx.then(&h).scale(&q(-1)))),
    )?;
    sweep(
        &mut r,
        "Hy",
        "H y = y + q^-1 y H",
        &small,
        equal_on(&h.then(&my), &my.plus(&my.then(&h).scale(&q(-1)))),
    )?;
    sweep(
        &mut r,
        "Xx",
        "X x = x X",
        &small,
        equal_on(&x.then(&mx), &mx.then(&x)),
    )?;
    sweep(
        &mut r,
        "Xy",
        "X y = 1 + y X + (q^-1 - 1) H",
        &small,
        equal_on(
            &x.then(&my),
            &OpExpr::identity().plus(&my.then(&x)).plus(&h.scale(&c)),
        ),
    )?;

    let window = monomials(-10, 10, 10, 20);
    type Row = (i64, i64, [Element; 7]);
    let rows = window
        .par_iter()
        .map(|&(m, n)| -> Result<Row> {
            let f = mono(m, n);
            let cf = closed_form_oracle(m, n, mode)?;
            let a = |o: Op| act_op(o, &f, mode);
            let k_kinv = act(&op(Op::K).then(&op(Op::KInv)), &f, mode)?;
            let nx = act(&op(Op::N).then(&op(Op::X)), &f, mode)?;
            let xn = act(
                &op(Op::X).then(&op(Op::N).minus(&OpExpr::identity())),
                &f,
                mode,
            )?;
            Ok((
                m,
                n,
                [
                    &a(Op::H)? - &cf.h,
                    &a(Op::X)? - &cf.x,
                    &a(Op::N)? - &cf.n,
                    &a(Op::Dax)? - &cf.dax,
                    &a(Op::Day)? - &cf.day,
                    &k_kinv - &f,
                    &nx - &xn,
                ],
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let names = [
        ("closed-H", "H(x^m y^n) = [m+n] x^m y^n"),
        ("closed-X", "X(x^m y^n) = [n] x^m y^(n-1)"),
        ("closed-N", "N(x^m y^n) = (m+n) x^m y^n"),
        ("closed-dax", "dax(x^m y^n) = [m] x^(m-1) y^n"),
        ("closed-day", "day(x^m y^n) = [n] x^m y^(n-1)"),
        ("K-invertible", "q^-N q^N = id"),
        ("N-degree", "N X = X (N - 1)"),
    ];
    for (k, (id, identity)) in names.iter().enumerate() {
        let bad: Vec<_> = rows.iter().filter(|row| !row.2[k].is_zero()).collect();
        let residual = bad
            .first()
            .map(|(m, n, e)| format!("{} failures; at x^{m} y^{n}: {}", bad.len(), e[k]))
            .unwrap_or_else(|| "0".into());
        r.record(
            *id,
            format!("{identity}, [k] = (1 - q^-k)/(1 - q^-1), on |m| <= 10, 0 <= n <= 10"),
            bad.is_empty(),
            residual,
        );
    }

    // H x^m and H y^n as operator equations
    let lift = monomials(-4, 4, 0, 4);
    sweep(
        &mut r,
        "Hx^m",
        "H x^m = [m] x^m + q^-m x^m H",
        &small,
        |m, n| {
            let mut acc = Element::zero();
            for &(a, _) in &lift {
                let xm = OpExpr::mul_by(mono(a, 0));
                let lhs = h.then(&xm);
                let rhs = xm
                    .scale(&q_integer(a, mode)?)
                    .plus(&xm.then(&h).scale(&q(-a as i32)));
                acc = &acc + &act(&lhs.minus(&rhs), &mono(m, n), mode)?;
            }
            Ok(acc)
        },
    )?;
    sweep(
        &mut r,
        "Hy^n",
        "H y^n = [n] y^n + q^-n y^n H",
        &small,
        |m, n| {
            let mut acc = Element::zero();
            for b in 0..=4 {
                let yn = OpExpr::mul_by(mono(0, b));
                let lhs = h.then(&yn);
                let rhs = yn
                    .scale(&q_integer(b, mode)?)
                    .plus(&yn.then(&h).scale(&q(-b as i32)));
                acc = &acc + &act(&lhs.minus(&rhs), &mono(m, n), mode)?;
            }
            Ok(acc)
        },
    )?;
    sweep(
        &mut r,
        "H(x^m y^n)",
        "H x^m y^n = [m+n] x^m y^n + q^-(m+n) x^m y^n H",
        &small,
        |m, n| {
            let mut acc = Element::zero();
            for &(a, b) in &monomials(-3, 3, 3, 6) {
                let mul = OpExpr::mul_by(mono(a, b));
                let lhs = h.then(&mul);
                let rhs = mul
                    .scale(&q_integer(a + b, mode)?)
                    .plus(&mul.then(&h).scale(&q(-(a + b) as i32)));
                acc = &acc + &act(&lhs.minus(&rhs), &mono(m, n), mode)?;
            }
            Ok(acc)
        },
    )?;

    // H = (1 − q^-N)/(1 − q^-1), cleared of the denominator
    let lhs = h.scale(&(&Scalar::one() - &q(-1)));
    let rhs = OpExpr::identity().minus(&op(Op::K));
    sweep(
        &mut r,
        "H-number",
        "(1 - q^-1) H = 1 - q^-N",
        &basis,
        equal_on(&lhs, &rhs),
    )?;

    sweep(
        &mut r,
        "X(x^m y^n)",
        "X x^m y^n = x^m y^n X + [n] x^m y^(n-1) (1 + (q^-1 - 1) H)",
        &small,
        |m, n| {
            let mut acc = Element::zero();
            for &(a, b) in &monomials(-3, 3, 3, 6) {
                let mul = OpExpr::mul_by(mono(a, b));
                let lhs = x.then(&mul);
                let mut rhs = mul.then(&x);
                if b > 0 {
                    let low = OpExpr::mul_by(mono(a, b - 1)).scale(&q_integer(b, mode)?);
                    rhs = rhs.plus(&low.then(&OpExpr::identity().plus(&h.scale(&c))));
                }
                acc = &acc + &act(&lhs.minus(&rhs), &mono(m, n), mode)?;
            }
            Ok(acc)
        },
    )?;

    let sys = build_coordinate_system(mode);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Element, Element)> = (0..100)
        .map(|_| (random_poly(&mut rng), random_poly(&mut rng)))
        .collect();
    let results = pairs
        .par_iter()
        .map(|(f, g)| -> Result<(Element, Element)> {
            let fg = sys.normalize(&f.mul_unchecked(g))?;
            let a = |o: Op, e: &Element| act_op(o, e, mode);
            let h_rhs = &a(Op::H, f)?.mul_unchecked(g) + &a(Op::K, f)?.mul_unchecked(&a(Op::H, g)?);
            let xf = a(Op::X, f)?;
            let x_rhs = &(&xf.mul_unchecked(g) + &f.mul_unchecked(&a(Op::X, g)?))
                + &xf.mul_unchecked(&a(Op::H, g)?).scale(&c);
            Ok((
                sys.normalize(&(&a(Op::H, &fg)? - &h_rhs))?,
                sys.normalize(&(&a(Op::X, &fg)? - &x_rhs))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let first = |k: usize| {
        results
            .iter()
            .map(|p| if k == 0 { &p.0 } else { &p.1 })
            .find(|e| !e.is_zero())
            .map(|e| e.to_string())
    };
    for (k, id, identity) in [
        (0, "H-leibniz", "H(f g) = (H f) g + q^-N f (H g)"),
        (
            1,
            "X-leibniz",
            "X(f g) = (X f) g + f (X g) + (q^-1 - 1) (X f)(H g)",
        ),
    ] {
        let bad = first(k);
        r.record(
            id,
            format!("{identity} on 100 random pairs (seed {seed})"),
            bad.is_none(),
            bad.unwrap_or_else(|| "0".into()),
        );
    }

    let (dax, day) = (op(Op::Dax), op(Op::Day));
    sweep(
        &mut r,
        "H=x dax + y day",
        "H = x dax + y day",
        &basis,
        equal_on(&h, &mx.then(&dax).plus(&my.then(&day))),
    )?;
    sweep(&mut r, "X=day", "X = day", &basis, equal_on(&x, &day))?;
    sweep(
        &mut r,
        "dax day",
        "dax day = day dax",
        &basis,
        equal_on(&dax.then(&day), &day.then(&dax)),
    )?;
    sweep(
        &mut r,
        "dax x",
        "dax x = 1 + q^-1 x dax, dax y = q^-1 y dax",
        &small,
        |m, n| {
            let f = mono(m, n);
            let a = act(
                &dax.then(&mx)
                    .minus(&OpExpr::identity())
                    .minus(&mx.then(&dax).scale(&q(-1))),
                &f,
                mode,
            )?;
            let b = act(&dax.then(&my).minus(&my.then(&dax).scale(&q(-1))), &f, mode)?;
            Ok(&a + &b)
        },
    )?;
    sweep(
        &mut r,
        "day y",
        "day x = x day, day y = 1 + q^-1 y day + (q^-1 - 1) x dax",
        &small,
        |m, n| {
            let f = mono(m, n);
            let a = act(&day.then(&mx).minus(&mx.then(&day)), &f, mode)?;
            let rhs = OpExpr::identity()
                .plus(&my.then(&day).scale(&q(-1)))
                .plus(&mx.then(&dax).scale(&c));
            let b = act(&day.then(&my).minus(&rhs), &f, mode)?;
            Ok(&a + &b)
        },
    )?;
    Ok(r)
}

/// `d f = θ H(f) + φ X(f) = dx ∂x(f) + dy ∂y(f)` on monomials.
pub fn suite_d_decomposition(mode: QMode, max_degree: usize) -> Result<Report> {
    let mut r = Report::new("d-decomposition");
    let sys = build_main_system(mode);
    let (th, ph) = (theta(&sys)?, phi(&sys)?);
    let dd = max_degree as i64;
    let cases = monomials(-dd, dd, dd, dd);
    let dx = Element::gen(Gen::Dx);
    let dy = Element::gen(Gen::Dy);
    sweep(
        &mut r,
        "theta-phi",
        "d f = theta H(f) + phi X(f)",
        &cases,
        |m, n| {
            let f = mono(m, n);
            let rhs = &th.mul_unchecked(&act_op(Op::H, &f, mode)?)
                + &ph.mul_unchecked(&act_op(Op::X, &f, mode)?);
            sys.normalize(&(&d(&sys, &f)? - &rhs))
        },
    )?;
    sweep(
        &mut r,
        "partials",
        "d f = dx dax(f) + dy day(f)",
        &cases,
        |m, n| {
            let f = mono(m, n);
            let rhs = &dx.mul_unchecked(&act_op(Op::Dax, &f, mode)?)
                + &dy.mul_unchecked(&act_op(Op::Day, &f, mode)?);
            sys.normalize(&(&d(&sys, &f)? - &rhs))
        },
    )?;
    Ok(r)
}

fn t3(gs: [&[Gen]; 3]) -> TensorElement {
    TensorElement::pure(
        gs.iter().map(|g| Word::from_slice(g)).collect(),
        Scalar::one(),
    )
}

/// Abstract Hopf structures of the operator algebra and of the partial
/// derivatives.
pub fn suite_operator_hopf(mode: QMode, window: usize) -> Result<Report> {
    use Gen::*;
    let mut r = Report::new("operator-hopf");
    let q = |k| mode.q_pow(k);

    let rel = build_operator_relations_system(mode);
    let conf = rel.check_local_confluence(window.max(3))?;
    r.record(
        "relations/confluence",
        "critical pairs of X H = q^-1 H X + X with K = q^-N join",
        conf.is_confluent(),
        format!(
            "{} pairs, {} unjoinable",
            conf.critical_pairs,
            conf.unjoinable.len()
        ),
    );
    let xh = Element::letters(&[OpX, H]);
    let hx = Element::letters(&[H, OpX]);
    let bracket = &(&xh - &hx.scale(&q(-1))) - &Element::gen(OpX);
    r.zero(
        "relations/XH",
        "X H - q^-1 H X - X = 0",
        &rel.normalize(&bracket)?,
    );

    // Δ on the bare relations leaves exactly (K − 1 + (1 − q⁻¹)H) ⊗ X
    let full = match mode {
        QMode::Specialized => Some(costructure_operator(mode)?),
        QMode::Symbolic => None,
    };
    let bare = costructure_operator_relations(mode);
    let one = Scalar::one;
    let tw = |terms: &[(Scalar, &[Gen], &[Gen])]| {
        TensorElement::from_terms(
            2,
            terms
                .iter()
                .map(|(c, a, b)| (vec![Word::from_slice(a), Word::from_slice(b)], c.clone())),
        )
    };
    let obstruction = tw(&[
        (one(), &[K], &[OpX]),
        (-&one(), &[], &[OpX]),
        (&one() - &q(-1), &[H], &[OpX]),
    ]);
    let got = bare.delta(&bracket)?;
    r.zero_tensor(
        "relations/delta(XH)",
        "Delta(X H - q^-1 H X - X) = (q^-N - 1 + (1 - q^-1) H) (x) X, zero exactly when H = (1 - q^-N)/(1 - q^-1)",
        &got.sub(&obstruction)?,
    );

    if let Some(op) = full {
        let conf = op.system.check_local_confluence(window.max(3))?;
        r.record(
            "operator/confluence",
            "critical pairs with H = (1 - q^-N)/(1 - q^-1) join",
            conf.is_confluent(),
            format!(
                "{} pairs, {} unjoinable",
                conf.critical_pairs,
                conf.unjoinable.len()
            ),
        );
        r.zero(
            "operator/XH",
            "X H - q^-1 H X - X = 0",
            &op.system.normalize(&bracket)?,
        );
        r.zero_tensor(
            "operator/delta(XH)",
            "Delta(X H) - q^-1 Delta(H X) - Delta(X) = 0",
            &op.delta(&bracket)?,
        );
        for g in [H, OpX, K] {
            let e = Element::gen(g);
            let (cl, cr) = op.counit_images(&e)?;
            let (al, ar) = op.antipode_images(&e)?;
            let eps = Element::scalar(op.eps(&e)?);
            let ne = op.system.normalize(&e)?;
            r.zero(
                format!("operator/counit[{g}]"),
                format!("m (eps (x) id) Delta({g}) = {g}"),
                &(&cl - &ne),
            );
            r.zero(
                format!("operator/counit'[{g}]"),
                format!("m (id (x) eps) Delta({g}) = {g}"),
                &(&cr - &ne),
            );
            r.zero(
                format!("operator/antipode[{g}]"),
                format!("m (kappa (x) id) Delta({g}) = eps({g})"),
                &(&al - &eps),
            );
            r.zero(
                format!("operator/antipode'[{g}]"),
                format!("m (id (x) kappa) Delta({g}) = eps({g})"),
                &(&ar - &eps),
            );
        }
        r.absorb(op.hopf_axiom_check(window)?);
    }

    let part = costructure_partial(mode);
    let (lhs, rhs) = part.coassociativity(&Element::gen(Day))?;
    let want = t3([&[Day], &[], &[]])
        .add(&t3([&[Dax], &[Day], &[]]))?
        .add(&t3([&[Dax], &[Dax], &[Day]]))?;
    r.zero_tensor(
        "partial/coassoc(day)",
        "(Delta (x) id) Delta(day) = day(x)1(x)1 + dax(x)day(x)1 + dax(x)dax(x)day",
        &lhs.sub(&want)?,
    );
    r.zero_tensor(
        "partial/coassoc'(day)",
        "(id (x) Delta) Delta(day) = day(x)1(x)1 + dax(x)day(x)1 + dax(x)dax(x)day",
        &rhs.sub(&want)?,
    );
    r.absorb(part.hopf_axiom_check(window)?);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_element;

    const SP: QMode = QMode::Specialized;
    const SY: QMode = QMode::Symbolic;

    fn e(s: &str, m: QMode) -> Element {
        parse_element(s, m).unwrap()
    }

    #[test]
    fn action_examples() {
        assert_eq!(act_op(Op::H, &e("x", SY), SY).unwrap(), e("x", SY));
        assert_eq!(
            act_op(Op::H, &e("x*y", SY), SY).unwrap(),
            e("(1 + q^-1)*x*y", SY)
        );
        assert!(act_op(Op::H, &e("x^2*y", SP), SP).unwrap().is_zero());
        assert_eq!(
            act_op(Op::X, &e("y^2", SY), SY).unwrap(),
            e("(1 + q^-1)*y", SY)
        );
        assert_eq!(
            act_op(Op::Dax, &e("x^2", SY), SY).unwrap(),
            e("(1 + q^-1)*x", SY)
        );
        assert_eq!(
            act_op(Op::Dax, &e("x^-1", SY), SY).unwrap(),
            e("-q*x^-1*x^-1", SY)
        );
        assert_eq!(
            act_op(Op::N, &e("x^-1*y^3", SY), SY).unwrap(),
            e("2*x^-1*y^3", SY)
        );
    }

    #[test]
    fn unnormalized_input_matches_normalized() {
        // X(y x) = X(q^-1 x y)
        assert_eq!(act_op(Op::X, &e("y*x", SY), SY).unwrap(), e("q^-1*x", SY));
        assert_eq!(
            act_op(Op::Day, &e("y*x^-1*y", SY), SY).unwrap(),
            act_op(Op::Day, &e("q*x^-1*y*y", SY), SY).unwrap()
        );
    }

    #[test]
    fn oracle_values() {
        let cf = closed_form_oracle(2, 1, SY).unwrap();
        assert_eq!(cf.h, e("(1 + q^-1 + q^-2)*x^2*y", SY));
        assert!(closed_form_oracle(3, 0, SY).unwrap().day.is_zero());
        assert_eq!(closed_form_oracle(-1, 0, SY).unwrap().dax, e("-q*x^-2", SY));
        // the two evaluations of [k] agree at q = j
        for k in -6..=6 {
            assert_eq!(
                q_integer(k, SY).unwrap().specialize(),
                q_integer(k, SP).unwrap().specialize()
            );
        }
    }

    #[test]
    fn differentials_are_rejected() {
        assert!(act_op(Op::H, &e("dx", SP), SP).is_err());
    }

    #[test]
    fn operator_parse() {
        let o = OpExpr::parse("x*dax").unwrap();
        assert_eq!(act(&o, &e("x^2", SY), SY).unwrap(), e("(1 + q^-1)*x^2", SY));
        assert!(OpExpr::parse("Z").is_err());
    }

    #[test]
    fn small_lie_suite_passes_in_both_modes() {
        for m in [SP, SY] {
            let r = suite_lie(m, 4, 1).unwrap();
            assert!(r.all_pass(), "{r}");
        }
    }
}
