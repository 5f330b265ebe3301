//! Coproducts, counits and antipodes given on generators, the two covariance
//! coactions on the differential algebra, and the coefficient derivation.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::calculus::{d, words_over};
use crate::error::{Error, Result};
use crate::freealg::{Element, Family, Gen, TensorElement, TensorRule, Word};
use crate::report::Report;
use crate::rewrite::{
    build_coordinate_system, build_dual_system, build_main_system, build_omega_system,
    build_operator_relations_system, build_operator_system, build_partial_system, CalcCoefficients,
    RewriteSystem,
};
use crate::scalars::{Cyclo, QMode, Scalar};

fn w(gs: &[Gen]) -> Word {
    Word::from_slice(gs)
}

fn t2(terms: &[(Scalar, &[Gen], &[Gen])]) -> TensorElement {
    TensorElement::from_terms(
        2,
        terms.iter().map(|(c, a, b)| (vec![w(a), w(b)], c.clone())),
    )
}

/// Multiplicative extension of generator images, normalizing after each factor.
fn extend_multiplicatively<F, N>(
    e: &Element,
    arity: usize,
    rule: TensorRule,
    img: F,
    norm: N,
) -> Result<TensorElement>
where
    F: Fn(Gen) -> Result<TensorElement>,
    N: Fn(&TensorElement) -> Result<TensorElement>,
{
    let mut out = TensorElement::zero(arity);
    for (word, c) in e.terms() {
        let mut acc = TensorElement::one(arity).scale(c);
        for &g in word.letters() {
            acc = norm(&acc.mul(&img(g)?, rule)?)?;
        }
        out = out.add(&acc)?;
    }
    Ok(out)
}

/// Replaces one leg by a scalar: `Σ c f(w_leg) (remaining legs)`.
pub fn contract_leg<F>(t: &TensorElement, leg: usize, f: F) -> Result<TensorElement>
where
    F: Fn(&Word) -> Result<Scalar>,
{
    if t.arity() < 2 {
        return Err(Error::ArityMismatch {
            left: t.arity(),
            right: 2,
        });
    }
    let mut out = TensorElement::zero(t.arity() - 1);
    for (legs, c) in t.terms() {
        let s = f(&legs[leg])?;
        let mut rest = legs.clone();
        rest.remove(leg);
        out.add_term(rest, &(c * &s));
    }
    Ok(out)
}

/// Coproduct, counit and antipode given on the generators of a presented algebra.
#[derive(Clone, Debug)]
pub struct Costructure {
    pub name: String,
    pub system: RewriteSystem,
    pub rule: TensorRule,
    delta: BTreeMap<Gen, TensorElement>,
    eps: BTreeMap<Gen, Scalar>,
    kappa: BTreeMap<Gen, Element>,
}

impl Costructure {
    pub fn new(name: &str, system: RewriteSystem, rule: TensorRule) -> Self {
        Costructure {
            name: name.into(),
            system,
            rule,
            delta: BTreeMap::new(),
            eps: BTreeMap::new(),
            kappa: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, g: Gen, delta: TensorElement, eps: Scalar, kappa: Element) {
        let mode = self.system.mode();
        self.delta.insert(g, delta.map_scalars(|c| mode.reduce(c)));
        self.eps.insert(g, mode.reduce(&eps));
        self.kappa.insert(g, kappa.map_scalars(|c| mode.reduce(c)));
    }

    fn missing(&self, g: Gen) -> Error {
        Error::Unsupported(format!("`{g}` has no co-structure in `{}`", self.name))
    }

    pub fn delta_gen(&self, g: Gen) -> Result<&TensorElement> {
        self.delta.get(&g).ok_or_else(|| self.missing(g))
    }

    pub fn delta(&self, e: &Element) -> Result<TensorElement> {
        extend_multiplicatively(
            e,
            2,
            self.rule,
            |g| self.delta_gen(g).cloned(),
            |t| self.system.normalize_tensor_uniform(t),
        )
    }

    pub fn eps_word(&self, w: &Word) -> Result<Scalar> {
        let mut acc = Scalar::one();
        for &g in w.letters() {
            acc = &acc * self.eps.get(&g).ok_or_else(|| self.missing(g))?;
        }
        Ok(acc)
    }

    pub fn eps(&self, e: &Element) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for (w, c) in e.terms() {
            acc = &acc + &(c * &self.eps_word(w)?);
        }
        Ok(acc)
    }

    /// Antipode on a word: reversed product of generator images, with the
    /// braiding sign `j^{deg u deg v}` per crossed pair under the graded rule.
    pub fn kappa_word(&self, w: &Word) -> Result<Element> {
        let letters = w.letters();
        let mut acc = Element::one();
        for &g in letters.iter().rev() {
            let k = self.kappa.get(&g).ok_or_else(|| self.missing(g))?;
            acc = self.system.normalize(&acc.mul_unchecked(k))?;
        }
        if self.rule == TensorRule::Twisted {
            let mut e = 0i64;
            for a in 0..letters.len() {
                for b in a + 1..letters.len() {
                    e += letters[a].grade() as i64 * letters[b].grade() as i64;
                }
            }
            acc = acc.scale(&Scalar::from(Cyclo::j_pow(e)));
        }
        Ok(acc)
    }

    pub fn kappa(&self, e: &Element) -> Result<Element> {
        let mut acc = Element::zero();
        for (w, c) in e.terms() {
            acc = &acc + &self.kappa_word(w)?.scale(c);
        }
        self.system.normalize(&acc)
    }

    /// `(Δ⊗id)Δ(e)` and `(id⊗Δ)Δ(e)`.
    pub fn coassociativity(&self, e: &Element) -> Result<(TensorElement, TensorElement)> {
        let de = self.delta(e)?;
        let left = de.expand_leg(0, |w| self.delta(&Element::word(w.clone())))?;
        let right = de.expand_leg(1, |w| self.delta(&Element::word(w.clone())))?;
        let n3 = |t: &TensorElement| self.system.normalize_tensor_uniform(t);
        Ok((n3(&left)?, n3(&right)?))
    }

    /// `m(ε⊗id)Δ(e)` and `m(id⊗ε)Δ(e)`.
    pub fn counit_images(&self, e: &Element) -> Result<(Element, Element)> {
        let de = self.delta(e)?;
        let l = contract_leg(&de, 0, |w| self.eps_word(w))?.multiply_legs();
        let r = contract_leg(&de, 1, |w| self.eps_word(w))?.multiply_legs();
        Ok((self.system.normalize(&l)?, self.system.normalize(&r)?))
    }

    /// `m(κ⊗id)Δ(e)` and `m(id⊗κ)Δ(e)`.
    pub fn antipode_images(&self, e: &Element) -> Result<(Element, Element)> {
        let de = self.delta(e)?;
        let side = |leg: usize| -> Result<Element> {
            let t = de.map_legs(|k, w| {
                if k == leg {
                    self.kappa_word(w)
                } else {
                    Ok(Element::word(w.clone()))
                }
            })?;
            self.system.normalize(&t.multiply_legs())
        };
        Ok((side(0)?, side(1)?))
    }

    /// Basis words: normal words up to length `window`.
    pub fn basis(&self, window: usize) -> Result<Vec<Word>> {
        let mut out = vec![Word::empty()];
        for word in words_over(self.system.ranking(), window) {
            if self.system.is_normal(&word)? {
                out.push(word);
            }
        }
        Ok(out)
    }

    /// Axioms on the basis window plus compatibility with every relation.
    pub fn hopf_axiom_check(&self, window: usize) -> Result<Report> {
        let mut r = Report::new(&self.name);
        let basis = self.basis(window)?;
        type Row = (String, TensorElement, Element, Element, Element, Element);
        let rows = basis
            .par_iter()
            .map(|b| -> Result<Row> {
                let e = Element::word(b.clone());
                let (l, rr) = self.coassociativity(&e)?;
                let (cl, cr) = self.counit_images(&e)?;
                let (al, ar) = self.antipode_images(&e)?;
                let eps = Element::scalar(self.eps(&e)?);
                Ok((
                    b.to_string(),
                    l.sub(&rr)?,
                    &cl - &e,
                    &cr - &e,
                    &al - &eps,
                    &ar - &eps,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = rows.len();
        let first = |pick: &dyn Fn(&Row) -> Option<String>| -> (bool, String) {
            match rows.iter().find_map(pick) {
                Some(s) => (false, s),
                None => (true, "0".into()),
            }
        };
        let nz = |word: &str, e: &Element| (!e.is_zero()).then(|| format!("{word}: {e}"));
        let checks: [(&str, String, (bool, String)); 5] = [
            (
                "coassociativity",
                "(Delta (x) id) Delta = (id (x) Delta) Delta".into(),
                first(&|row| (!row.1.is_zero()).then(|| format!("{}: {}", row.0, row.1))),
            ),
            (
                "counit-left",
                "m (eps (x) id) Delta = id".into(),
                first(&|row| nz(&row.0, &row.2)),
            ),
            (
                "counit-right",
                "m (id (x) eps) Delta = id".into(),
                first(&|row| nz(&row.0, &row.3)),
            ),
            (
                "antipode-left",
                "m (kappa (x) id) Delta = eps".into(),
                first(&|row| nz(&row.0, &row.4)),
            ),
            (
                "antipode-right",
                "m (id (x) kappa) Delta = eps".into(),
                first(&|row| nz(&row.0, &row.5)),
            ),
        ];
        for (id, identity, (ok, res)) in checks {
            r.record(
                id,
                format!("{identity} on {n} basis words of length <= {window}"),
                ok,
                res,
            );
        }
        self.relation_compatibility(&mut r)?;
        Ok(r)
    }

    /// `Δ`, `ε`, `κ` annihilate every relation `lhs − rhs` and every cap.
    pub fn relation_compatibility(&self, r: &mut Report) -> Result<()> {
        let mut rels: Vec<(String, Element)> = self
            .system
            .rules()
            .iter()
            .map(|rule| {
                (
                    rule.lhs.to_string(),
                    &Element::word(rule.lhs.clone()) - &rule.rhs,
                )
            })
            .collect();
        for (&g, &k) in self.system.caps() {
            rels.push((
                format!("{g}^{}", k + 1),
                Element::word(Word::from_slice(&vec![g; k as usize + 1])),
            ));
        }
        for (name, rel) in rels {
            let dr = self.delta(&rel)?;
            r.zero_tensor(
                format!("delta[{name}]"),
                format!("Delta({name} - rhs) = 0"),
                &dr,
            );
            let er = self.eps(&rel)?;
            r.record(
                format!("eps[{name}]"),
                format!("eps({name} - rhs) = 0"),
                er.is_zero(),
                er.to_string(),
            );
            let kr = self.kappa(&rel)?;
            r.zero(
                format!("kappa[{name}]"),
                format!("kappa({name} - rhs) = 0"),
                &kr,
            );
        }
        Ok(())
    }
}

fn coordinate_images(c: &mut Costructure) {
    use Gen::*;
    let one = Scalar::one;
    c.set(X, t2(&[(one(), &[X], &[X])]), one(), Element::gen(XInv));
    c.set(
        XInv,
        t2(&[(one(), &[XInv], &[XInv])]),
        one(),
        Element::gen(X),
    );
    c.set(
        Y,
        t2(&[(one(), &[Y], &[]), (one(), &[X], &[Y])]),
        Scalar::zero(),
        -&Element::letters(&[XInv, Y]),
    );
}

/// The extended quantum plane `x, x⁻¹, y`.
pub fn costructure_coordinate(mode: QMode) -> Costructure {
    let mut c = Costructure::new(
        "hopf-A",
        build_coordinate_system(mode),
        TensorRule::Untwisted,
    );
    coordinate_images(&mut c);
    c
}

/// The form algebra generated by θ, φ over the coordinates.
pub fn costructure_omega(mode: QMode, rule: TensorRule) -> Costructure {
    use Gen::*;
    let one = Scalar::one;
    let mut c = Costructure::new("hopf-omega", build_omega_system(mode), rule);
    coordinate_images(&mut c);
    c.set(
        Theta,
        t2(&[(one(), &[Theta], &[]), (one(), &[], &[Theta])]),
        Scalar::zero(),
        -&Element::gen(Theta),
    );
    let kphi = &Element::letters(&[Phi, XInv]).scale(&-&mode.q_pow(-1))
        - &Element::letters(&[Theta, XInv, Y]);
    c.set(
        Phi,
        t2(&[
            (one(), &[Phi], &[]),
            (one(), &[X], &[Phi]),
            (-&one(), &[Y], &[Theta]),
        ]),
        Scalar::zero(),
        kphi,
    );
    c
}

fn operator_images(c: &mut Costructure, mode: QMode) {
    use Gen::*;
    let one = Scalar::one;
    c.set(
        H,
        t2(&[(one(), &[H], &[]), (one(), &[K], &[H])]),
        Scalar::zero(),
        -&Element::letters(&[KInv, H]),
    );
    c.set(
        OpX,
        t2(&[
            (one(), &[OpX], &[]),
            (one(), &[], &[OpX]),
            (&mode.q_pow(-1) - &one(), &[OpX], &[H]),
        ]),
        Scalar::zero(),
        -&Element::letters(&[OpX, KInv]),
    );
    c.set(K, t2(&[(one(), &[K], &[K])]), one(), Element::gen(KInv));
    c.set(
        KInv,
        t2(&[(one(), &[KInv], &[KInv])]),
        one(),
        Element::gen(K),
    );
}

/// The quantum Lie algebra with `K = q^-N` (specialized mode only).
pub fn costructure_operator(mode: QMode) -> Result<Costructure> {
    let mut c = Costructure::new(
        "hopf-operator",
        build_operator_system(mode)?,
        TensorRule::Untwisted,
    );
    operator_images(&mut c, mode);
    Ok(c)
}

/// The same maps over the commutation relations alone, with `H` kept free.
pub fn costructure_operator_relations(mode: QMode) -> Costructure {
    let mut c = Costructure::new(
        "hopf-operator-relations",
        build_operator_relations_system(mode),
        TensorRule::Untwisted,
    );
    operator_images(&mut c, mode);
    c
}
/// The commuting derivatives `∂x` (invertible) and `∂y`.
pub fn costructure_partial(mode: QMode) -> Costructure {
    use Gen::*;
    let one = Scalar::one;
    let mut c = Costructure::new(
        "hopf-partial",
        build_partial_system(mode),
        TensorRule::Untwisted,
    );
    c.set(
        Dax,
        t2(&[(one(), &[Dax], &[Dax])]),
        one(),
        Element::gen(DaxInv),
    );
    c.set(
        DaxInv,
        t2(&[(one(), &[DaxInv], &[DaxInv])]),
        one(),
        Element::gen(Dax),
    );
    c.set(
        Day,
        t2(&[(one(), &[Day], &[]), (one(), &[Dax], &[Day])]),
        Scalar::zero(),
        -&Element::letters(&[DaxInv, Day]),
    );
    c
}

/// Which grouplike accompanies `B` in `Δ(B) = B ⊗ g + 1 ⊗ B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BCoproduct {
    /// `g = q^A`, antipode `κ(B) = −B q^-A`.
    L,
    /// `g = q^-A`, antipode `κ(B) = −B q^A`.
    LInv,
}

/// The dual algebra in `A, B, q^±A`.
pub fn costructure_dual(mode: QMode, b: BCoproduct) -> Costructure {
    use Gen::*;
    let one = Scalar::one;
    let mut c = Costructure::new("hopf-dual", build_dual_system(mode), TensorRule::Untwisted);
    c.set(
        A,
        t2(&[(one(), &[A], &[]), (one(), &[], &[A])]),
        Scalar::zero(),
        -&Element::gen(A),
    );
    let (g, ginv) = match b {
        BCoproduct::L => (L, LInv),
        BCoproduct::LInv => (LInv, L),
    };
    c.set(
        B,
        t2(&[(one(), &[B], &[g]), (one(), &[], &[B])]),
        Scalar::zero(),
        -&Element::letters(&[B, ginv]),
    );
    c.set(L, t2(&[(one(), &[L], &[L])]), one(), Element::gen(LInv));
    c.set(
        LInv,
        t2(&[(one(), &[LInv], &[LInv])]),
        one(),
        Element::gen(L),
    );
    c
}

/// Hopf axioms for the coordinate algebra and for the form algebra, plus the
/// quotient compatibility of `Δ`.
pub fn suite_hopf(mode: QMode, window: usize, omega_rule: TensorRule) -> Result<Report> {
    let mut r = Report::new("hopf");
    let a = costructure_coordinate(mode);
    r.absorb(a.hopf_axiom_check(window)?);
    let om = costructure_omega(mode, omega_rule);
    let mut rep = om.hopf_axiom_check(window)?;
    let x_theta = om.delta(&Element::letters(&[Gen::X, Gen::Theta]))?;
    let theta_x = om
        .delta(&Element::letters(&[Gen::Theta, Gen::X]))?
        .scale(&mode.q_pow(-1));
    rep.zero_tensor(
        "delta(x*theta)",
        "Delta(x*theta) = q^-1*Delta(theta*x)",
        &om.system
            .normalize_tensor_uniform(&x_theta.sub(&theta_x)?)?,
    );
    r.absorb(rep);

    let words = words_over(a.system.ranking(), window);
    let bad = words
        .par_iter()
        .map(|word| -> Result<Option<String>> {
            let e = Element::word(word.clone());
            let lhs = a.delta(&a.system.normalize(&e)?)?;
            let rhs = a.delta(&e)?;
            let diff = lhs.sub(&rhs)?;
            Ok((!diff.is_zero()).then(|| format!("{word}: {diff}")))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    r.record(
        "hopf-A/quotient",
        format!("Delta(normalize(w)) = Delta(w) for all coordinate words of length <= {window}"),
        bad.is_none(),
        bad.unwrap_or_else(|| "0".into()),
    );
    Ok(r)
}

/// Side of a covariance coaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `Δ^R : Γ → Γ ⊗ 𝒜`.
    R,
    /// `Δ^L : Γ → 𝒜 ⊗ Γ`.
    L,
}

/// A coaction of the coordinate Hopf algebra on the differential algebra.
#[derive(Clone, Debug)]
pub struct Coaction {
    pub side: Side,
    pub system: RewriteSystem,
    images: BTreeMap<Gen, TensorElement>,
}

impl Coaction {
    pub fn new(side: Side, mode: QMode) -> Self {
        use Gen::*;
        let one = Scalar::one;
        let mut images = BTreeMap::new();
        images.insert(X, t2(&[(one(), &[X], &[X])]));
        images.insert(XInv, t2(&[(one(), &[XInv], &[XInv])]));
        images.insert(Y, t2(&[(one(), &[Y], &[]), (one(), &[X], &[Y])]));
        for (da, db) in [(Dx, Dy), (D2x, D2y)] {
            match side {
                Side::R => {
                    images.insert(da, t2(&[(one(), &[da], &[X])]));
                    images.insert(db, t2(&[(one(), &[db], &[]), (one(), &[da], &[Y])]));
                }
                Side::L => {
                    images.insert(da, t2(&[(one(), &[X], &[da])]));
                    images.insert(db, t2(&[(one(), &[X], &[db])]));
                }
            }
        }
        Coaction {
            side,
            system: build_main_system(mode),
            images,
        }
    }

    pub fn apply(&self, e: &Element) -> Result<TensorElement> {
        extend_multiplicatively(
            e,
            2,
            TensorRule::Untwisted,
            |g| {
                self.images
                    .get(&g)
                    .cloned()
                    .ok_or_else(|| Error::Unsupported(format!("no coaction image for `{g}`")))
            },
            |t| self.system.normalize_tensor_uniform(t),
        )
    }

    fn apply_word(&self, w: &Word) -> Result<TensorElement> {
        self.apply(&Element::word(w.clone()))
    }
}

/// Covariance of the relation table under both coactions, and the coaction laws.
pub fn covariance_suite(mode: QMode, max_len: usize) -> Result<Report> {
    let mut r = Report::new("covariance");
    let sys = build_main_system(mode);
    let rc = Coaction::new(Side::R, mode);
    let lc = Coaction::new(Side::L, mode);
    let a = costructure_coordinate(mode);
    let a_main = {
        let mut c = Costructure::new("hopf-A", sys.clone(), TensorRule::Untwisted);
        coordinate_images(&mut c);
        c
    };

    let mut rels: Vec<(String, Element)> = sys
        .rules()
        .iter()
        .map(|rule| {
            (
                format!("{} = {}", rule.lhs, rule.rhs),
                &Element::word(rule.lhs.clone()) - &rule.rhs,
            )
        })
        .collect();
    for (&g, &k) in sys.caps() {
        rels.push((
            format!("{g}^{} = 0", k + 1),
            Element::word(Word::from_slice(&vec![g; k as usize + 1])),
        ));
    }
    for (text, rel) in &rels {
        r.zero_tensor(
            format!("R[{text}]"),
            format!("Delta^R({text}) holds"),
            &rc.apply(rel)?,
        );
        r.zero_tensor(
            format!("L[{text}]"),
            format!("Delta^L({text}) holds"),
            &lc.apply(rel)?,
        );
    }

    let mut words = vec![Word::empty()];
    words.extend(words_over(sys.ranking(), max_len));
    type Row = (String, [TensorElement; 4], [Element; 2]);
    let rows = words
        .par_iter()
        .map(|word| -> Result<Row> {
            let e = Element::word(word.clone());
            let ne = sys.normalize(&e)?;
            let n3 = |t: &TensorElement| sys.normalize_tensor_uniform(t);
            let dr = rc.apply(&e)?;
            let dl = lc.apply(&e)?;
            // (Δ^R⊗id)Δ^R = (id⊗Δ_𝒜)Δ^R
            let r1 = n3(&dr.expand_leg(0, |w| rc.apply_word(w))?)?;
            let r2 = n3(&dr.expand_leg(1, |w| a_main.delta(&Element::word(w.clone())))?)?;
            // (Δ_𝒜⊗id)Δ^L = (id⊗Δ^L)Δ^L
            let l1 = n3(&dl.expand_leg(0, |w| a_main.delta(&Element::word(w.clone())))?)?;
            let l2 = n3(&dl.expand_leg(1, |w| lc.apply_word(w))?)?;
            // (Δ^L⊗id)Δ^R = (id⊗Δ^R)Δ^L
            let m1 = n3(&dr.expand_leg(0, |w| lc.apply_word(w))?)?;
            let m2 = n3(&dl.expand_leg(1, |w| rc.apply_word(w))?)?;
            let cr = contract_leg(&dr, 1, |w| a.eps_word(w))?;
            let cl = contract_leg(&dl, 0, |w| a.eps_word(w))?;
            let cr = sys.normalize(&cr.multiply_legs())?;
            let cl = sys.normalize(&cl.multiply_legs())?;
            // (d⊗id)Δ^R(a) = Δ^R(da) and (id⊗d)Δ^L(a) = Δ^L(da)
            let de = d(&sys, &e)?;
            let dr_d = rc.apply(&de)?;
            let dl_d = lc.apply(&de)?;
            let r_leg = dr.map_legs(|k, w| {
                if k == 0 {
                    d(&sys, &Element::word(w.clone()))
                } else {
                    Ok(Element::word(w.clone()))
                }
            })?;
            let l_leg = dl.map_legs(|k, w| {
                if k == 1 {
                    d(&sys, &Element::word(w.clone()))
                } else {
                    Ok(Element::word(w.clone()))
                }
            })?;
            Ok((
                word.to_string(),
                [
                    r1.sub(&r2)?,
                    l1.sub(&l2)?,
                    m1.sub(&m2)?,
                    sys.normalize_tensor_uniform(&r_leg.sub(&dr_d)?)?
                        .add(&sys.normalize_tensor_uniform(&l_leg.sub(&dl_d)?)?)?,
                ],
                [&cr - &ne, &cl - &ne],
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len();
    let scope = format!("on {n} words of length <= {max_len}");
    let tens = |k: usize| {
        rows.iter()
            .find(|row| !row.1[k].is_zero())
            .map(|row| format!("{}: {}", row.0, row.1[k]))
    };
    let elem = |k: usize| {
        rows.iter()
            .find(|row| !row.2[k].is_zero())
            .map(|row| format!("{}: {}", row.0, row.2[k]))
    };
    let items = [
        (
            "R-coassociativity",
            "(Delta^R (x) id) Delta^R = (id (x) Delta) Delta^R",
            tens(0),
        ),
        ("R-counit", "(id (x) eps) Delta^R = id", elem(0)),
        (
            "L-coassociativity",
            "(Delta (x) id) Delta^L = (id (x) Delta^L) Delta^L",
            tens(1),
        ),
        ("L-counit", "(eps (x) id) Delta^L = id", elem(1)),
        (
            "bicovariance",
            "(Delta^L (x) id) Delta^R = (id (x) Delta^R) Delta^L",
            tens(2),
        ),
        (
            "d-equivariance",
            "(d (x) id) Delta^R = Delta^R d and (id (x) d) Delta^L = Delta^L d",
            tens(3),
        ),
    ];
    for (id, identity, fail) in items {
        r.record(
            id,
            format!("{identity} {scope}"),
            fail.is_none(),
            fail.unwrap_or_else(|| "0".into()),
        );
    }

    // on the coordinate algebra the differential-leg identities use Δ_𝒜 directly
    for gen in [Gen::X, Gen::Y] {
        let e = Element::gen(gen);
        let da = a_main.delta(&e)?;
        let lhs_r = da.map_legs(|k, w| {
            if k == 0 {
                d(&sys, &Element::word(w.clone()))
            } else {
                Ok(Element::word(w.clone()))
            }
        })?;
        let lhs_l = da.map_legs(|k, w| {
            if k == 1 {
                d(&sys, &Element::word(w.clone()))
            } else {
                Ok(Element::word(w.clone()))
            }
        })?;
        let de = d(&sys, &e)?;
        r.zero_tensor(
            format!("(d (x) id)Delta({gen})"),
            format!("(d (x) id) Delta({gen}) = Delta^R(d{gen})"),
            &sys.normalize_tensor_uniform(&lhs_r.sub(&rc.apply(&de)?)?)?,
        );
        r.zero_tensor(
            format!("(id (x) d)Delta({gen})"),
            format!("(id (x) d) Delta({gen}) = Delta^L(d{gen})"),
            &sys.normalize_tensor_uniform(&lhs_l.sub(&lc.apply(&de)?)?)?,
        );
    }
    Ok(r)
}

/// Unknowns of the coefficient derivation, in order.
pub const UNKNOWNS: [&str; 7] = ["A", "B", "C11", "C12", "C21", "C22", "F"];

fn coeffs_from(v: &[Scalar; 7]) -> CalcCoefficients {
    CalcCoefficients {
        a: v[0].clone(),
        b: v[1].clone(),
        c11: v[2].clone(),
        c12: v[3].clone(),
        c21: v[4].clone(),
        c22: v[5].clone(),
        f: v[6].clone(),
    }
}

/// The first-order relations with arbitrary coefficients (no caps, no inverse).
fn first_order_system(c: &CalcCoefficients, mode: QMode) -> Result<RewriteSystem> {
    use Gen::*;
    let mut sys = RewriteSystem::new("first-order", Family::Main, mode, &[D2y, D2x, Dy, Dx, X, Y]);
    let t = |gs: &[Gen], s: &Scalar| Element::term(w(gs), s.clone());
    sys.add_rule(w(&[Y, X]), t(&[X, Y], &mode.q_pow(-1)))?;
    sys.add_rule(w(&[X, Dx]), t(&[Dx, X], &c.a))?;
    sys.add_rule(w(&[X, Dy]), &t(&[Dy, X], &c.c11) + &t(&[Dx, Y], &c.c12))?;
    sys.add_rule(w(&[Y, Dx]), &t(&[Dx, Y], &c.c21) + &t(&[Dy, X], &c.c22))?;
    sys.add_rule(w(&[Y, Dy]), t(&[Dy, Y], &c.b))?;
    sys.add_rule(w(&[Dx, Dy]), t(&[Dy, Dx], &c.f))?;
    Ok(sys)
}

/// The ansatz relations `lhs − rhs` with the given coefficients.
fn ansatz_relations(c: &CalcCoefficients) -> Vec<(&'static str, Element)> {
    use Gen::*;
    let t = |gs: &[Gen], s: &Scalar| Element::term(w(gs), s.clone());
    let one = Scalar::one();
    vec![
        ("x*dx", &t(&[X, Dx], &one) - &t(&[Dx, X], &c.a)),
        (
            "x*dy",
            &(&t(&[X, Dy], &one) - &t(&[Dy, X], &c.c11)) - &t(&[Dx, Y], &c.c12),
        ),
        (
            "y*dx",
            &(&t(&[Y, Dx], &one) - &t(&[Dx, Y], &c.c21)) - &t(&[Dy, X], &c.c22),
        ),
        ("y*dy", &t(&[Y, Dy], &one) - &t(&[Dy, Y], &c.b)),
        ("dx*dy", &t(&[Dx, Dy], &one) - &t(&[Dy, Dx], &c.f)),
    ]
}

/// Coefficients of the covariance residuals at a coefficient assignment, keyed
/// by `(side, relation, tensor basis term)`.
fn covariance_residuals(c: &CalcCoefficients, mode: QMode) -> Result<BTreeMap<String, Scalar>> {
    let sys = first_order_system(c, mode)?;
    let coord = build_coordinate_system(mode);
    let mut out = BTreeMap::new();
    for side in [Side::R, Side::L] {
        let co = Coaction::new(side, mode);
        for (name, rel) in ansatz_relations(c) {
            let raw = extend_multiplicatively(
                &rel,
                2,
                TensorRule::Untwisted,
                |g| {
                    co.images
                        .get(&g)
                        .cloned()
                        .ok_or_else(|| Error::Unsupported(g.to_string()))
                },
                |t| Ok(t.clone()),
            )?;
            let systems: [&RewriteSystem; 2] = match side {
                Side::R => [&sys, &coord],
                Side::L => [&coord, &sys],
            };
            let t = RewriteSystem::normalize_tensor(&systems, &raw)?;
            let side_name = if side == Side::R { "R" } else { "L" };
            for (legs, s) in t.terms() {
                let key = format!("{side_name}[{name}] {} (x) {}", legs[0], legs[1]);
                out.insert(key, s.clone());
            }
        }
    }
    Ok(out)
}

/// An affine form `c₀ + Σ cᵢ uᵢ` over the seven unknowns.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine {
    pub constant: Scalar,
    pub coeffs: [Scalar; 7],
}

impl Affine {
    fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.iter().all(Scalar::is_zero)
    }

    fn eval(&self, v: &[Scalar; 7]) -> Scalar {
        self.coeffs
            .iter()
            .zip(v)
            .fold(self.constant.clone(), |acc, (c, x)| &acc + &(c * x))
    }
}

impl std::fmt::Display for Affine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if !self.constant.is_zero() {
            parts.push(crate::freealg::render_term(&self.constant, "1"));
        }
        for (c, name) in self.coeffs.iter().zip(UNKNOWNS) {
            if !c.is_zero() {
                parts.push(crate::freealg::render_term(c, name));
            }
        }
        f.write_str(&crate::freealg::join_terms(parts))
    }
}

/// The residual equations as affine forms. Each residual is affine in the
/// unknowns: the ansatz is applied once per word and never multiplied by
/// another unknown. Recovered by evaluation at the origin and unit vectors,
/// then confirmed at an independent point.
pub fn covariance_equations(mode: QMode) -> Result<Vec<(String, Affine)>> {
    let zero: [Scalar; 7] = Default::default();
    let at = |v: &[Scalar; 7]| covariance_residuals(&coeffs_from(v), mode);
    let base = at(&zero)?;
    let mut units = Vec::new();
    for k in 0..7 {
        let mut v = zero.clone();
        v[k] = Scalar::one();
        units.push(at(&v)?);
    }
    let mut keys: Vec<String> = base.keys().cloned().collect();
    for u in &units {
        keys.extend(u.keys().cloned());
    }
    keys.sort();
    keys.dedup();
    let mut eqs = Vec::new();
    for key in keys {
        let c0 = base.get(&key).cloned().unwrap_or_default();
        let mut coeffs: [Scalar; 7] = Default::default();
        for k in 0..7 {
            coeffs[k] = &units[k].get(&key).cloned().unwrap_or_default() - &c0;
        }
        let form = Affine {
            constant: c0,
            coeffs,
        };
        if !form.is_zero() {
            eqs.push((key, form));
        }
    }
    let probe: [Scalar; 7] = std::array::from_fn(|k| Scalar::from(k as i64 + 2));
    let direct = at(&probe)?;
    for (key, form) in &eqs {
        let want = direct.get(key).cloned().unwrap_or_default();
        if form.eval(&probe) != want {
            return Err(Error::Unsupported(format!(
                "residual `{key}` is not affine in the unknowns"
            )));
        }
    }
    Ok(eqs)
}

/// Outcome of the coefficient derivation.
#[derive(Clone, Debug)]
pub struct Solution {
    pub equations: Vec<(String, Affine)>,
    /// The unique solution, when the system is consistent and determined.
    pub coefficients: Option<CalcCoefficients>,
    /// Equations left unsatisfiable after elimination.
    pub inconsistent: Vec<String>,
    pub free: Vec<&'static str>,
}

/// Gaussian elimination over Laurent polynomials, pivoting only on units.
#[allow(clippy::needless_range_loop)]
fn eliminate(eqs: &[Affine]) -> (Vec<Option<Scalar>>, Vec<Affine>, Vec<usize>) {
    let mut rows: Vec<Affine> = eqs.to_vec();
    let mut pivot_of: Vec<Option<usize>> = vec![None; 7];
    let mut used = vec![false; rows.len()];
    for col in 0..7 {
        let Some(pr) = (0..rows.len()).find(|&i| !used[i] && rows[i].coeffs[col].inv().is_ok())
        else {
            continue;
        };
        used[pr] = true;
        let inv = rows[pr].coeffs[col].inv().expect("unit pivot");
        let p = Affine {
            constant: &rows[pr].constant * &inv,
            coeffs: std::array::from_fn(|k| &rows[pr].coeffs[k] * &inv),
        };
        for (i, row) in rows.iter_mut().enumerate() {
            if i == pr || row.coeffs[col].is_zero() {
                continue;
            }
            let f = row.coeffs[col].clone();
            row.constant = &row.constant - &(&f * &p.constant);
            for k in 0..7 {
                row.coeffs[k] = &row.coeffs[k] - &(&f * &p.coeffs[k]);
            }
        }
        rows[pr] = p;
        pivot_of[col] = Some(pr);
    }
    let mut values = vec![None; 7];
    let mut free = Vec::new();
    for (col, pivot) in pivot_of.iter().enumerate() {
        match *pivot {
            Some(pr)
                if rows[pr]
                    .coeffs
                    .iter()
                    .enumerate()
                    .all(|(k, c)| k == col || c.is_zero()) =>
            {
                values[col] = Some(-&rows[pr].constant);
            }
            _ => free.push(col),
        }
    }
    let leftover = rows
        .iter()
        .enumerate()
        .filter(|(i, r)| !used[*i] && !r.is_zero())
        .map(|(_, r)| r.clone())
        .collect();
    (values, leftover, free)
}

/// Derives the coefficients from right and left covariance. `overrides` pins
/// unknowns to given values.
pub fn solve_coefficients(mode: QMode, overrides: &[(String, Scalar)]) -> Result<Solution> {
    let mut equations = covariance_equations(mode)?;
    for (name, value) in overrides {
        let k = UNKNOWNS
            .iter()
            .position(|u| u == name)
            .ok_or_else(|| Error::Unsupported(format!("unknown coefficient `{name}`")))?;
        let mut coeffs: [Scalar; 7] = Default::default();
        coeffs[k] = Scalar::one();
        equations.push((
            format!("override {name}"),
            Affine {
                constant: -&mode.reduce(value),
                coeffs,
            },
        ));
    }
    let forms: Vec<Affine> = equations.iter().map(|(_, f)| f.clone()).collect();
    let (values, leftover, free) = eliminate(&forms);
    let inconsistent: Vec<String> = leftover.iter().map(|f| format!("{f} = 0")).collect();
    let coefficients = if inconsistent.is_empty() && free.is_empty() {
        let v: [Scalar; 7] = std::array::from_fn(|k| values[k].clone().expect("determined"));
        Some(coeffs_from(&v))
    } else {
        None
    };
    Ok(Solution {
        equations,
        coefficients,
        inconsistent,
        free: free.into_iter().map(|k| UNKNOWNS[k]).collect(),
    })
}

/// Coefficients of `(dx)²`, `dy dx`, `dy dx`, `(dy)²` produced by
/// differentiating the four first-order relations.
pub fn inhomogeneous_terms(c: &CalcCoefficients, mode: QMode) -> Result<[Scalar; 4]> {
    use Gen::*;
    let sys = first_order_system(c, mode)?;
    let rels = ansatz_relations(c);
    let targets = [w(&[Dx, Dx]), w(&[Dy, Dx]), w(&[Dy, Dx]), w(&[Dy, Dy])];
    let mut out: [Scalar; 4] = Default::default();
    for (k, target) in targets.iter().enumerate() {
        let rel = &rels[k].1;
        let dr = crate::calculus::d_unreduced(rel)?;
        // d of a relation lies in the ideal, so it must vanish; its first-order
        // part is the obstruction
        out[k] = -&sys.normalize(&dr)?.coeff(target);
    }
    Ok(out)
}

fn sc(mode: QMode, s: &str) -> Scalar {
    crate::parse::parse_scalar(s, mode).expect("built-in scalar")
}

/// The derivation report: covariance equations, their solution, the derived
/// constants, and the constraint fixing `q`.
pub fn suite_solve(overrides: &[(String, Scalar)]) -> Result<(Report, Solution)> {
    let mode = QMode::Symbolic;
    let sol = solve_coefficients(mode, overrides)?;
    let mut r = Report::new("solve-coefficients");
    for (key, form) in &sol.equations {
        r.record(format!("eq {key}"), format!("{form} = 0"), true, "equation");
    }
    for bad in &sol.inconsistent {
        r.record("inconsistent", bad.clone(), false, bad.clone());
    }
    if !sol.free.is_empty() {
        r.record(
            "underdetermined",
            format!("free unknowns: {}", sol.free.join(", ")),
            false,
            "no unique solution",
        );
    }
    let Some(c) = &sol.coefficients else {
        return Ok((r, sol));
    };
    let want = CalcCoefficients::covariant(mode);
    for (name, got, exp) in [
        ("A", &c.a, &want.a),
        ("B", &c.b, &want.b),
        ("C11", &c.c11, &want.c11),
        ("C12", &c.c12, &want.c12),
        ("C21", &c.c21, &want.c21),
        ("C22", &c.c22, &want.c22),
        ("F", &c.f, &want.f),
    ] {
        r.record(
            format!("solution {name}"),
            format!("{name} = {exp}"),
            got == exp,
            got.to_string(),
        );
    }
    let q1 = c.q1()?;
    let q2 = c.q2();
    let checks = [
        ("K1", c.k1(), sc(mode, "j - q")),
        ("K2", c.k2(), sc(mode, "q^-1*(j - q)")),
        ("Q1", q1.clone(), sc(mode, "-j^2*(q^-1 + 1)")),
        ("Q2", q2, q1),
    ];
    for (name, got, exp) in checks {
        r.record(
            format!("derived {name}"),
            format!("{name} = {exp}"),
            got == exp,
            got.to_string(),
        );
    }
    let inh = inhomogeneous_terms(c, mode)?;
    let expected = [
        &(&c.a * &Scalar::j()) - &Scalar::one(),
        c.k1(),
        c.k2(),
        &(&c.b * &Scalar::j()) - &Scalar::one(),
    ];
    let labels = [
        "x*d2x: (A*j - 1)*dx^2",
        "x*d2y: K1*dy*dx",
        "y*d2x: K2*dy*dx",
        "y*d2y: (B*j - 1)*dy^2",
    ];
    for k in 0..4 {
        let vanish = inh[k]
            .eval(&Cyclo::j())
            .map(|v| v.is_zero())
            .unwrap_or(false);
        r.record(
            format!("inhomogeneous {}", labels[k]),
            format!(
                "d of the first-order relation leaves {} = {}, vanishing at q = j",
                labels[k], expected[k]
            ),
            inh[k] == expected[k] && vanish,
            inh[k].to_string(),
        );
    }
    let qj2 = &(&Scalar::q_pow(1) * &Scalar::from(Cyclo::j_pow(2))) - &Scalar::one();
    let cyc = &(&Scalar::q_pow(2) + &Scalar::q_pow(1)) + &Scalar::one();
    let at_j = |s: &Scalar| s.eval(&Cyclo::j()).map(|v| v.is_zero()).unwrap_or(false);
    let (res, d3_at_j, d3_at_j2) = crate::calculus::d_cubed_symbolic()?;
    r.record(
        "constraint",
        "d^3 = 0 requires q*j^2 = 1 and q^2 + q + 1 = 0; q = j^-2 = j",
        at_j(&qj2) && at_j(&cyc) && !res.is_zero() && d3_at_j && !d3_at_j2,
        format!("d^3(x*y) = {res}"),
    );
    Ok((r, sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_element, parse_tensor};

    const SP: QMode = QMode::Specialized;

    #[test]
    fn coordinate_costructure_examples() {
        let a = costructure_coordinate(QMode::Symbolic);
        let m = QMode::Symbolic;
        let d = a.delta(&parse_element("x*y", m).unwrap()).unwrap();
        assert_eq!(d, parse_tensor("x*y (x) x + x*x (x) x*y", m).unwrap());
        assert!(a.eps(&parse_element("x^3", m).unwrap()).unwrap().is_one());
        assert!(a
            .eps(&parse_element("x^2*y", m).unwrap())
            .unwrap()
            .is_zero());
        let k = a.kappa(&parse_element("x*y", m).unwrap()).unwrap();
        assert_eq!(k, parse_element("-q*x^-1*x^-1*y", m).unwrap());
        let (l, r) = a.coassociativity(&Element::gen(Gen::Y)).unwrap();
        assert_eq!(l, r);
        assert_eq!(
            l,
            parse_tensor("y (x) 1 (x) 1 + x (x) y (x) 1 + x (x) x (x) y", m).unwrap()
        );
        let (al, ar) = a.antipode_images(&Element::gen(Gen::Y)).unwrap();
        assert!(al.is_zero() && ar.is_zero());
    }

    #[test]
    fn coaction_examples() {
        let rc = Coaction::new(Side::R, SP);
        let lc = Coaction::new(Side::L, SP);
        assert_eq!(
            rc.apply(&Element::gen(Gen::Dx)).unwrap(),
            parse_tensor("dx (x) x", SP).unwrap()
        );
        assert_eq!(
            lc.apply(&Element::gen(Gen::Dy)).unwrap(),
            parse_tensor("x (x) dy", SP).unwrap()
        );
        assert_eq!(
            rc.apply(&Element::gen(Gen::D2y)).unwrap(),
            parse_tensor("d2y (x) 1 + d2x (x) y", SP).unwrap()
        );
        let rel = parse_element("x*dx - q^-1*dx*x", SP).unwrap();
        assert!(rc.apply(&rel).unwrap().is_zero());
    }

    #[test]
    fn omega_needs_the_graded_rule() {
        let tw = costructure_omega(SP, TensorRule::Twisted);
        assert!(tw.hopf_axiom_check(2).unwrap().all_pass());
        let un = costructure_omega(SP, TensorRule::Untwisted);
        let rep = un.hopf_axiom_check(2).unwrap();
        assert!(!rep.item("delta[theta^3]").unwrap().passed());
        assert!(!rep.item("delta[phi*theta]").unwrap().passed());
    }

    #[test]
    fn small_costructures_pass() {
        for c in [
            costructure_coordinate(SP),
            costructure_partial(SP),
            costructure_dual(SP, BCoproduct::L),
        ] {
            let rep = c.hopf_axiom_check(3).unwrap();
            assert!(rep.all_pass(), "{}", rep);
        }
        let op = costructure_operator(SP).unwrap();
        let rep = op.hopf_axiom_check(3).unwrap();
        assert!(rep.all_pass(), "{}", rep);
    }

    #[test]
    fn solution_matches_covariant_coefficients() {
        let sol = solve_coefficients(QMode::Symbolic, &[]).unwrap();
        assert_eq!(
            sol.coefficients,
            Some(CalcCoefficients::covariant(QMode::Symbolic))
        );
        let c = sol.coefficients.unwrap();
        assert_eq!(c.k1(), sc(QMode::Symbolic, "j - q"));
    }

    #[test]
    fn inconsistent_override_reports_residual() {
        let sol = solve_coefficients(QMode::Symbolic, &[("F".into(), Scalar::one())]).unwrap();
        assert!(sol.coefficients.is_none());
        assert!(!sol.inconsistent.is_empty());
    }

    #[test]
    fn inhomogeneous_terms_match_the_closed_forms() {
        // random rational coefficients, not just the solution
        let m = QMode::Symbolic;
        let c = CalcCoefficients {
            a: sc(m, "2"),
            b: sc(m, "3/2"),
            c11: sc(m, "5"),
            c12: sc(m, "-7"),
            c21: sc(m, "1/3"),
            c22: sc(m, "q"),
            f: sc(m, "2*q^2"),
        };
        let got = inhomogeneous_terms(&c, m).unwrap();
        assert_eq!(got[0], &(&c.a * &Scalar::j()) - &Scalar::one());
        assert_eq!(got[1], c.k1());
        assert_eq!(got[2], c.k2());
        assert_eq!(got[3], &(&c.b * &Scalar::j()) - &Scalar::one());
    }
}
