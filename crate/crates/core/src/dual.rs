//! The dual algebra in `A, B, q^±A`, its pairing with coordinate polynomials,
//! and the isomorphism with the quantum Lie algebra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::calculus::words_over;
use crate::error::{Error, Result};
use crate::freealg::{Element, Family, Gen, TensorElement, Word};
use crate::hopf::{
    costructure_coordinate, costructure_dual, costructure_operator, BCoproduct, Costructure,
};
use crate::report::Report;
use crate::rewrite::build_dual_system;
use crate::scalars::{QMode, Scalar};

/// Pairing of the dual algebra with the coordinate algebra, first tensor leg
/// against the first letter. `sigma` fixes `<q^A, x^m> = q^{sigma m}`.
#[derive(Clone, Debug)]
pub struct Pairing {
    pub mode: QMode,
    pub sigma: i32,
    coord: Costructure,
}

impl Pairing {
    pub fn new(mode: QMode, sigma: i32) -> Self {
        Pairing {
            mode,
            sigma,
            coord: costructure_coordinate(mode),
        }
    }

    fn exponents(w: &Word) -> Result<(i64, i64)> {
        w.coordinate_exponents()
            .ok_or_else(|| Error::Unsupported(format!("`{w}` is not a normal coordinate monomial")))
    }

    /// `<g, x^m y^n>` for a single letter.
    pub fn gen_pair(&self, g: Gen, m: i64, n: i64) -> Result<Scalar> {
        let s = match g {
            Gen::A if n == 0 => Scalar::from(m),
            Gen::B if n == 1 => Scalar::one(),
            Gen::L if n == 0 => self.mode.q_pow(self.sigma * m as i32),
            Gen::LInv if n == 0 => self.mode.q_pow(-self.sigma * m as i32),
            Gen::A | Gen::B | Gen::L | Gen::LInv => Scalar::zero(),
            other => {
                return Err(Error::UnknownLetter {
                    letter: other.to_string(),
                    system: "dual".into(),
                })
            }
        };
        Ok(s)
    }

    fn check_inputs(u: &Element, f: &Element) -> Result<()> {
        if !u.in_family(Family::Dual) {
            return Err(Error::Unsupported(format!(
                "`{u}` is not in the dual alphabet"
            )));
        }
        if f.terms()
            .keys()
            .any(|w| w.letters().iter().any(|g| !g.is_coordinate()))
        {
            return Err(Error::Unsupported(format!(
                "`{f}` is not a coordinate polynomial"
            )));
        }
        Ok(())
    }

    fn pair_word(&self, u: &[Gen], f: &Element) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        let Some((&g, rest)) = u.split_first() else {
            for (w, c) in f.terms() {
                if Self::exponents(w)?.1 == 0 {
                    acc = &acc + c;
                }
            }
            return Ok(acc);
        };
        if rest.is_empty() {
            for (w, c) in f.terms() {
                let (m, n) = Self::exponents(w)?;
                acc = &acc + &(c * &self.gen_pair(g, m, n)?);
            }
            return Ok(acc);
        }
        let df = self.coord.delta(f)?;
        for (legs, c) in df.terms() {
            let (m, n) = Self::exponents(&legs[0])?;
            let head = self.gen_pair(g, m, n)?;
            if head.is_zero() {
                continue;
            }
            let tail = self.pair_word(rest, &Element::word(legs[1].clone()))?;
            acc = &acc + &(&(c * &head) * &tail);
        }
        Ok(acc)
    }

    /// `<u, f>`, extended bilinearly.
    pub fn pair(&self, u: &Element, f: &Element) -> Result<Scalar> {
        Self::check_inputs(u, f)?;
        let f = self.coord.system.normalize(f)?;
        let mut acc = Scalar::zero();
        for (w, c) in u.terms() {
            acc = &acc + &(c * &self.pair_word(w.letters(), &f)?);
        }
        Ok(self.mode.reduce(&acc))
    }

    /// `<u, f>` through the full iterated coproduct, grown on the first or on
    /// the last leg.
    pub fn pair_iterated(&self, u: &Word, f: &Element, grow_first: bool) -> Result<Scalar> {
        Self::check_inputs(&Element::word(u.clone()), f)?;
        let k = u.len();
        if k == 0 {
            return self.pair(&Element::one(), f);
        }
        let mut t = TensorElement::from_elements(&[&self.coord.system.normalize(f)?]);
        for _ in 1..k {
            let leg = if grow_first { 0 } else { t.arity() - 1 };
            t = t.expand_leg(leg, |w| self.coord.delta(&Element::word(w.clone())))?;
            t = self.coord.system.normalize_tensor_uniform(&t)?;
        }
        let mut acc = Scalar::zero();
        for (legs, c) in t.terms() {
            let mut v = c.clone();
            for (g, w) in u.letters().iter().zip(legs) {
                let (m, n) = Self::exponents(w)?;
                v = &v * &self.gen_pair(*g, m, n)?;
                if v.is_zero() {
                    break;
                }
            }
            acc = &acc + &v;
        }
        Ok(self.mode.reduce(&acc))
    }
}

fn mono(m: i64, n: i64) -> Element {
    Element::word(Word::monomial(m, n))
}

fn record_sweep<T: Sync, F>(
    r: &mut Report,
    id: &str,
    identity: String,
    cases: &[T],
    f: F,
) -> Result<()>
where
    F: Fn(&T) -> Result<Option<String>> + Sync,
{
    let bad: Vec<String> = cases
        .par_iter()
        .map(&f)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let residual = bad
        .first()
        .map(|b| format!("{} failures; {b}", bad.len()))
        .unwrap_or_else(|| "0".into());
    r.record(
        id,
        format!("{identity} ({} cases)", cases.len()),
        bad.is_empty(),
        residual,
    );
    Ok(())
}

fn diff(lhs: Scalar, rhs: Scalar, at: impl FnOnce() -> String) -> Option<String> {
    (lhs != rhs).then(|| format!("{}: {lhs} != {rhs}", at()))
}

/// Coproduct duality `<g, f h> = <Δ(g), f ⊗ h>` for every generator, on all
/// monomial pairs with total degree up to `max_deg`.
fn coproduct_duality_failures(p: &Pairing, c: &Costructure, max_deg: i64) -> Result<Vec<String>> {
    let coord = &p.coord;
    let mut monos = Vec::new();
    for m in -2..=max_deg {
        for n in 0..=max_deg {
            if m.abs() + n <= max_deg {
                monos.push((m, n));
            }
        }
    }
    let pairs: Vec<_> = monos
        .iter()
        .flat_map(|a| monos.iter().map(move |b| (*a, *b)))
        .collect();
    let gens = [Gen::A, Gen::B, Gen::L, Gen::LInv];
    let bad = pairs
        .par_iter()
        .map(|&((m1, n1), (m2, n2))| -> Result<Option<String>> {
            if m1.abs() + n1 + m2.abs() + n2 > max_deg {
                return Ok(None);
            }
            let (f, h) = (mono(m1, n1), mono(m2, n2));
            let fh = coord.system.normalize(&f.mul_unchecked(&h))?;
            for g in gens {
                let lhs = p.pair(&Element::gen(g), &fh)?;
                let mut rhs = Scalar::zero();
                for (legs, k) in c.delta_gen(g)?.terms() {
                    let a = p.pair(&Element::word(legs[0].clone()), &f)?;
                    let b = p.pair(&Element::word(legs[1].clone()), &h)?;
                    rhs = &rhs + &(&(k * &a) * &b);
                }
                if let Some(s) = diff(lhs, p.mode.reduce(&rhs), || {
                    format!("{g} on x^{m1}y^{n1} (x) x^{m2}y^{n2}")
                }) {
                    return Ok(Some(s));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(bad.into_iter().flatten().collect())
}

/// Relation annihilation: every rule `lhs − rhs` of the dual presentation
/// pairs to zero with the monomial window.
fn relation_failures(p: &Pairing, max_total: i64) -> Result<Vec<String>> {
    let sys = build_dual_system(p.mode);
    let mut cases = Vec::new();
    for rule in sys.rules() {
        let rel = &Element::word(rule.lhs.clone()) - &rule.rhs;
        for m in -3..=max_total {
            for n in 0..=max_total {
                if m + n <= max_total {
                    cases.push((rule.lhs.to_string(), rel.clone(), m, n));
                }
            }
        }
    }
    let bad = cases
        .par_iter()
        .map(|(name, rel, m, n)| -> Result<Option<String>> {
            let v = p.pair(rel, &mono(*m, *n))?;
            Ok((!v.is_zero()).then(|| format!("{name} on x^{m}y^{n}: {v}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(bad.into_iter().flatten().collect())
}

/// The convention oracle: every sign `sigma` and both placements of the
/// grouplike in `Δ(B)`, tested against relation annihilation and coproduct
/// duality. Returns the passing combinations.
pub fn resolve_convention(mode: QMode, max_deg: i64) -> Result<Vec<(i32, BCoproduct)>> {
    let mut ok = Vec::new();
    for sigma in [1, -1] {
        let p = Pairing::new(mode, sigma);
        let rel_ok = relation_failures(&p, max_deg)?.is_empty();
        for b in [BCoproduct::L, BCoproduct::LInv] {
            let c = costructure_dual(mode, b);
            if rel_ok && coproduct_duality_failures(&p, &c, max_deg)?.is_empty() {
                ok.push((sigma, b));
            }
        }
    }
    Ok(ok)
}

fn dual_words(max_len: usize) -> Vec<Word> {
    let mut v = vec![Word::empty()];
    v.extend(words_over(&[Gen::A, Gen::B, Gen::L, Gen::LInv], max_len));
    v
}

fn random_dual_word(rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    let gens = [Gen::A, Gen::B, Gen::L, Gen::LInv];
    let len = rng.gen_range(0..=max_len);
    Word::from_slice(
        &(0..len)
            .map(|_| gens[rng.gen_range(0..4)])
            .collect::<Vec<_>>(),
    )
}

/// Pairing identities, with the convention fixed by the oracle.
pub fn suite_duality(mode: QMode, seed: u64) -> Result<Report> {
    let mut r = Report::new("duality");
    let found = resolve_convention(mode, 6)?;
    let chosen = (1, BCoproduct::LInv);
    r.record(
        "convention",
        "exactly one of sigma in {+1,-1} x Delta(B) in {B(x)q^A + 1(x)B, B(x)q^-A + 1(x)B} realizes the pairing: \
         <q^A, x^m> = q^m with Delta(B) = B (x) q^-A + 1 (x) B",
        found == vec![chosen],
        format!("{found:?}"),
    );
    let p = Pairing::new(mode, chosen.0);
    let cu = costructure_dual(mode, chosen.1);
    let ab = Element::letters(&[Gen::A, Gen::B]);
    let ba = Element::letters(&[Gen::B, Gen::A]);

    let window: Vec<(i64, i64)> = (0..=10)
        .flat_map(|m| (0..=3).map(move |n| (m, n)))
        .collect();
    record_sweep(
        &mut r,
        "AB",
        "<A B, x^m y^n> = (m + 1) delta(n,1), 0 <= m <= 10, 0 <= n <= 3".into(),
        &window,
        |&(m, n)| {
            let want = if n == 1 {
                Scalar::from(m + 1)
            } else {
                Scalar::zero()
            };
            Ok(diff(p.pair(&ab, &mono(m, n))?, want, || {
                format!("x^{m}y^{n}")
            }))
        },
    )?;
    record_sweep(
        &mut r,
        "BA",
        "<B A, x^m y^n> = m delta(n,1), 0 <= m <= 10, 0 <= n <= 3".into(),
        &window,
        |&(m, n)| {
            let want = if n == 1 {
                Scalar::from(m)
            } else {
                Scalar::zero()
            };
            Ok(diff(p.pair(&ba, &mono(m, n))?, want, || {
                format!("x^{m}y^{n}")
            }))
        },
    )?;
    let tri: Vec<(i64, i64)> = (0..=10)
        .flat_map(|m| (0..=10 - m).map(move |n| (m, n)))
        .collect();
    let bracket = &(&ab - &ba) - &Element::gen(Gen::B);
    record_sweep(
        &mut r,
        "AB-BA-B",
        "<A B - B A - B, x^m y^n> = 0, m + n <= 10".into(),
        &tri,
        |&(m, n)| {
            let v = p.pair(&bracket, &mono(m, n))?;
            Ok((!v.is_zero()).then(|| format!("x^{m}y^{n}: {v}")))
        },
    )?;
    let rel = relation_failures(&p, 8)?;
    r.record(
        "relations",
        "every defining relation of the dual algebra pairs to zero, -3 <= m, m + n <= 8",
        rel.is_empty(),
        rel.first().cloned().unwrap_or_else(|| "0".into()),
    );
    let cd = coproduct_duality_failures(&p, &cu, 6)?;
    r.record(
        "coproduct",
        "<g, f h> = <Delta(g), f (x) h> for g in A, B, q^A, q^-A on monomials of degree <= 6",
        cd.is_empty(),
        cd.first().cloned().unwrap_or_else(|| "0".into()),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<(Word, Word, i64, i64)> = (0..60)
        .map(|_| {
            let u = random_dual_word(&mut rng, 3);
            let v = random_dual_word(&mut rng, 3);
            (u, v, rng.gen_range(-2..=5), rng.gen_range(0..=3))
        })
        .collect();
    record_sweep(
        &mut r,
        "product",
        format!("<u v, f> = sum <u, f'> <v, f''> on random words of length <= 3 (seed {seed})"),
        &samples,
        |(u, v, m, n)| {
            let f = mono(*m, *n);
            let lhs = p.pair_iterated(&u.concat(v), &f, false)?;
            let mut rhs = Scalar::zero();
            for (legs, c) in p.coord.delta(&f)?.terms() {
                let a = p.pair_iterated(u, &Element::word(legs[0].clone()), true)?;
                let b = p.pair_iterated(v, &Element::word(legs[1].clone()), true)?;
                rhs = &rhs + &(&(c * &a) * &b);
            }
            Ok(diff(lhs, mode.reduce(&rhs), || {
                format!("u = {u}, v = {v}, f = x^{m}y^{n}")
            }))
        },
    )?;

    let words3: Vec<Word> = dual_words(3);
    let small: Vec<(Word, i64, i64)> = words3
        .iter()
        .flat_map(|w| [(-1, 2), (2, 1), (1, 0), (3, 2)].map(|(m, n)| (w.clone(), m, n)))
        .collect();
    record_sweep(
        &mut r,
        "coassociativity",
        "iterated coproduct grown on the first leg equals the one grown on the last leg inside the pairing".into(),
        &small,
        |(w, m, n)| {
            let f = mono(*m, *n);
            Ok(diff(p.pair_iterated(w, &f, true)?, p.pair_iterated(w, &f, false)?, || format!("{w} on x^{m}y^{n}")))
        },
    )?;
    let sys = build_dual_system(mode);
    let norm_cases: Vec<(Word, i64, i64)> = words3
        .iter()
        .flat_map(|w| {
            let mut v = Vec::new();
            for m in -2..=6 {
                for n in 0..=3 {
                    if m + n <= 8 {
                        v.push((w.clone(), m, n));
                    }
                }
            }
            v
        })
        .collect();
    record_sweep(
        &mut r,
        "well-defined",
        "<u, f> = <normalize(u), f> for |u| <= 3, m + n <= 8".into(),
        &norm_cases,
        |(w, m, n)| {
            let u = Element::word(w.clone());
            let f = mono(*m, *n);
            Ok(diff(
                p.pair(&u, &f)?,
                p.pair(&sys.normalize(&u)?, &f)?,
                || format!("{w} on x^{m}y^{n}"),
            ))
        },
    )?;
    record_sweep(
        &mut r,
        "counit",
        "<u, 1> = eps(u) for |u| <= 3".into(),
        &words3,
        |w| {
            let u = Element::word(w.clone());
            Ok(diff(p.pair(&u, &Element::one())?, cu.eps(&u)?, || {
                w.to_string()
            }))
        },
    )?;
    let gl: Vec<i64> = (-6..=6).collect();
    record_sweep(
        &mut r,
        "grouplike",
        "<q^A, x^m> = q^m, multiplicative in m".into(),
        &gl,
        |&m| {
            let v = p.pair(&Element::gen(Gen::L), &mono(m, 0))?;
            let prod = p.pair(&Element::gen(Gen::L), &mono(1, 0))?.pow(m)?;
            Ok(diff(v, prod, || format!("m = {m}")))
        },
    )?;

    let anti_words: Vec<Word> = dual_words(2);
    let anti: Vec<(Word, i64, i64)> = anti_words
        .iter()
        .flat_map(|w| {
            let mut v = Vec::new();
            for m in -3..=3 {
                for n in 0..=3 {
                    v.push((w.clone(), m, n));
                }
            }
            v
        })
        .collect();
    let coord = costructure_coordinate(mode);
    record_sweep(
        &mut r,
        "antipode",
        "<kappa(u), f> = <u, kappa(f)> for generators and words of length 2".into(),
        &anti,
        |(w, m, n)| {
            let u = Element::word(w.clone());
            let f = mono(*m, *n);
            let lhs = p.pair(&cu.kappa(&u)?, &f)?;
            let rhs = p.pair(&u, &coord.kappa(&f)?)?;
            Ok(diff(lhs, rhs, || format!("{w} on x^{m}y^{n}")))
        },
    )?;
    Ok(r)
}

/// `H = (1 − q^A)/(1 − q⁻¹)`, `X = B` inside the dual algebra, compared with
/// the quantum Lie algebra under `q^A ↔ q^-N`.
pub fn check_iso(mode: QMode) -> Result<Report> {
    use Gen::*;
    let mut r = Report::new("iso");
    let q = |k| mode.q_pow(k);
    let lit = costructure_dual(mode, BCoproduct::L);
    let sys = &lit.system;
    // D·H with D = 1 − q⁻¹, so every check is polynomial in q
    let den = &Scalar::one() - &q(-1);
    let dh = &Element::one() - &Element::gen(L);
    let xb = Element::gen(B);
    let rel = &(&xb.mul_unchecked(&dh) - &dh.mul_unchecked(&xb).scale(&q(-1))) - &xb.scale(&den);
    r.zero(
        "relation",
        "X H - q^-1 H X - X = 0 with H = (1 - q^A)/(1 - q^-1), X = B",
        &sys.normalize(&rel)?,
    );

    let delta_dh = lit.delta(&dh)?;
    let l_dh = TensorElement::from_elements(&[&Element::gen(L), &dh]);
    let want = TensorElement::from_elements(&[&dh, &Element::one()]).add(&l_dh)?;
    r.zero_tensor(
        "delta(H)",
        "Delta(H) = H (x) 1 + q^A (x) H",
        &delta_dh.sub(&want)?,
    );
    let eps = lit.eps(&dh)?;
    r.record("eps(H)", "eps(H) = 0", eps.is_zero(), eps.to_string());
    let kappa = lit.kappa(&dh)?;
    let want_k = sys.normalize(
        &Element::gen(LInv)
            .mul_unchecked(&dh)
            .scale(&-&Scalar::one()),
    )?;
    r.zero("kappa(H)", "kappa(H) = -q^-A H", &(&kappa - &want_k));
    let dx = lit.delta(&xb)?;
    // X ⊗ 1 + 1 ⊗ X + (q⁻¹ − 1) X ⊗ H, with (q⁻¹ − 1)H = −D·H
    let want_x = TensorElement::from_elements(&[&xb, &Element::one()])
        .add(&TensorElement::from_elements(&[&Element::one(), &xb]))?
        .sub(&TensorElement::from_elements(&[&xb, &dh]))?;
    r.zero_tensor(
        "delta(X)",
        "Delta(X) = X (x) 1 + 1 (x) X + (q^-1 - 1) X (x) H",
        &sys.normalize_tensor_uniform(&dx.sub(&want_x)?)?,
    );
    let kx = lit.kappa(&xb)?;
    r.zero(
        "kappa(X)",
        "kappa(X) = -X q^-A",
        &(&kx + &Element::letters(&[B, LInv])),
    );

    if mode == QMode::Specialized {
        let op = costructure_operator(mode)?;
        let to_op = |e: &Element| {
            e.substitute(|g| match g {
                B => Some(Element::gen(OpX)),
                L => Some(Element::gen(K)),
                LInv => Some(Element::gen(KInv)),
                _ => None,
            })
        };
        for rule in sys
            .rules()
            .iter()
            .filter(|rule| !rule.lhs.letters().contains(&A))
        {
            let rel = &Element::word(rule.lhs.clone()) - &rule.rhs;
            r.zero(
                format!("dictionary[{}]", rule.lhs),
                format!("{} = {} holds among X, q^-N", rule.lhs, rule.rhs),
                &op.system.normalize(&to_op(&rel))?,
            );
        }
        for g in [B, L, LInv] {
            let e = Element::gen(g);
            let img = to_op(&e);
            let dd = lit
                .delta(&e)?
                .map_legs(|_, w| Ok(to_op(&Element::word(w.clone()))))?;
            r.zero_tensor(
                format!("dictionary delta({g})"),
                format!("Delta({g}) matches Delta({img})"),
                &op.system
                    .normalize_tensor_uniform(&dd.sub(&op.delta(&img)?)?)?,
            );
            let ed = &lit.eps(&e)? - &op.eps(&img)?;
            r.record(
                format!("dictionary eps({g})"),
                format!("eps({g}) = eps({img})"),
                ed.is_zero(),
                ed.to_string(),
            );
            r.zero(
                format!("dictionary kappa({g})"),
                format!("kappa({g}) matches kappa({img})"),
                &op.system
                    .normalize(&(&to_op(&lit.kappa(&e)?) - &op.kappa(&img)?))?,
            );
        }
        let h_op = op.system.normalize(&Element::gen(H))?;
        let h_dual = op
            .system
            .normalize(&to_op(&dh).scale(&Scalar::from(den.specialize().inv()?)))?;
        r.zero(
            "dictionary H",
            "(1 - q^A)/(1 - q^-1) maps to H",
            &(&h_op - &h_dual),
        );
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_element;

    const SY: QMode = QMode::Symbolic;

    fn e(s: &str) -> Element {
        parse_element(s, SY).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let p = Pairing::new(SY, 1);
        assert_eq!(p.pair(&e("A"), &e("x^3")).unwrap(), Scalar::from(3));
        assert_eq!(p.pair(&e("A*B"), &e("x*y")).unwrap(), Scalar::from(2));
        assert_eq!(p.pair(&e("B*A"), &e("x*y")).unwrap(), Scalar::one());
        assert_eq!(p.pair(&e("B"), &e("y*x")).unwrap(), Scalar::q_pow(-1));
        assert!(p.pair(&e("dx"), &e("x")).is_err());
        assert!(p.pair(&e("A"), &e("dx")).is_err());
    }

    #[test]
    fn convention_is_unique() {
        let found = resolve_convention(SY, 4).unwrap();
        assert_eq!(found, vec![(1, BCoproduct::LInv)]);
    }

    #[test]
    fn iso_passes_symbolically() {
        let r = check_iso(SY).unwrap();
        assert!(r.all_pass(), "{r}");
    }
}
