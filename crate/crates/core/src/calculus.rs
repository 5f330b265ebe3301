//! The Z₃-graded exterior differential, the invariant one-forms θ, φ and the
//! identity suites built on them.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::freealg::{Element, Gen, Word};
use crate::parse::parse_element_with;
use crate::report::Report;
use crate::rewrite::{build_main_system, RewriteSystem};
use crate::scalars::{Cyclo, QMode, Scalar};

/// `d` on a single generator.
pub fn d_gen(g: Gen) -> Result<Element> {
    Ok(match g {
        Gen::X => Element::gen(Gen::Dx),
        Gen::Y => Element::gen(Gen::Dy),
        Gen::Dx => Element::gen(Gen::D2x),
        Gen::Dy => Element::gen(Gen::D2y),
        Gen::D2x | Gen::D2y => Element::zero(),
        Gen::XInv => -&Element::letters(&[Gen::XInv, Gen::Dx, Gen::XInv]),
        other => return Err(Error::Unsupported(format!("d is not defined on `{other}`"))),
    })
}

/// Graded Leibniz expansion, `d(fg) = (df)g + j^{deg f} f(dg)`, unreduced.
pub fn d_unreduced(e: &Element) -> Result<Element> {
    let mut out = Element::zero();
    for (w, c) in e.terms() {
        let letters = w.letters();
        let mut grade = 0u32;
        for (k, &g) in letters.iter().enumerate() {
            let dg = d_gen(g)?;
            if !dg.is_zero() {
                let coeff = c * &Scalar::from(Cyclo::j_pow(grade as i64));
                let prefix = Element::term(Word::from_slice(&letters[..k]), coeff);
                let suffix = Element::letters(&letters[k + 1..]);
                out = &out + &prefix.mul_unchecked(&dg).mul_unchecked(&suffix);
            }
            grade += g.grade() as u32;
        }
    }
    Ok(out)
}

pub fn d(sys: &RewriteSystem, e: &Element) -> Result<Element> {
    sys.normalize(&d_unreduced(e)?)
}

pub fn d_times(sys: &RewriteSystem, e: &Element, k: usize) -> Result<Element> {
    let mut cur = sys.normalize(e)?;
    for _ in 0..k {
        cur = d(sys, &cur)?;
    }
    Ok(cur)
}

/// `θ = dx x⁻¹`.
pub fn theta(sys: &RewriteSystem) -> Result<Element> {
    sys.normalize(&Element::letters(&[Gen::Dx, Gen::XInv]))
}

/// `φ = dy − dx x⁻¹ y`.
pub fn phi(sys: &RewriteSystem) -> Result<Element> {
    sys.normalize(&(&Element::gen(Gen::Dy) - &Element::letters(&[Gen::Dx, Gen::XInv, Gen::Y])))
}

/// `normalize(lhs − rhs)`.
pub fn verify_identity(sys: &RewriteSystem, lhs: &Element, rhs: &Element) -> Result<Element> {
    sys.normalize(&(lhs - rhs))
}

/// θ, φ and their differentials as named main-alphabet elements.
pub fn forms_env(sys: &RewriteSystem) -> Result<HashMap<String, Element>> {
    let th = theta(sys)?;
    let ph = phi(sys)?;
    let dth = d(sys, &th)?;
    let dph = d(sys, &ph)?;
    let mut env = HashMap::new();
    env.insert("d2theta".to_string(), d(sys, &dth)?);
    env.insert("d2phi".to_string(), d(sys, &dph)?);
    env.insert("theta".to_string(), th);
    env.insert("phi".to_string(), ph);
    env.insert("dtheta".to_string(), dth);
    env.insert("dphi".to_string(), dph);
    Ok(env)
}

/// Checks the textual identity `lhs = rhs` with `env` substituted.
pub(crate) fn check_text(
    report: &mut Report,
    sys: &RewriteSystem,
    env: &HashMap<String, Element>,
    id: &str,
    lhs: &str,
    rhs: &str,
) -> Result<()> {
    let lookup = |s: &str| env.get(s).cloned();
    let l = parse_element_with(lhs, sys.mode(), &lookup)?;
    let r = parse_element_with(rhs, sys.mode(), &lookup)?;
    let res = verify_identity(sys, &l, &r)?;
    report.zero(id, format!("{lhs} = {rhs}"), &res);
    Ok(())
}

/// Relations of θ, φ with coordinates, differentials and each other, checked
/// with θ, φ written out in the main alphabet.
pub fn suite_omega(sys: &RewriteSystem, max_deg: usize) -> Result<Report> {
    let env = forms_env(sys)?;
    let mut r = Report::new("omega");
    let rel: &[(&str, &str, &str)] = &[
        ("x.theta", "x*theta", "q^-1*theta*x"),
        ("y.theta", "y*theta", "q^-1*theta*y + (q^-1 - 1)*phi"),
        ("x.phi", "x*phi", "phi*x"),
        ("y.phi", "y*phi", "phi*y"),
        ("theta.dx", "theta*dx", "q*dx*theta"),
        ("phi.dx", "phi*dx", "dx*phi"),
        ("theta.dy", "theta*dy", "q*dy*theta"),
        ("phi.dy", "phi*dy", "dy*phi"),
        ("theta.d2x", "theta*d2x", "q^2*d2x*theta"),
        ("theta.d2y", "theta*d2y", "q^2*d2y*theta"),
        ("phi.d2x", "phi*d2x", "q^-2*d2x*phi"),
        ("phi.d2y", "phi*d2y", "q^-2*d2y*phi"),
        ("theta.phi", "theta*phi", "phi*theta"),
        ("theta^3", "theta^3", "0"),
        ("phi^3", "phi^3", "0"),
        ("dx=theta.x", "dx", "theta*x"),
        ("dy=phi+theta.y", "dy", "phi + theta*y"),
    ];
    for (id, l, rhs) in rel {
        check_text(&mut r, sys, &env, id, l, rhs)?;
    }
    let q = |k: i64| sys.mode().q_pow(k as i32);
    let (th, ph) = (&env["theta"], &env["phi"]);
    let pairs: Vec<(i64, i64)> = (0..=max_deg as i64)
        .flat_map(|s| (0..=s).map(move |n| (s - n, n)))
        .collect();
    let items = pairs
        .par_iter()
        .map(|&(m, n)| -> Result<(String, Element)> {
            let f = Element::word(Word::monomial(m, n));
            let lhs = f.mul_unchecked(th);
            let mut rhs = th.mul_unchecked(&f).scale(&q(-(m + n)));
            if n > 0 {
                let g = Element::word(Word::monomial(m, n - 1));
                rhs = &rhs + &ph.mul_unchecked(&g).scale(&(&q(-n) - &Scalar::one()));
            }
            let res = verify_identity(sys, &lhs, &rhs)?;
            let res2 = verify_identity(sys, &f.mul_unchecked(ph), &ph.mul_unchecked(&f))?;
            Ok((format!("({m},{n})"), &res + &res2))
        })
        .collect::<Result<Vec<_>>>()?;
    for (mn, res) in items {
        r.zero(
            format!("monomial.theta{mn}"),
            format!("x^m*y^n*theta = q^-(m+n)*theta*x^m*y^n + (q^-n - 1)*phi*x^m*y^(n-1), x^m*y^n*phi = phi*x^m*y^n at (m,n) = {mn}"),
            &res,
        );
    }
    Ok(r)
}

/// The two-form identities for dθ, dφ and their differentials.
pub fn suite_cartan_maurer(sys: &RewriteSystem) -> Result<Report> {
    let env = forms_env(sys)?;
    let mut r = Report::new("cartan-maurer");
    let rel: &[(&str, &str, &str)] = &[
        ("dtheta", "dtheta", "d2x*x^-1 - j*theta^2"),
        ("dphi", "dphi", "d2y - d2x*x^-1*y - j*theta*phi"),
        ("theta.dtheta", "theta*dtheta", "q^-2*dtheta*theta"),
        (
            "theta.dphi",
            "theta*dphi",
            "q^2*dphi*theta + (q - q^-1)*dtheta*phi + (q^-1 - q)*theta^2*phi",
        ),
        (
            "phi.dtheta",
            "phi*dtheta",
            "q^-2*dtheta*phi + (q^-1 - q)*theta^2*phi",
        ),
        (
            "phi.dphi",
            "phi*dphi",
            "q^-2*dphi*phi + (q^-1 - q)*theta*phi^2",
        ),
        ("d2theta", "d2theta", "0"),
        (
            "d2phi",
            "d2phi",
            "j*dtheta*phi - j*dphi*theta - j*theta^2*phi",
        ),
    ];
    for (id, l, rhs) in rel {
        check_text(&mut r, sys, &env, id, l, rhs)?;
    }
    Ok(r)
}

/// Relations among `z = x + i y`, `z̄` and their differentials.
pub fn suite_complex(sys: &RewriteSystem) -> Result<Report> {
    let env = HashMap::new();
    let mut r = Report::new("complex");
    let rel: &[(&str, &str, &str)] = &[
        ("z.dz", "z*dz", "q^-1*dz*z"),
        ("zbar.dzbar", "zbar*dzbar", "q^-1*dzbar*zbar"),
        ("z.d2z", "z*d2z", "q^-1*d2z*z"),
        ("zbar.d2zbar", "zbar*d2zbar", "q^-1*d2zbar*zbar"),
        ("dz.d2z", "dz*d2z", "q^-2*d2z*dz"),
        ("dzbar.d2zbar", "dzbar*d2zbar", "q^-2*d2zbar*dzbar"),
        ("dz^3", "dz^3", "0"),
        ("dzbar^3", "dzbar^3", "0"),
    ];
    for (id, l, rhs) in rel {
        check_text(&mut r, sys, &env, id, l, rhs)?;
    }
    let z3 = sys.normalize(&parse_element_with("z^3", sys.mode(), &|_| None)?)?;
    r.record("z^3", "z^3 != 0", !z3.is_zero(), z3.to_string());
    Ok(r)
}

/// All words of length `1..=max_len` over `letters`.
pub fn words_over(letters: &[Gen], max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for w in &layer {
            for &g in letters {
                next.push(w.concat(&Word::from_slice(&[g])));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub(crate) fn random_cyclo(rng: &mut impl Rng, bound: i64) -> Cyclo {
    let mut c = || BigRational::from_integer(BigInt::from(rng.gen_range(-bound..=bound)));
    Cyclo::from_display_coords(c(), c(), c(), c())
}

/// A random combination of up to `terms` random words over `letters`.
pub fn random_element(
    rng: &mut impl Rng,
    letters: &[Gen],
    max_len: usize,
    terms: usize,
) -> Element {
    let mut e = Element::zero();
    for _ in 0..rng.gen_range(1..=terms) {
        let len = rng.gen_range(0..=max_len);
        let w: Vec<Gen> = (0..len)
            .map(|_| letters[rng.gen_range(0..letters.len())])
            .collect();
        e.add_term(Word::from_slice(&w), &Scalar::from(random_cyclo(rng, 3)));
    }
    e
}

const COORDS: [Gen; 3] = [Gen::X, Gen::XInv, Gen::Y];

fn first_failure(results: Vec<(String, Element)>) -> (usize, String) {
    let fails: Vec<_> = results.into_iter().filter(|(_, e)| !e.is_zero()).collect();
    let msg = fails
        .first()
        .map(|(w, e)| format!("{w}: {e}"))
        .unwrap_or_else(|| "0".into());
    (fails.len(), msg)
}

/// `d³ = 0` on every coordinate word up to `max_deg` and on random elements.
pub fn d_cubed_zero(
    sys: &RewriteSystem,
    max_deg: usize,
    samples: usize,
    seed: u64,
) -> Result<Report> {
    let mut r = Report::new("d-cubed");
    for g in COORDS {
        let res = d_times(sys, &Element::gen(g), 3)?;
        r.zero(format!("d^3({g})"), format!("d^3({g}) = 0"), &res);
    }
    let words = words_over(&COORDS, max_deg);
    let results = words
        .par_iter()
        .map(|w| Ok((w.to_string(), d_times(sys, &Element::word(w.clone()), 3)?)))
        .collect::<Result<Vec<_>>>()?;
    let n = results.len();
    let (bad, msg) = first_failure(results);
    r.record(
        "d^3(words)",
        format!("d^3(w) = 0 for all {n} coordinate words of length <= {max_deg}"),
        bad == 0,
        msg,
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elems: Vec<Element> = (0..samples)
        .map(|_| random_element(&mut rng, &COORDS, max_deg.min(4), 4))
        .collect();
    let results = elems
        .par_iter()
        .map(|e| Ok((e.to_string(), d_times(sys, e, 3)?)))
        .collect::<Result<Vec<_>>>()?;
    let (bad, msg) = first_failure(results);
    r.record(
        "d^3(random)",
        format!("d^3(f) = 0 for {samples} random elements"),
        bad == 0,
        msg,
    );
    Ok(r)
}

/// Symbolic `d³(xy)`: nonzero for free `q`, every coefficient vanishing at
/// `q = j` and none at the other root `q = j²` of `q² + q + 1`.
pub fn d_cubed_symbolic() -> Result<(Element, bool, bool)> {
    let sys = build_main_system(QMode::Symbolic);
    let res = d_times(&sys, &Element::letters(&[Gen::X, Gen::Y]), 3)?;
    let at_j = res
        .terms()
        .values()
        .all(|c| c.eval(&Cyclo::j()).map(|v| v.is_zero()).unwrap_or(false));
    let at_j2 = res.terms().values().all(|c| {
        c.eval(&Cyclo::j_pow(2))
            .map(|v| v.is_zero())
            .unwrap_or(false)
    });
    Ok((res, at_j, at_j2))
}

/// Leibniz law on word pairs, and `d` annihilating every relation.
pub fn leibniz_suite(sys: &RewriteSystem, max_len: usize) -> Result<Report> {
    let mut r = Report::new("leibniz");
    let words = {
        let mut w = vec![Word::empty()];
        w.extend(words_over(sys.ranking(), max_len));
        w
    };
    let pairs: Vec<(&Word, &Word)> = words
        .iter()
        .flat_map(|u| {
            words
                .iter()
                .filter(move |v| u.len() + v.len() <= max_len)
                .map(move |v| (u, v))
        })
        .collect();
    let results = pairs
        .par_iter()
        .map(|(u, v)| -> Result<(String, Element)> {
            let uv = Element::word(u.concat(v));
            let lhs = d(sys, &uv)?;
            let du = d(sys, &Element::word((*u).clone()))?;
            let dv = d(sys, &Element::word((*v).clone()))?;
            let twist = Scalar::from(Cyclo::j_pow(u.grade() as i64));
            let rhs = &du.mul_unchecked(&Element::word((*v).clone()))
                + &Element::term((*u).clone(), twist).mul_unchecked(&dv);
            Ok((format!("{u} | {v}"), verify_identity(sys, &lhs, &rhs)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = results.len();
    let (bad, msg) = first_failure(results);
    r.record(
        "leibniz",
        format!("d(uv) = d(u)v + j^deg(u) u d(v) on {n} word pairs, |u|+|v| <= {max_len}"),
        bad == 0,
        msg,
    );

    for rule in sys.rules() {
        let rel = &Element::word(rule.lhs.clone()) - &rule.rhs;
        let res = d(sys, &rel)?;
        r.zero(
            format!("d[{}]", rule.lhs),
            format!("d({} - ({})) = 0", rule.lhs, rule.rhs),
            &res,
        );
    }
    for (&g, &k) in sys.caps() {
        let w = Element::word(Word::from_slice(&vec![g; k as usize + 1]));
        let res = d(sys, &w)?;
        r.zero(
            format!("d[{g}^{}]", k + 1),
            format!("d({g}^{}) = 0", k + 1),
            &res,
        );
    }
    Ok(r)
}

/// The calculus suite: `d³ = 0`, Leibniz, compatibility with the relations,
/// and the symbolic obstruction.
pub fn suite_calculus(
    sys: &RewriteSystem,
    max_deg: usize,
    samples: usize,
    seed: u64,
) -> Result<Report> {
    let mut r = Report::new("calculus");
    r.absorb(d_cubed_zero(sys, max_deg, samples, seed)?);
    r.absorb(leibniz_suite(sys, 4)?);
    let (res, at_j, at_j2) = d_cubed_symbolic()?;
    r.record(
        "d^3(x*y) symbolic",
        "d^3(x*y) != 0 for free q, vanishes at q = j (q*j^2 = 1 and q^2 + q + 1 = 0), not at q = j^2",
        !res.is_zero() && at_j && !at_j2,
        res.to_string(),
    );
    Ok(r)
}
