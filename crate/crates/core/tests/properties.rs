use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use qplane::calculus::d;
use qplane::parse::parse_element;
use qplane::rewrite::build_main_system;
use qplane::{Cyclo, Element, Gen, QMode, Scalar};

fn cyclo() -> impl Strategy<Value = Cyclo> {
    let r = (-12i64..=12, 1i64..=6)
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)));
    [r.clone(), r.clone(), r.clone(), r].prop_map(Cyclo::from_coords)
}

fn laurent() -> impl Strategy<Value = Scalar> {
    prop::collection::vec((cyclo(), -3i32..=3), 0..4).prop_map(|ts| {
        ts.into_iter()
            .fold(Scalar::zero(), |acc, (c, k)| &acc + &Scalar::monomial(c, k))
    })
}

const COORD: [Gen; 3] = [Gen::X, Gen::Y, Gen::XInv];
const ALL: [Gen; 7] = [
    Gen::X,
    Gen::Y,
    Gen::XInv,
    Gen::Dx,
    Gen::Dy,
    Gen::D2x,
    Gen::D2y,
];

fn word(letters: &'static [Gen], max: usize) -> impl Strategy<Value = Vec<Gen>> {
    prop::collection::vec(prop::sample::select(letters), 0..=max)
}

fn small_scalar() -> impl Strategy<Value = Scalar> {
    (-3i64..=3, 0i64..3).prop_map(|(n, k)| Scalar::from(Cyclo::from_int(n) * Cyclo::j_pow(k)))
}

/// A homogeneous element: words of one grade with small coefficients.
fn element(letters: &'static [Gen], max: usize) -> impl Strategy<Value = Element> {
    prop::collection::vec((small_scalar(), word(letters, max)), 1..4).prop_map(|ts| {
        let grade = |w: &[Gen]| Element::letters(w).grade_of().unwrap_or(0);
        let g0 = grade(&ts[0].1);
        ts.iter()
            .filter(|(_, w)| grade(w) == g0)
            .fold(Element::zero(), |acc, (c, w)| {
                &acc + &Element::letters(w).scale(c)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn field_axioms(a in cyclo(), b in cyclo(), c in cyclo()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn specialization_is_a_ring_map(a in laurent(), b in laurent()) {
        prop_assert_eq!((&a * &b).specialize(), &a.specialize() * &b.specialize());
        prop_assert_eq!((&a + &b).specialize(), &a.specialize() + &b.specialize());
        prop_assert_eq!(a.eval(&Cyclo::j()).unwrap(), a.specialize());
    }

    #[test]
    fn laurent_inverse_of_monomials(c in cyclo(), k in -4i32..=4) {
        prop_assume!(!c.is_zero());
        let m = Scalar::monomial(c, k);
        prop_assert!((&m * &m.inv().unwrap()).is_one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalize_is_idempotent_and_keeps_grade(e in element(&ALL, 6)) {
        for mode in [QMode::Specialized, QMode::Symbolic] {
            let sys = build_main_system(mode);
            let n = sys.normalize(&e).unwrap();
            prop_assert_eq!(sys.normalize(&n).unwrap(), n.clone());
            if !n.is_zero() {
                prop_assert_eq!(n.grade_of().unwrap(), e.grade_of().unwrap());
            }
        }
    }

    #[test]
    fn normalize_is_multiplicative(a in element(&ALL, 4), b in element(&ALL, 4)) {
        let sys = build_main_system(QMode::Specialized);
        let whole = sys.normalize(&(&a * &b)).unwrap();
        let parts = sys.normalize(&(&sys.normalize(&a).unwrap() * &sys.normalize(&b).unwrap())).unwrap();
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn graded_leibniz(a in element(&ALL, 3), b in element(&ALL, 3)) {
        let sys = build_main_system(QMode::Specialized);
        let lhs = d(&sys, &(&a * &b)).unwrap();
        let sign = Scalar::from(Cyclo::j_pow(a.grade_of().unwrap() as i64));
        let rhs = &(&d(&sys, &a).unwrap() * &b) + &(&a * &d(&sys, &b).unwrap()).scale(&sign);
        prop_assert!(sys.normalize(&(&lhs - &rhs)).unwrap().is_zero());
    }

    #[test]
    fn d_cubed_vanishes_on_coordinates(e in element(&COORD, 5)) {
        let sys = build_main_system(QMode::Specialized);
        let d3 = d(&sys, &d(&sys, &d(&sys, &e).unwrap()).unwrap()).unwrap();
        prop_assert!(d3.is_zero());
    }
}

#[test]
fn display_parse_round_trip_corpus() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;

    let mut runner = TestRunner::deterministic();
    let strat = element(&ALL, 5);
    let mut checked = 0;
    for k in 0..200 {
        let e = strat.new_tree(&mut runner).unwrap().current();
        for mode in [QMode::Specialized, QMode::Symbolic] {
            let sys = build_main_system(mode);
            // Symbolic coefficients put q into play.
            let e = if mode == QMode::Symbolic && k % 2 == 0 {
                e.scale(&mode.q_pow(k % 5 - 2))
            } else {
                e.clone()
            };
            let n = sys.normalize(&e).unwrap();
            let text = n.to_string();
            let back = parse_element(&text, mode).unwrap_or_else(|err| panic!("`{text}`: {err}"));
            assert_eq!(sys.normalize(&back).unwrap(), n, "round trip of `{text}`");
            checked += 1;
        }
    }
    assert_eq!(checked, 400);
}
