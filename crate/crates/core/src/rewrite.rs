//! Ordered string-rewriting systems presenting the quotient algebras, with
//! critical-pair confluence diagnostics.
//!
//! Words are compared length first, then lexicographically by generator rank.
//! That order is a monomial order, so every system whose rules strictly
//! decrease terminates.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::freealg::{Element, Family, Gen, TensorElement, Word, ALL_GENS};
use crate::scalars::{Cyclo, QMode, Scalar};

const NO_RANK: u8 = u8::MAX;
const DEFAULT_ITERATION_CAP: usize = 5_000_000;

/// Word encoded by generator rank, ordered length-then-lex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key(SmallVec<[u8; 16]>);

/// Overlap word with the (rule, position) of its two one-step reductions.
type CriticalPair = (SmallVec<[u8; 16]>, (usize, usize), (usize, usize));

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which redex `normalize` rewrites first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Leftmost,
    Rightmost,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Element,
}

#[derive(Clone, Debug)]
struct Compiled {
    lhs: SmallVec<[u8; 4]>,
    rhs: Vec<(Key, Scalar)>,
}

/// A ranked alphabet with a rule table and nilpotency caps.
#[derive(Clone, Debug)]
pub struct RewriteSystem {
    name: String,
    family: Family,
    mode: QMode,
    ranking: Vec<Gen>,
    rank: [u8; ALL_GENS.len()],
    rules: Vec<Rule>,
    caps: BTreeMap<Gen, u32>,
    compiled: Vec<Compiled>,
    by_first: Vec<Vec<usize>>,
    iteration_cap: usize,
}

/// A critical pair whose two reducts have different normal forms.
#[derive(Clone, Debug, PartialEq)]
pub struct Unjoinable {
    pub word: Word,
    pub left: Element,
    pub right: Element,
}

#[derive(Clone, Debug, Default)]
pub struct ConfluenceReport {
    pub system: String,
    pub critical_pairs: usize,
    pub unjoinable: Vec<Unjoinable>,
    pub words_checked: usize,
    /// Words whose leftmost and rightmost normal forms differ.
    pub strategy_mismatches: Vec<Unjoinable>,
    /// Out-of-order adjacent pairs with no rule.
    pub missing_rules: Vec<(Gen, Gen)>,
}

impl ConfluenceReport {
    pub fn is_confluent(&self) -> bool {
        self.unjoinable.is_empty()
            && self.strategy_mismatches.is_empty()
            && self.missing_rules.is_empty()
    }
}

type RhsSpec<'a> = &'a [(Scalar, &'a [Gen])];

impl RewriteSystem {
    /// An empty system over `ranking` (smallest letter first).
    pub fn new(name: &str, family: Family, mode: QMode, ranking: &[Gen]) -> Self {
        let mut rank = [NO_RANK; ALL_GENS.len()];
        for (r, &g) in ranking.iter().enumerate() {
            rank[g as usize] = r as u8;
        }
        RewriteSystem {
            name: name.to_string(),
            family,
            mode,
            ranking: ranking.to_vec(),
            rank,
            rules: Vec::new(),
            caps: BTreeMap::new(),
            compiled: Vec::new(),
            by_first: vec![Vec::new(); ranking.len()],
            iteration_cap: DEFAULT_ITERATION_CAP,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn mode(&self) -> QMode {
        self.mode
    }

    pub fn ranking(&self) -> &[Gen] {
        &self.ranking
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn caps(&self) -> &BTreeMap<Gen, u32> {
        &self.caps
    }

    pub fn with_iteration_cap(mut self, cap: usize) -> Self {
        self.iteration_cap = cap;
        self
    }

    pub fn contains(&self, g: Gen) -> bool {
        self.rank[g as usize] != NO_RANK
    }

    /// The rule with this left-hand side, if any.
    pub fn rule(&self, lhs: &[Gen]) -> Option<&Element> {
        self.rules
            .iter()
            .find(|r| r.lhs.letters() == lhs)
            .map(|r| &r.rhs)
    }

    fn key(&self, w: &Word) -> Result<Key> {
        w.letters()
            .iter()
            .map(|&g| {
                let r = self.rank[g as usize];
                if r == NO_RANK {
                    Err(Error::UnknownLetter {
                        letter: g.name().into(),
                        system: self.name.clone(),
                    })
                } else {
                    Ok(r)
                }
            })
            .collect::<Result<SmallVec<_>>>()
            .map(Key)
    }

    fn word(&self, k: &[u8]) -> Word {
        Word(k.iter().map(|&r| self.ranking[r as usize]).collect())
    }

    /// Compares two words in the reduction order.
    pub fn compare(&self, a: &Word, b: &Word) -> Result<Ordering> {
        Ok(self.key(a)?.cmp(&self.key(b)?))
    }

    /// Adds `lhs → rhs`; the right side must be strictly smaller.
    pub fn add_rule(&mut self, lhs: Word, rhs: Element) -> Result<()> {
        if lhs.is_empty() {
            return Err(Error::RuleTable("empty left-hand side".into()));
        }
        if self.rules.iter().any(|r| r.lhs == lhs)
            || self.compiled.iter().any(|c| self.word(&c.lhs) == lhs)
        {
            return Err(Error::DuplicateRule(lhs.to_string()));
        }
        let lk = self.key(&lhs)?;
        let rhs = rhs.map_scalars(|c| self.mode.reduce(c));
        let mut crhs = Vec::with_capacity(rhs.len());
        for (w, c) in rhs.terms() {
            let k = self.key(w)?;
            if k >= lk {
                return Err(Error::RuleNotDecreasing {
                    lhs: lhs.to_string(),
                    word: w.to_string(),
                });
            }
            crhs.push((k, c.clone()));
        }
        self.push_compiled(Compiled {
            lhs: lk.0.iter().copied().collect(),
            rhs: crhs,
        });
        self.rules.push(Rule { lhs, rhs });
        Ok(())
    }

    /// `g^(k+1) → 0`.
    pub fn add_cap(&mut self, g: Gen, k: u32) -> Result<()> {
        let lhs = Word::from_slice(&vec![g; k as usize + 1]);
        let lk = self.key(&lhs)?;
        if self.caps.insert(g, k).is_some() {
            return Err(Error::DuplicateRule(lhs.to_string()));
        }
        self.push_compiled(Compiled {
            lhs: lk.0.iter().copied().collect(),
            rhs: Vec::new(),
        });
        Ok(())
    }

    fn push_compiled(&mut self, c: Compiled) {
        let first = c.lhs[0] as usize;
        self.by_first[first].push(self.compiled.len());
        self.compiled.push(c);
    }

    fn spec_rule(&mut self, lhs: &[Gen], rhs: RhsSpec<'_>) {
        let e = Element::from_terms(rhs.iter().map(|(c, w)| (Word::from_slice(w), c.clone())));
        self.add_rule(Word::from_slice(lhs), e)
            .expect("built-in rule table is well formed");
    }

    /// Replaces the right-hand side of an existing rule.
    pub fn with_rule(&self, lhs: &[Gen], rhs: Element) -> Result<Self> {
        let mut out = RewriteSystem::new(&self.name, self.family, self.mode, &self.ranking);
        out.iteration_cap = self.iteration_cap;
        let mut found = false;
        for r in &self.rules {
            if r.lhs.letters() == lhs {
                out.add_rule(r.lhs.clone(), rhs.clone())?;
                found = true;
            } else {
                out.add_rule(r.lhs.clone(), r.rhs.clone())?;
            }
        }
        if !found {
            return Err(Error::RuleTable(format!(
                "no rule for `{}`",
                Word::from_slice(lhs)
            )));
        }
        for (&g, &k) in &self.caps {
            out.add_cap(g, k)?;
        }
        Ok(out)
    }

    fn find_redex(&self, k: &[u8], strategy: Strategy) -> Option<(usize, usize)> {
        let try_at = |i: usize| -> Option<(usize, usize)> {
            for &ri in &self.by_first[k[i] as usize] {
                let l = &self.compiled[ri].lhs;
                if k.len() - i >= l.len() && k[i..i + l.len()] == l[..] {
                    return Some((i, ri));
                }
            }
            None
        };
        match strategy {
            Strategy::Leftmost => (0..k.len()).find_map(try_at),
            Strategy::Rightmost => (0..k.len()).rev().find_map(try_at),
        }
    }

    fn splice(&self, k: &[u8], pos: usize, ri: usize, c: &Scalar, out: &mut Vec<(Key, Scalar)>) {
        let rule = &self.compiled[ri];
        for (rk, rc) in &rule.rhs {
            let mut nk: SmallVec<[u8; 16]> =
                SmallVec::with_capacity(k.len() - rule.lhs.len() + rk.0.len());
            nk.extend_from_slice(&k[..pos]);
            nk.extend_from_slice(&rk.0);
            nk.extend_from_slice(&k[pos + rule.lhs.len()..]);
            out.push((Key(nk), c * rc));
        }
    }

    pub fn normalize(&self, e: &Element) -> Result<Element> {
        self.normalize_with(e, Strategy::Leftmost)
    }

    /// Normal form. Words are processed largest first, so each word collects
    /// all its contributions before it is rewritten.
    pub fn normalize_with(&self, e: &Element, strategy: Strategy) -> Result<Element> {
        let mut queue: BTreeMap<Key, Scalar> = BTreeMap::new();
        for (w, c) in e.terms() {
            add_to(&mut queue, self.key(w)?, &self.mode.reduce(c));
        }
        let mut done: Vec<(Key, Scalar)> = Vec::new();
        let mut steps = 0usize;
        let mut recent: Vec<Key> = Vec::new();
        let mut buf = Vec::new();
        while let Some((k, c)) = queue.pop_last() {
            match self.find_redex(&k.0, strategy) {
                None => done.push((k, c)),
                Some((pos, ri)) => {
                    steps += 1;
                    if recent.len() == 8 {
                        recent.remove(0);
                    }
                    recent.push(k.clone());
                    if steps > self.iteration_cap {
                        let trace = recent
                            .iter()
                            .map(|k| self.word(&k.0).to_string())
                            .collect::<Vec<_>>()
                            .join(" -> ");
                        return Err(Error::NonTermination { steps, trace });
                    }
                    buf.clear();
                    self.splice(&k.0, pos, ri, &c, &mut buf);
                    for (nk, nc) in buf.drain(..) {
                        add_to(&mut queue, nk, &nc);
                    }
                }
            }
        }
        Ok(Element::from_terms(
            done.into_iter().map(|(k, c)| (self.word(&k.0), c)),
        ))
    }

    pub fn normalize_word(&self, w: &Word) -> Result<Element> {
        self.normalize(&Element::word(w.clone()))
    }

    /// Whether no rule applies anywhere in `w`.
    pub fn is_normal(&self, w: &Word) -> Result<bool> {
        let k = self.key(w)?;
        Ok(self.find_redex(&k.0, Strategy::Leftmost).is_none())
    }

    fn rewrite_once(&self, k: &[u8], pos: usize, ri: usize) -> Element {
        let mut buf = Vec::new();
        self.splice(k, pos, ri, &Scalar::one(), &mut buf);
        Element::from_terms(buf.into_iter().map(|(k, c)| (self.word(&k.0), c)))
    }

    /// All overlaps and inclusions between rule left-hand sides.
    fn critical_pairs(&self) -> Vec<CriticalPair> {
        let mut out = Vec::new();
        for (i, r1) in self.compiled.iter().enumerate() {
            for (j, r2) in self.compiled.iter().enumerate() {
                let (l1, l2) = (&r1.lhs, &r2.lhs);
                for ov in 1..l1.len().min(l2.len()) {
                    if l1[l1.len() - ov..] == l2[..ov] {
                        let mut w: SmallVec<[u8; 16]> = l1.iter().copied().collect();
                        w.extend_from_slice(&l2[ov..]);
                        out.push((w, (0, i), (l1.len() - ov, j)));
                    }
                }
                if i != j && l2.len() <= l1.len() {
                    for p in 0..=l1.len() - l2.len() {
                        if l1[p..p + l2.len()] == l2[..] {
                            out.push((l1.iter().copied().collect(), (0, i), (p, j)));
                        }
                    }
                }
            }
        }
        out
    }

    /// Out-of-order adjacent pairs of letters no rule touches.
    pub fn missing_rules(&self) -> Vec<(Gen, Gen)> {
        let unary: Vec<u8> = self
            .compiled
            .iter()
            .filter(|c| c.lhs.len() == 1)
            .map(|c| c.lhs[0])
            .collect();
        let mut out = Vec::new();
        let n = self.ranking.len() as u8;
        for a in 0..n {
            for b in 0..a {
                if unary.contains(&a) || unary.contains(&b) {
                    continue;
                }
                let covered = self
                    .compiled
                    .iter()
                    .any(|c| c.lhs.len() == 2 && c.lhs[0] == a && c.lhs[1] == b);
                if !covered {
                    out.push((self.ranking[a as usize], self.ranking[b as usize]));
                }
            }
        }
        out
    }

    /// Joins every critical pair, then compares leftmost and rightmost
    /// normal forms on all words of length up to `max_len`.
    pub fn check_local_confluence(&self, max_len: usize) -> Result<ConfluenceReport> {
        let pairs = self.critical_pairs();
        let unjoinable = pairs
            .par_iter()
            .map(|(w, (p1, r1), (p2, r2))| -> Result<Option<Unjoinable>> {
                let left = self.normalize(&self.rewrite_once(w, *p1, *r1))?;
                let right = self.normalize(&self.rewrite_once(w, *p2, *r2))?;
                Ok((left != right).then(|| Unjoinable {
                    word: self.word(w),
                    left,
                    right,
                }))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();

        let words = all_words(self.ranking.len(), max_len);
        let strategy_mismatches = words
            .par_iter()
            .map(|k| -> Result<Option<Unjoinable>> {
                let w = Element::word(self.word(k));
                let left = self.normalize_with(&w, Strategy::Leftmost)?;
                let right = self.normalize_with(&w, Strategy::Rightmost)?;
                Ok((left != right).then(|| Unjoinable {
                    word: self.word(k),
                    left,
                    right,
                }))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();

        Ok(ConfluenceReport {
            system: self.name.clone(),
            critical_pairs: pairs.len(),
            unjoinable,
            words_checked: words.len(),
            strategy_mismatches,
            missing_rules: self.missing_rules(),
        })
    }

    /// Normalizes leg `k` of every term with `systems[k]`.
    pub fn normalize_tensor(
        systems: &[&RewriteSystem],
        t: &TensorElement,
    ) -> Result<TensorElement> {
        if systems.len() != t.arity() {
            return Err(Error::ArityMismatch {
                left: systems.len(),
                right: t.arity(),
            });
        }
        let mut cache: Vec<HashMap<Word, Element>> = vec![HashMap::new(); t.arity()];
        t.map_legs(|k, w| {
            if let Some(e) = cache[k].get(w) {
                return Ok(e.clone());
            }
            let e = systems[k].normalize_word(w)?;
            cache[k].insert(w.clone(), e.clone());
            Ok(e)
        })
    }

    /// Normalizes every leg with this system.
    pub fn normalize_tensor_uniform(&self, t: &TensorElement) -> Result<TensorElement> {
        let systems = vec![self; t.arity()];
        Self::normalize_tensor(&systems, t)
    }
}

fn add_to(queue: &mut BTreeMap<Key, Scalar>, k: Key, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match queue.entry(k) {
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

fn all_words(n: usize, max_len: usize) -> Vec<SmallVec<[u8; 16]>> {
    let mut out = vec![SmallVec::new()];
    let mut layer: Vec<SmallVec<[u8; 16]>> = vec![SmallVec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * n);
        for w in &layer {
            for g in 0..n as u8 {
                let mut v = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

impl fmt::Display for RewriteSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "system {} ({})", self.name, self.mode.name())?;
        let ranking: Vec<_> = self.ranking.iter().map(|g| g.name()).collect();
        writeln!(f, "ranking: {}", ranking.join(" < "))?;
        for r in &self.rules {
            writeln!(f, "  {} -> {}", r.lhs, r.rhs)?;
        }
        for (g, k) in &self.caps {
            writeln!(f, "  {}^{} -> 0", g, k + 1)?;
        }
        Ok(())
    }
}

/// The ansatz coefficients of the first-order relations and of `dx dy = F dy dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct CalcCoefficients {
    pub a: Scalar,
    pub b: Scalar,
    pub c11: Scalar,
    pub c12: Scalar,
    pub c21: Scalar,
    pub c22: Scalar,
    pub f: Scalar,
}

impl CalcCoefficients {
    /// The covariant solution `A = B = q⁻¹, C₁₁ = 1, C₁₂ = 0, C₂₁ = q⁻¹,
    /// C₂₂ = q⁻¹ − 1, F = q`.
    pub fn covariant(mode: QMode) -> Self {
        let qi = mode.q_pow(-1);
        CalcCoefficients {
            a: qi.clone(),
            b: qi.clone(),
            c11: Scalar::one(),
            c12: Scalar::zero(),
            c21: qi.clone(),
            c22: &qi - &Scalar::one(),
            f: mode.q(),
        }
    }

    pub fn k1(&self) -> Scalar {
        let j = Scalar::j();
        &(&(&j * &self.c11) + &(&(&j * &self.c12) * &self.f)) - &self.f
    }

    pub fn k2(&self) -> Scalar {
        let j = Scalar::j();
        &(&(&(&j * &self.c21) * &self.f) + &(&j * &self.c22)) - &Scalar::one()
    }

    pub fn q1(&self) -> Result<Scalar> {
        let s = &(&self.c12 + &(&self.c11 * &self.f.inv()?)) + &Scalar::one();
        Ok(&(-&Scalar::from(Cyclo::j_pow(2))) * &s)
    }

    pub fn q2(&self) -> Scalar {
        let s = &(&self.c22 + &(&self.c21 * &self.f)) + &Scalar::one();
        &(-&Scalar::from(Cyclo::j_pow(2))) * &s
    }
}

/// Coordinate relations `y x = q⁻¹ x y` and the `x⁻¹` conjugates.
fn coordinate_rules(sys: &mut RewriteSystem, q: &impl Fn(i32) -> Scalar) {
    use Gen::*;
    let one = Scalar::one;
    sys.spec_rule(&[Y, X], &[(q(-1), &[X, Y])]);
    sys.spec_rule(&[Y, XInv], &[(q(1), &[XInv, Y])]);
    sys.spec_rule(&[X, XInv], &[(one(), &[])]);
    sys.spec_rule(&[XInv, X], &[(one(), &[])]);
}

/// The main relation table: coordinates, first and second order differentials.
pub fn build_main_system(mode: QMode) -> RewriteSystem {
    use Gen::*;
    let q = |k| mode.q_pow(k);
    let one = Scalar::one;
    let mut sys = RewriteSystem::new("main", Family::Main, mode, &[D2y, D2x, Dy, Dx, XInv, X, Y]);
    coordinate_rules(&mut sys, &q);
    sys.spec_rule(&[X, Dx], &[(q(-1), &[Dx, X])]);
    sys.spec_rule(&[X, Dy], &[(one(), &[Dy, X])]);
    sys.spec_rule(&[Y, Dx], &[(q(-1), &[Dx, Y]), (&q(-1) - &one(), &[Dy, X])]);
    sys.spec_rule(&[Y, Dy], &[(q(-1), &[Dy, Y])]);
    sys.spec_rule(&[Dx, Dy], &[(q(1), &[Dy, Dx])]);
    sys.spec_rule(&[X, D2x], &[(q(-1), &[D2x, X])]);
    sys.spec_rule(&[X, D2y], &[(one(), &[D2y, X])]);
    sys.spec_rule(
        &[Y, D2x],
        &[(q(-1), &[D2x, Y]), (&q(-1) - &one(), &[D2y, X])],
    );
    sys.spec_rule(&[Y, D2y], &[(q(-1), &[D2y, Y])]);
    sys.spec_rule(&[Dx, D2x], &[(q(-2), &[D2x, Dx])]);
    sys.spec_rule(&[Dx, D2y], &[(q(2), &[D2y, Dx])]);
    sys.spec_rule(
        &[Dy, D2x],
        &[(q(-2), &[D2x, Dy]), (&q(1) - &q(-1), &[D2y, Dx])],
    );
    sys.spec_rule(&[Dy, D2y], &[(q(-2), &[D2y, Dy])]);
    sys.spec_rule(&[D2x, D2y], &[(q(1), &[D2y, D2x])]);
    sys.spec_rule(&[XInv, Dx], &[(q(1), &[Dx, XInv])]);
    sys.spec_rule(&[XInv, Dy], &[(one(), &[Dy, XInv])]);
    sys.spec_rule(&[XInv, D2x], &[(q(1), &[D2x, XInv])]);
    sys.spec_rule(&[XInv, D2y], &[(one(), &[D2y, XInv])]);
    sys.add_cap(Dx, 2).expect("fresh cap");
    sys.add_cap(Dy, 2).expect("fresh cap");
    sys
}

/// The main table rebuilt from ansatz coefficients: first-order relations,
/// their homogeneous second-order copies, the first/second-order exchange
/// relations in terms of `Q₁, Q₂, K₁, K₂`, and `d²x d²y = F d²y d²x`.
pub fn build_main_system_from(c: &CalcCoefficients, mode: QMode) -> Result<RewriteSystem> {
    use Gen::*;
    let q = |k| mode.q_pow(k);
    let one = Scalar::one;
    let j = |k| Scalar::from(Cyclo::j_pow(k));
    let mut sys = RewriteSystem::new("main", Family::Main, mode, &[D2y, D2x, Dy, Dx, XInv, X, Y]);
    coordinate_rules(&mut sys, &q);
    for (da, db) in [(Dx, Dy), (D2x, D2y)] {
        sys.add_rule(
            Word::from_slice(&[X, da]),
            Element::term(Word::from_slice(&[da, X]), c.a.clone()),
        )?;
        sys.add_rule(
            Word::from_slice(&[X, db]),
            Element::from_terms([
                (Word::from_slice(&[db, X]), c.c11.clone()),
                (Word::from_slice(&[da, Y]), c.c12.clone()),
            ]),
        )?;
        sys.add_rule(
            Word::from_slice(&[Y, da]),
            Element::from_terms([
                (Word::from_slice(&[da, Y]), c.c21.clone()),
                (Word::from_slice(&[db, X]), c.c22.clone()),
            ]),
        )?;
        sys.add_rule(
            Word::from_slice(&[Y, db]),
            Element::term(Word::from_slice(&[db, Y]), c.b.clone()),
        )?;
    }
    sys.add_rule(
        Word::from_slice(&[Dx, Dy]),
        Element::term(Word::from_slice(&[Dy, Dx]), c.f.clone()),
    )?;
    let q1i = c.q1()?.inv()?;
    let q2i = c.q2().inv()?;
    let fi = c.f.inv()?;
    sys.spec_rule(&[Dx, D2x], &[(j(-2), &[D2x, Dx])]);
    sys.add_rule(
        Word::from_slice(&[Dx, D2y]),
        Element::from_terms([
            (Word::from_slice(&[D2y, Dx]), &(&j(2) * &c.c11) * &q1i),
            (
                Word::from_slice(&[D2x, Dy]),
                &(&(&j(2) * &c.c12) + &(&fi * &c.k1())) * &q1i,
            ),
        ]),
    )?;
    sys.add_rule(
        Word::from_slice(&[Dy, D2x]),
        Element::from_terms([
            (Word::from_slice(&[D2x, Dy]), &(&j(2) * &c.c21) * &q2i),
            (
                Word::from_slice(&[D2y, Dx]),
                &(&(&j(2) * &c.c22) + &c.k2()) * &q2i,
            ),
        ]),
    )?;
    sys.spec_rule(&[Dy, D2y], &[(j(-2), &[D2y, Dy])]);
    sys.add_rule(
        Word::from_slice(&[D2x, D2y]),
        Element::term(Word::from_slice(&[D2y, D2x]), c.f.clone()),
    )?;
    let ainv = c.a.inv()?;
    sys.add_rule(
        Word::from_slice(&[XInv, Dx]),
        Element::term(Word::from_slice(&[Dx, XInv]), ainv.clone()),
    )?;
    sys.spec_rule(&[XInv, Dy], &[(one(), &[Dy, XInv])]);
    sys.add_rule(
        Word::from_slice(&[XInv, D2x]),
        Element::term(Word::from_slice(&[D2x, XInv]), ainv),
    )?;
    sys.spec_rule(&[XInv, D2y], &[(one(), &[D2y, XInv])]);
    sys.add_cap(Dx, 2)?;
    sys.add_cap(Dy, 2)?;
    Ok(sys)
}

/// Coordinates with the invariant forms θ, φ.
pub fn build_omega_system(mode: QMode) -> RewriteSystem {
    use Gen::*;
    let q = |k| mode.q_pow(k);
    let one = Scalar::one;
    let mut sys = RewriteSystem::new("omega", Family::Omega, mode, &[Theta, Phi, XInv, X, Y]);
    coordinate_rules(&mut sys, &q);
    sys.spec_rule(&[X, Theta], &[(q(-1), &[Theta, X])]);
    sys.spec_rule(
        &[Y, Theta],
        &[(q(-1), &[Theta, Y]), (&q(-1) - &one(), &[Phi])],
    );
    sys.spec_rule(&[X, Phi], &[(one(), &[Phi, X])]);
    sys.spec_rule(&[Y, Phi], &[(one(), &[Phi, Y])]);
    sys.spec_rule(&[Phi, Theta], &[(one(), &[Theta, Phi])]);
    sys.spec_rule(&[XInv, Theta], &[(q(1), &[Theta, XInv])]);
    sys.spec_rule(&[XInv, Phi], &[(one(), &[Phi, XInv])]);
    sys.add_cap(Theta, 2).expect("fresh cap");
    sys.add_cap(Phi, 2).expect("fresh cap");
    sys
}

/// The extended quantum plane alone: `x, x⁻¹, y`.
pub fn build_coordinate_system(mode: QMode) -> RewriteSystem {
    use Gen::*;
    let q = |k| mode.q_pow(k);
    let mut sys = RewriteSystem::new("coordinate", Family::Main, mode, &[XInv, X, Y]);
    coordinate_rules(&mut sys, &q);
    sys
}

/// The quantum Lie algebra with `K = q^-N` adjoined and `H` eliminated through
/// `H = (1 − K)/(1 − q⁻¹)`. Needs `1 − q⁻¹` invertible, so specialized only.
pub fn build_operator_system(mode: QMode) -> Result<RewriteSystem> {
    use Gen::*;
    if mode == QMode::Symbolic {
        return Err(Error::NonUnit(format!(
            "{}",
            &Scalar::one() - &Scalar::q_pow(-1)
        )));
    }
    let q = |k| mode.q_pow(k);
    let one = Scalar::one;
    let mut sys = RewriteSystem::new("operator", Family::Operator, mode, &[OpX, K, KInv, H]);
    let d = (&one() - &q(-1)).specialize().inv()?;
    let d = Scalar::from(d);
    sys.spec_rule(&[H], &[(d.clone(), &[]), (-&d, &[K])]);
    sys.spec_rule(&[K, OpX], &[(q(1), &[OpX, K])]);
    sys.spec_rule(&[KInv, OpX], &[(q(-1), &[OpX, KInv])]);
    sys.spec_rule(&[K, KInv], &[(one(), &[])]);
    sys.spec_rule(&[KInv, K], &[(one(), &[])]);
    Ok(sys)
}

/// The quantum Lie algebra presented by its commutation relations alone,
/// without tying `H` to `K`. Valid for symbolic `q`.
pub fn build_operator_relations_system(mode: QMode) -> RewriteSystem {
    use Gen::*;
    let q = |k| mode.q_pow(k);
    let one = Scalar::one;
    let mut sys = RewriteSystem::new(
        "operator-relations",
        Family::Operator,
        mode,
        &[H, OpX, K, KInv],
    );
    sys.spec_rule(&[OpX, H], &[(q(-1), &[H, OpX]), (one(), &[OpX])]);
    sys.spec_rule(&[K, H], &[(one(), &[H, K])]);
    sys.spec_rule(&[KInv, H], &[(one(), &[H, KInv])]);
    sys.spec_rule(&[K, OpX], &[(q(1), &[OpX, K])]);
    sys.spec_rule(&[KInv, OpX], &[(q(-1), &[OpX, KInv])]);
    sys.spec_rule(&[K, KInv], &[(one(), &[])]);
    sys.spec_rule(&[KInv, K], &[(one(), &[])]);
    sys
}

/// Commuting partial derivatives with `∂x` invertible.
pub fn build_partial_system(mode: QMode) -> RewriteSystem {
    use Gen::*;
    let one = Scalar::one;
    let mut sys = RewriteSystem::new("partial", Family::Partial, mode, &[Day, Dax, DaxInv]);
    sys.spec_rule(&[Dax, Day], &[(one(), &[Day, Dax])]);
    sys.spec_rule(&[DaxInv, Day], &[(one(), &[Day, DaxInv])]);
    sys.spec_rule(&[Dax, DaxInv], &[(one(), &[])]);
    sys.spec_rule(&[DaxInv, Dax], &[(one(), &[])]);
    sys
}

/// The dual algebra in `A, B, L = q^A`.
pub fn build_dual_system(mode: QMode) -> RewriteSystem {
    use Gen::*;
    let q = |k| mode.q_pow(k);
    let one = Scalar::one;
    let mut sys = RewriteSystem::new("dual", Family::Dual, mode, &[B, A, L, LInv]);
    sys.spec_rule(&[A, B], &[(one(), &[B, A]), (one(), &[B])]);
    sys.spec_rule(&[L, B], &[(q(1), &[B, L])]);
    sys.spec_rule(&[LInv, B], &[(q(-1), &[B, LInv])]);
    sys.spec_rule(&[L, A], &[(one(), &[A, L])]);
    sys.spec_rule(&[LInv, A], &[(one(), &[A, LInv])]);
    sys.spec_rule(&[L, LInv], &[(one(), &[])]);
    sys.spec_rule(&[LInv, L], &[(one(), &[])]);
    sys
}

/// Every named system available in `mode`.
pub fn all_systems(mode: QMode) -> Vec<RewriteSystem> {
    let mut out = vec![
        build_main_system(mode),
        build_omega_system(mode),
        build_coordinate_system(mode),
    ];
    if let Ok(op) = build_operator_system(mode) {
        out.push(op);
    }
    out.push(build_operator_relations_system(mode));
    out.push(build_partial_system(mode));
    out.push(build_dual_system(mode));
    out
}

pub fn system_by_name(name: &str, mode: QMode) -> Result<RewriteSystem> {
    match name {
        "main" => Ok(build_main_system(mode)),
        "omega" => Ok(build_omega_system(mode)),
        "coordinate" => Ok(build_coordinate_system(mode)),
        "operator" => build_operator_system(mode),
        "operator-relations" => Ok(build_operator_relations_system(mode)),
        "partial" => Ok(build_partial_system(mode)),
        "dual" => Ok(build_dual_system(mode)),
        other => Err(Error::Unsupported(format!(
            "unknown rewrite system `{other}`"
        ))),
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
struct TermJson {
    coeff: String,
    word: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
struct RuleJson {
    lhs: Vec<String>,
    rhs: Vec<TermJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
struct TableJson {
    system: String,
    family: String,
    q_mode: QMode,
    ranking: Vec<String>,
    rules: Vec<RuleJson>,
    caps: BTreeMap<String, u32>,
}

fn names(w: &Word) -> Vec<String> {
    w.letters().iter().map(|g| g.name().to_string()).collect()
}

fn parse_names(v: &[String]) -> Result<Word> {
    v.iter()
        .map(|s| Gen::from_name(s).ok_or_else(|| Error::RuleTable(format!("unknown symbol `{s}`"))))
        .collect::<Result<SmallVec<_>>>()
        .map(Word)
}

impl RewriteSystem {
    pub fn to_json(&self) -> String {
        let t = TableJson {
            system: self.name.clone(),
            family: self.family.name().into(),
            q_mode: self.mode,
            ranking: self.ranking.iter().map(|g| g.name().to_string()).collect(),
            rules: self
                .rules
                .iter()
                .map(|r| RuleJson {
                    lhs: names(&r.lhs),
                    rhs: r
                        .rhs
                        .terms()
                        .iter()
                        .map(|(w, c)| TermJson {
                            coeff: c.to_string(),
                            word: names(w),
                        })
                        .collect(),
                })
                .collect(),
            caps: self
                .caps
                .iter()
                .map(|(g, k)| (g.name().to_string(), *k))
                .collect(),
        };
        serde_json::to_string_pretty(&t).expect("rule table serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: TableJson = serde_json::from_str(s).map_err(|e| Error::RuleTable(e.to_string()))?;
        let family = match t.family.as_str() {
            "main" => Family::Main,
            "omega" => Family::Omega,
            "operator" => Family::Operator,
            "partial" => Family::Partial,
            "dual" => Family::Dual,
            other => return Err(Error::RuleTable(format!("unknown family `{other}`"))),
        };
        let ranking = parse_names(&t.ranking)?;
        let mut sys = RewriteSystem::new(&t.system, family, t.q_mode, ranking.letters());
        for r in &t.rules {
            let lhs = parse_names(&r.lhs)?;
            let mut rhs = Element::zero();
            for term in &r.rhs {
                let c = crate::parse::parse_scalar(&term.coeff, t.q_mode)?;
                rhs.add_term(parse_names(&term.word)?, &c);
            }
            sys.add_rule(lhs, rhs)?;
        }
        for (g, k) in &t.caps {
            let g = Gen::from_name(g)
                .ok_or_else(|| Error::RuleTable(format!("unknown symbol `{g}`")))?;
            sys.add_cap(g, *k)?;
        }
        Ok(sys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Gen::*;

    fn w(gs: &[Gen]) -> Element {
        Element::letters(gs)
    }

    fn qs(mode: QMode, k: i32) -> Scalar {
        mode.q_pow(k)
    }

    #[test]
    fn rule_lookups() {
        for mode in [QMode::Symbolic, QMode::Specialized] {
            let sys = build_main_system(mode);
            let want = &w(&[Dx, Y]).scale(&qs(mode, -1))
                + &w(&[Dy, X]).scale(&(&qs(mode, -1) - &Scalar::one()));
            assert_eq!(sys.rule(&[Y, Dx]), Some(&want));
            let want = &w(&[D2x, Dy]).scale(&qs(mode, -2))
                + &w(&[D2y, Dx]).scale(&(&qs(mode, 1) - &qs(mode, -1)));
            assert_eq!(sys.rule(&[Dy, D2x]), Some(&want));
            assert_eq!(
                sys.rule(&[Y, XInv]),
                Some(&w(&[XInv, Y]).scale(&qs(mode, 1)))
            );
            let om = build_omega_system(mode);
            let want = &w(&[Theta, Y]).scale(&qs(mode, -1))
                + &w(&[Phi]).scale(&(&qs(mode, -1) - &Scalar::one()));
            assert_eq!(om.rule(&[Y, Theta]), Some(&want));
            assert_eq!(om.rule(&[Phi, Theta]), Some(&w(&[Theta, Phi])));
        }
    }

    #[test]
    fn normalize_examples() {
        let mode = QMode::Symbolic;
        let sys = build_main_system(mode);
        assert_eq!(
            sys.normalize(&w(&[Y, X])).unwrap(),
            w(&[X, Y]).scale(&qs(mode, -1))
        );
        assert!(sys.normalize(&w(&[Dx, Dx, Dx])).unwrap().is_zero());
        assert_eq!(sys.normalize(&w(&[X, XInv, Y])).unwrap(), w(&[Y]));
        // y(y dx) = q⁻² dx y y + q⁻¹(q⁻¹ − 1)(1 + q⁻¹) dy x y
        let want = &w(&[Dx, Y, Y]).scale(&qs(mode, -2))
            + &w(&[Dy, X, Y]).scale(&(&qs(mode, -3) - &qs(mode, -1)));
        let got = sys.normalize(&w(&[Y, Y, Dx])).unwrap();
        assert_eq!(got, want);
        assert_eq!(
            sys.normalize_with(&w(&[Y, Y, Dx]), Strategy::Rightmost)
                .unwrap(),
            want
        );
        let om = build_omega_system(QMode::Specialized);
        assert!(om.normalize(&w(&[Theta, Theta, Theta])).unwrap().is_zero());
    }

    #[test]
    fn y_xinv_rule_is_consistent() {
        // x (y x^-1) x reduces to x y either way.
        let mode = QMode::Symbolic;
        let sys = build_main_system(mode);
        let lhs = sys.normalize(&w(&[X, Y, XInv, X])).unwrap();
        assert_eq!(lhs, w(&[X, Y]));
        let via_rule = sys
            .normalize(&w(&[X, XInv, Y, X]).scale(&qs(mode, 1)))
            .unwrap();
        assert_eq!(via_rule, w(&[X, Y]));
    }

    #[test]
    fn non_decreasing_rule_rejected() {
        let mut sys = RewriteSystem::new("t", Family::Main, QMode::Specialized, &[X, Y]);
        let err = sys
            .add_rule(Word::from_slice(&[X, Y]), w(&[Y, X]))
            .unwrap_err();
        assert!(matches!(err, Error::RuleNotDecreasing { .. }));
        sys.add_rule(Word::from_slice(&[Y, X]), w(&[X, Y])).unwrap();
        let err = sys
            .add_rule(Word::from_slice(&[Y, X]), w(&[X, Y]))
            .unwrap_err();
        assert!(matches!(err, Error::DuplicateRule(_)));
    }

    #[test]
    fn unknown_letter_rejected() {
        let sys = build_main_system(QMode::Specialized);
        assert!(matches!(
            sys.normalize(&w(&[Theta])),
            Err(Error::UnknownLetter { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_trace() {
        let sys = build_main_system(QMode::Specialized).with_iteration_cap(3);
        match sys.normalize(&w(&[Y, Y, Y, X, X, X])) {
            Err(Error::NonTermination { steps, trace }) => {
                assert_eq!(steps, 4);
                assert!(trace.contains("y*y*y*x*x*x"));
            }
            other => panic!("expected non-termination, got {other:?}"),
        }
    }

    #[test]
    fn small_systems_are_confluent() {
        for sys in [
            build_coordinate_system(QMode::Symbolic),
            build_partial_system(QMode::Specialized),
            build_dual_system(QMode::Symbolic),
            build_operator_system(QMode::Specialized).unwrap(),
            build_operator_relations_system(QMode::Symbolic),
        ] {
            let rep = sys.check_local_confluence(4).unwrap();
            assert!(rep.is_confluent(), "{}: {:?}", sys.name(), rep);
        }
    }

    #[test]
    fn corrupted_table_is_not_confluent() {
        let mode = QMode::Specialized;
        let sys = build_main_system(mode);
        let bad = &w(&[Dx, Y]).scale(&qs(mode, 1))
            + &w(&[Dy, X]).scale(&(&qs(mode, -1) - &Scalar::one()));
        let bad = sys.with_rule(&[Y, Dx], bad).unwrap();
        let rep = bad.check_local_confluence(0).unwrap();
        assert!(!rep.unjoinable.is_empty());
    }

    #[test]
    fn operator_system_is_specialized_only() {
        assert!(matches!(
            build_operator_system(QMode::Symbolic),
            Err(Error::NonUnit(_))
        ));
    }

    #[test]
    fn covariant_coefficients_rebuild_the_table() {
        let mode = QMode::Specialized;
        let built = build_main_system_from(&CalcCoefficients::covariant(mode), mode).unwrap();
        let reference = build_main_system(mode);
        for r in reference.rules() {
            assert_eq!(built.rule(r.lhs.letters()), Some(&r.rhs), "rule {}", r.lhs);
        }
        assert_eq!(built.rules().len(), reference.rules().len());
    }

    #[test]
    fn json_round_trip_is_exact() {
        for mode in [QMode::Symbolic, QMode::Specialized] {
            for sys in all_systems(mode) {
                let s = sys.to_json();
                let back = RewriteSystem::from_json(&s).unwrap();
                assert_eq!(back.to_json(), s);
                assert_eq!(back.rules(), sys.rules());
                assert_eq!(back.caps(), sys.caps());
            }
        }
    }
}
