//! Noncommutative polynomials over the two-letter alphabet `{a, a*}`,
//! their commutative symbols, shift expansions and normal ordering.
//!
//! Values are plain coefficient maps with a deterministic (lexicographic,
//! `a < a*`) key order. Zero coefficients are never stored; pruning is
//! exact, no epsilon is applied at the algebra level.

mod parse;

pub use parse::{parse, ParseError};

use num_complex::Complex64 as C64;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// One letter of the alphabet: the lowering symbol `a` or the raising
/// symbol `a*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    AStar,
}

impl Letter {
    pub fn swapped(self) -> Letter {
        match self {
            Letter::A => Letter::AStar,
            Letter::AStar => Letter::A,
        }
    }
}

/// A word in the alphabet; the empty word is the algebra unit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of `a` letters.
    pub fn lowering_count(&self) -> usize {
        self.0.iter().filter(|&&b| b == Letter::A).count()
    }

    /// Number of `a*` letters.
    pub fn raising_count(&self) -> usize {
        self.0.iter().filter(|&&b| b == Letter::AStar).count()
    }

    /// Net level shift `ℓ = #a* − #a` the word applies to a basis vector.
    pub fn level_shift(&self) -> i64 {
        self.raising_count() as i64 - self.lowering_count() as i64
    }

    /// Reverse the word and swap every letter.
    pub fn involution(&self) -> Word {
        Word(self.0.iter().rev().map(|b| b.swapped()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Highest intermediate level reached above the starting index when the
    /// word is applied right to left (0 for the empty word).
    pub fn max_elevation(&self) -> usize {
        let mut level: i64 = 0;
        let mut max = 0i64;
        for b in self.0.iter().rev() {
            level += match b {
                Letter::A => -1,
                Letter::AStar => 1,
            };
            max = max.max(level);
        }
        max.max(0) as usize
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", parse::format_word(self))
    }
}

/// Minimum degree over nonconstant terms, with the degenerate constant
/// case kept explicit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinDegree {
    /// Polynomial has no nonconstant term; the value is defined as 0.
    Constant,
    Nonconstant(usize),
}

impl MinDegree {
    pub fn value(self) -> usize {
        match self {
            MinDegree::Constant => 0,
            MinDegree::Nonconstant(k) => k,
        }
    }
}

/// Per-degree ℓ¹ coefficient norms `|P_k|` plus the total `|P|`.
#[derive(Clone, Debug, PartialEq)]
pub struct L1Norms {
    pub per_degree: Vec<f64>,
    pub total: f64,
}

/// Noncommutative polynomial: finite map from words to complex
/// coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct NcPoly {
    terms: BTreeMap<Word, C64>,
}

const COEFF_ZERO: f64 = 0.0;

fn is_zero(c: C64) -> bool {
    c.re == COEFF_ZERO && c.im == COEFF_ZERO
}

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly::default()
    }

    pub fn one() -> Self {
        NcPoly::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        let mut p = NcPoly::default();
        p.add_term(Word::empty(), c);
        p
    }

    pub fn letter(b: Letter) -> Self {
        let mut p = NcPoly::default();
        p.add_term(Word::new(vec![b]), C64::new(1.0, 0.0));
        p
    }

    pub fn word(w: Word) -> Self {
        let mut p = NcPoly::default();
        p.add_term(w, C64::new(1.0, 0.0));
        p
    }

    pub fn add_term(&mut self, w: Word, c: C64) {
        if is_zero(c) {
            return;
        }
        let entry = self.terms.entry(w).or_insert(C64::new(0.0, 0.0));
        *entry += c;
        if is_zero(*entry) {
            let w = self
                .terms
                .iter()
                .find(|(_, v)| is_zero(**v))
                .map(|(k, _)| k.clone());
            if let Some(w) = w {
                self.terms.remove(&w);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> C64 {
        self.terms.get(w).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum word length; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    /// Length of the shortest stored nonconstant word.
    pub fn min_degree(&self) -> MinDegree {
        self.terms
            .keys()
            .filter(|w| !w.is_empty())
            .map(Word::len)
            .min()
            .map(MinDegree::Nonconstant)
            .unwrap_or(MinDegree::Constant)
    }

    pub fn scale(&self, c: C64) -> NcPoly {
        if is_zero(c) {
            return NcPoly::zero();
        }
        NcPoly {
            terms: self.terms.iter().map(|(w, v)| (w.clone(), *v * c)).collect(),
        }
    }

    /// The involution `P ↦ P*`: words reversed with letters swapped and
    /// coefficients conjugated, so `(PQ)* = Q*P*`.
    pub fn involution(&self) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w, c) in &self.terms {
            out.add_term(w.involution(), c.conj());
        }
        out
    }

    /// Largest deviation from `P = P*`, coefficient-wise.
    pub fn symmetry_defect(&self) -> f64 {
        let star = self.involution();
        let mut d = 0.0f64;
        for (w, c) in &self.terms {
            d = d.max((*c - star.coeff(w)).norm());
        }
        for (w, c) in &star.terms {
            d = d.max((*c - self.coeff(w)).norm());
        }
        d
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_defect() <= 1e-12 * (1.0 + self.l1_norms().total)
    }

    /// Word pairs `(w, w*)` whose coefficients break `P = P*`.
    pub fn asymmetric_pairs(&self) -> Vec<(Word, Word)> {
        let mut out = Vec::new();
        for (w, c) in &self.terms {
            let ws = w.involution();
            if (self.coeff(&ws).conj() - *c).norm() > 1e-12 * (1.0 + c.norm()) && *w <= ws {
                out.push((w.clone(), ws));
            }
        }
        out
    }

    /// Commutative symbol: substitute `z` for `a` and `z̄` for `a*`.
    pub fn symbol(&self) -> CPoly {
        let mut out = CPoly::zero();
        for (w, c) in &self.terms {
            out.add_term(w.lowering_count() as u32, w.raising_count() as u32, *c);
        }
        out
    }

    /// Homogeneous part of degree `k`.
    pub fn homogeneous_part(&self, k: usize) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w, c) in &self.terms {
            if w.len() == k {
                out.add_term(w.clone(), *c);
            }
        }
        out
    }

    /// ℓ¹ norms of the homogeneous parts and their sum.
    pub fn l1_norms(&self) -> L1Norms {
        let mut per_degree = vec![0.0; self.degree() + 1];
        for (w, c) in &self.terms {
            per_degree[w.len()] += c.norm();
        }
        let total = per_degree.iter().sum();
        L1Norms { per_degree, total }
    }

    /// Substitute `a ↦ a + α`, `a* ↦ a* + ᾱ` and collect the result by
    /// homogeneous degree, index `k = 0..=deg`.
    ///
    /// Entry 0 is the scalar `P^cl(α)` and entry 1 carries the Wirtinger
    /// gradient of the symbol; re-shifting by `−α` reconstructs `P`.
    pub fn shift_expand(&self, alpha: C64) -> Vec<NcPoly> {
        let d = self.degree();
        let mut parts = vec![NcPoly::zero(); d + 1];
        let abar = alpha.conj();
        for (w, c) in &self.terms {
            let k = w.len();
            let letters = w.letters();
            for mask in 0u64..(1u64 << k) {
                let kept = mask.count_ones() as usize;
                let mut scalar = *c;
                let mut sub = Vec::with_capacity(kept);
                for (i, &b) in letters.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        sub.push(b);
                    } else {
                        scalar *= match b {
                            Letter::A => alpha,
                            Letter::AStar => abar,
                        };
                    }
                }
                parts[kept].add_term(Word::new(sub), scalar);
            }
        }
        parts
    }

    /// Rewrite into normally ordered form (every `a*` left of every `a`),
    /// collecting the commutator corrections as powers of ℏ.
    pub fn normal_order(&self) -> HbarPoly {
        let mut memo: HashMap<Word, Vec<(u32, Word, f64)>> = HashMap::new();
        let mut out = HbarPoly::zero();
        for (w, c) in &self.terms {
            for (pow, word, mult) in rewrite_word(w, &mut memo) {
                out.add_term(pow, word.clone(), *c * mult);
            }
        }
        out
    }
}

/// Normally order one word; results are `(ℏ-power in √ℏ units, word,
/// multiplicity)` triples. Multiplicities are exact small integers.
fn rewrite_word<'m>(
    w: &Word,
    memo: &'m mut HashMap<Word, Vec<(u32, Word, f64)>>,
) -> Vec<(u32, Word, f64)> {
    if let Some(hit) = memo.get(w) {
        return hit.clone();
    }
    let letters = w.letters();
    let swap_at = letters
        .windows(2)
        .position(|p| p[0] == Letter::A && p[1] == Letter::AStar);
    let result = match swap_at {
        None => vec![(0, w.clone(), 1.0)],
        Some(i) => {
            // a a* = a* a + ℏ
            let mut swapped = letters.to_vec();
            swapped.swap(i, i + 1);
            let mut dropped = letters.to_vec();
            dropped.drain(i..i + 2);
            let mut acc: BTreeMap<(u32, Word), f64> = BTreeMap::new();
            for (p, word, m) in rewrite_word(&Word::new(swapped), memo) {
                *acc.entry((p, word)).or_insert(0.0) += m;
            }
            for (p, word, m) in rewrite_word(&Word::new(dropped), memo) {
                *acc.entry((p + 2, word)).or_insert(0.0) += m;
            }
            acc.into_iter()
                .filter(|(_, m)| *m != 0.0)
                .map(|((p, word), m)| (p, word, m))
                .collect()
        }
    };
    memo.insert(w.clone(), result.clone());
    result
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", parse::canonical(self))
    }
}

impl Add for &NcPoly {
    type Output = NcPoly;
    fn add(self, rhs: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), *c);
        }
        out
    }
}

impl Sub for &NcPoly {
    type Output = NcPoly;
    fn sub(self, rhs: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -*c);
        }
        out
    }
}

impl Neg for &NcPoly {
    type Output = NcPoly;
    fn neg(self) -> NcPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &NcPoly {
    type Output = NcPoly;
    fn mul(self, rhs: &NcPoly) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                out.add_term(w1.concat(w2), *c1 * *c2);
            }
        }
        out
    }
}

/// Polynomial in `√ℏ` with noncommutative word coefficients; produced by
/// normal ordering. The `u32` key counts `√ℏ` factors.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct HbarPoly {
    terms: BTreeMap<(u32, Word), C64>,
}

impl HbarPoly {
    pub fn zero() -> Self {
        HbarPoly::default()
    }

    pub fn add_term(&mut self, sqrt_hbar_power: u32, w: Word, c: C64) {
        if is_zero(c) {
            return;
        }
        let entry = self
            .terms
            .entry((sqrt_hbar_power, w))
            .or_insert(C64::new(0.0, 0.0));
        *entry += c;
        if is_zero(*entry) {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| is_zero(**v))
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, Word), &C64)> {
        self.terms.iter()
    }

    /// Substitute a numeric value for ℏ, collapsing to an `NcPoly`.
    pub fn specialize(&self, hbar: f64) -> NcPoly {
        let sqrt_h = hbar.sqrt();
        let mut out = NcPoly::zero();
        for ((p, w), c) in &self.terms {
            out.add_term(w.clone(), *c * sqrt_h.powi(*p as i32));
        }
        out
    }

    /// Terms carrying no power of ℏ.
    pub fn hbar_free_part(&self) -> NcPoly {
        let mut out = NcPoly::zero();
        for ((p, w), c) in &self.terms {
            if *p == 0 {
                out.add_term(w.clone(), *c);
            }
        }
        out
    }
}

/// Commutative polynomial in `(z, z̄)`: map from bidegree to coefficient.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CPoly {
    terms: BTreeMap<(u32, u32), C64>,
}

impl CPoly {
    pub fn zero() -> Self {
        CPoly::default()
    }

    pub fn constant(c: C64) -> Self {
        let mut p = CPoly::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn add_term(&mut self, deg_z: u32, deg_zbar: u32, c: C64) {
        if is_zero(c) {
            return;
        }
        let entry = self
            .terms
            .entry((deg_z, deg_zbar))
            .or_insert(C64::new(0.0, 0.0));
        *entry += c;
        if is_zero(*entry) {
            self.terms.remove(&(deg_z, deg_zbar));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, deg_z: u32, deg_zbar: u32) -> C64 {
        self.terms
            .get(&(deg_z, deg_zbar))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    /// Formal Wirtinger derivative `∂^{dz+dzbar} / ∂z^{dz} ∂z̄^{dzbar}`.
    pub fn derivative(&self, dz: u32, dzbar: u32) -> CPoly {
        let mut out = CPoly::zero();
        for (&(i, j), c) in &self.terms {
            if i < dz || j < dzbar {
                continue;
            }
            let mut factor = 1.0;
            for k in 0..dz {
                factor *= (i - k) as f64;
            }
            for k in 0..dzbar {
                factor *= (j - k) as f64;
            }
            out.add_term(i - dz, j - dzbar, *c * factor);
        }
        out
    }

    pub fn eval(&self, z: C64) -> C64 {
        let zbar = z.conj();
        let mut acc = C64::new(0.0, 0.0);
        for (&(i, j), c) in &self.terms {
            acc += *c * z.powu(i) * zbar.powu(j);
        }
        acc
    }

    /// Largest deviation from realness (`c(i,j) = conj(c(j,i))`).
    pub fn real_defect(&self) -> f64 {
        let mut d = 0.0f64;
        for (&(i, j), c) in &self.terms {
            d = d.max((*c - self.coeff(j, i).conj()).norm());
        }
        d
    }

    pub fn mul(&self, rhs: &CPoly) -> CPoly {
        let mut out = CPoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                out.add_term(i1 + i2, j1 + j2, *c1 * *c2);
            }
        }
        out
    }

    pub fn add(&self, rhs: &CPoly) -> CPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, *c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> NcPoly {
        let mut p = NcPoly::zero();
        let nterms = rng.gen_range(1..=6);
        for _ in 0..nterms {
            let len = rng.gen_range(0..=max_degree);
            let letters = (0..len)
                .map(|_| if rng.gen_bool(0.5) { Letter::A } else { Letter::AStar })
                .collect();
            p.add_term(Word::new(letters), c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        }
        p
    }

    #[test]
    fn multiplication_concatenates_words() {
        // θθθ* · θ*θ = θθθ*θ*θ
        let lhs = NcPoly::word(Word::new(vec![Letter::A, Letter::A, Letter::AStar]));
        let rhs = NcPoly::word(Word::new(vec![Letter::AStar, Letter::A]));
        let prod = &lhs * &rhs;
        let expect = Word::new(vec![
            Letter::A,
            Letter::A,
            Letter::AStar,
            Letter::AStar,
            Letter::A,
        ]);
        assert_eq!(prod.coeff(&expect), c(1.0, 0.0));
        assert_eq!(prod.term_count(), 1);
    }

    #[test]
    fn unit_and_distributivity() {
        let p = parse("2 a a* + 3 a*").unwrap();
        assert_eq!(&p * &NcPoly::one(), p);
        // (θ+θ*)(θ−θ*) = θθ − θθ* + θ*θ − θ*θ*
        let sum = parse("a + a*").unwrap();
        let diff = parse("a - a*").unwrap();
        let prod = &sum * &diff;
        assert_eq!(prod.coeff(&Word::new(vec![Letter::A, Letter::A])), c(1.0, 0.0));
        assert_eq!(prod.coeff(&Word::new(vec![Letter::A, Letter::AStar])), c(-1.0, 0.0));
        assert_eq!(prod.coeff(&Word::new(vec![Letter::AStar, Letter::A])), c(1.0, 0.0));
        assert_eq!(
            prod.coeff(&Word::new(vec![Letter::AStar, Letter::AStar])),
            c(-1.0, 0.0)
        );
    }

    #[test]
    fn involution_reverses_and_conjugates() {
        // (2i·θθθ*)* = −2i·θθ*θ*
        let mut p = NcPoly::zero();
        p.add_term(Word::new(vec![Letter::A, Letter::A, Letter::AStar]), c(0.0, 2.0));
        let star = p.involution();
        assert_eq!(
            star.coeff(&Word::new(vec![Letter::A, Letter::AStar, Letter::AStar])),
            c(0.0, -2.0)
        );
        assert_eq!(star.term_count(), 1);
        // (θ*)* = θ
        let th = NcPoly::letter(Letter::AStar).involution();
        assert_eq!(th.coeff(&Word::new(vec![Letter::A])), c(1.0, 0.0));
    }

    #[test]
    fn quartic_example_is_symmetric() {
        let p = parse("a*^4 + a^4 - (0.875) (a - a*)(a + a*)^2 (a - a*)").unwrap();
        assert!(p.is_symmetric());
        assert_eq!(p.degree(), 4);
    }

    #[test]
    fn symbol_forgets_order() {
        // θθ*θ + θ*θθ* → z²z̄ + z̄²z
        let p = parse("a a* a + a* a a*").unwrap();
        let s = p.symbol();
        assert_eq!(s.coeff(2, 1), c(1.0, 0.0));
        assert_eq!(s.coeff(1, 2), c(1.0, 0.0));
        // θ*θ → zz̄ and (θ*θ)² → z²z̄²
        assert_eq!(parse("a* a").unwrap().symbol().coeff(1, 1), c(1.0, 0.0));
        assert_eq!(parse("(a* a)^2").unwrap().symbol().coeff(2, 2), c(1.0, 0.0));
    }

    #[test]
    fn symbol_derivative_examples() {
        // f = zz̄ + ½z²z̄²
        let mut f = CPoly::zero();
        f.add_term(1, 1, c(1.0, 0.0));
        f.add_term(2, 2, c(0.5, 0.0));
        let dzbar = f.derivative(0, 1);
        assert_eq!(dzbar.coeff(1, 0), c(1.0, 0.0));
        assert_eq!(dzbar.coeff(2, 1), c(1.0, 0.0));
        let mixed = f.derivative(1, 1);
        assert_eq!(mixed.coeff(0, 0), c(1.0, 0.0));
        assert_eq!(mixed.coeff(1, 1), c(2.0, 0.0));
        // ∂/∂z of z̄ = 0
        let mut zbar = CPoly::zero();
        zbar.add_term(0, 1, c(1.0, 0.0));
        assert!(zbar.derivative(1, 0).is_zero());
        // derivatives commute
        let a = f.derivative(1, 0).derivative(0, 1);
        let b = f.derivative(0, 1).derivative(1, 0);
        assert_eq!(a, b);
    }

    #[test]
    fn shift_expand_matches_worked_example() {
        // P = θθ*θ + θ*θθ*: degree-1 part is (2|α|²+ᾱ²)θ + (2|α|²+α²)θ*
        let p = parse("a a* a + a* a a*").unwrap();
        let alpha = c(0.7, -0.4);
        let parts = p.shift_expand(alpha);
        let a2 = alpha * alpha;
        let m2 = 2.0 * alpha.norm_sqr();
        let w_a = Word::new(vec![Letter::A]);
        let w_as = Word::new(vec![Letter::AStar]);
        assert!((parts[1].coeff(&w_a) - (a2.conj() + m2)).norm() < 1e-13);
        assert!((parts[1].coeff(&w_as) - (a2 + m2)).norm() < 1e-13);
        // degree-0 part is the symbol value
        assert!((parts[0].coeff(&Word::empty()) - p.symbol().eval(alpha)).norm() < 1e-13);
    }

    #[test]
    fn shift_expand_at_zero_is_homogeneous_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = random_poly(&mut rng, 4);
            let parts = p.shift_expand(c(0.0, 0.0));
            for (k, part) in parts.iter().enumerate() {
                assert_eq!(*part, p.homogeneous_part(k));
            }
        }
    }

    #[test]
    fn shift_expand_number_word() {
        // θ*θ shifted by 1: [1, θ+θ*, θ*θ]
        let p = parse("a* a").unwrap();
        let parts = p.shift_expand(c(1.0, 0.0));
        assert_eq!(parts[0].coeff(&Word::empty()), c(1.0, 0.0));
        assert_eq!(parts[1].coeff(&Word::new(vec![Letter::A])), c(1.0, 0.0));
        assert_eq!(parts[1].coeff(&Word::new(vec![Letter::AStar])), c(1.0, 0.0));
        assert_eq!(
            parts[2].coeff(&Word::new(vec![Letter::AStar, Letter::A])),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn shift_expand_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let p = random_poly(&mut rng, 4);
            let alpha = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let parts = p.shift_expand(alpha);
            let mut back = NcPoly::zero();
            for part in &parts {
                let unshift = part.shift_expand(-alpha);
                for piece in &unshift {
                    back = &back + piece;
                }
            }
            for (w, cexp) in p.terms() {
                assert!((back.coeff(w) - cexp).norm() < 1e-12, "word {w}");
            }
            for (w, cgot) in back.terms() {
                assert!((p.coeff(w) - cgot).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn shift_expand_preserves_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let q = random_poly(&mut rng, 3);
            let p = &q + &q.involution(); // symmetric by construction
            let alpha = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for part in p.shift_expand(alpha) {
                assert!(part.symmetry_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn normal_order_basic_rewrites() {
        // θθ* = θ*θ + ℏ
        let p = parse("a a*").unwrap();
        let no = p.normal_order();
        let t: Vec<_> = no.terms().collect();
        assert_eq!(t.len(), 2);
        let w_num = Word::new(vec![Letter::AStar, Letter::A]);
        assert_eq!(no.specialize(1.0).coeff(&w_num), c(1.0, 0.0));
        assert_eq!(no.specialize(1.0).coeff(&Word::empty()), c(1.0, 0.0));
        assert_eq!(no.specialize(0.25).coeff(&Word::empty()), c(0.25, 0.0));

        // θθθ* = θ*θθ + 2ℏθ
        let p = parse("a a a*").unwrap();
        let sp = p.normal_order().specialize(1.0);
        assert_eq!(
            sp.coeff(&Word::new(vec![Letter::AStar, Letter::A, Letter::A])),
            c(1.0, 0.0)
        );
        assert_eq!(sp.coeff(&Word::new(vec![Letter::A])), c(2.0, 0.0));

        // already normal
        let p = parse("a* a").unwrap();
        let no = p.normal_order();
        assert_eq!(no.specialize(1.0), p);
    }

    #[test]
    fn normal_order_hbar_free_part_matches_symbol_derivatives() {
        // the ℏ⁰ part is Σ 1/(k! l!) (∂^{k+l}P^cl/∂z̄^k∂z^l)(0) a*^k a^l
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let p = random_poly(&mut rng, 4);
            let free = p.normal_order().hbar_free_part();
            let sym = p.symbol();
            for k in 0..=4u32 {
                for l in 0..=4u32 {
                    let mut word = vec![Letter::AStar; k as usize];
                    word.extend(vec![Letter::A; l as usize]);
                    let got = free.coeff(&Word::new(word));
                    let mut fact = 1.0;
                    for i in 1..=k {
                        fact *= i as f64;
                    }
                    for i in 1..=l {
                        fact *= i as f64;
                    }
                    let expect = sym.derivative(l, k).eval(c(0.0, 0.0)) / fact;
                    assert!((got - expect).norm() < 1e-10, "k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn min_degree_cases() {
        assert_eq!(parse("3 + a a* + a*^3").unwrap().min_degree(), MinDegree::Nonconstant(2));
        assert_eq!(parse("a").unwrap().min_degree(), MinDegree::Nonconstant(1));
        assert_eq!(parse("5").unwrap().min_degree(), MinDegree::Constant);
        assert_eq!(parse("5").unwrap().min_degree().value(), 0);
    }

    #[test]
    fn l1_norm_cases() {
        // 2θ − iθ*θ
        let p = parse("2 a - (0+1i) a* a").unwrap();
        let n = p.l1_norms();
        assert_eq!(n.per_degree[1], 2.0);
        assert_eq!(n.per_degree[2], 1.0);
        assert_eq!(n.total, 3.0);
        let z = NcPoly::zero().l1_norms();
        assert_eq!(z.total, 0.0);
    }

    #[test]
    fn l1_norm_of_quartic_example() {
        let p = parse("a*^4 + a^4 - (0.875) (a - a*)(a + a*)^2 (a - a*)").unwrap();
        // independent expansion of (θ−θ*)(θ+θ*)²(θ−θ*): enumerate the 16
        // letter choices with their signs
        let mut coeffs: BTreeMap<Word, f64> = BTreeMap::new();
        for bits in 0u32..16 {
            let mut sign = 1.0;
            let mut letters = Vec::new();
            for pos in 0..4 {
                let star = bits & (1 << pos) != 0;
                if star && (pos == 0 || pos == 3) {
                    sign = -sign;
                }
                letters.push(if star { Letter::AStar } else { Letter::A });
            }
            *coeffs.entry(Word::new(letters)).or_insert(0.0) += -0.875 * sign;
        }
        *coeffs.entry(Word::new(vec![Letter::A; 4])).or_insert(0.0) += 1.0;
        *coeffs.entry(Word::new(vec![Letter::AStar; 4])).or_insert(0.0) += 1.0;
        let expect_p4: f64 = coeffs.values().map(|v| v.abs()).sum();
        let n = p.l1_norms();
        assert!((n.per_degree[4] - expect_p4).abs() < 1e-12);
        assert!((n.total - expect_p4).abs() < 1e-12);
    }

    #[test]
    fn product_identities_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let p = random_poly(&mut rng, 4);
            let q = random_poly(&mut rng, 4);
            // (PQ)* = Q*P*
            let lhs = (&p * &q).involution();
            let rhs = &q.involution() * &p.involution();
            for (w, cexp) in lhs.terms() {
                assert!((rhs.coeff(w) - cexp).norm() < 1e-12);
            }
            assert_eq!(lhs.term_count(), rhs.term_count());
            // symbol is a homomorphism
            let s_prod = (&p * &q).symbol();
            let s_fact = p.symbol().mul(&q.symbol());
            for (&(i, j), cexp) in s_prod.terms() {
                assert!((s_fact.coeff(i, j) - cexp).norm() < 1e-10);
            }
            // |PQ| ≤ |P||Q|
            let n1 = (&p * &q).l1_norms().total;
            let n2 = p.l1_norms().total * q.l1_norms().total;
            assert!(n1 <= n2 + 1e-12);
        }
    }

    #[test]
    fn symbol_of_symmetric_is_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let q = random_poly(&mut rng, 4);
            let p = &q + &q.involution();
            assert!(p.symbol().real_defect() < 1e-12);
        }
    }
}
