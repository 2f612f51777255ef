//! Finitely presented graded algebras given by a string rewriting system.

use std::collections::{BTreeMap, HashMap};

use crate::scalar::Field;

use super::{Degree, Element, GradedRing, PartitionOfUnity, RingError, Tier};

/// A word is a sequence of generator indices.
pub type Word = Vec<u8>;

/// `lhs -> sum c_i w_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule<F> {
    pub lhs: Word,
    pub rhs: Vec<(F, Word)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

type Comb<F> = BTreeMap<Word, F>;

#[derive(Clone, Debug)]
pub struct WordAlgebra<F> {
    name: String,
    gens: Vec<(String, Degree)>,
    rules: Vec<Rule<F>>,
    partitions: Option<(Vec<(Word, Word)>, Vec<(Word, Word)>)>,
}

fn add_term<F: Field>(c: &mut Comb<F>, w: Word, x: F) {
    if x.is_zero() {
        return;
    }
    match c.remove(&w) {
        Some(y) => {
            let s = y.add_ref(&x);
            if !s.is_zero() {
                c.insert(w, s);
            }
        }
        None => {
            c.insert(w, x);
        }
    }
}

impl<F: Field> WordAlgebra<F> {
    /// Generators are ordered by position; that order drives termination, so
    /// every rule must rewrite to strictly smaller words in length-lex order.
    pub fn new(
        name: &str,
        gens: Vec<(String, Degree)>,
        rules: Vec<Rule<F>>,
        partitions: Option<(Vec<(Word, Word)>, Vec<(Word, Word)>)>,
    ) -> Result<Self, RingError> {
        let alg = WordAlgebra { name: name.into(), gens, rules, partitions };
        for r in &alg.rules {
            let d = alg.word_degree(&r.lhs);
            if r.rhs.iter().any(|(_, w)| alg.word_degree(w) != d) {
                return Err(RingError::NonHomogeneousRule(alg.word_string(&r.lhs)));
            }
        }
        Ok(alg)
    }

    /// The Leavitt algebra L(1,1): `AB + CD = 1`, `BA = DC = 1`, `BC = DA = 0`.
    pub fn leavitt11() -> Self {
        // Order C < A < D < B, so that AB -> 1 - CD decreases.
        let (c, a, d, b) = (0u8, 1u8, 2u8, 3u8);
        let gens = vec![("C".into(), -1), ("A".into(), -1), ("D".into(), 1), ("B".into(), 1)];
        let one = F::one();
        let rules = vec![
            Rule { lhs: vec![b, a], rhs: vec![(one.clone(), vec![])] },
            Rule { lhs: vec![d, c], rhs: vec![(one.clone(), vec![])] },
            Rule { lhs: vec![b, c], rhs: vec![] },
            Rule { lhs: vec![d, a], rhs: vec![] },
            Rule { lhs: vec![a, b], rhs: vec![(one.clone(), vec![]), (-one, vec![c, d])] },
        ];
        let parts = (vec![(vec![b], vec![a])], vec![(vec![a], vec![b]), (vec![c], vec![d])]);
        Self::new("leavitt11", gens, rules, Some(parts)).expect("Leavitt rules are homogeneous")
    }

    pub fn generators(&self) -> &[(String, Degree)] {
        &self.gens
    }

    pub fn rules(&self) -> &[Rule<F>] {
        &self.rules
    }

    pub fn word_degree(&self, w: &[u8]) -> Degree {
        w.iter().map(|&g| self.gens[g as usize].1).sum()
    }

    pub fn word_string(&self, w: &[u8]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|&g| self.gens[g as usize].0.as_str()).collect::<Vec<_>>().join("*")
    }

    pub fn gen_index(&self, name: &str) -> Option<u8> {
        self.gens.iter().position(|g| g.0 == name).map(|i| i as u8)
    }

    /// Occurrences `(position, rule)` of left-hand sides in `w`.
    pub fn redexes(&self, w: &[u8]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for pos in 0..w.len() {
            for (k, r) in self.rules.iter().enumerate() {
                if w[pos..].starts_with(&r.lhs) {
                    out.push((pos, k));
                }
            }
        }
        out
    }

    pub fn is_irreducible(&self, w: &[u8]) -> bool {
        self.redexes(w).is_empty()
    }

    /// One rewrite step at `pos` with rule `k`.
    pub fn rewrite_at(&self, w: &[u8], pos: usize, k: usize) -> Vec<(F, Word)> {
        let r = &self.rules[k];
        r.rhs
            .iter()
            .map(|(c, rw)| {
                let mut v = w[..pos].to_vec();
                v.extend_from_slice(rw);
                v.extend_from_slice(&w[pos + r.lhs.len()..]);
                (c.clone(), v)
            })
            .collect()
    }

    /// Normal form of a single word under a fixed strategy (memoised).
    pub fn normal_form_word(&self, w: &[u8], strategy: Strategy) -> Comb<F> {
        let mut memo = HashMap::new();
        self.nf_memo(w, strategy, &mut memo)
    }

    fn nf_memo(&self, w: &[u8], strategy: Strategy, memo: &mut HashMap<Word, Comb<F>>) -> Comb<F> {
        if let Some(c) = memo.get(w) {
            return c.clone();
        }
        let red = self.redexes(w);
        let result = if red.is_empty() {
            let mut c = Comb::new();
            c.insert(w.to_vec(), F::one());
            c
        } else {
            let (pos, k) = match strategy {
                Strategy::Leftmost => red[0],
                Strategy::Rightmost => *red.last().unwrap(),
            };
            let mut out = Comb::new();
            for (c, v) in self.rewrite_at(w, pos, k) {
                for (u, x) in self.nf_memo(&v, strategy, memo) {
                    add_term(&mut out, u, c.mul_ref(&x));
                }
            }
            out
        };
        memo.insert(w.to_vec(), result.clone());
        result
    }

    /// Normal form where every step is picked by `choose` from the list of redexes.
    pub fn normal_form_with(&self, w: &[u8], choose: &mut dyn FnMut(&[(usize, usize)]) -> usize) -> Comb<F> {
        let red = self.redexes(w);
        if red.is_empty() {
            let mut c = Comb::new();
            c.insert(w.to_vec(), F::one());
            return c;
        }
        let (pos, k) = red[choose(&red) % red.len()];
        let mut out = Comb::new();
        for (c, v) in self.rewrite_at(w, pos, k) {
            for (u, x) in self.normal_form_with(&v, choose) {
                add_term(&mut out, u, c.mul_ref(&x));
            }
        }
        out
    }

    /// Overlap words of pairs of left-hand sides.
    pub fn critical_pairs(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for a in &self.rules {
            for b in &self.rules {
                for k in 1..a.lhs.len().min(b.lhs.len()) {
                    if a.lhs[a.lhs.len() - k..] == b.lhs[..k] {
                        let mut w = a.lhs.clone();
                        w.extend_from_slice(&b.lhs[k..]);
                        if !out.contains(&w) {
                            out.push(w);
                        }
                    }
                }
            }
        }
        out
    }

    /// Whether every one-step reduct of `w` has the same normal form.
    pub fn is_locally_confluent_at(&self, w: &[u8]) -> bool {
        let mut results = self.redexes(w).into_iter().map(|(pos, k)| {
            let mut out = Comb::new();
            for (c, v) in self.rewrite_at(w, pos, k) {
                for (u, x) in self.normal_form_word(&v, Strategy::Leftmost) {
                    add_term(&mut out, u, c.mul_ref(&x));
                }
            }
            out
        });
        let Some(first) = results.next() else {
            return true;
        };
        results.all(|r| r == first)
    }

    /// Element given by a raw (not necessarily reduced) word.
    pub fn word_element(&self, w: &[u8]) -> Element<Comb<F>> {
        self.homogeneous(self.word_degree(w), self.normal_form_word(w, Strategy::Leftmost))
    }

    fn pairs_element(&self, ps: &[(Word, Word)]) -> Vec<(Element<Comb<F>>, Element<Comb<F>>)> {
        ps.iter().map(|(a, b)| (self.word_element(a), self.word_element(b))).collect()
    }
}

impl<F: Field> GradedRing for WordAlgebra<F> {
    type Scalar = F;
    type Hom = Comb<F>;

    fn id(&self) -> String {
        self.name.clone()
    }

    fn tier(&self) -> Tier {
        Tier::Symbolic
    }

    fn hom_is_zero(&self, h: &Comb<F>) -> bool {
        h.is_empty()
    }

    fn hom_add(&self, a: &Comb<F>, b: &Comb<F>) -> Comb<F> {
        let mut out = a.clone();
        for (w, c) in b {
            add_term(&mut out, w.clone(), c.clone());
        }
        out
    }

    fn hom_scale(&self, a: &Comb<F>, c: &F) -> Comb<F> {
        if c.is_zero() {
            return Comb::new();
        }
        a.iter().map(|(w, x)| (w.clone(), x.mul_ref(c))).collect()
    }

    fn hom_mul(&self, a: &Comb<F>, _da: Degree, b: &Comb<F>, _db: Degree) -> Comb<F> {
        let mut memo = HashMap::new();
        let mut out = Comb::new();
        for (u, x) in a {
            for (v, y) in b {
                let mut w = u.clone();
                w.extend_from_slice(v);
                let xy = x.mul_ref(y);
                for (nw, z) in self.nf_memo(&w, Strategy::Leftmost, &mut memo) {
                    add_term(&mut out, nw, xy.mul_ref(&z));
                }
            }
        }
        out
    }

    fn hom_one(&self) -> Comb<F> {
        let mut c = Comb::new();
        c.insert(Vec::new(), F::one());
        c
    }

    fn hom_terms(&self, h: &Comb<F>, _d: Degree) -> Vec<(F, String)> {
        h.iter().map(|(w, c)| (c.clone(), if w.is_empty() { String::new() } else { self.word_string(w) })).collect()
    }

    fn generator(&self, name: &str, exp: i64) -> Result<Element<Comb<F>>, RingError> {
        let g = self.gen_index(name).ok_or_else(|| RingError::UnknownGenerator(name.into()))?;
        if exp != 1 {
            return Err(RingError::BadExponent(name.into()));
        }
        Ok(self.word_element(&[g]))
    }

    fn letters(&self) -> Vec<char> {
        self.gens.iter().filter(|g| g.0.chars().count() == 1).filter_map(|g| g.0.chars().next()).collect()
    }

    fn stored_partitions(&self) -> Option<(PartitionOfUnity<Comb<F>>, PartitionOfUnity<Comb<F>>)> {
        let (p, m) = self.partitions.as_ref()?;
        Some((
            PartitionOfUnity::new(self.id(), 1, self.pairs_element(p)),
            PartitionOfUnity::new(self.id(), -1, self.pairs_element(m)),
        ))
    }
}
