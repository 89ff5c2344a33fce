use std::fmt;

use serde::{Deserialize, Serialize};

/// A generator or its inverse. Ordered generator-first, so `a < a' < b < b'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn gen(generator: usize) -> Self {
        Self::new(generator, false)
    }

    pub fn inv(self) -> Self {
        Self::new(self.generator, !self.inverse)
    }

    /// Signed, one-based encoding: `+(g+1)` for a generator, `-(g+1)` for its inverse.
    pub fn signed(self) -> i64 {
        let v = self.generator as i64 + 1;
        if self.inverse {
            -v
        } else {
            v
        }
    }
}

/// A word over the generators. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Self(letters.into_iter().collect())
    }

    /// Builds a word from signed one-based indices (see [`Letter::signed`]).
    pub fn from_signed(indices: &[i64]) -> Self {
        Self(
            indices
                .iter()
                .map(|&i| {
                    assert!(i != 0, "signed generator index must be nonzero");
                    Letter::new((i.unsigned_abs() - 1) as usize, i < 0)
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    /// Shortlex key: length first, then lexicographic by letter order.
    pub fn shortlex_key(&self) -> (usize, &[Letter]) {
        (self.0.len(), &self.0)
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let mut s = String::new();
        for l in &self.0 {
            s.push_str(&names[l.generator]);
            if l.inverse {
                s.push('\'');
            }
        }
        s
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.signed().to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Freely reduces `w` by cancelling adjacent `x x⁻¹` pairs.
pub fn free_reduce(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in &w.0 {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// Cyclic reduction of an already freely reduced word.
pub fn cyclically_reduce(w: &Word) -> Word {
    let mut v = free_reduce(w).0;
    while v.len() >= 2 && v[0] == v[v.len() - 1].inv() {
        v.remove(0);
        v.pop();
    }
    Word(v)
}

/// True if `u` equals `v` up to cyclic rotation, or up to rotation of `v⁻¹`.
pub fn same_cyclic_relator(u: &Word, v: &Word) -> bool {
    let u = cyclically_reduce(u);
    let v = cyclically_reduce(v);
    if u.len() != v.len() {
        return false;
    }
    if u.is_empty() {
        return true;
    }
    let vi = v.inverse();
    let n = u.len();
    (0..n).any(|r| (0..n).all(|i| u.0[i] == v.0[(i + r) % n]))
        || (0..n).any(|r| (0..n).all(|i| u.0[i] == vi.0[(i + r) % n]))
}

/// Commutator `[x, y] = x y x⁻¹ y⁻¹`.
pub fn commutator(x: Letter, y: Letter) -> Word {
    Word(vec![x, y, x.inv(), y.inv()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a() -> Letter {
        Letter::gen(0)
    }
    fn b() -> Letter {
        Letter::gen(1)
    }

    #[test]
    fn cancels_adjacent_inverse_pair() {
        let w = Word(vec![a(), a().inv(), b()]);
        assert_eq!(free_reduce(&w), Word(vec![b()]));
    }

    #[test]
    fn empty_stays_empty() {
        assert_eq!(free_reduce(&Word::identity()), Word::identity());
    }

    #[test]
    fn inner_cancellation() {
        let w = Word(vec![a(), b(), b().inv(), a()]);
        assert_eq!(free_reduce(&w), Word(vec![a(), a()]));
    }

    #[test]
    fn cyclic_relator_matching() {
        let c = commutator(a(), b());
        let rot = Word(vec![b(), a().inv(), b().inv(), a()]);
        assert!(same_cyclic_relator(&c, &rot));
        assert!(same_cyclic_relator(&c, &c.inverse()));
        assert!(!same_cyclic_relator(&c, &Word(vec![a(), a(), b()])));
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        prop::collection::vec((0usize..3, any::<bool>()), 0..24)
            .prop_map(|v| Word(v.into_iter().map(|(g, i)| Letter::new(g, i)).collect()))
    }

    proptest! {
        #[test]
        fn reduction_never_lengthens_and_is_idempotent(w in arb_word()) {
            let r = free_reduce(&w);
            prop_assert!(r.len() <= w.len());
            prop_assert_eq!(free_reduce(&r), r.clone());
            prop_assert!(r.0.windows(2).all(|p| p[0] != p[1].inv()));
        }

        #[test]
        fn word_times_inverse_reduces_to_identity(w in arb_word()) {
            prop_assert!(free_reduce(&w.concat(&w.inverse())).is_empty());
        }
    }
}
