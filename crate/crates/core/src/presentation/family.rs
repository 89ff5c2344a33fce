use std::collections::HashMap;

use super::word::{commutator, free_reduce, Letter, Word};
use super::PresentationError;

/// An explicit finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    mult: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteTable {
    /// Validates `mult` as a group table (closure, identity, inverses, associativity).
    pub fn new(mult: Vec<Vec<usize>>) -> Result<Self, String> {
        let n = mult.len();
        if n == 0 {
            return Err("empty multiplication table".into());
        }
        if mult.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err("table is not square over 0..n".into());
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mult[e][x] == x && mult[x][e] == x))
            .ok_or("table has no identity")?;
        let mut inverse = vec![usize::MAX; n];
        for x in 0..n {
            inverse[x] = (0..n)
                .find(|&y| mult[x][y] == identity && mult[y][x] == identity)
                .ok_or("table element without inverse")?;
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if mult[mult[x][y]][z] != mult[x][mult[y][z]] {
                        return Err("table is not associative".into());
                    }
                }
            }
        }
        Ok(Self {
            mult,
            identity,
            inverse,
        })
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.mult.clone()
    }
}

/// Normal-form family tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Free,
    FreeAbelian,
    Surface { genus: usize },
    /// Direct product; each factor carries its own generator subset.
    Product(Vec<NormalFormProvider>),
    /// Finite group; `images[i]` is the element for the i-th alphabet generator.
    Table { table: FiniteTable, images: Vec<usize> },
}

impl Family {
    pub fn tag(&self) -> String {
        match self {
            Family::Free => "free".into(),
            Family::FreeAbelian => "free-abelian".into(),
            Family::Surface { genus } => format!("surface({genus})"),
            Family::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|f| f.family.tag()).collect();
                format!("product({})", parts.join(" * "))
            }
            Family::Table { table, .. } => format!("table(order {})", table.order()),
        }
    }
}

/// Key used to find a group element among already enumerated ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ElementKey {
    /// Two words are equal iff their keys are equal.
    Exact(Word),
    /// Equal elements share a key; equality inside a bucket needs [`NormalFormProvider::equal`].
    Bucket(Vec<i64>),
}

/// Exact word-problem service for one supported family over a generator subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormProvider {
    pub family: Family,
    /// Global generator indices this provider understands, in order.
    pub alphabet: Vec<usize>,
    table_forms: Vec<Word>,
}

impl NormalFormProvider {
    pub fn new(family: Family, alphabet: Vec<usize>) -> Result<Self, PresentationError> {
        let mut p = Self {
            family,
            alphabet,
            table_forms: Vec::new(),
        };
        match &p.family {
            Family::Surface { genus } => {
                if *genus == 0 || p.alphabet.len() != 2 * genus {
                    return Err(PresentationError::UnsupportedFamily(format!(
                        "surface({genus}) needs exactly {} generators, got {}",
                        2 * genus,
                        p.alphabet.len()
                    )));
                }
            }
            Family::Product(factors) => {
                let mut seen: Vec<usize> = factors.iter().flat_map(|f| f.alphabet.clone()).collect();
                seen.sort_unstable();
                let mut want = p.alphabet.clone();
                want.sort_unstable();
                if seen != want {
                    return Err(PresentationError::UnsupportedFamily(
                        "product factors must partition the generators".into(),
                    ));
                }
            }
            Family::Table { table, images } => {
                if images.len() != p.alphabet.len() || images.iter().any(|&x| x >= table.order()) {
                    return Err(PresentationError::UnsupportedFamily(
                        "table generator images do not match the generators".into(),
                    ));
                }
                p.table_forms = table_normal_forms(table, images, &p.alphabet);
            }
            _ => {}
        }
        Ok(p)
    }

    fn position(&self, l: Letter) -> Result<usize, PresentationError> {
        self.alphabet
            .iter()
            .position(|&g| g == l.generator)
            .ok_or(PresentationError::LetterOutsideAlphabet(l.generator))
    }

    pub fn contains_generator(&self, g: usize) -> bool {
        self.alphabet.contains(&g)
    }

    fn check(&self, w: &Word) -> Result<(), PresentationError> {
        for &l in w.letters() {
            self.position(l)?;
        }
        Ok(())
    }

    /// Canonical representative of the element `w` represents.
    ///
    /// Surface families return the shortlex least geodesic, found by search: the cost grows
    /// exponentially with the geodesic length, so use [`Self::equal`] for word problems.
    pub fn normal_form(&self, w: &Word) -> Result<Word, PresentationError> {
        self.check(w)?;
        Ok(match &self.family {
            Family::Free => free_reduce(w),
            Family::FreeAbelian => self.abelian_form(w),
            Family::Surface { .. } => self.surface_form(w),
            Family::Product(factors) => {
                let mut out = Word::identity();
                for f in factors {
                    let part = Word::from_letters(
                        w.letters().iter().copied().filter(|l| f.contains_generator(l.generator)),
                    );
                    out = out.concat(&f.normal_form(&part)?);
                }
                out
            }
            Family::Table { .. } => self.table_forms[self.table_eval(w)].clone(),
        })
    }

    /// Word problem: do `u` and `v` represent the same element?
    pub fn equal(&self, u: &Word, v: &Word) -> Result<bool, PresentationError> {
        self.check(u)?;
        self.check(v)?;
        Ok(match &self.family {
            Family::Surface { .. } => self.dehn_reduce(&u.concat(&v.inverse())).is_empty(),
            Family::Product(factors) => {
                for f in factors {
                    let pu = Word::from_letters(
                        u.letters().iter().copied().filter(|l| f.contains_generator(l.generator)),
                    );
                    let pv = Word::from_letters(
                        v.letters().iter().copied().filter(|l| f.contains_generator(l.generator)),
                    );
                    if !f.equal(&pu, &pv)? {
                        return Ok(false);
                    }
                }
                true
            }
            _ => self.normal_form(u)? == self.normal_form(v)?,
        })
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool, PresentationError> {
        self.equal(w, &Word::identity())
    }

    /// Lookup key; surfaces (and products containing one) use abelianization buckets.
    pub fn element_key(&self, w: &Word) -> Result<ElementKey, PresentationError> {
        if self.has_surface() {
            self.check(w)?;
            Ok(ElementKey::Bucket(self.abelian_exponents(w)))
        } else {
            Ok(ElementKey::Exact(self.normal_form(w)?))
        }
    }

    fn has_surface(&self) -> bool {
        match &self.family {
            Family::Surface { .. } => true,
            Family::Product(fs) => fs.iter().any(|f| f.has_surface()),
            _ => false,
        }
    }

    /// Ordering rank of a letter: (factor, generator, inverse).
    pub fn letter_rank(&self, l: Letter) -> (usize, usize, bool) {
        if let Family::Product(fs) = &self.family {
            if let Some(i) = fs.iter().position(|f| f.contains_generator(l.generator)) {
                return (i, l.generator, l.inverse);
            }
        }
        (0, l.generator, l.inverse)
    }

    /// Defining relators of the family over its alphabet.
    pub fn defining_relators(&self) -> Vec<Word> {
        let gens: Vec<Letter> = self.alphabet.iter().map(|&g| Letter::gen(g)).collect();
        match &self.family {
            Family::Free | Family::Table { .. } => Vec::new(),
            Family::FreeAbelian => {
                let mut out = Vec::new();
                for i in 0..gens.len() {
                    for j in i + 1..gens.len() {
                        out.push(commutator(gens[i], gens[j]));
                    }
                }
                out
            }
            Family::Surface { .. } => vec![surface_relator(&gens)],
            Family::Product(fs) => {
                let mut out: Vec<Word> = fs.iter().flat_map(|f| f.defining_relators()).collect();
                for i in 0..fs.len() {
                    for j in i + 1..fs.len() {
                        for &x in &fs[i].alphabet {
                            for &y in &fs[j].alphabet {
                                out.push(commutator(Letter::gen(x), Letter::gen(y)));
                            }
                        }
                    }
                }
                out
            }
        }
    }

    pub fn abelian_exponents(&self, w: &Word) -> Vec<i64> {
        let mut e = vec![0i64; self.alphabet.len()];
        for &l in w.letters() {
            if let Ok(i) = self.position(l) {
                e[i] += if l.inverse { -1 } else { 1 };
            }
        }
        e
    }

    fn abelian_form(&self, w: &Word) -> Word {
        let e = self.abelian_exponents(w);
        let mut out = Word::identity();
        for (i, &x) in e.iter().enumerate() {
            for _ in 0..x.unsigned_abs() {
                out.push(Letter::new(self.alphabet[i], x < 0));
            }
        }
        out
    }

    fn table_eval(&self, w: &Word) -> usize {
        let Family::Table { table, images } = &self.family else {
            unreachable!()
        };
        let mut x = table.identity;
        for &l in w.letters() {
            let g = images[self.position(l).expect("checked")];
            let g = if l.inverse { table.inverse[g] } else { g };
            x = table.mult[x][g];
        }
        x
    }

    /// Dehn's algorithm: repeatedly replace a piece of a relator cycle longer than
    /// half the relator by the shorter complement. Empty output iff `w` is trivial.
    pub fn dehn_reduce(&self, w: &Word) -> Word {
        let gens: Vec<Letter> = self.alphabet.iter().map(|&g| Letter::gen(g)).collect();
        let r = surface_relator(&gens);
        let n = r.len();
        let mut cycles: Vec<Vec<Letter>> = Vec::with_capacity(2 * n);
        for base in [r.clone(), r.inverse()] {
            for s in 0..n {
                cycles.push((0..n).map(|i| base.0[(s + i) % n]).collect());
            }
        }
        let mut cur = free_reduce(w).0;
        'outer: loop {
            for i in 0..cur.len() {
                for c in &cycles {
                    let mut k = 0;
                    while k < n && i + k < cur.len() && cur[i + k] == c[k] {
                        k += 1;
                    }
                    if 2 * k > n {
                        let replacement: Vec<Letter> = c[k..].iter().rev().map(|l| l.inv()).collect();
                        let mut next = cur[..i].to_vec();
                        next.extend(replacement);
                        next.extend_from_slice(&cur[i + k..]);
                        cur = free_reduce(&Word(next)).0;
                        continue 'outer;
                    }
                }
            }
            break;
        }
        Word(cur)
    }

    /// Shortlex-least word equal to `w`, by pruned depth-first enumeration.
    fn surface_form(&self, w: &Word) -> Word {
        let target = self.dehn_reduce(w);
        if target.is_empty() {
            return target;
        }
        let letters: Vec<Letter> = {
            let mut v: Vec<Letter> = self
                .alphabet
                .iter()
                .flat_map(|&g| [Letter::gen(g), Letter::new(g, true)])
                .collect();
            v.sort();
            v
        };
        let lower = self.abelian_exponents(&target).iter().map(|x| x.unsigned_abs() as usize).sum::<usize>();
        for len in lower.max(1)..=target.len() {
            let mut prefix = Vec::with_capacity(len);
            if let Some(found) = self.surface_search(&letters, &target, len, &mut prefix) {
                return found;
            }
        }
        target
    }

    fn surface_search(
        &self,
        letters: &[Letter],
        target: &Word,
        len: usize,
        prefix: &mut Vec<Letter>,
    ) -> Option<Word> {
        // Remaining element prefix⁻¹·target needs at least its abelian norm in letters.
        let rest = Word(prefix.clone()).inverse().concat(target);
        let need: usize = self.abelian_exponents(&rest).iter().map(|x| x.unsigned_abs() as usize).sum();
        let left = len - prefix.len();
        if need > left || (left - need) % 2 == 1 {
            return None;
        }
        if left == 0 {
            return if self.dehn_reduce(&rest).is_empty() {
                Some(Word(prefix.clone()))
            } else {
                None
            };
        }
        for &l in letters {
            if prefix.last() == Some(&l.inv()) {
                continue;
            }
            prefix.push(l);
            if let Some(w) = self.surface_search(letters, target, len, prefix) {
                return Some(w);
            }
            prefix.pop();
        }
        None
    }
}

/// `[x1,y1][x2,y2]...` over consecutive generator pairs.
fn surface_relator(gens: &[Letter]) -> Word {
    let mut w = Word::identity();
    for pair in gens.chunks(2) {
        w = w.concat(&commutator(pair[0], pair[1]));
    }
    w
}

/// Shortlex-least word for each table element, by breadth-first search.
fn table_normal_forms(table: &FiniteTable, images: &[usize], alphabet: &[usize]) -> Vec<Word> {
    let mut letters: Vec<(Letter, usize)> = Vec::new();
    for (i, &g) in alphabet.iter().enumerate() {
        letters.push((Letter::gen(g), images[i]));
        letters.push((Letter::new(g, true), table.inverse[images[i]]));
    }
    letters.sort_by_key(|x| x.0);
    let mut forms: HashMap<usize, Word> = HashMap::new();
    forms.insert(table.identity, Word::identity());
    let mut frontier = vec![table.identity];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in frontier {
            let base = forms[&x].clone();
            for &(l, g) in &letters {
                let y = table.mult[x][g];
                if let std::collections::hash_map::Entry::Vacant(e) = forms.entry(y) {
                    let mut w = base.clone();
                    w.push(l);
                    e.insert(w);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    (0..table.order())
        .map(|x| forms.get(&x).cloned().unwrap_or_default())
        .collect()
}
