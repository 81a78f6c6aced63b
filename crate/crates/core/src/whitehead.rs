//! Whitehead automorphisms and the orbit decision for words and tuples.
//!
//! Type II convention, for multiplier `a` and cut set `S` (`a` in `S`, `a^-1` not in `S`),
//! on a letter `x` other than `a^{±1}`:
//!
//! | `x ∈ S` | `x^-1 ∈ S` | image        |
//! |---------|------------|--------------|
//! | no      | no         | `x`          |
//! | yes     | no         | `x a`        |
//! | no      | yes        | `a^-1 x`     |
//! | yes     | yes        | `a^-1 x a`   |
//!
//! and `a ↦ a`.
//!
//! A single word is decided up to exact equality by minimising its cyclic reduction,
//! searching the minimal level, and finishing with an inner automorphism. Tuples with
//! more than one coordinate are searched as tuples of ordinary (non-cyclic) words,
//! where inner automorphisms by a letter are themselves Type II moves.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{FreeGroup, Letter, Word};

/// Subset of the signed alphabet, indexed by [`Letter::slot`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LetterSet(pub u64);

impl LetterSet {
    pub fn contains(self, l: Letter) -> bool {
        self.0 >> l.slot() & 1 == 1
    }

    pub fn with(self, l: Letter) -> LetterSet {
        LetterSet(self.0 | 1 << l.slot())
    }

    pub fn without(self, l: Letter) -> LetterSet {
        LetterSet(self.0 & !(1 << l.slot()))
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> {
        (0..64).filter(move |s| self.0 >> s & 1 == 1).map(Letter::from_slot)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WhiteheadAut {
    /// `x_i ↦ images[i-1]`, a signed permutation of the letters.
    TypeI { images: Vec<Letter> },
    TypeII { multiplier: Letter, cut: LetterSet },
}

impl WhiteheadAut {
    pub fn identity(rank: usize) -> WhiteheadAut {
        WhiteheadAut::TypeI { images: (1..=rank).map(Letter::gen).collect() }
    }

    pub fn transposition(rank: usize, i: usize, j: usize) -> WhiteheadAut {
        let mut images: Vec<Letter> = (1..=rank).map(Letter::gen).collect();
        images.swap(i - 1, j - 1);
        WhiteheadAut::TypeI { images }
    }

    pub fn inversion(rank: usize, i: usize) -> WhiteheadAut {
        let mut images: Vec<Letter> = (1..=rank).map(Letter::gen).collect();
        images[i - 1] = images[i - 1].inverse();
        WhiteheadAut::TypeI { images }
    }

    /// Type II move; `cut` is completed with the multiplier. Panics if `cut`
    /// contains the inverse of the multiplier.
    pub fn type_ii(multiplier: Letter, cut: &[Letter]) -> WhiteheadAut {
        let mut set = LetterSet(0).with(multiplier);
        for &l in cut {
            set = set.with(l);
        }
        assert!(!set.contains(multiplier.inverse()), "cut set contains the inverse multiplier");
        WhiteheadAut::TypeII { multiplier, cut: set }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            WhiteheadAut::TypeI { images } => {
                images.iter().enumerate().all(|(i, l)| *l == Letter::gen(i + 1))
            }
            WhiteheadAut::TypeII { multiplier, cut } => *cut == LetterSet(0).with(*multiplier),
        }
    }

    /// Image of a single letter.
    pub fn image_of(&self, l: Letter) -> Word {
        match self {
            WhiteheadAut::TypeI { images } => {
                let m = images.get(l.index() - 1).copied().unwrap_or(Letter::gen(l.index()));
                Word::letter(if l.is_inverse() { m.inverse() } else { m })
            }
            WhiteheadAut::TypeII { multiplier: a, cut } => {
                if l.index() == a.index() {
                    return Word::letter(l);
                }
                let x = Letter::gen(l.index());
                let mut img = Vec::with_capacity(3);
                if cut.contains(x.inverse()) {
                    img.push(a.inverse());
                }
                img.push(x);
                if cut.contains(x) {
                    img.push(*a);
                }
                let w = Word::from_reduced_unchecked(img);
                if l.is_inverse() {
                    w.inverse()
                } else {
                    w
                }
            }
        }
    }

    /// Reduced image of `w`.
    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for &l in w.letters() {
            out.mul_assign(&self.image_of(l));
        }
        out
    }

    pub fn inverse(&self) -> WhiteheadAut {
        match self {
            WhiteheadAut::TypeI { images } => {
                let mut inv = vec![Letter::gen(1); images.len()];
                for (i, m) in images.iter().enumerate() {
                    let x = Letter::gen(i + 1);
                    inv[m.index() - 1] = if m.is_inverse() { x.inverse() } else { x };
                }
                WhiteheadAut::TypeI { images: inv }
            }
            WhiteheadAut::TypeII { multiplier, cut } => WhiteheadAut::TypeII {
                multiplier: multiplier.inverse(),
                cut: cut.without(*multiplier).with(multiplier.inverse()),
            },
        }
    }
}

impl fmt::Display for WhiteheadAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WhiteheadAut::TypeI { images } => {
                write!(f, "typeI")?;
                for (i, m) in images.iter().enumerate() {
                    write!(f, " {}->{}", Letter::gen(i + 1).to_char(), m.to_char())?;
                }
                Ok(())
            }
            WhiteheadAut::TypeII { multiplier, cut } => {
                let members: Vec<String> = std::iter::once(*multiplier)
                    .chain(cut.letters().filter(|l| l != multiplier))
                    .map(|l| l.to_char().to_string())
                    .collect();
                write!(f, "typeII a={} S={{{}}}", multiplier.to_char(), members.join(","))
            }
        }
    }
}

impl std::str::FromStr for WhiteheadAut {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let letter = |t: &str| -> std::result::Result<Letter, String> {
            let w = Word::parse(t).map_err(|e| e.to_string())?;
            match w.letters() {
                [l] => Ok(*l),
                _ => Err(format!("expected a single letter, got {t:?}")),
            }
        };
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("typeII") {
            let rest = rest.trim();
            let (a, set) = rest
                .strip_prefix("a=")
                .and_then(|r| r.split_once(" S={"))
                .ok_or_else(|| format!("malformed type II move {s:?}"))?;
            let set = set.strip_suffix('}').ok_or_else(|| format!("unterminated cut set in {s:?}"))?;
            let multiplier = letter(a)?;
            let mut cut = LetterSet(0).with(multiplier);
            for t in set.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                cut = cut.with(letter(t)?);
            }
            if cut.contains(multiplier.inverse()) {
                return Err(format!("cut set contains the inverse multiplier in {s:?}"));
            }
            Ok(WhiteheadAut::TypeII { multiplier, cut })
        } else if let Some(rest) = s.strip_prefix("typeI") {
            let mut images = Vec::new();
            for (i, item) in rest.split_whitespace().enumerate() {
                let (src, img) = item.split_once("->").ok_or_else(|| format!("malformed image {item:?}"))?;
                if letter(src)? != Letter::gen(i + 1) {
                    return Err(format!("type I images must be listed in order, got {item:?}"));
                }
                images.push(letter(img)?);
            }
            Ok(WhiteheadAut::TypeI { images })
        } else {
            Err(format!("unknown move {s:?}"))
        }
    }
}

/// All Type II moves (including the trivial ones with `S = {a}`) followed by the
/// Type I generators: the identity, transpositions and single-letter inversions.
pub fn enumerate_whitehead(rank: usize) -> Vec<WhiteheadAut> {
    let mut out = type_ii_moves(rank);
    out.push(WhiteheadAut::identity(rank));
    for i in 1..=rank {
        for j in i + 1..=rank {
            out.push(WhiteheadAut::transposition(rank, i, j));
        }
    }
    for i in 1..=rank {
        out.push(WhiteheadAut::inversion(rank, i));
    }
    out
}

/// Type II moves in lexicographic (multiplier, cut) order.
fn type_ii_moves(rank: usize) -> Vec<WhiteheadAut> {
    let mut out = Vec::new();
    for a_slot in 0..2 * rank {
        let a = Letter::from_slot(a_slot);
        let others: Vec<Letter> =
            (0..2 * rank).map(Letter::from_slot).filter(|l| l.index() != a.index()).collect();
        for mask in 0u64..1 << others.len() {
            let mut cut = LetterSet(0).with(a);
            for (k, l) in others.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    cut = cut.with(*l);
                }
            }
            out.push(WhiteheadAut::TypeII { multiplier: a, cut });
        }
    }
    out.sort();
    out
}

/// gcd of the exponent sums; constant on automorphism orbits.
pub fn orbit_gcd_invariant(w: &Word) -> u64 {
    w.abelianize(w.max_index()).gcd()
}

/// An automorphism as a sequence of Whitehead moves, applied first to last,
/// followed by conjugation: `w ↦ c · steps(w) · c^-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCertificate {
    pub steps: Vec<WhiteheadAut>,
    pub conjugator: Word,
}

impl OrbitCertificate {
    pub fn identity() -> OrbitCertificate {
        OrbitCertificate { steps: Vec::new(), conjugator: Word::identity() }
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut x = w.clone();
        for s in &self.steps {
            x = s.apply(&x);
        }
        x.conjugate_by(&self.conjugator)
    }

    /// Images of `x_1, ..., x_rank`.
    pub fn images(&self, rank: usize) -> Vec<Word> {
        (1..=rank).map(|i| self.apply(&Word::gen(i))).collect()
    }

    /// Audit form: one move per line, then `conj <word>`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for step in &self.steps {
            s.push_str(&step.to_string());
            s.push('\n');
        }
        s.push_str("conj ");
        s.push_str(&self.conjugator.to_text());
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> std::result::Result<OrbitCertificate, String> {
        let mut steps = Vec::new();
        let mut conjugator = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(c) = line.strip_prefix("conj") {
                conjugator = Some(Word::parse(c.trim()).map_err(|e| e.to_string())?);
            } else {
                steps.push(line.parse()?);
            }
        }
        Ok(OrbitCertificate {
            steps,
            conjugator: conjugator.ok_or("missing conj line")?,
        })
    }
}

/// How tuple coordinates are measured and compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Conjugacy classes: cyclic length, keys are least rotations.
    Cyclic,
    /// Elements: ordinary length, keys are the words themselves.
    Exact,
}

impl Mode {
    fn normalize(self, w: Word) -> Word {
        match self {
            Mode::Cyclic => w.cyclic_core(),
            Mode::Exact => w,
        }
    }

    fn key(self, ws: &[Word]) -> Vec<Word> {
        match self {
            Mode::Cyclic => ws.iter().map(Word::canonical_cyclic).collect(),
            Mode::Exact => ws.to_vec(),
        }
    }
}

fn total_len(ws: &[Word]) -> usize {
    ws.iter().map(Word::len).sum()
}

/// Whitehead search over a fixed rank; holds the move tables.
#[derive(Debug, Clone)]
pub struct OrbitSearch {
    rank: usize,
    shortening: Vec<WhiteheadAut>,
    level_moves: Vec<WhiteheadAut>,
}

impl OrbitSearch {
    pub fn new(rank: usize) -> OrbitSearch {
        let shortening: Vec<WhiteheadAut> =
            type_ii_moves(rank).into_iter().filter(|a| !a.is_identity()).collect();
        let mut level_moves = shortening.clone();
        for i in 1..=rank {
            for j in i + 1..=rank {
                level_moves.push(WhiteheadAut::transposition(rank, i, j));
            }
            level_moves.push(WhiteheadAut::inversion(rank, i));
        }
        OrbitSearch { rank, shortening, level_moves }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn check(&self, ws: &[Word]) -> Result<()> {
        let fg = FreeGroup::new(self.rank)?;
        ws.iter().try_for_each(|w| fg.check(w))
    }

    fn descend(&self, ws: &[Word], mode: Mode) -> (Vec<Word>, Vec<WhiteheadAut>) {
        let mut cur: Vec<Word> = ws.iter().cloned().map(|w| mode.normalize(w)).collect();
        let mut steps = Vec::new();
        let mut len = total_len(&cur);
        'outer: loop {
            for aut in &self.shortening {
                let next: Vec<Word> = cur.iter().map(|w| mode.normalize(aut.apply(w))).collect();
                let l = total_len(&next);
                if l < len {
                    cur = next;
                    len = l;
                    steps.push(aut.clone());
                    continue 'outer;
                }
            }
            return (cur, steps);
        }
    }

    /// Greedy descent on total cyclic length. Returns the cyclically reduced minimal
    /// tuple and the moves applied; applying the moves to `ws` gives words conjugate
    /// coordinate-wise to the returned tuple.
    pub fn minimize(&self, ws: &[Word]) -> (Vec<Word>, Vec<WhiteheadAut>) {
        self.descend(ws, Mode::Cyclic)
    }

    /// Breadth-first search of the level of `from` for a tuple whose key equals the
    /// key of `to`. Both tuples must already be minimal of equal total length.
    fn search_level(&self, from: &[Word], to: &[Word], mode: Mode) -> Option<Vec<WhiteheadAut>> {
        let target = mode.key(to);
        let start = mode.key(from);
        if start == target {
            return Some(Vec::new());
        }
        let level = total_len(from);
        // key -> (parent key, move index)
        let mut seen: HashMap<Vec<Word>, Option<(Vec<Word>, usize)>> = HashMap::new();
        seen.insert(start.clone(), None);
        let mut queue = VecDeque::from([from.to_vec()]);
        while let Some(cur) = queue.pop_front() {
            let cur_key = mode.key(&cur);
            for (mi, aut) in self.level_moves.iter().enumerate() {
                let next: Vec<Word> = cur.iter().map(|w| mode.normalize(aut.apply(w))).collect();
                if total_len(&next) != level {
                    continue;
                }
                let key = mode.key(&next);
                if seen.contains_key(&key) {
                    continue;
                }
                seen.insert(key.clone(), Some((cur_key.clone(), mi)));
                if key == target {
                    let mut path = Vec::new();
                    let mut k = key;
                    while let Some(Some((parent, m))) = seen.get(&k) {
                        path.push(self.level_moves[*m].clone());
                        k = parent.clone();
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(next);
            }
        }
        None
    }

    /// Decides whether an automorphism sends `us[i]` to `vs[i]` for every `i`, and
    /// returns one when it exists. Every returned certificate has been replayed.
    pub fn equivalent(&self, us: &[Word], vs: &[Word]) -> Result<Option<OrbitCertificate>> {
        if us.len() != vs.len() {
            return Err(Error::ArityMismatch { left: us.len(), right: vs.len() });
        }
        if us.is_empty() {
            return Err(Error::EmptyTuple);
        }
        self.check(us)?;
        self.check(vs)?;
        if us == vs {
            return Ok(Some(OrbitCertificate::identity()));
        }
        for (u, v) in us.iter().zip(vs) {
            if u.is_empty() != v.is_empty() || orbit_gcd_invariant(u) != orbit_gcd_invariant(v) {
                return Ok(None);
            }
        }
        let mode = if us.len() == 1 { Mode::Cyclic } else { Mode::Exact };
        let (min_u, to_min_u) = self.descend(us, mode);
        let (min_v, to_min_v) = self.descend(vs, mode);
        Ok(self.connect(us, vs, mode, (&min_u, to_min_u), (&min_v, &to_min_v)))
    }

    fn connect(
        &self,
        us: &[Word],
        vs: &[Word],
        mode: Mode,
        (min_u, to_min_u): (&[Word], Vec<WhiteheadAut>),
        (min_v, to_min_v): (&[Word], &[WhiteheadAut]),
    ) -> Option<OrbitCertificate> {
        if total_len(min_u) != total_len(min_v) {
            return None;
        }
        let mid = self.search_level(min_u, min_v, mode)?;
        let mut steps = to_min_u;
        steps.extend(mid);
        steps.extend(to_min_v.iter().rev().map(WhiteheadAut::inverse));
        let mut cert = OrbitCertificate { steps, conjugator: Word::identity() };
        if mode == Mode::Cyclic {
            let image = cert.apply(&us[0]);
            cert.conjugator = image.conjugator_to(&vs[0])?;
        }
        let replays = us.iter().zip(vs).all(|(u, v)| cert.apply(u) == *v);
        replays.then_some(cert)
    }

    /// [`OrbitSearch::equivalent`] against a target whose minimisation is cached by the caller.
    pub fn prepare(&self, us: &[Word]) -> Result<Prepared> {
        if us.is_empty() {
            return Err(Error::EmptyTuple);
        }
        self.check(us)?;
        let mode = if us.len() == 1 { Mode::Cyclic } else { Mode::Exact };
        let (minimal, steps) = self.descend(us, mode);
        Ok(Prepared { words: us.to_vec(), minimal, steps, mode })
    }

    pub fn equivalent_prepared(&self, a: &Prepared, b: &Prepared) -> Option<OrbitCertificate> {
        debug_assert_eq!(a.mode, b.mode);
        if a.words.len() != b.words.len() || total_len(&a.minimal) != total_len(&b.minimal) {
            return None;
        }
        if a.words == b.words {
            return Some(OrbitCertificate::identity());
        }
        for (u, v) in a.words.iter().zip(&b.words) {
            if u.is_empty() != v.is_empty() || orbit_gcd_invariant(u) != orbit_gcd_invariant(v) {
                return None;
            }
        }
        self.connect(&a.words, &b.words, a.mode, (&a.minimal, a.steps.clone()), (&b.minimal, &b.steps))
    }
}

/// A tuple together with its minimal form, for repeated orbit queries.
#[derive(Debug, Clone)]
pub struct Prepared {
    words: Vec<Word>,
    minimal: Vec<Word>,
    steps: Vec<WhiteheadAut>,
    mode: Mode,
}

impl Prepared {
    pub fn minimal_len(&self) -> usize {
        total_len(&self.minimal)
    }
}

/// Greedy minimisation of a tuple of cyclic words in `F_rank`.
pub fn minimize(rank: usize, ws: &[Word]) -> (Vec<Word>, Vec<WhiteheadAut>) {
    OrbitSearch::new(rank).minimize(ws)
}

/// See [`OrbitSearch::equivalent`].
pub fn equivalent(rank: usize, us: &[Word], vs: &[Word]) -> Result<Option<OrbitCertificate>> {
    OrbitSearch::new(rank).equivalent(us, vs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn l(s: &str) -> Letter {
        w(s).letters()[0]
    }

    #[test]
    fn enumeration_examples() {
        let r1 = enumerate_whitehead(1);
        assert!(r1.iter().filter(|a| matches!(a, WhiteheadAut::TypeII { .. })).all(|a| a.is_identity()));
        let r1_type_i: Vec<_> =
            r1.iter().filter(|a| matches!(a, WhiteheadAut::TypeI { .. })).cloned().collect();
        assert_eq!(r1_type_i, vec![WhiteheadAut::identity(1), WhiteheadAut::inversion(1, 1)]);

        let r2 = enumerate_whitehead(2);
        let with_x1 = r2
            .iter()
            .filter(|a| matches!(a, WhiteheadAut::TypeII { multiplier, .. } if *multiplier == l("a")))
            .count();
        assert_eq!(with_x1, 4);
        for n in 1..4 {
            assert!(enumerate_whitehead(n).contains(&WhiteheadAut::identity(n)));
        }
    }

    #[test]
    fn convention_table() {
        let a = l("b");
        assert_eq!(WhiteheadAut::type_ii(a, &[l("a")]).apply(&w("a")), w("ab"));
        assert_eq!(WhiteheadAut::type_ii(a, &[l("A")]).apply(&w("a")), w("Ba"));
        assert_eq!(WhiteheadAut::type_ii(a, &[l("a"), l("A")]).apply(&w("a")), w("Bab"));
        assert_eq!(WhiteheadAut::type_ii(a, &[]).apply(&w("a")), w("a"));
        assert_eq!(WhiteheadAut::type_ii(a, &[l("a")]).apply(&w("b")), w("b"));
    }

    #[test]
    fn apply_examples() {
        assert_eq!(WhiteheadAut::transposition(2, 1, 2).apply(&w("aB")), w("bA"));
        assert_eq!(WhiteheadAut::type_ii(l("b"), &[l("a")]).apply(&w("a")), w("ab"));
        assert_eq!(WhiteheadAut::identity(2).apply(&w("abAAB")), w("abAAB"));
    }

    #[test]
    fn inverses_undo_moves() {
        let probe = w("abAbbaBB");
        for aut in enumerate_whitehead(2) {
            assert_eq!(aut.inverse().apply(&aut.apply(&probe)), probe, "{aut}");
        }
    }

    #[test]
    fn minimize_examples() {
        let s = OrbitSearch::new(2);
        assert_eq!(s.minimize(&[w("abA")]).0, vec![w("b")]);
        assert_eq!(s.minimize(&[w("ab")]).0[0].len(), 1);
        let (m, steps) = s.minimize(&[w("abAB")]);
        assert_eq!(m, vec![w("abAB")]);
        assert!(steps.is_empty());
    }

    #[test]
    fn equivalent_examples() {
        let s = OrbitSearch::new(2);
        let c = s.equivalent(&[w("a")], &[w("ab")]).unwrap().unwrap();
        assert_eq!(c.apply(&w("a")), w("ab"));
        assert_eq!(s.equivalent(&[w("aa")], &[w("abAB")]).unwrap(), None);
        let c = s.equivalent(&[w("abAbb")], &[w("abAbb")]).unwrap().unwrap();
        assert!(c.steps.is_empty());
        assert_eq!(
            s.equivalent(&[w("a")], &[w("a"), w("b")]),
            Err(Error::ArityMismatch { left: 1, right: 2 })
        );
        assert!(matches!(s.equivalent(&[w("c")], &[w("a")]), Err(Error::LetterBeyondRank { .. })));
    }

    #[test]
    fn exact_equality_needs_the_conjugator() {
        let s = OrbitSearch::new(2);
        let c = s.equivalent(&[w("a")], &[w("bab")]).unwrap().unwrap();
        assert_eq!(c.apply(&w("a")), w("bab"));
        let c = s.equivalent(&[w("ab")], &[w("ba")]).unwrap().unwrap();
        assert_eq!(c.apply(&w("ab")), w("ba"));
    }

    #[test]
    fn tuples() {
        let s = OrbitSearch::new(2);
        let c = s.equivalent(&[w("a"), w("b")], &[w("b"), w("a")]).unwrap().unwrap();
        assert_eq!(c.images(2), vec![w("b"), w("a")]);
        assert_eq!(s.equivalent(&[w("a"), w("a")], &[w("a"), w("b")]).unwrap(), None);
        // Coordinate-wise conjugate but not simultaneously: a, b -> a, aba^-1 is fine,
        // a, b -> bab^-1, aba^-1 is not (the image pair would have to generate F_2 with
        // commutator conjugate to [a, b]).
        assert!(s.equivalent(&[w("a"), w("b")], &[w("a"), w("abA")]).unwrap().is_some());
    }

    #[test]
    fn gcd_invariant_examples() {
        assert_eq!(orbit_gcd_invariant(&w("aabb")), 2);
        assert_eq!(orbit_gcd_invariant(&w("abAB")), 0);
        assert_eq!(orbit_gcd_invariant(&w("a")), 1);
    }

    #[test]
    fn certificate_text_round_trip() {
        let s = OrbitSearch::new(2);
        let target = WhiteheadAut::type_ii(l("A"), &[l("b"), l("B")])
            .apply(&WhiteheadAut::transposition(2, 1, 2).apply(&w("aabAb")));
        let c = s.equivalent(&[w("aabAb")], &[target]).unwrap().unwrap();
        let text = c.to_text();
        assert!(text.ends_with(&format!("conj {}\n", c.conjugator)));
        assert_eq!(OrbitCertificate::from_text(&text).unwrap(), c);
        assert_eq!(WhiteheadAut::type_ii(l("b"), &[l("a")]).to_string(), "typeII a=b S={b,a}");
    }
}
