//! Reduced words in a free group of finite rank.
//!
//! A [`Word`] is a flat sequence of signed generator indices: `x_i` is stored
//! as `i` and `x_i^-1` as `-i`. Every constructor freely reduces, so a `Word`
//! is always reduced and its length is the word length in the free basis.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator `x_i` or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
#[repr(transparent)]
pub struct Letter(i32);

impl Letter {
    /// `x_index^sign`. Panics on index 0.
    pub fn new(index: usize, inverse: bool) -> Letter {
        assert!(index >= 1, "generator indices start at 1");
        let i = index as i32;
        Letter(if inverse { -i } else { i })
    }

    pub fn gen(index: usize) -> Letter {
        Letter::new(index, false)
    }

    pub fn from_signed(raw: i32) -> Letter {
        assert!(raw != 0, "0 is not a letter");
        Letter(raw)
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn sign(self) -> i32 {
        self.0.signum()
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// Position in the order `x1, X1, x2, X2, ...`; used to index bitsets
    /// over the signed alphabet.
    pub fn slot(self) -> usize {
        2 * (self.index() - 1) + usize::from(self.is_inverse())
    }

    pub fn from_slot(slot: usize) -> Letter {
        Letter::new(slot / 2 + 1, slot % 2 == 1)
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        debug_assert!(self.index() <= 26);
        (base + (self.index() - 1) as u8) as char
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

/// Exponent sums of a word, one entry per generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianVector(pub Vec<i64>);

impl AbelianVector {
    /// gcd of the entries; 0 for the zero vector.
    pub fn gcd(&self) -> u64 {
        self.0.iter().fold(0u64, |g, &e| gcd(g, e.unsigned_abs()))
    }

    pub fn negated(&self) -> AbelianVector {
        AbelianVector(self.0.iter().map(|e| -e).collect())
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Free reduction of a raw letter sequence in one stack pass.
pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for l in raw {
        push_reduced(&mut out, l);
    }
    Word(out)
}

#[inline]
fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn gen(index: usize) -> Word {
        Word(vec![Letter::gen(index)])
    }

    /// Reduces `raw`, given as signed indices (`-2` is `x2^-1`). Zeros are skipped.
    pub fn from_signed(raw: &[i32]) -> Word {
        reduce(raw.iter().filter(|&&x| x != 0).map(|&x| Letter(x)))
    }

    /// Wraps letters already known to be reduced.
    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Word {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn to_signed(&self) -> Vec<i32> {
        self.0.iter().map(|l| l.0).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Largest generator index occurring in the word, 0 for the identity.
    pub fn max_index(&self) -> usize {
        self.0.iter().map(|l| l.index()).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product `self * other`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    /// In-place right multiplication.
    pub fn mul_assign(&mut self, other: &Word) {
        for &l in &other.0 {
            push_reduced(&mut self.0, l);
        }
    }

    pub fn push(&mut self, l: Letter) {
        push_reduced(&mut self.0, l);
    }

    pub fn pow(&self, exp: i64) -> Word {
        let base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..exp.unsigned_abs() {
            out.mul_assign(&base);
        }
        out
    }

    /// `c * self * c^-1`.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.mul(self).mul(&c.inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => self.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }

    /// Splits `self = conjugator * core * conjugator^-1` with `core`
    /// cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        let core = Word(self.0[k..n - k].to_vec());
        let conj = Word(self.0[..k].to_vec());
        (core, conj)
    }

    pub fn cyclic_core(&self) -> Word {
        self.cyclic_reduce().0
    }

    /// Length of the cyclic reduction.
    pub fn cyclic_len(&self) -> usize {
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        n - 2 * k
    }

    /// Left rotation by `k` letters. Only meaningful for cyclically reduced words,
    /// where the result is again reduced.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// Lexicographically least rotation of the cyclic reduction. Two words are
    /// conjugate iff their canonical cyclic forms agree.
    pub fn canonical_cyclic(&self) -> Word {
        let core = self.cyclic_core();
        let n = core.len();
        if n == 0 {
            return core;
        }
        let mut best = 0;
        for k in 1..n {
            let better = (0..n)
                .map(|i| (core.0[(k + i) % n], core.0[(best + i) % n]))
                .find(|(a, b)| a != b)
                .is_some_and(|(a, b)| a < b);
            if better {
                best = k;
            }
        }
        core.rotate(best)
    }

    /// Returns `c` with `c * self * c^-1 = other`, if the two are conjugate.
    pub fn conjugator_to(&self, other: &Word) -> Option<Word> {
        let (core_a, conj_a) = self.cyclic_reduce();
        let (core_b, conj_b) = other.cyclic_reduce();
        if core_a.len() != core_b.len() {
            return None;
        }
        if core_a.is_empty() {
            return Some(Word::identity());
        }
        let n = core_a.len();
        // core_a rotated left by k equals core_b, i.e. core_b = p^-1 core_a p with p = core_a[..k].
        for k in 0..n {
            if (0..n).all(|i| core_a.0[(k + i) % n] == core_b.0[i]) {
                let p = Word(core_a.0[..k].to_vec());
                // other = conj_b core_b conj_b^-1 = conj_b p^-1 conj_a^-1 self conj_a p conj_b^-1
                let c = conj_b.mul(&p.inverse()).mul(&conj_a.inverse());
                debug_assert_eq!(self.conjugate_by(&c), *other);
                return Some(c);
            }
        }
        None
    }

    pub fn abelianize(&self, rank: usize) -> AbelianVector {
        let mut v = vec![0i64; rank.max(self.max_index())];
        for l in &self.0 {
            v[l.index() - 1] += l.sign() as i64;
        }
        AbelianVector(v)
    }

    /// Evaluates `self` at `images`: letter `x_i` becomes `images[i-1]`.
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        let mut out = Vec::new();
        for &l in &self.0 {
            let img = images.get(l.index() - 1).ok_or(Error::ImageIndexOutOfRange {
                index: l.index(),
                available: images.len(),
            })?;
            if l.is_inverse() {
                for &m in img.0.iter().rev() {
                    push_reduced(&mut out, m.inverse());
                }
            } else {
                for &m in &img.0 {
                    push_reduced(&mut out, m);
                }
            }
        }
        Ok(Word(out))
    }

    /// Text form: `a, b, ...` for generators, capitals for inverses, `1` for the identity.
    pub fn to_text(&self) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0.iter().map(|l| l.to_char()).collect()
    }

    /// Parses the letter syntax without a rank bound (indices up to 26).
    pub fn parse(text: &str) -> Result<Word> {
        FreeGroup::new(26).expect("positive rank").parse(text)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl From<Letter> for Word {
    fn from(l: Letter) -> Word {
        Word::letter(l)
    }
}

/// The ambient free group `F_n`; carries the rank shared by every word of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FreeGroup {
    rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Result<FreeGroup> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        Ok(FreeGroup { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// All `2n` signed letters in slot order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..2 * self.rank).map(Letter::from_slot)
    }

    pub fn generators(&self) -> Vec<Word> {
        (1..=self.rank).map(Word::gen).collect()
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        match w.max_index() {
            i if i > self.rank => Err(Error::LetterBeyondRank { index: i, rank: self.rank }),
            _ => Ok(()),
        }
    }

    pub fn parse(&self, text: &str) -> Result<Word> {
        let t = text.trim();
        if t.is_empty() || t == "1" {
            return Ok(Word::identity());
        }
        let mut raw = Vec::with_capacity(t.len());
        for ch in t.chars() {
            let (index, inverse) = match ch {
                'a'..='z' => ((ch as u8 - b'a') as usize + 1, false),
                'A'..='Z' => ((ch as u8 - b'A') as usize + 1, true),
                _ => {
                    return Err(Error::UnknownCharacter { ch, text: t.to_string() });
                }
            };
            if index > self.rank {
                return Err(Error::LetterBeyondRank { index, rank: self.rank });
            }
            raw.push(Letter::new(index, inverse));
        }
        Ok(reduce(raw))
    }

    /// Reduced words of length exactly `len`, in length-lexicographic slot order.
    pub fn words_of_length(&self, len: usize) -> Vec<Word> {
        let mut out = vec![Word::identity()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * (2 * self.rank));
            for w in &out {
                for l in self.letters() {
                    if w.last() != Some(l.inverse()) {
                        let mut v = w.0.clone();
                        v.push(l);
                        next.push(Word(v));
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Reduced words of length at most `max_len`, shortest first, starting with the identity.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        (0..=max_len).flat_map(|l| self.words_of_length(l)).collect()
    }

    /// Number of reduced words of length exactly `len`: `2n (2n-1)^(len-1)`.
    pub fn count_of_length(&self, len: usize) -> u64 {
        if len == 0 {
            return 1;
        }
        let k = 2 * self.rank as u64;
        k * (k - 1).pow(len as u32 - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(Word::from_signed(&[1, -1, 2]), w("b"));
        assert_eq!(Word::from_signed(&[]), Word::identity());
        assert_eq!(Word::from_signed(&[1, 2, -2, 1]), w("aa"));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("ab").inverse(), w("BA"));
        assert_eq!(Word::identity().inverse(), Word::identity());
        assert_eq!(w("A").inverse(), w("a"));
    }

    #[test]
    fn substitute_examples() {
        assert_eq!(w("ab").substitute(&[w("aa"), w("B")]).unwrap(), w("aaB"));
        assert_eq!(w("aA").substitute(&[w("abc"), w("c")]).unwrap(), Word::identity());
        assert_eq!(w("ab").substitute(&[w("ab"), w("B")]).unwrap(), w("a"));
        assert_eq!(
            w("abc").substitute(&[w("a"), w("b")]),
            Err(Error::ImageIndexOutOfRange { index: 3, available: 2 })
        );
    }

    #[test]
    fn abelianize_examples() {
        assert_eq!(w("abAB").abelianize(2).0, vec![0, 0]);
        assert_eq!(w("aa").abelianize(2).0, vec![2, 0]);
        assert_eq!(w("abb").abelianize(2).0, vec![1, 2]);
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(w("abA").cyclic_reduce(), (w("b"), w("a")));
        assert_eq!(w("ab").cyclic_reduce(), (w("ab"), Word::identity()));
        assert_eq!(w("Baab").cyclic_reduce(), (w("aa"), w("B")));
        assert_eq!(w("aba").cyclic_reduce(), (w("aba"), Word::identity()));
        assert_eq!(w("a").cyclic_reduce(), (w("a"), Word::identity()));
    }

    #[test]
    fn conjugator_recovers_conjugation() {
        let a = w("abbAB");
        let c = w("bA");
        let b = a.conjugate_by(&c);
        let found = a.conjugator_to(&b).unwrap();
        assert_eq!(a.conjugate_by(&found), b);
        assert_eq!(w("ab").conjugator_to(&w("aB")), None);
        assert_eq!(w("ab").canonical_cyclic(), w("ba").canonical_cyclic());
    }

    #[test]
    fn parse_rejects_letters_beyond_rank() {
        let f2 = FreeGroup::new(2).unwrap();
        assert_eq!(f2.parse("abAB").unwrap().to_signed(), vec![1, 2, -1, -2]);
        assert_eq!(f2.parse("1").unwrap(), Word::identity());
        assert_eq!(f2.parse("").unwrap(), Word::identity());
        assert_eq!(f2.parse("c"), Err(Error::LetterBeyondRank { index: 3, rank: 2 }));
        assert!(matches!(f2.parse("a-b"), Err(Error::UnknownCharacter { ch: '-', .. })));
        assert_eq!(FreeGroup::new(0), Err(Error::ZeroRank));
    }

    #[test]
    fn enumeration_counts() {
        let f2 = FreeGroup::new(2).unwrap();
        for len in 0..5 {
            assert_eq!(f2.words_of_length(len).len() as u64, f2.count_of_length(len));
        }
        assert_eq!(f2.words_up_to(4).len(), 161);
    }
}
