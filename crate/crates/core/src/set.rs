//! Dense element ids and a bitset-backed element set.

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// Index of an element of the ground set, dense in `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u32);

impl ElementId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for ElementId {
    fn from(v: u32) -> Self {
        ElementId(v)
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

const WORD: usize = 64;

/// A set of element ids.
///
/// Stored as a bitset with trailing zero words trimmed, so structural
/// equality and hashing coincide with set equality. Cardinality is cached.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ElementSet {
    words: SmallVec<[u64; 4]>,
    len: usize,
}

impl ElementSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The full ground set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut words: SmallVec<[u64; 4]> = SmallVec::from_elem(u64::MAX, n / WORD);
        if !n.is_multiple_of(WORD) {
            words.push((1u64 << (n % WORD)) - 1);
        }
        Self { words, len: n }
    }

    pub fn singleton(e: ElementId) -> Self {
        let mut s = Self::new();
        s.insert(e);
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, e: ElementId) -> bool {
        let (w, b) = (e.index() / WORD, e.index() % WORD);
        self.words.get(w).is_some_and(|x| x >> b & 1 == 1)
    }

    /// Inserts `e`; returns whether it was newly added.
    pub fn insert(&mut self, e: ElementId) -> bool {
        let (w, b) = (e.index() / WORD, e.index() % WORD);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let mask = 1u64 << b;
        if self.words[w] & mask != 0 {
            return false;
        }
        self.words[w] |= mask;
        self.len += 1;
        true
    }

    /// Removes `e`; returns whether it was present.
    pub fn remove(&mut self, e: ElementId) -> bool {
        let (w, b) = (e.index() / WORD, e.index() % WORD);
        let mask = 1u64 << b;
        match self.words.get_mut(w) {
            Some(x) if *x & mask != 0 => {
                *x &= !mask;
                self.len -= 1;
                self.trim();
                true
            }
            _ => false,
        }
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    /// Largest member, if any.
    pub fn max(&self) -> Option<ElementId> {
        let w = self.words.len().checked_sub(1)?;
        let top = self.words[w];
        Some(ElementId((w * WORD + 63 - top.leading_zeros() as usize) as u32))
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            word: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Members in increasing order.
    pub fn to_vec(&self) -> Vec<ElementId> {
        self.iter().collect()
    }

    /// Members as raw ids in increasing order.
    pub fn ids(&self) -> Vec<u32> {
        self.iter().map(|e| e.0).collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(short.words.iter()) {
            *w |= s;
        }
        Self::from_words(words)
    }

    pub fn union_with(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (w, o) in self.words.iter_mut().zip(other.words.iter()) {
            *w |= o;
        }
        self.len = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut words = self.words.clone();
        for (w, o) in words.iter_mut().zip(other.words.iter()) {
            *w &= !o;
        }
        Self::from_words(words)
    }

    pub fn difference_with(&mut self, other: &Self) {
        for (w, o) in self.words.iter_mut().zip(other.words.iter()) {
            *w &= !o;
        }
        self.trim();
        self.len = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| a & b)
            .collect();
        Self::from_words(words)
    }

    /// `|self ∩ other|` without allocating.
    #[inline]
    pub fn intersection_len(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    /// `E \ self` for the ground set `E = {0, .., n-1}`.
    pub fn complement(&self, n: usize) -> Self {
        Self::full(n).difference(self)
    }

    /// Builds a set from the low `n` bits of `mask` (for `n <= 64`).
    pub fn from_mask(mask: u64) -> Self {
        let mut words = SmallVec::new();
        if mask != 0 {
            words.push(mask);
        }
        Self {
            words,
            len: mask.count_ones() as usize,
        }
    }

    /// Inverse of [`ElementSet::from_mask`]; `None` if a member is `>= 64`.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn from_words(words: SmallVec<[u64; 4]>) -> Self {
        let len = words.iter().map(|w| w.count_ones() as usize).sum();
        let mut s = Self { words, len };
        s.trim();
        s
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|e| e.0)).finish()
    }
}

impl FromIterator<ElementId> for ElementSet {
    fn from_iter<I: IntoIterator<Item = ElementId>>(iter: I) -> Self {
        let mut s = Self::new();
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl FromIterator<u32> for ElementSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        iter.into_iter().map(ElementId).collect()
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = ElementId;
    type IntoIter = Iter<'a>;
    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl Serialize for ElementSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(|e| e.0))
    }
}

impl<'de> Deserialize<'de> for ElementSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let ids = Vec::<u32>::deserialize(d)?;
        Ok(ids.into_iter().collect())
    }
}

/// Iterator over members in increasing order.
pub struct Iter<'a> {
    words: &'a [u64],
    word: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = ElementId;

    fn next(&mut self) -> Option<ElementId> {
        while self.current == 0 {
            self.word += 1;
            self.current = *self.words.get(self.word)?;
        }
        let b = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(ElementId((self.word * WORD + b) as u32))
    }
}

/// Shorthand for building a set from raw ids.
pub fn set_of(ids: &[u32]) -> ElementSet {
    ids.iter().copied().collect()
}
