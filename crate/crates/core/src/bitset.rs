//! Fixed-width bitsets over element indices.

use std::fmt;

use crate::group::{Element, Group};

pub(crate) fn words_for(universe: usize) -> usize {
    universe.div_ceil(64).max(1)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    words: Vec<u64>,
    universe: usize,
}

impl ElementSet {
    pub fn new(universe: usize) -> ElementSet {
        ElementSet {
            words: vec![0; words_for(universe)],
            universe,
        }
    }

    pub fn full(universe: usize) -> ElementSet {
        let mut set = ElementSet::new(universe);
        for i in 0..universe {
            set.insert(Element(i as u32));
        }
        set
    }

    pub fn from_elements(universe: usize, elems: impl IntoIterator<Item = Element>) -> ElementSet {
        let mut set = ElementSet::new(universe);
        for e in elems {
            set.insert(e);
        }
        set
    }

    pub(crate) fn from_words(universe: usize, words: &[u64]) -> ElementSet {
        ElementSet {
            words: words.to_vec(),
            universe,
        }
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, e: Element) {
        assert!(e.index() < self.universe, "element outside the set universe");
        self.words[e.index() / 64] |= 1 << (e.index() % 64);
    }

    pub fn contains(&self, e: Element) -> bool {
        e.index() < self.universe && self.words[e.index() / 64] >> (e.index() % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &ElementSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersects(&self, other: &ElementSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros();
                rest &= rest - 1;
                Some(Element(wi as u32 * 64 + bit))
            })
        })
    }

    /// Canonical words of the members, in index order.
    pub fn names<'g>(&self, group: &'g Group) -> Vec<&'g str> {
        self.iter().map(|e| group.name(e)).collect()
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|e| e.index())).finish()
    }
}

/// `dst |= { a * h : a in src }`, with `action[a] = a * h`.
#[inline]
pub(crate) fn or_right_mul(src: &[u64], action: &[u32], dst: &mut [u64]) {
    for (wi, &w) in src.iter().enumerate() {
        let mut rest = w;
        while rest != 0 {
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let image = action[wi * 64 + bit] as usize;
            dst[image / 64] |= 1 << (image % 64);
        }
    }
}

#[inline]
pub(crate) fn test_bit(words: &[u64], index: usize) -> bool {
    words[index / 64] >> (index % 64) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], index: usize) {
    words[index / 64] |= 1 << (index % 64);
}
