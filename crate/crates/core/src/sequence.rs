//! Sequences over a group, stored as multisets in normal form.
//!
//! Text format: element words separated by commas inside brackets, e.g.
//! `[y, y, x*y^2]`. Whitespace is ignored; `[]` is the empty sequence. Each
//! word is evaluated in the group, so `[y*x]` and `[x*y^-1]` denote the same
//! sequence. Output always uses canonical words in index order.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{GroupError, SequenceError};
use crate::group::{Coset, Element, Group};
use crate::spec::GroupSpec;

/// A finite multiset of group elements; order carries no information.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GSequence {
    group: GroupSpec,
    elems: Vec<Element>,
}

impl GSequence {
    pub fn new(group: &Group, elems: impl IntoIterator<Item = Element>) -> GSequence {
        GSequence::from_spec(group.spec().clone(), elems)
    }

    pub(crate) fn from_spec(group: GroupSpec, elems: impl IntoIterator<Item = Element>) -> GSequence {
        let mut elems: Vec<Element> = elems.into_iter().collect();
        elems.sort_unstable();
        GSequence { group, elems }
    }

    pub(crate) fn from_sorted_indices(group: &GroupSpec, indices: &[u32]) -> GSequence {
        debug_assert!(indices.windows(2).all(|w| w[0] <= w[1]));
        GSequence {
            group: group.clone(),
            elems: indices.iter().map(|&i| Element(i)).collect(),
        }
    }

    pub fn empty(group: &Group) -> GSequence {
        GSequence::new(group, [])
    }

    /// `(g)^k`
    pub fn repeated(group: &Group, g: Element, k: usize) -> GSequence {
        GSequence::new(group, std::iter::repeat_n(g, k))
    }

    pub fn group_spec(&self) -> &GroupSpec {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Elements in normal form (non-decreasing index).
    pub fn elements(&self) -> &[Element] {
        &self.elems
    }

    /// Distinct elements with their multiplicities, in index order.
    pub fn counts(&self) -> Vec<(Element, usize)> {
        let mut out: Vec<(Element, usize)> = Vec::new();
        for &e in &self.elems {
            match out.last_mut() {
                Some((last, k)) if *last == e => *k += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    pub fn multiplicity(&self, e: Element) -> usize {
        self.elems.iter().filter(|&&x| x == e).count()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.counts().iter().map(|&(_, k)| k).max().unwrap_or(0)
    }

    fn check_same_group(&self, other: &GSequence) -> Result<(), SequenceError> {
        if self.group != other.group {
            return Err(SequenceError::GroupMismatch {
                left: self.group.to_string(),
                right: other.group.to_string(),
            });
        }
        Ok(())
    }

    /// Multiset sum.
    pub fn concat(&self, other: &GSequence) -> Result<GSequence, SequenceError> {
        self.check_same_group(other)?;
        Ok(GSequence::from_spec(
            self.group.clone(),
            self.elems.iter().chain(&other.elems).copied(),
        ))
    }

    pub fn contains(&self, sub: &GSequence) -> bool {
        sub.group == self.group && sub.counts().iter().all(|&(e, k)| self.multiplicity(e) >= k)
    }

    /// Multiset difference `S T^-1`.
    pub fn remove(&self, sub: &GSequence) -> Result<GSequence, SequenceError> {
        self.check_same_group(sub)?;
        if !self.contains(sub) {
            return Err(SequenceError::NotContained {
                sub: sub.to_string(),
                sup: self.to_string(),
            });
        }
        let mut rest = self.elems.clone();
        for e in &sub.elems {
            let pos = rest.iter().position(|x| x == e).expect("containment checked");
            rest.remove(pos);
        }
        Ok(GSequence {
            group: self.group.clone(),
            elems: rest,
        })
    }

    /// `S^k`: every multiplicity scaled by k.
    pub fn power(&self, k: i64) -> Result<GSequence, SequenceError> {
        if k < 0 {
            return Err(SequenceError::NegativePower(k));
        }
        Ok(GSequence::from_spec(
            self.group.clone(),
            self.elems.iter().flat_map(|&e| std::iter::repeat_n(e, k as usize)),
        ))
    }

    fn coset_part(&self, group: &Group, coset: Coset) -> Result<GSequence, SequenceError> {
        let mut kept = Vec::new();
        for &e in &self.elems {
            if group.coset_split(e)? == coset {
                kept.push(e);
            }
        }
        Ok(GSequence {
            group: self.group.clone(),
            elems: kept,
        })
    }

    /// Elements lying in `H = <y>`.
    pub fn h_part(&self, group: &Group) -> Result<GSequence, SequenceError> {
        self.coset_part(group, Coset::H)
    }

    /// Elements lying in `N = x<y>`.
    pub fn n_part(&self, group: &Group) -> Result<GSequence, SequenceError> {
        self.coset_part(group, Coset::N)
    }

    /// Pointwise inverse `(g_1^-1, ..., g_l^-1)`.
    pub fn inverted(&self, group: &Group) -> GSequence {
        GSequence::from_spec(self.group.clone(), self.elems.iter().map(|&e| group.inverse(e)))
    }

    /// Every distinct nonempty sub-multiset, each exactly once.
    pub fn sub_multisets(&self) -> SubMultisets {
        let counts = self.counts();
        SubMultisets {
            group: self.group.clone(),
            limits: counts.iter().map(|&(_, k)| k).collect(),
            current: vec![0; counts.len()],
            distinct: counts.into_iter().map(|(e, _)| e).collect(),
            done: false,
        }
    }

    /// Parses the bracketed text format, evaluating each word in `group`.
    pub fn parse(group: &Group, text: &str) -> Result<GSequence, SequenceError> {
        let mut elems = Vec::new();
        for word in bracket_items(text)? {
            elems.push(group.parse_element(word)?);
        }
        Ok(GSequence::new(group, elems))
    }

    /// Parses canonical words only, without building the group.
    pub fn parse_canonical(spec: &GroupSpec, text: &str) -> Result<GSequence, SequenceError> {
        let order = spec.order_u64() as usize;
        let lookup: HashMap<String, u32> = (0..order).map(|i| (spec.element_name(i), i as u32)).collect();
        let mut elems = Vec::new();
        for word in bracket_items(text)? {
            let compact: String = word.chars().filter(|c| !c.is_whitespace()).collect();
            let idx = lookup.get(&compact).ok_or_else(|| GroupError::Parse {
                token: word.to_string(),
                reason: format!("not a canonical element word of {spec}"),
            })?;
            elems.push(Element(*idx));
        }
        Ok(GSequence::from_spec(spec.clone(), elems))
    }
}

fn bracket_items(text: &str) -> Result<Vec<&str>, GroupError> {
    let trimmed = text.trim();
    let inner = trimmed
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| GroupError::Parse {
            token: trimmed.to_string(),
            reason: "sequence must be enclosed in brackets".to_string(),
        })?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|w| {
            if w.trim().is_empty() {
                Err(GroupError::Parse {
                    token: trimmed.to_string(),
                    reason: "empty element between commas".to_string(),
                })
            } else {
                Ok(w.trim())
            }
        })
        .collect()
}

impl fmt::Display for GSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&self.group.element_name(e.index()))?;
        }
        f.write_str("]")
    }
}

impl Serialize for GSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Odometer over count vectors; see [`GSequence::sub_multisets`].
pub struct SubMultisets {
    group: GroupSpec,
    distinct: Vec<Element>,
    limits: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl Iterator for SubMultisets {
    type Item = GSequence;

    fn next(&mut self) -> Option<GSequence> {
        if self.done {
            return None;
        }
        // advance first, so the all-zero vector is skipped
        let mut i = 0;
        loop {
            if i == self.limits.len() {
                self.done = true;
                return None;
            }
            if self.current[i] < self.limits[i] {
                self.current[i] += 1;
                break;
            }
            self.current[i] = 0;
            i += 1;
        }
        let elems = self
            .distinct
            .iter()
            .zip(&self.current)
            .flat_map(|(&e, &k)| std::iter::repeat_n(e, k));
        Some(GSequence::from_spec(self.group.clone(), elems))
    }
}
