//! Reachable subsequence products.
//!
//! A product of a sub-multiset `U` "in some order" is any ordered product of
//! its elements. Every ordering of `U` is obtained by appending one element of
//! `U` on the right of an ordering of `U` minus that element, so
//!
//! ```text
//! P(U) = union over distinct h in U of  P(U - h) * h,      P(empty) = {1}
//! ```
//!
//! enumerates all ordered products. The DP is keyed by count vectors over the
//! distinct elements and processed in layers of equal size, keeping two
//! layers in memory.

use std::collections::HashMap;

use serde::Serialize;

use crate::bitset::{or_right_mul, words_for, ElementSet};
use crate::error::{EngineError, SequenceError};
use crate::group::{Element, Group};
use crate::sequence::GSequence;
use crate::spec::GroupSpec;

/// Most distinct elements the DP accepts.
pub const MAX_DISTINCT: usize = 24;
/// Largest sub-multiset state space the DP accepts.
pub const MAX_STATES: u128 = 100_000_000;
/// Longest sequence the permutation oracle accepts.
pub const ORACLE_MAX_LEN: usize = 8;

/// Elements attainable as an ordered product of a nonempty subsequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachableSet {
    pub group: GroupSpec,
    pub members: ElementSet,
}

impl ReachableSet {
    pub fn contains(&self, e: Element) -> bool {
        self.members.contains(e)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.members
            .iter()
            .map(|e| self.group.element_name(e.index()))
            .collect()
    }
}

impl Serialize for ReachableSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.names())
    }
}

/// `action[a] = a * h` for every element `a`.
pub(crate) fn right_action(group: &Group, h: Element) -> Vec<u32> {
    group.elements().map(|a| group.mul(a, h).0).collect()
}

fn check_group(group: &Group, seq: &GSequence) -> Result<(), EngineError> {
    if seq.group_spec() != group.spec() {
        return Err(SequenceError::GroupMismatch {
            left: group.spec().to_string(),
            right: seq.group_spec().to_string(),
        }
        .into());
    }
    Ok(())
}

/// Product of `(m_i + 1)` over the multiplicities, saturating.
pub fn state_space(seq: &GSequence) -> u128 {
    seq.counts()
        .iter()
        .fold(1u128, |acc, &(_, k)| acc.saturating_mul(k as u128 + 1))
}

fn guard(seq: &GSequence) -> Result<(), EngineError> {
    let distinct = seq.counts().len();
    if distinct > MAX_DISTINCT {
        return Err(EngineError::TooManyDistinct {
            distinct,
            limit: MAX_DISTINCT,
        });
    }
    let estimate = state_space(seq);
    if estimate > MAX_STATES {
        return Err(EngineError::StateSpaceTooLarge {
            estimate,
            limit: MAX_STATES,
        });
    }
    Ok(())
}

/// Runs the layered DP. Stops as soon as a member of `stop` is produced and
/// reports whether that happened.
fn layered_dp(group: &Group, seq: &GSequence, stop: Option<&ElementSet>) -> Result<(ElementSet, bool), EngineError> {
    check_group(group, seq)?;
    guard(seq)?;
    let order = group.order();
    let words = words_for(order);
    let counts = seq.counts();
    let actions: Vec<Vec<u32>> = counts.iter().map(|&(h, _)| right_action(group, h)).collect();
    let mut strides = Vec::with_capacity(counts.len());
    let mut stride = 1u64;
    for &(_, k) in &counts {
        strides.push(stride);
        stride *= k as u64 + 1;
    }

    let mut reach = vec![0u64; words];
    let hits = |set: &[u64]| stop.is_some_and(|s| set.iter().zip(s.words()).any(|(a, b)| a & b != 0));

    let mut layer_keys: Vec<u64> = vec![0];
    let mut layer_sets: Vec<u64> = vec![0; words];
    layer_sets[group.identity().index() / 64] |= 1 << (group.identity().index() % 64);

    for _ in 0..seq.len() {
        let mut positions: HashMap<u64, usize> = HashMap::new();
        let mut next_keys: Vec<u64> = Vec::new();
        let mut next_sets: Vec<u64> = Vec::new();
        for (pos, &key) in layer_keys.iter().enumerate() {
            let src = &layer_sets[pos * words..(pos + 1) * words];
            for (i, &(_, limit)) in counts.iter().enumerate() {
                let digit = key / strides[i] % (limit as u64 + 1);
                if digit as usize >= limit {
                    continue;
                }
                let child = key + strides[i];
                let slot = *positions.entry(child).or_insert_with(|| {
                    next_keys.push(child);
                    next_sets.extend(std::iter::repeat_n(0, words));
                    next_keys.len() - 1
                });
                let dst = &mut next_sets[slot * words..(slot + 1) * words];
                or_right_mul(src, &actions[i], dst);
                if hits(dst) {
                    for (r, d) in reach.iter_mut().zip(dst.iter()) {
                        *r |= d;
                    }
                    return Ok((ElementSet::from_words(order, &reach), true));
                }
            }
        }
        for chunk in next_sets.chunks_exact(words) {
            for (r, d) in reach.iter_mut().zip(chunk) {
                *r |= d;
            }
        }
        layer_keys = next_keys;
        layer_sets = next_sets;
    }
    Ok((ElementSet::from_words(order, &reach), false))
}

/// Exact set of products, in some order, of the nonempty subsequences of `seq`.
pub fn reachable_products(group: &Group, seq: &GSequence) -> Result<ReachableSet, EngineError> {
    if seq.is_empty() {
        return Err(EngineError::EmptySequence);
    }
    let (members, _) = layered_dp(group, seq, None)?;
    Ok(ReachableSet {
        group: group.spec().clone(),
        members,
    })
}

/// True iff no nonempty subsequence multiplies to 1 in any order.
/// The empty sequence is free.
pub fn is_product1_free(group: &Group, seq: &GSequence) -> Result<bool, EngineError> {
    if seq.is_empty() {
        check_group(group, seq)?;
        return Ok(true);
    }
    let target = ElementSet::from_elements(group.order(), [group.identity()]);
    let (_, hit) = layered_dp(group, seq, Some(&target))?;
    Ok(!hit)
}

/// True iff some nonempty subsequence has a product in `targets`.
pub fn has_product_in(group: &Group, seq: &GSequence, targets: &ElementSet) -> Result<bool, EngineError> {
    if targets.is_empty() {
        return Err(EngineError::EmptyTargets);
    }
    if seq.is_empty() {
        check_group(group, seq)?;
        return Ok(false);
    }
    let (_, hit) = layered_dp(group, seq, Some(targets))?;
    Ok(hit)
}

/// Brute force over every ordering of every nonempty subset of positions.
pub fn oracle_reachable(group: &Group, seq: &GSequence) -> Result<ReachableSet, EngineError> {
    check_group(group, seq)?;
    if seq.is_empty() {
        return Err(EngineError::EmptySequence);
    }
    if seq.len() > ORACLE_MAX_LEN {
        return Err(EngineError::OracleTooLong {
            len: seq.len(),
            limit: ORACLE_MAX_LEN,
        });
    }
    let elems = seq.elements();
    let mut members = ElementSet::new(group.order());
    for mask in 1u32..(1 << elems.len()) {
        let chosen: Vec<Element> = (0..elems.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| elems[i])
            .collect();
        let mut used = vec![false; chosen.len()];
        permute(group, &chosen, &mut used, group.identity(), 0, &mut members);
    }
    Ok(ReachableSet {
        group: group.spec().clone(),
        members,
    })
}

fn permute(group: &Group, items: &[Element], used: &mut [bool], acc: Element, depth: usize, out: &mut ElementSet) {
    if depth == items.len() {
        out.insert(acc);
        return;
    }
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            permute(group, items, used, group.mul(acc, items[i]), depth + 1, out);
            used[i] = false;
        }
    }
}

/// Freeness decided by the permutation oracle.
pub fn oracle_is_free(group: &Group, seq: &GSequence) -> Result<bool, EngineError> {
    if seq.is_empty() {
        return Ok(true);
    }
    Ok(!oracle_reachable(group, seq)?.contains(group.identity()))
}
