//! Structure of long zero-sum-free sequences in cyclic groups.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use super::enumerate_free;
use crate::davenport::SearchOptions;
use crate::error::SearchError;
use crate::group::Group;
use crate::report::{Target, VerificationReport};
use crate::sequence::GSequence;
use crate::spec::{gcd, GroupSpec};

/// A multiset of powers of a generator, e.g. `(g)^(n-4)(g^3)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicShape {
    pub label: String,
    /// `(power of g, multiplicity)`
    pub powers: Vec<(u32, usize)>,
}

impl CyclicShape {
    fn new(powers: Vec<(u32, usize)>) -> CyclicShape {
        let label = powers
            .iter()
            .map(|&(p, k)| match p {
                1 => format!("(g)^{k}"),
                _ => format!("(g^{p})^{k}"),
            })
            .collect();
        CyclicShape { label, powers }
    }

    fn instance(&self, group: &Group, n: u32, g: u32) -> GSequence {
        let elems = self
            .powers
            .iter()
            .flat_map(|&(p, k)| std::iter::repeat_n(group.xy(0, (g * p) % n), k));
        GSequence::new(group, elems)
    }
}

/// Shapes allowed for zero-sum-free sequences of length `len` in `C_n`,
/// for `len` in `{n-1, n-2, n-3}`. Empty for other lengths.
pub fn cyclic_shapes(n: u32, len: usize) -> Vec<CyclicShape> {
    let n = n as usize;
    let raw: Vec<Vec<(u32, isize)>> = match n.checked_sub(len) {
        Some(1) => vec![vec![(1, len as isize)]],
        Some(2) => vec![vec![(1, len as isize)], vec![(1, len as isize - 1), (2, 1)]],
        Some(3) => vec![
            vec![(1, len as isize)],
            vec![(1, len as isize - 1), (2, 1)],
            vec![(1, len as isize - 1), (3, 1)],
            vec![(1, len as isize - 2), (2, 2)],
        ],
        _ => Vec::new(),
    };
    raw.into_iter()
        .filter(|powers| powers.iter().all(|&(_, k)| k >= 0))
        .map(|powers| {
            CyclicShape::new(
                powers
                    .into_iter()
                    .filter(|&(_, k)| k > 0)
                    .map(|(p, k)| (p, k as usize))
                    .collect(),
            )
        })
        .collect()
}

fn generators(n: u32) -> impl Iterator<Item = u32> {
    (1..n).filter(move |&g| gcd(g as u64, n as u64) == 1)
}

/// Labels of the shapes of length `seq.len()` that `seq` is an instance of.
pub fn matching_shapes(group: &Group, seq: &GSequence) -> Vec<String> {
    let GroupSpec::Cyclic(n) = *group.spec() else {
        return Vec::new();
    };
    cyclic_shapes(n, seq.len())
        .into_iter()
        .filter(|shape| generators(n).any(|g| shape.instance(group, n, g) == *seq))
        .map(|shape| shape.label)
        .collect()
}

/// Enumerates zero-sum-free sequences in `C_n` of every length from
/// `ceil((n+1)/2)` (or `n-3` if smaller) to `n-1`.
///
/// Multiplicity bound violations go to `extra`. For lengths `n-1`, `n-2`,
/// `n-3` that are at least `(n+1)/2`, sequences outside the shape list go to
/// `extra` and shape instances that are not zero-sum free go to `missing`.
/// Lengths `n-3` below `(n+1)/2` are outside the hypothesis and only noted.
pub fn check_cyclic_structure(n: u32, opts: &SearchOptions) -> Result<VerificationReport, SearchError> {
    let start = Instant::now();
    if n < 3 {
        return Err(SearchError::Precondition(format!("n = {n} must be at least 3")));
    }
    let group = Group::build(&GroupSpec::Cyclic(n))?;
    let nu = n as usize;
    let threshold = (nu + 2) / 2; // ceil((n+1)/2)
    let low = threshold.min(nu.saturating_sub(3).max(1));
    let found = enumerate_free(&group, low, nu - 1, opts)?;

    let mut by_len: BTreeMap<usize, Vec<&GSequence>> = BTreeMap::new();
    for seq in &found.sequences {
        by_len.entry(seq.len()).or_default().push(seq);
    }

    let mut missing = BTreeSet::new();
    let mut extra = BTreeSet::new();
    let mut notes = Vec::new();
    let mut enumerated = 0;
    let mut predicted = 0;

    for len in threshold..nu {
        let seqs = by_len.get(&len).map(Vec::as_slice).unwrap_or_default();
        enumerated += seqs.len();
        let bound = 2 * len + 1 - nu;
        for seq in seqs {
            if seq.max_multiplicity() < bound {
                extra.insert((*seq).clone());
            }
        }
        notes.push(format!(
            "length {len}: {} zero-sum-free sequences, multiplicity bound {bound}",
            seqs.len()
        ));
    }

    for len in (nu.saturating_sub(3)..nu).filter(|&l| l >= 1) {
        let shapes = cyclic_shapes(n, len);
        let instances: BTreeSet<GSequence> = shapes
            .iter()
            .flat_map(|shape| generators(n).map(|g| shape.instance(&group, n, g)))
            .collect();
        let actual: BTreeSet<GSequence> = by_len
            .get(&len)
            .map(|v| v.iter().map(|s| (*s).clone()).collect())
            .unwrap_or_default();
        let unmatched: Vec<&GSequence> = actual.difference(&instances).collect();
        let absent: Vec<&GSequence> = instances.difference(&actual).collect();
        if len >= threshold {
            predicted += instances.len();
            extra.extend(unmatched.iter().map(|s| (*s).clone()));
            missing.extend(absent.iter().map(|s| (*s).clone()));
            notes.push(format!(
                "length {len}: {} sequences over {} shapes, {} unmatched",
                instances.len(),
                shapes.len(),
                unmatched.len()
            ));
        } else {
            let sample = unmatched.first().map(|s| format!(", e.g. {s}")).unwrap_or_default();
            notes.push(format!(
                "length {len} is below (n+1)/2, not asserted: {} of {} zero-sum-free sequences fit the shapes{sample}",
                actual.len() - unmatched.len(),
                actual.len()
            ));
        }
    }

    let missing: Vec<GSequence> = missing.into_iter().collect();
    let extra: Vec<GSequence> = extra.into_iter().collect();
    Ok(VerificationReport {
        target: Target::CyclicStructure,
        group: group.spec().clone(),
        davenport: Some(nu),
        enumerated_count: enumerated,
        predicted_count: predicted,
        verdict: VerificationReport::check_verdict(&missing, &extra),
        missing,
        extra,
        notes,
        nodes: found.nodes,
        millis: start.elapsed().as_millis() as u64,
    })
}
