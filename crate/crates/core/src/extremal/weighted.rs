//! Signed subset sums modulo n.

use std::time::Instant;

use crate::error::SearchError;
use crate::group::Group;
use crate::report::{Target, VerificationReport};
use crate::sequence::GSequence;
use crate::spec::GroupSpec;

/// Largest modulus the bitset DP handles.
pub const MAX_WEIGHTED_MODULUS: u32 = 128;

fn rotate(set: u128, k: u32, n: u32) -> u128 {
    let mask = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let k = k % n;
    if k == 0 {
        return set;
    }
    ((set << k) | (set >> (n - k))) & mask
}

/// Whether some nonempty `J` and signs `e_j` give `sum e_j * values[j] = 0 (mod n)`.
pub fn signed_zero_sum_exists(n: u32, values: &[u64]) -> bool {
    assert!((1..=MAX_WEIGHTED_MODULUS).contains(&n), "modulus {n} out of range");
    // residues reachable by nonempty signed subsets of the prefix
    let mut reach: u128 = 0;
    for &v in values {
        let v = (v % n as u64) as u32;
        let plus = rotate(reach, v, n);
        let minus = rotate(reach, n - v, n);
        reach |= plus | minus | (1 << v) | (1 << ((n - v) % n));
        if reach & 1 != 0 {
            return true;
        }
    }
    false
}

/// `floor(log2 n) + 1`, the least length that always has a signed zero sum.
pub fn weighted_length(n: u32) -> usize {
    n.ilog2() as usize + 1
}

/// Lexicographically first tuple of length `floor(log2 n)` over `Z_n` with no
/// signed zero sum, if there is one.
pub fn weighted_boundary_probe(n: u32) -> Option<Vec<u64>> {
    let s = weighted_length(n) - 1;
    let mut found = None;
    for_each_tuple(n, s, |t| {
        if signed_zero_sum_exists(n, t) {
            true
        } else {
            found = Some(t.to_vec());
            false
        }
    });
    found
}

/// Calls `f` on every tuple in `Z_n^s` in lexicographic order until it
/// returns false.
fn for_each_tuple(n: u32, s: usize, mut f: impl FnMut(&[u64]) -> bool) {
    let mut tuple = vec![0u64; s];
    loop {
        if !f(&tuple) {
            return;
        }
        let mut i = s;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < n as u64 {
                break;
            }
            tuple[i] = 0;
        }
    }
}

/// Checks every tuple in `Z_n^s`, `s = floor(log2 n) + 1`, for a signed zero
/// sum. Counterexamples go to `extra` as sequences of `y^v` in `C_n`; the
/// boundary probe at length `s - 1` is recorded in the notes.
pub fn check_weighted_lemma(n: u32) -> Result<VerificationReport, SearchError> {
    let start = Instant::now();
    if !(2..=MAX_WEIGHTED_MODULUS).contains(&n) {
        return Err(SearchError::Precondition(format!(
            "modulus {n} must lie in 2..={MAX_WEIGHTED_MODULUS}"
        )));
    }
    let group = Group::build(&GroupSpec::Cyclic(n))?;
    let s = weighted_length(n);
    let mut checked = 0usize;
    let mut extra = Vec::new();
    for_each_tuple(n, s, |t| {
        checked += 1;
        if !signed_zero_sum_exists(n, t) {
            extra.push(GSequence::new(&group, t.iter().map(|&v| group.xy(0, v as u32))));
        }
        true
    });
    let probe = match weighted_boundary_probe(n) {
        Some(t) => format!("length {}: {t:?} has no signed zero sum", s - 1),
        None => format!("length {}: every tuple has a signed zero sum", s - 1),
    };
    Ok(VerificationReport {
        target: Target::Weighted,
        group: group.spec().clone(),
        davenport: None,
        enumerated_count: checked,
        predicted_count: checked,
        verdict: VerificationReport::check_verdict(&[], &extra),
        missing: Vec::new(),
        extra,
        notes: vec![format!("checked all {checked} tuples of length {s}"), probe],
        nodes: checked as u64,
        millis: start.elapsed().as_millis() as u64,
    })
}
