//! Extremal product-1-free sequences and their closed-form characterizations.

mod cyclic_structure;
mod families;
mod minzero;
mod weighted;

use std::collections::BTreeSet;
use std::time::Instant;

pub use cyclic_structure::{check_cyclic_structure, cyclic_shapes, matching_shapes, CyclicShape};
pub use families::{
    family_cyclic, family_dicyclic, family_dihedral, family_for, family_metacyclic, inverse_parameter_image,
    CharacterizationFamily,
};
pub use minzero::{check_minimal_zero_sum_order, minimal_zero_sequences};
pub use weighted::{check_weighted_lemma, signed_zero_sum_exists, weighted_boundary_probe, weighted_length};

use crate::davenport::{max_free_length, SearchOptions};
use crate::engine::is_product1_free;
use crate::error::SearchError;
use crate::group::Group;
use crate::report::{Target, VerificationReport};
use crate::search::{non_identity, run_branches, Mode, SharedBudget};
use crate::sequence::GSequence;
use crate::spec::GroupSpec;

#[derive(Clone, Debug)]
pub struct FreeEnumeration {
    /// Sorted in lexicographic order of their element indices.
    pub sequences: Vec<GSequence>,
    pub nodes: u64,
}

/// Every product-1-free sequence with length in `min_len..=max_len`
/// (`min_len >= 1`), by the same canonical DFS as the Davenport search.
pub fn enumerate_free(
    group: &Group,
    min_len: usize,
    max_len: usize,
    opts: &SearchOptions,
) -> Result<FreeEnumeration, SearchError> {
    if min_len == 0 || min_len > max_len {
        return Err(SearchError::Precondition(format!(
            "length range {min_len}..={max_len} must satisfy 1 <= min <= max"
        )));
    }
    let budget = SharedBudget::new(opts.budget);
    let firsts = non_identity(group);
    let mode = Mode::Collect {
        min: min_len,
        max: max_len,
    };
    let outcomes = run_branches(group, &firsts, mode, &budget, opts.parallelism)?;
    let nodes: u64 = outcomes.iter().map(|o| o.nodes).sum();
    if budget.exhausted() || nodes > opts.budget {
        return Err(SearchError::BudgetExhausted {
            budget: opts.budget,
            lower_bound: 0,
        });
    }
    let mut sequences: Vec<Vec<u32>> = outcomes.into_iter().flat_map(|o| o.collected).collect();
    sequences.sort();
    Ok(FreeEnumeration {
        sequences: sequences
            .iter()
            .map(|s| GSequence::from_sorted_indices(group.spec(), s))
            .collect(),
        nodes,
    })
}

#[derive(Clone, Debug)]
pub struct ExtremalSet {
    pub davenport: usize,
    pub sequences: Vec<GSequence>,
    pub nodes: u64,
}

/// All product-1-free sequences of length `D(G) - 1`.
pub fn enumerate_extremal(group: &Group, opts: &SearchOptions) -> Result<ExtremalSet, SearchError> {
    let search = max_free_length(group, opts)?;
    let len = search.max_free_length;
    if len == 0 {
        return Ok(ExtremalSet {
            davenport: 1,
            sequences: vec![GSequence::empty(group)],
            nodes: search.nodes_expanded,
        });
    }
    let remaining = SearchOptions {
        budget: opts.budget.saturating_sub(search.nodes_expanded),
        ..*opts
    };
    let found = enumerate_free(group, len, len, &remaining).map_err(|e| match e {
        SearchError::BudgetExhausted { .. } => SearchError::BudgetExhausted {
            budget: opts.budget,
            lower_bound: len,
        },
        other => other,
    })?;
    Ok(ExtremalSet {
        davenport: search.davenport,
        sequences: found.sequences,
        nodes: search.nodes_expanded + found.nodes,
    })
}

/// Diffs the enumerated extremal sequences of `group` against the predicted
/// family for its kind. Every predicted sequence is re-checked for freeness
/// and length independently of the enumeration.
pub fn verify_theorem(group: &Group, opts: &SearchOptions) -> Result<VerificationReport, SearchError> {
    let start = Instant::now();
    let target = match group.spec() {
        GroupSpec::Cyclic(_) => Target::Cyclic,
        GroupSpec::Dihedral(_) => Target::Dihedral,
        GroupSpec::Dicyclic(_) => Target::Dicyclic,
        GroupSpec::Metacyclic { .. } => Target::Metacyclic,
        GroupSpec::ProductOfCyclics(_) => {
            return Err(SearchError::Precondition(format!(
                "no characterization is available for {}",
                group.spec()
            )))
        }
    };
    let family = family_for(group)?;
    let extremal = enumerate_extremal(group, opts)?;
    let expected_len = extremal.davenport - 1;

    let mut notes = family.notes.clone();
    for seq in &family.members {
        let free = is_product1_free(group, seq)?;
        if !free || seq.len() != expected_len {
            notes.push(format!(
                "predicted {seq} fails the re-check (free: {free}, length {} vs {expected_len})",
                seq.len()
            ));
        }
    }

    let enumerated: BTreeSet<&GSequence> = extremal.sequences.iter().collect();
    let predicted: BTreeSet<&GSequence> = family.members.iter().collect();
    let missing: Vec<GSequence> = predicted.difference(&enumerated).map(|s| (*s).clone()).collect();
    let extra: Vec<GSequence> = enumerated.difference(&predicted).map(|s| (*s).clone()).collect();

    if let GroupSpec::Dicyclic(n) = *group.spec() {
        let images = extra
            .iter()
            .filter(|s| inverse_parameter_image(group, s).is_some())
            .count();
        if !extra.is_empty() {
            notes.push(format!(
                "{images} of {} unpredicted sequences are (y^t)^{}(x*y^s) with n < t < 2n, gcd(t, 2n) = 1, i.e. images of a predicted t under t -> 2n - t",
                extra.len(),
                2 * n - 1
            ));
        }
    }

    Ok(VerificationReport {
        target,
        group: group.spec().clone(),
        davenport: Some(extremal.davenport),
        enumerated_count: extremal.sequences.len(),
        predicted_count: family.members.len(),
        verdict: VerificationReport::theorem_verdict(&missing, &extra),
        missing,
        extra,
        notes,
        nodes: extremal.nodes,
        millis: start.elapsed().as_millis() as u64,
    })
}
