//! Davenport constants by exhaustive search.
//!
//! `D(G)` is one more than the length of the longest product-1-free sequence.
//! The search is seeded with a greedy lower bound, then every top-level
//! branch (choice of least element) is searched independently with that
//! bound, so the result, the witness and the node count do not depend on how
//! many workers run the branches.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::SearchError;
use crate::group::Group;
use crate::search::{greedy_lower_bound, non_identity, run_branches, Mode, SharedBudget};
use crate::sequence::GSequence;
use crate::spec::GroupSpec;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of DFS nodes before giving up.
    pub budget: u64,
    /// Worker threads for top-level branches.
    pub parallelism: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_BUDGET,
            parallelism: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "SearchResultJson", try_from = "SearchResultJson")]
pub struct SearchResult {
    pub group: GroupSpec,
    pub davenport: usize,
    pub max_free_length: usize,
    /// Lexicographically least free sequence of maximal length.
    pub witness: GSequence,
    pub nodes_expanded: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchResultJson {
    pub group: GroupSpec,
    pub davenport: usize,
    pub max_free_length: usize,
    pub witness: String,
    pub nodes: u64,
    pub millis: u64,
}

impl From<SearchResult> for SearchResultJson {
    fn from(r: SearchResult) -> Self {
        SearchResultJson {
            witness: r.witness.to_string(),
            group: r.group,
            davenport: r.davenport,
            max_free_length: r.max_free_length,
            nodes: r.nodes_expanded,
            millis: r.elapsed.as_millis() as u64,
        }
    }
}

impl TryFrom<SearchResultJson> for SearchResult {
    type Error = String;

    fn try_from(j: SearchResultJson) -> Result<Self, Self::Error> {
        let witness = GSequence::parse_canonical(&j.group, &j.witness).map_err(|e| e.to_string())?;
        if j.davenport != j.max_free_length + 1 || witness.len() != j.max_free_length {
            return Err("inconsistent search result".to_string());
        }
        Ok(SearchResult {
            group: j.group,
            davenport: j.davenport,
            max_free_length: j.max_free_length,
            witness,
            nodes_expanded: j.nodes,
            elapsed: Duration::from_millis(j.millis),
        })
    }
}

/// Exact maximum length of a product-1-free sequence over `group`.
pub fn max_free_length(group: &Group, opts: &SearchOptions) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    let seed = greedy_lower_bound(group)?;
    let floor = seed.len().saturating_sub(1);
    let budget = SharedBudget::new(opts.budget);
    let firsts = non_identity(group);
    let outcomes = run_branches(group, &firsts, Mode::Longest { floor }, &budget, opts.parallelism)?;
    let nodes: u64 = outcomes.iter().map(|o| o.nodes).sum();
    if budget.exhausted() || nodes > opts.budget {
        return Err(SearchError::BudgetExhausted {
            budget: opts.budget,
            lower_bound: seed.len(),
        });
    }
    // branches are in order of their least element, so the first longest is lexicographically least
    let mut best: Vec<u32> = Vec::new();
    for outcome in outcomes {
        if let Some(candidate) = outcome.best {
            if candidate.len() > best.len() {
                best = candidate;
            }
        }
    }
    Ok(SearchResult {
        group: group.spec().clone(),
        davenport: best.len() + 1,
        max_free_length: best.len(),
        witness: GSequence::from_sorted_indices(group.spec(), &best),
        nodes_expanded: nodes,
        elapsed: start.elapsed(),
    })
}

/// `D(G)` with default search options.
pub fn davenport(group: &Group) -> Result<usize, SearchError> {
    Ok(max_free_length(group, &SearchOptions::default())?.davenport)
}

/// A group with a known closed form for its Davenport constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownConstant {
    pub group: GroupSpec,
    pub expected: usize,
    pub formula: String,
}

/// The regression roster: cyclic groups up to order 30, `C_m x C_n` with
/// `m | n` and `mn <= 36`, non-cyclic abelian p-groups up to order 32,
/// dihedral groups of order up to 20, dicyclic groups of order up to 24 and a
/// handful of metacyclic groups.
pub fn known_constant_roster() -> Vec<KnownConstant> {
    let mut roster = Vec::new();
    let mut add = |group: GroupSpec, expected: usize, formula: &str| {
        roster.push(KnownConstant {
            group,
            expected,
            formula: formula.to_string(),
        })
    };
    for n in 2..=30u32 {
        add(GroupSpec::Cyclic(n), n as usize, "n");
    }
    for m in 2..=6u32 {
        for n in (m..=36 / m).filter(|n| n % m == 0) {
            add(
                GroupSpec::ProductOfCyclics(vec![m, n]),
                (m + n - 1) as usize,
                "m + n - 1",
            );
        }
    }
    for factors in abelian_p_group_products(32) {
        if factors.len() > 2 {
            let expected = 1 + factors.iter().map(|&f| f as usize - 1).sum::<usize>();
            add(GroupSpec::ProductOfCyclics(factors), expected, "1 + sum(p^e_i - 1)");
        }
    }
    for n in 2..=10u32 {
        add(GroupSpec::Dihedral(n), n as usize + 1, "n + 1");
    }
    for n in 2..=6u32 {
        add(GroupSpec::Dicyclic(n), 2 * n as usize + 1, "2n + 1");
    }
    for (q, m) in [(3, 2), (5, 2), (5, 4), (7, 2), (7, 3)] {
        let s = (2..q)
            .find(|&s| crate::spec::multiplicative_order(s, q) == m)
            .expect("m divides q - 1");
        add(GroupSpec::Metacyclic { q, m, s }, (m + q - 1) as usize, "m + q - 1");
    }
    roster
}

/// Factor lists `[p^e1, ..., p^er]` (non-decreasing, r >= 2) of order at most `limit`.
fn abelian_p_group_products(limit: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for p in (2..=limit).filter(|&p| crate::spec::is_prime(p)) {
        let mut powers = Vec::new();
        let mut q = p;
        while q <= limit {
            powers.push(q);
            q *= p;
        }
        fn extend(powers: &[u32], from: usize, prod: u32, limit: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if cur.len() >= 2 {
                out.push(cur.clone());
            }
            for i in from..powers.len() {
                if prod * powers[i] <= limit {
                    cur.push(powers[i]);
                    extend(powers, i, prod * powers[i], limit, cur, out);
                    cur.pop();
                }
            }
        }
        extend(&powers, 0, 1, limit, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownConstantRow {
    pub group: GroupSpec,
    pub formula: String,
    pub expected: usize,
    pub computed: Option<usize>,
    pub error: Option<String>,
    pub nodes: u64,
    pub millis: u64,
}

impl KnownConstantRow {
    pub fn matches(&self) -> bool {
        self.computed == Some(self.expected)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownConstantsReport {
    pub rows: Vec<KnownConstantRow>,
}

impl KnownConstantsReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(KnownConstantRow::matches)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &KnownConstantRow> {
        self.rows.iter().filter(|r| !r.matches())
    }
}

/// Computes `D(G)` for every roster group and compares with its closed form.
pub fn verify_known_constants(opts: &SearchOptions) -> KnownConstantsReport {
    verify_constants(&known_constant_roster(), opts)
}

pub fn verify_constants(roster: &[KnownConstant], opts: &SearchOptions) -> KnownConstantsReport {
    let rows = roster
        .iter()
        .map(|entry| {
            let outcome = Group::build(&entry.group)
                .map_err(SearchError::from)
                .and_then(|g| max_free_length(&g, opts));
            let (computed, error, nodes, millis) = match outcome {
                Ok(r) => (Some(r.davenport), None, r.nodes_expanded, r.elapsed.as_millis() as u64),
                Err(e) => (None, Some(e.to_string()), 0, 0),
            };
            KnownConstantRow {
                group: entry.group.clone(),
                formula: entry.formula.clone(),
                expected: entry.expected,
                computed,
                error,
                nodes,
                millis,
            }
        })
        .collect();
    KnownConstantsReport { rows }
}
