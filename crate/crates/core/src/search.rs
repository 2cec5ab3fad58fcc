//! Canonical multiset DFS over product-1-free sequences.
//!
//! Multisets are grown by appending elements whose index is at least the last
//! one appended, so every multiset is visited exactly once, through its sorted
//! prefixes. Freeness is hereditary, so pruning non-free nodes loses nothing.
//!
//! Each node keeps `P(U)` for every sub-multiset `U` of the current multiset
//! in a flat table indexed by mixed-radix count vectors, with the most recently
//! added distinct element as the most significant digit. Appending an element
//! only adds a new top slice to that table, so a child extends its parent's
//! table in place and backtracking truncates it. Abelian groups skip the table:
//! the reachable set updates as `R' = R ∪ R·g ∪ {g}`.
//!
//! A free extension by one element always enlarges the reachable set, so a
//! node with reachable set `R` has no free descendant longer than
//! `len + (|G| - 1 - |R|)`.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::bitset::{or_right_mul, set_bit, test_bit, words_for};
use crate::engine::{right_action, MAX_STATES};
use crate::error::{EngineError, SearchError};
use crate::group::{Element, Group};

/// Largest group order the DFS accepts.
pub const MAX_SEARCH_ORDER: usize = 2048;

struct Frame {
    table_len: usize,
    new_distinct: bool,
}

/// Incrementally maintained free multiset.
pub(crate) struct FreeExtender<'g> {
    group: &'g Group,
    order: usize,
    words: usize,
    abelian: bool,
    actions: Vec<Vec<u32>>,
    inverses: Vec<u32>,
    elems: Vec<u32>,
    distinct: Vec<u32>,
    mults: Vec<u32>,
    strides: Vec<usize>,
    table: Vec<u64>,
    reach: Vec<u64>,
    reach_counts: Vec<usize>,
    frames: Vec<Frame>,
    digits: Vec<u32>,
}

impl<'g> FreeExtender<'g> {
    pub fn new(group: &'g Group) -> Result<FreeExtender<'g>, SearchError> {
        let order = group.order();
        if order > MAX_SEARCH_ORDER {
            return Err(SearchError::Precondition(format!(
                "group order {order} exceeds the search limit {MAX_SEARCH_ORDER}"
            )));
        }
        let words = words_for(order);
        let mut table = vec![0u64; words];
        set_bit(&mut table, group.identity().index());
        Ok(FreeExtender {
            group,
            order,
            words,
            abelian: group.is_abelian(),
            actions: group.elements().map(|h| right_action(group, h)).collect(),
            inverses: group.elements().map(|h| group.inverse(h).0).collect(),
            elems: Vec::new(),
            distinct: Vec::new(),
            mults: Vec::new(),
            strides: Vec::new(),
            table,
            reach: vec![0u64; words],
            reach_counts: vec![0],
            frames: Vec::new(),
            digits: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn elements(&self) -> &[u32] {
        &self.elems
    }

    pub fn last(&self) -> Option<u32> {
        self.elems.last().copied()
    }

    pub fn reach_count(&self) -> usize {
        *self.reach_counts.last().expect("root frame")
    }

    /// Upper bound on the length of any free multiset extending this one.
    pub fn length_bound(&self) -> usize {
        self.len() + (self.order - 1 - self.reach_count())
    }

    fn current_reach(&self) -> &[u64] {
        let depth = self.elems.len();
        &self.reach[depth * self.words..(depth + 1) * self.words]
    }

    /// Appends `g` (index at least the last element) if the result stays free.
    pub fn push(&mut self, g: u32) -> Result<bool, EngineError> {
        debug_assert!(self.last().is_none_or(|last| g >= last));
        if g as usize == self.group.identity().index() {
            return Ok(false);
        }
        if self.abelian {
            Ok(self.push_abelian(g))
        } else {
            self.push_table(g)
        }
    }

    fn push_abelian(&mut self, g: u32) -> bool {
        let w = self.words;
        if test_bit(self.current_reach(), self.inverses[g as usize] as usize) {
            return false;
        }
        let depth = self.elems.len();
        self.reach.extend(std::iter::repeat_n(0, w));
        let (old, new) = self.reach.split_at_mut((depth + 1) * w);
        let old = &old[depth * w..];
        new.copy_from_slice(old);
        or_right_mul(old, &self.actions[g as usize], new);
        set_bit(new, g as usize);
        let count = new.iter().map(|x| x.count_ones() as usize).sum();
        self.reach_counts.push(count);
        self.elems.push(g);
        true
    }

    fn push_table(&mut self, g: u32) -> Result<bool, EngineError> {
        let w = self.words;
        let new_distinct = self.distinct.last() != Some(&g);
        let table_len = self.table.len() / w;
        let slot = if new_distinct {
            self.distinct.len()
        } else {
            self.distinct.len() - 1
        };
        let slot_stride = if new_distinct { table_len } else { self.strides[slot] };
        let new_len = table_len + slot_stride;
        if new_len as u128 > MAX_STATES {
            return Err(EngineError::StateSpaceTooLarge {
                estimate: new_len as u128,
                limit: MAX_STATES,
            });
        }

        let depth = self.elems.len();
        let mut reach_new: Vec<u64> = self.current_reach().to_vec();
        self.table.resize(new_len * w, 0);
        self.digits.clear();
        self.digits.resize(slot, 0);
        let g_action = &self.actions[g as usize];
        for idx in table_len..new_len {
            let (done, fresh) = self.table.split_at_mut(idx * w);
            let out = &mut fresh[..w];
            or_right_mul(
                &done[(idx - slot_stride) * w..(idx - slot_stride + 1) * w],
                g_action,
                out,
            );
            for i in 0..slot {
                if self.digits[i] > 0 {
                    let prev = idx - self.strides[i];
                    or_right_mul(
                        &done[prev * w..(prev + 1) * w],
                        &self.actions[self.distinct[i] as usize],
                        out,
                    );
                }
            }
            if test_bit(out, self.group.identity().index()) {
                self.table.truncate(table_len * w);
                return Ok(false);
            }
            for (r, o) in reach_new.iter_mut().zip(out.iter()) {
                *r |= o;
            }
            // odometer over the lower digits
            for i in 0..slot {
                self.digits[i] += 1;
                if self.digits[i] <= self.mults[i] {
                    break;
                }
                self.digits[i] = 0;
            }
        }

        if new_distinct {
            self.distinct.push(g);
            self.mults.push(1);
            self.strides.push(table_len);
        } else {
            self.mults[slot] += 1;
        }
        self.frames.push(Frame {
            table_len,
            new_distinct,
        });
        debug_assert_eq!(self.reach.len(), (depth + 1) * w);
        let count = reach_new.iter().map(|x| x.count_ones() as usize).sum();
        self.reach.extend_from_slice(&reach_new);
        self.reach_counts.push(count);
        self.elems.push(g);
        Ok(true)
    }

    pub fn pop(&mut self) {
        let w = self.words;
        self.elems.pop().expect("pop on empty extender");
        self.reach.truncate(self.reach.len() - w);
        self.reach_counts.pop();
        if !self.abelian {
            let frame = self.frames.pop().expect("frame per push");
            self.table.truncate(frame.table_len * w);
            if frame.new_distinct {
                self.distinct.pop();
                self.mults.pop();
                self.strides.pop();
            } else {
                *self.mults.last_mut().expect("nonempty") -= 1;
            }
        }
    }

    /// Reachable set of the current multiset, as element indices.
    #[cfg(test)]
    pub fn reachable(&self) -> Vec<u32> {
        (0..self.order as u32)
            .filter(|&i| test_bit(self.current_reach(), i as usize))
            .collect()
    }
}

/// What a DFS run records.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Mode {
    /// Longest free multiset longer than `floor`; lexicographically least on ties.
    Longest { floor: usize },
    /// Every free multiset with length in `min..=max`.
    Collect { min: usize, max: usize },
}

#[derive(Debug, Default)]
pub(crate) struct BranchOutcome {
    pub nodes: u64,
    pub best: Option<Vec<u32>>,
    pub collected: Vec<Vec<u32>>,
}

pub(crate) struct SharedBudget {
    pub budget: u64,
    spent: AtomicU64,
    aborted: AtomicBool,
}

impl SharedBudget {
    pub fn new(budget: u64) -> SharedBudget {
        SharedBudget {
            budget,
            spent: AtomicU64::new(0),
            aborted: AtomicBool::new(false),
        }
    }

    fn charge(&self, nodes: u64) -> bool {
        let total = self.spent.fetch_add(nodes, Ordering::Relaxed) + nodes;
        if total > self.budget {
            self.aborted.store(true, Ordering::Relaxed);
        }
        !self.aborted.load(Ordering::Relaxed)
    }

    pub fn exhausted(&self) -> bool {
        self.aborted.load(Ordering::Relaxed)
    }
}

const FLUSH_EVERY: u64 = 1024;

struct Dfs<'a, 'g> {
    ext: FreeExtender<'g>,
    mode: Mode,
    budget: &'a SharedBudget,
    out: BranchOutcome,
    best_len: usize,
    unflushed: u64,
    stopped: bool,
}

impl Dfs<'_, '_> {
    fn visit(&mut self) -> Result<(), EngineError> {
        self.out.nodes += 1;
        self.unflushed += 1;
        if self.unflushed >= FLUSH_EVERY {
            let ok = self.budget.charge(self.unflushed);
            self.unflushed = 0;
            if !ok {
                self.stopped = true;
                return Ok(());
            }
        }
        let len = self.ext.len();
        let bound = self.ext.length_bound();
        match self.mode {
            Mode::Longest { .. } => {
                if len > self.best_len {
                    self.best_len = len;
                    self.out.best = Some(self.ext.elements().to_vec());
                }
                if bound <= self.best_len {
                    return Ok(());
                }
            }
            Mode::Collect { min, max } => {
                if len >= min {
                    self.out.collected.push(self.ext.elements().to_vec());
                }
                if len >= max || bound < min {
                    return Ok(());
                }
            }
        }
        let start = self.ext.last().expect("branch root is nonempty");
        for g in start..self.ext.order as u32 {
            if self.stopped {
                return Ok(());
            }
            if self.ext.push(g)? {
                self.visit()?;
                self.ext.pop();
            }
        }
        Ok(())
    }
}

/// DFS over all free multisets whose least element is `first`.
pub(crate) fn run_branch(
    group: &Group,
    first: u32,
    mode: Mode,
    budget: &SharedBudget,
) -> Result<BranchOutcome, SearchError> {
    let mut ext = FreeExtender::new(group)?;
    let mut dfs_best = 0;
    if let Mode::Longest { floor } = mode {
        dfs_best = floor;
    }
    if !ext.push(first)? {
        return Ok(BranchOutcome::default());
    }
    let mut dfs = Dfs {
        ext,
        mode,
        budget,
        out: BranchOutcome::default(),
        best_len: dfs_best,
        unflushed: 0,
        stopped: false,
    };
    dfs.visit()?;
    budget.charge(dfs.unflushed);
    Ok(dfs.out)
}

/// Runs one branch per first element, optionally on a thread pool; results
/// are returned in branch order.
pub(crate) fn run_branches(
    group: &Group,
    firsts: &[u32],
    mode: Mode,
    budget: &SharedBudget,
    parallelism: usize,
) -> Result<Vec<BranchOutcome>, SearchError> {
    if parallelism <= 1 {
        return firsts
            .iter()
            .map(|&f| {
                if budget.exhausted() {
                    Ok(BranchOutcome::default())
                } else {
                    run_branch(group, f, mode, budget)
                }
            })
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| SearchError::Precondition(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        firsts
            .par_iter()
            .map(|&f| {
                if budget.exhausted() {
                    Ok(BranchOutcome::default())
                } else {
                    run_branch(group, f, mode, budget)
                }
            })
            .collect()
    })
}

/// Free multisets found greedily: `(g)^(ord g - 1)` extended by any element
/// that keeps it free. Returns the longest one found.
pub(crate) fn greedy_lower_bound(group: &Group) -> Result<Vec<u32>, SearchError> {
    let mut best: Vec<u32> = Vec::new();
    for g in group.elements().skip(1) {
        let mut ext = FreeExtender::new(group)?;
        for _ in 1..group.element_order(g) {
            if !ext.push(g.0)? {
                break;
            }
        }
        for h in g.0 + 1..group.order() as u32 {
            while ext.push(h)? {}
        }
        if ext.len() > best.len() {
            best = ext.elements().to_vec();
        }
    }
    Ok(best)
}

/// Element indices other than the identity, in order.
pub(crate) fn non_identity(group: &Group) -> Vec<u32> {
    group
        .elements()
        .filter(|&e| e != group.identity())
        .map(|e: Element| e.0)
        .collect()
}
