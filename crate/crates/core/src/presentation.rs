//! Word rewriting from the defining relations.
//!
//! The Cayley table built here uses only the relations of each presentation,
//! applied as rewrite rules on run-length encoded words. It shares no code with
//! the closed-form arithmetic in [`crate::group`] and serves as its reference.

use std::collections::VecDeque;

use crate::spec::{product_coords, product_index, Layout};

/// Presentation `<x, y | x^m = y^wrap, y^q = 1, y x = x y^twist>`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TwistedRelations {
    pub m: u32,
    pub q: u32,
    pub twist: u32,
    pub wrap: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Letter {
    X,
    Y,
}

impl TwistedRelations {
    /// Rewrites a word into the normal form `x^a y^b`.
    fn normal_form(&self, word: &[(Letter, u64)]) -> (u32, u32) {
        let (m, q) = (self.m as u64, self.q as u64);
        let mut w: Vec<(Letter, u64)> = word.to_vec();
        loop {
            // free reduction: merge runs, drop empty runs
            let mut merged: Vec<(Letter, u64)> = Vec::with_capacity(w.len());
            for (letter, e) in w.drain(..) {
                if e == 0 {
                    continue;
                }
                match merged.last_mut() {
                    Some((l, k)) if *l == letter => *k += e,
                    _ => merged.push((letter, e)),
                }
            }
            w = merged;

            let mut changed = false;
            // y^q = 1
            for run in w.iter_mut() {
                if run.0 == Letter::Y && run.1 >= q {
                    run.1 %= q;
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // x^m = y^wrap
            if let Some(pos) = w.iter().position(|&(l, e)| l == Letter::X && e >= m) {
                let e = w[pos].1;
                w[pos].1 = e - m;
                w.insert(pos + 1, (Letter::Y, self.wrap as u64));
                continue;
            }
            // y^b x = x y^(b * twist)
            if let Some(pos) = w.windows(2).position(|p| p[0].0 == Letter::Y && p[1].0 == Letter::X) {
                let b = w[pos].1;
                let c = w[pos + 1].1;
                let replacement = [
                    (Letter::X, 1),
                    (Letter::Y, b * self.twist as u64 % q),
                    (Letter::X, c - 1),
                ];
                w.splice(pos..pos + 2, replacement);
                continue;
            }
            break;
        }
        let mut a = 0;
        let mut b = 0;
        for &(l, e) in &w {
            match l {
                Letter::X => a = e as u32,
                Letter::Y => b = e as u32,
            }
        }
        (a, b)
    }
}

/// Right action of each generator on element indices, derived by rewriting.
fn generator_actions(layout: &Layout, relations: Option<TwistedRelations>) -> Vec<Vec<usize>> {
    match layout {
        Layout::Twisted { m, q } => {
            let rel = relations.expect("twisted layout needs relations");
            let order = (*m as usize) * (*q as usize);
            let mut gens = vec![Letter::Y];
            if *m > 1 {
                gens.insert(0, Letter::X);
            }
            gens.iter()
                .map(|&gen| {
                    (0..order)
                        .map(|idx| {
                            let a = (idx / *q as usize) as u64;
                            let b = (idx % *q as usize) as u64;
                            let word = [(Letter::X, a), (Letter::Y, b), (gen, 1)];
                            let (na, nb) = rel.normal_form(&word);
                            na as usize * *q as usize + nb as usize
                        })
                        .collect()
                })
                .collect()
        }
        Layout::Product { moduli } => {
            let order: usize = moduli.iter().map(|&n| n as usize).product();
            (0..moduli.len())
                .map(|gen| {
                    (0..order)
                        .map(|idx| {
                            // word g_1^c1 ... g_k^ck g_gen, commuted into sorted position
                            let mut coords = product_coords(moduli, idx);
                            coords[gen] += 1;
                            if coords[gen] == moduli[gen] {
                                coords[gen] = 0;
                            }
                            product_index(moduli, &coords)
                        })
                        .collect()
                })
                .collect()
        }
    }
}

/// Full Cayley table `table[a * order + b] = a * b`, or `None` if the
/// generators do not reach every element.
pub(crate) fn cayley_table(layout: &Layout, relations: Option<TwistedRelations>) -> Option<Vec<u16>> {
    let actions = generator_actions(layout, relations);
    let order = actions.first().map_or(1, Vec::len);
    // spanning tree of the right Cayley graph rooted at the identity
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; order];
    let mut seen = vec![false; order];
    let mut bfs = Vec::with_capacity(order);
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(e) = queue.pop_front() {
        bfs.push(e);
        for (gen, act) in actions.iter().enumerate() {
            let next = act[e];
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((e, gen));
                queue.push_back(next);
            }
        }
    }
    if bfs.len() != order {
        return None;
    }
    let mut table = vec![0u16; order * order];
    for a in 0..order {
        let row = &mut table[a * order..(a + 1) * order];
        row[0] = a as u16;
        for &e in &bfs[1..] {
            let (prev, gen) = parent[e].expect("non-root has a parent");
            row[e] = actions[gen][row[prev] as usize] as u16;
        }
    }
    Some(table)
}
