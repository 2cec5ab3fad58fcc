//! Predicted extremal sequences for cyclic, dihedral, dicyclic and metacyclic
//! groups.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::engine::oracle_is_free;
use crate::error::{GroupError, SearchError};
use crate::group::Group;
use crate::sequence::GSequence;
use crate::spec::{gcd, GroupSpec};

#[derive(Clone, Debug)]
pub struct CharacterizationFamily {
    pub name: String,
    pub group: GroupSpec,
    pub parameter_ranges: String,
    /// Distinct members, sorted.
    pub members: Vec<GSequence>,
    pub notes: Vec<String>,
}

impl CharacterizationFamily {
    fn new(name: &str, group: &Group, ranges: String, members: BTreeSet<GSequence>) -> Self {
        CharacterizationFamily {
            name: name.to_string(),
            group: group.spec().clone(),
            parameter_ranges: ranges,
            members: members.into_iter().collect(),
            notes: Vec::new(),
        }
    }
}

fn units(n: u32) -> impl Iterator<Item = u32> {
    (1..n).filter(move |&t| gcd(t as u64, n as u64) == 1)
}

/// `(y^t)^k (x*y^s)` in a group presented by x and y.
fn power_plus_reflection(group: &Group, t: u32, k: usize, s: u32) -> GSequence {
    let elems = std::iter::repeat_n(group.xy(0, t), k).chain([group.xy(1, s)]);
    GSequence::new(group, elems)
}

/// `(g)^(n-1)` for every generator `g` of `C_n`.
pub fn family_cyclic(n: u32) -> Result<CharacterizationFamily, GroupError> {
    let group = Group::build(&GroupSpec::Cyclic(n))?;
    let members = units(n)
        .map(|k| GSequence::repeated(&group, group.xy(0, k), n as usize - 1))
        .collect();
    Ok(CharacterizationFamily::new(
        "cyclic",
        &group,
        format!("g = y^k, 1 <= k < {n}, gcd(k, {n}) = 1"),
        members,
    ))
}

/// The `(m, q) = (2, 3)` list, with `t` resolved over `{1, 2, 3}` by the
/// permutation oracle instead of taking the stated `{2, 3}` on trust.
fn order_six_family(group: &Group, name: &str) -> Result<CharacterizationFamily, GroupError> {
    let mut members = BTreeSet::new();
    let mut resolved = Vec::new();
    for t in 1..=3 {
        let mut all_free = true;
        let mut seqs = Vec::new();
        for nu in 0..3 {
            let seq = power_plus_reflection(group, t, 2, nu);
            all_free &= oracle_is_free(group, &seq).expect("length 3 is within the oracle limit");
            seqs.push(seq);
        }
        if all_free {
            resolved.push(t);
            members.extend(seqs);
        }
    }
    members.insert(GSequence::new(group, (0..3).map(|b| group.xy(1, b))));
    let mut family = CharacterizationFamily::new(
        name,
        group,
        format!("(y^t, y^t, x*y^v) for t in {resolved:?}, v in 0..3; or (x, x*y, x*y^2)"),
        members,
    );
    family.notes.push(format!(
        "t range stated as [2, 3], resolved by the permutation oracle to {resolved:?} (y^3 = 1)"
    ));
    Ok(family)
}

pub fn family_dihedral(n: u32) -> Result<CharacterizationFamily, GroupError> {
    let group = Group::build(&GroupSpec::Dihedral(n))?;
    match n {
        2 => {
            let (x, y, xy) = (group.xy(1, 0), group.xy(0, 1), group.xy(1, 1));
            let members = [[x, y], [xy, y], [x, xy]]
                .into_iter()
                .map(|pair| GSequence::new(&group, pair))
                .collect();
            Ok(CharacterizationFamily::new(
                "dihedral",
                &group,
                "(x, y), (x*y, y), (x, x*y)".to_string(),
                members,
            ))
        }
        3 => order_six_family(&group, "dihedral"),
        _ => {
            let members = units(n)
                .flat_map(|t| (0..n).map(move |s| (t, s)))
                .map(|(t, s)| power_plus_reflection(&group, t, n as usize - 1, s))
                .collect();
            Ok(CharacterizationFamily::new(
                "dihedral",
                &group,
                format!("(y^t)^{}(x*y^s), 1 <= t < {n}, gcd(t, {n}) = 1, 0 <= s < {n}", n - 1),
                members,
            ))
        }
    }
}

pub fn family_dicyclic(n: u32) -> Result<CharacterizationFamily, GroupError> {
    let group = Group::build(&GroupSpec::Dicyclic(n))?;
    if n == 2 {
        let mut members = BTreeSet::new();
        for r in [1, 3] {
            for s in 0..4 {
                let (yr, xs, xrs) = (group.xy(0, r), group.xy(1, s), group.xy(1, r + s));
                members.insert(GSequence::new(&group, [yr, yr, yr, xs]));
                members.insert(GSequence::new(&group, [yr, xs, xs, xs]));
                members.insert(GSequence::new(&group, [xs, xs, xs, xrs]));
            }
        }
        return Ok(CharacterizationFamily::new(
            "dicyclic",
            &group,
            "(y^r, y^r, y^r, x*y^s), (y^r, x*y^s, x*y^s, x*y^s), (x*y^s, x*y^s, x*y^s, x*y^(r+s)); r in {1, 3}, s in 0..4"
                .to_string(),
            members,
        ));
    }
    let members = units(2 * n)
        .filter(|&t| t < n)
        .flat_map(|t| (0..2 * n).map(move |s| (t, s)))
        .map(|(t, s)| power_plus_reflection(&group, t, 2 * n as usize - 1, s))
        .collect();
    Ok(CharacterizationFamily::new(
        "dicyclic",
        &group,
        format!(
            "(y^t)^{}(x*y^s), 1 <= t < {n}, gcd(t, {}) = 1, 0 <= s < {}",
            2 * n - 1,
            2 * n,
            2 * n
        ),
        members,
    ))
}

/// `(y^t)^(q-1) x^i y^v1 ... x^i y^v(m-1)` with `gcd(i, m) = 1`, or the
/// order-six list when `(q, m) = (3, 2)`.
pub fn family_metacyclic(q: u32, m: u32, s: u32) -> Result<CharacterizationFamily, GroupError> {
    let group = Group::build(&GroupSpec::Metacyclic { q, m, s })?;
    if (q, m) == (3, 2) {
        return order_six_family(&group, "metacyclic");
    }
    let mut members = BTreeSet::new();
    for t in 1..q {
        for i in units(m) {
            for nus in (0..q).combinations_with_replacement(m as usize - 1) {
                let h = std::iter::repeat_n(group.xy(0, t), q as usize - 1);
                let n = nus.iter().map(|&nu| group.xy(i, nu));
                members.insert(GSequence::new(&group, h.chain(n)));
            }
        }
    }
    Ok(CharacterizationFamily::new(
        "metacyclic",
        &group,
        format!(
            "(y^t)^{}(x^i*y^v1)...(x^i*y^v{}), 1 <= t < {q}, 1 <= i < {m}, gcd(i, {m}) = 1, v in 0..{q}",
            q - 1,
            m - 1
        ),
        members,
    ))
}

/// Family matching the kind of `group`.
pub fn family_for(group: &Group) -> Result<CharacterizationFamily, SearchError> {
    let family = match *group.spec() {
        GroupSpec::Cyclic(n) if n >= 2 => family_cyclic(n)?,
        GroupSpec::Dihedral(n) => family_dihedral(n)?,
        GroupSpec::Dicyclic(n) => family_dicyclic(n)?,
        GroupSpec::Metacyclic { q, m, s } => family_metacyclic(q, m, s)?,
        _ => {
            return Err(SearchError::Precondition(format!(
                "no characterization is available for {}",
                group.spec()
            )))
        }
    };
    Ok(family)
}

/// For `S = (y^t)^(2n-1)(x*y^s)` in `Q_4n` with `n < t < 2n` and
/// `gcd(t, 2n) = 1`, the predicted parameters `(2n - t, -s mod 2n)` that the
/// automorphism `x -> x, y -> y^-1` maps onto `S`.
pub fn inverse_parameter_image(group: &Group, seq: &GSequence) -> Option<(u32, u32)> {
    let GroupSpec::Dicyclic(n) = *group.spec() else {
        return None;
    };
    let counts = seq.counts();
    let [(h, k), (r, 1)] = counts[..] else {
        return None;
    };
    let (0, t) = group.xy_exponents(h)? else {
        return None;
    };
    let (1, s) = group.xy_exponents(r)? else {
        return None;
    };
    let q = 2 * n;
    let image = k == q as usize - 1 && t > n && gcd(t as u64, q as u64) == 1;
    image.then_some((q - t, (q - s) % q))
}
