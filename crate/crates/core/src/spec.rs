//! Group specifications and the `C:n` / `D:n` / `Q:n` / `M:q,m,s` / `CxC:n1,n2,...`
//! text grammar.
//!
//! Grammar (whitespace around tokens is ignored, the kind tag is case-insensitive):
//!
//! ```text
//! spec   := kind ':' params
//! kind   := "C" | "D" | "Q" | "M" | "CxC"
//! params := uint (',' uint)*
//! ```
//!
//! `C:n` is the cyclic group of order n, `D:n` the dihedral group of order 2n,
//! `Q:n` the dicyclic group of order 4n, `M:q,m,s` the metacyclic group
//! `C_q ⋊_s C_m` of order qm, and `CxC:n1,...,nk` the direct product of cyclic
//! groups.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GroupError;

/// Largest group order the toolkit will construct.
pub const MAX_ORDER: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum GroupSpec {
    Cyclic(u32),
    Dihedral(u32),
    Dicyclic(u32),
    Metacyclic { q: u32, m: u32, s: u32 },
    ProductOfCyclics(Vec<u32>),
}

/// Shape of the element index space, derived from a spec without building the group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Layout {
    /// Elements `x^a y^b` with `a < m`, `b < q`, index `a*q + b`.
    Twisted { m: u32, q: u32 },
    /// Coordinate tuples, first coordinate most significant.
    Product { moduli: Vec<u32> },
}

impl GroupSpec {
    /// Checks the parameter constraints of each kind.
    pub fn validate(&self) -> Result<(), GroupError> {
        let invalid = |reason: String| GroupError::InvalidSpec {
            spec: self.to_string(),
            reason,
        };
        match *self {
            GroupSpec::Cyclic(n) if n < 1 => return Err(invalid("cyclic order must be >= 1".into())),
            GroupSpec::Dihedral(n) if n < 2 => return Err(invalid("dihedral parameter n must be >= 2".into())),
            GroupSpec::Dicyclic(n) if n < 2 => return Err(invalid("dicyclic parameter n must be >= 2".into())),
            GroupSpec::Metacyclic { q, m, s } => {
                if !is_prime(q) {
                    return Err(invalid(format!("q = {q} is not prime")));
                }
                if m < 2 {
                    return Err(invalid(format!("m = {m} must be >= 2")));
                }
                if s % q == 0 {
                    return Err(invalid(format!("s = {s} is not a unit mod {q}")));
                }
                let ord = multiplicative_order(s % q, q);
                if ord != m {
                    return Err(invalid(format!(
                        "relation ord_q(s) = m violated: ord_{q}({s}) = {ord}, m = {m}"
                    )));
                }
            }
            GroupSpec::ProductOfCyclics(ref moduli) => {
                if moduli.is_empty() {
                    return Err(invalid("product needs at least one factor".into()));
                }
                if let Some(bad) = moduli.iter().find(|&&n| n < 1) {
                    return Err(invalid(format!("factor order {bad} must be >= 1")));
                }
            }
            _ => {}
        }
        let order = self.order_u64();
        if order > MAX_ORDER {
            return Err(invalid(format!("order {order} exceeds the limit {MAX_ORDER}")));
        }
        Ok(())
    }

    /// Group order computed from the parameters (saturating).
    pub fn order_u64(&self) -> u64 {
        match *self {
            GroupSpec::Cyclic(n) => n as u64,
            GroupSpec::Dihedral(n) => 2 * n as u64,
            GroupSpec::Dicyclic(n) => 4 * n as u64,
            GroupSpec::Metacyclic { q, m, .. } => q as u64 * m as u64,
            GroupSpec::ProductOfCyclics(ref moduli) => moduli.iter().fold(1u64, |acc, &n| acc.saturating_mul(n as u64)),
        }
    }

    pub fn is_dihedral_or_dicyclic(&self) -> bool {
        matches!(self, GroupSpec::Dihedral(_) | GroupSpec::Dicyclic(_))
    }

    pub(crate) fn layout(&self) -> Layout {
        match *self {
            GroupSpec::Cyclic(n) => Layout::Twisted { m: 1, q: n },
            GroupSpec::Dihedral(n) => Layout::Twisted { m: 2, q: n },
            GroupSpec::Dicyclic(n) => Layout::Twisted { m: 2, q: 2 * n },
            GroupSpec::Metacyclic { q, m, .. } => Layout::Twisted { m, q },
            GroupSpec::ProductOfCyclics(ref moduli) => Layout::Product { moduli: moduli.clone() },
        }
    }

    /// Canonical word for the element with the given index, e.g. `x*y^3`.
    pub fn element_name(&self, index: usize) -> String {
        match self.layout() {
            Layout::Twisted { q, .. } => {
                let a = index / q as usize;
                let b = index % q as usize;
                twisted_name(a, b)
            }
            Layout::Product { moduli } => {
                let coords = product_coords(&moduli, index);
                let parts: Vec<String> = coords
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| power_name(&format!("g{}", i + 1), c as usize))
                    .collect();
                if parts.is_empty() {
                    "1".to_string()
                } else {
                    parts.join("*")
                }
            }
        }
    }

    /// Stable string used in cache keys and file names.
    pub fn key(&self) -> String {
        self.to_string().replace(':', "_").replace(',', "-")
    }
}

fn power_name(letter: &str, k: usize) -> String {
    match k {
        0 => String::new(),
        1 => letter.to_string(),
        _ => format!("{letter}^{k}"),
    }
}

fn twisted_name(a: usize, b: usize) -> String {
    let xs = power_name("x", a);
    let ys = power_name("y", b);
    match (xs.is_empty(), ys.is_empty()) {
        (true, true) => "1".to_string(),
        (false, true) => xs,
        (true, false) => ys,
        (false, false) => format!("{xs}*{ys}"),
    }
}

pub(crate) fn product_coords(moduli: &[u32], mut index: usize) -> Vec<u32> {
    let mut coords = vec![0u32; moduli.len()];
    for (slot, &n) in coords.iter_mut().zip(moduli).rev() {
        *slot = (index % n as usize) as u32;
        index /= n as usize;
    }
    coords
}

pub(crate) fn product_index(moduli: &[u32], coords: &[u32]) -> usize {
    moduli
        .iter()
        .zip(coords)
        .fold(0usize, |acc, (&n, &c)| acc * n as usize + c as usize)
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Least k >= 1 with `s^k = 1 (mod q)`; 0 if s is not a unit.
pub fn multiplicative_order(s: u32, q: u32) -> u32 {
    if q == 1 {
        return 1;
    }
    if gcd(s as u64, q as u64) != 1 {
        return 0;
    }
    let mut acc = s as u64 % q as u64;
    let mut k = 1;
    while acc != 1 {
        acc = acc * s as u64 % q as u64;
        k += 1;
    }
    k
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "C:{n}"),
            GroupSpec::Dihedral(n) => write!(f, "D:{n}"),
            GroupSpec::Dicyclic(n) => write!(f, "Q:{n}"),
            GroupSpec::Metacyclic { q, m, s } => write!(f, "M:{q},{m},{s}"),
            GroupSpec::ProductOfCyclics(moduli) => {
                let parts: Vec<String> = moduli.iter().map(u32::to_string).collect();
                write!(f, "CxC:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let parse_err = |token: &str, reason: &str| GroupError::Parse {
            token: token.to_string(),
            reason: reason.to_string(),
        };
        let (kind, params) = text
            .split_once(':')
            .ok_or_else(|| parse_err(text.trim(), "expected `<kind>:<params>`"))?;
        let kind = kind.trim();
        let mut values = Vec::new();
        for token in params.split(',') {
            let token = token.trim();
            let value = token
                .parse::<u32>()
                .map_err(|_| parse_err(token, "expected a non-negative integer"))?;
            values.push(value);
        }
        let single = |values: &[u32]| -> Result<u32, GroupError> {
            match values {
                [n] => Ok(*n),
                _ => Err(parse_err(params.trim(), "expected exactly one parameter")),
            }
        };
        let spec = match kind.to_ascii_uppercase().as_str() {
            "C" => GroupSpec::Cyclic(single(&values)?),
            "D" => GroupSpec::Dihedral(single(&values)?),
            "Q" => GroupSpec::Dicyclic(single(&values)?),
            "M" => match values[..] {
                [q, m, s] => GroupSpec::Metacyclic { q, m, s },
                _ => return Err(parse_err(params.trim(), "expected `q,m,s`")),
            },
            "CXC" => GroupSpec::ProductOfCyclics(values),
            _ => return Err(parse_err(kind, "unknown group kind (use C, D, Q, M or CxC)")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<GroupSpec> for String {
    fn from(spec: GroupSpec) -> String {
        spec.to_string()
    }
}

impl TryFrom<String> for GroupSpec {
    type Error = GroupError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}
