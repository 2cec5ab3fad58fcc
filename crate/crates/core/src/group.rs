//! Finite groups with index-coded elements.
//!
//! Element indexing: powers of `y` come first (`y^0 .. y^(h-1)`), then
//! `x*y^0 .. x*y^(h-1)`, then `x^2*y^k` and so on for metacyclic groups.
//! Products of cyclic groups use mixed-radix coordinates, first factor most
//! significant.
//!
//! Multiplication is closed-form exponent arithmetic. Groups up to
//! [`TABLE_LIMIT`] elements also carry a Cayley table derived independently
//! from the defining relations; construction fails if the two disagree.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GroupError;
use crate::presentation::{cayley_table, TwistedRelations};
use crate::spec::{lcm, product_coords, product_index, GroupSpec, Layout};

/// Groups up to this order keep a verified Cayley table.
pub const TABLE_LIMIT: usize = 4096;
/// Groups up to this order are checked for associativity on every triple.
pub const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 256;
/// Random triples checked above [`EXHAUSTIVE_ASSOCIATIVITY_LIMIT`].
pub const ASSOCIATIVITY_SPOT_CHECKS: usize = 100_000;
/// Default seed for every randomized check in the crate.
pub const DEFAULT_SEED: u64 = 0x5EED_2024;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub(crate) u32);

impl Element {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Which coset of `H = <y>` an element of a dihedral or dicyclic group lies in.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coset {
    H,
    N,
}

#[derive(Clone, Debug)]
enum Arith {
    /// `x^a y^b * x^c y^d = x^(a+c) y^(b*twist^c + d)`, with `x^m = y^wrap`.
    Twisted {
        m: u32,
        q: u32,
        wrap: u32,
        twist_pow: Vec<u32>,
    },
    Product {
        moduli: Vec<u32>,
    },
}

#[derive(Clone)]
pub struct Group {
    spec: GroupSpec,
    arith: Arith,
    order: usize,
    inverses: Vec<u32>,
    orders: Vec<u32>,
    exponent: u64,
    names: Vec<String>,
    table: Option<Vec<u16>>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("spec", &self.spec)
            .field("order", &self.order)
            .field("exponent", &self.exponent)
            .finish()
    }
}

fn relations_for(spec: &GroupSpec) -> Option<TwistedRelations> {
    match *spec {
        GroupSpec::Cyclic(n) => Some(TwistedRelations {
            m: 1,
            q: n,
            twist: 1 % n.max(1),
            wrap: 0,
        }),
        GroupSpec::Dihedral(n) => Some(TwistedRelations {
            m: 2,
            q: n,
            twist: n - 1,
            wrap: 0,
        }),
        GroupSpec::Dicyclic(n) => Some(TwistedRelations {
            m: 2,
            q: 2 * n,
            twist: 2 * n - 1,
            wrap: n,
        }),
        GroupSpec::Metacyclic { q, m, s } => Some(TwistedRelations {
            m,
            q,
            twist: s % q,
            wrap: 0,
        }),
        GroupSpec::ProductOfCyclics(_) => None,
    }
}

impl Group {
    /// Builds and verifies a group using [`DEFAULT_SEED`] for spot checks.
    pub fn build(spec: &GroupSpec) -> Result<Group, GroupError> {
        Group::build_seeded(spec, DEFAULT_SEED)
    }

    pub fn build_seeded(spec: &GroupSpec, seed: u64) -> Result<Group, GroupError> {
        spec.validate()?;
        let order = spec.order_u64() as usize;
        let relations = relations_for(spec);
        let arith = match (spec.layout(), relations) {
            (Layout::Twisted { m, q }, Some(rel)) => {
                let mut twist_pow = Vec::with_capacity(m as usize + 1);
                let mut acc = 1u64 % q as u64;
                for _ in 0..=m {
                    twist_pow.push(acc as u32);
                    acc = acc * rel.twist as u64 % q as u64;
                }
                Arith::Twisted {
                    m,
                    q,
                    wrap: rel.wrap,
                    twist_pow,
                }
            }
            (Layout::Product { moduli }, _) => Arith::Product { moduli },
            _ => unreachable!("twisted layouts always carry relations"),
        };
        let names = (0..order).map(|i| spec.element_name(i)).collect();
        let mut group = Group {
            spec: spec.clone(),
            arith,
            order,
            inverses: Vec::new(),
            orders: Vec::new(),
            exponent: 1,
            names,
            table: None,
        };
        group.inverses = (0..order).map(|i| group.closed_form_inverse(i as u32)).collect();
        group.check_relations()?;
        if order <= TABLE_LIMIT {
            let table = cayley_table(&spec.layout(), relations)
                .ok_or_else(|| group.relation_error("generators reach every element"))?;
            group.check_against_table(&table)?;
            group.table = Some(table);
        }
        group.check_axioms(seed)?;
        group.orders = (0..order).map(|i| group.compute_order(Element(i as u32))).collect();
        group.exponent = group.orders.iter().fold(1u64, |acc, &o| lcm(acc, o as u64));
        Ok(group)
    }

    fn relation_error(&self, relation: &str) -> GroupError {
        GroupError::Relation {
            spec: self.spec.to_string(),
            relation: relation.to_string(),
        }
    }

    fn check_relations(&self) -> Result<(), GroupError> {
        let id = self.identity();
        match &self.arith {
            Arith::Twisted { m, q, wrap, .. } => {
                let y = self.xy(0, 1 % q);
                if self.pow(y, *q as u64) != id {
                    return Err(self.relation_error("y^q = 1"));
                }
                if *m > 1 {
                    let x = self.xy(1, 0);
                    if self.pow(x, *m as u64) != self.pow(y, *wrap as u64) {
                        return Err(self.relation_error(if *wrap == 0 { "x^m = 1" } else { "x^2 = y^n" }));
                    }
                    let twist = match relations_for(&self.spec) {
                        Some(rel) => rel.twist,
                        None => 1,
                    };
                    let lhs = self.mul(y, x);
                    let rhs = self.mul(x, self.pow(y, twist as u64));
                    if lhs != rhs {
                        return Err(self.relation_error("y x = x y^s"));
                    }
                }
            }
            Arith::Product { moduli } => {
                for (i, &n) in moduli.iter().enumerate() {
                    let mut coords = vec![0; moduli.len()];
                    coords[i] = 1 % n;
                    let g = Element(product_index(moduli, &coords) as u32);
                    if self.pow(g, n as u64) != id {
                        return Err(self.relation_error("g_i^(n_i) = 1"));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_against_table(&self, table: &[u16]) -> Result<(), GroupError> {
        let n = self.order;
        for a in 0..n {
            for b in 0..n {
                if self.mul(Element(a as u32), Element(b as u32)).0 != table[a * n + b] as u32 {
                    return Err(self.relation_error(&format!(
                        "closed-form product {} * {} matches the relation table",
                        self.names[a], self.names[b]
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_axioms(&self, seed: u64) -> Result<(), GroupError> {
        let id = self.identity();
        for a in self.elements() {
            if self.mul(id, a) != a || self.mul(a, id) != a {
                return Err(self.relation_error("1 * a = a * 1 = a"));
            }
            let inv = self.inverse(a);
            if self.mul(a, inv) != id || self.mul(inv, a) != id {
                return Err(self.relation_error("a * a^-1 = 1"));
            }
        }
        let assoc = |a: u32, b: u32, c: u32| {
            let (a, b, c) = (Element(a), Element(b), Element(c));
            self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c))
        };
        let n = self.order as u32;
        if self.order <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(self.relation_error("(ab)c = a(bc)"));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..ASSOCIATIVITY_SPOT_CHECKS {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !assoc(a, b, c) {
                    return Err(self.relation_error("(ab)c = a(bc)"));
                }
            }
        }
        Ok(())
    }

    fn closed_form_inverse(&self, index: u32) -> u32 {
        match &self.arith {
            Arith::Twisted { m, q, wrap, twist_pow } => {
                let (a, b) = (index / q, index % q);
                if a == 0 {
                    (q - b) % q
                } else {
                    // x^a y^b * x^(m-a) y^d = y^(b*s^(m-a) + wrap + d)
                    let shifted = (b as u64 * twist_pow[(m - a) as usize] as u64 + *wrap as u64) % *q as u64;
                    let d = (*q as u64 - shifted) % *q as u64;
                    (m - a) * q + d as u32
                }
            }
            Arith::Product { moduli } => {
                let coords: Vec<u32> = product_coords(moduli, index as usize)
                    .iter()
                    .zip(moduli)
                    .map(|(&c, &n)| (n - c) % n)
                    .collect();
                product_index(moduli, &coords) as u32
            }
        }
    }

    fn compute_order(&self, a: Element) -> u32 {
        let id = self.identity();
        let mut acc = a;
        let mut k = 1;
        while acc != id {
            acc = self.mul(acc, a);
            k += 1;
        }
        k
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Element {
        Element(0)
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order as u32).map(Element)
    }

    pub fn element(&self, index: usize) -> Result<Element, GroupError> {
        if index < self.order {
            Ok(Element(index as u32))
        } else {
            Err(GroupError::OutOfRange {
                index,
                order: self.order,
            })
        }
    }

    /// Group product by closed-form exponent arithmetic.
    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        match &self.arith {
            Arith::Twisted { m, q, wrap, twist_pow } => {
                let (a_x, a_y) = (a.0 / q, a.0 % q);
                let (b_x, b_y) = (b.0 / q, b.0 % q);
                let mut x = a_x + b_x;
                let mut y = a_y as u64 * twist_pow[b_x as usize] as u64 + b_y as u64;
                if x >= *m {
                    x -= m;
                    y += *wrap as u64;
                }
                Element(x * q + (y % *q as u64) as u32)
            }
            Arith::Product { moduli } => {
                let mut stride = 1u32;
                let mut out = 0u32;
                let (mut ra, mut rb) = (a.0, b.0);
                for &n in moduli.iter().rev() {
                    let c = (ra % n + rb % n) % n;
                    out += c * stride;
                    stride *= n;
                    ra /= n;
                    rb /= n;
                }
                Element(out)
            }
        }
    }

    /// Product looked up in the relation-derived Cayley table, when present.
    pub fn table_mul(&self, a: Element, b: Element) -> Option<Element> {
        self.table
            .as_ref()
            .map(|t| Element(t[a.index() * self.order + b.index()] as u32))
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    pub fn inverse(&self, a: Element) -> Element {
        Element(self.inverses[a.index()])
    }

    pub fn pow(&self, a: Element, k: u64) -> Element {
        let mut result = self.identity();
        let mut base = a;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        result
    }

    /// Product of the elements in the given order.
    pub fn product<'a>(&self, elems: impl IntoIterator<Item = &'a Element>) -> Element {
        elems.into_iter().fold(self.identity(), |acc, &e| self.mul(acc, e))
    }

    pub fn element_order(&self, a: Element) -> u32 {
        self.orders[a.index()]
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_abelian(&self) -> bool {
        match &self.arith {
            Arith::Product { .. } => true,
            Arith::Twisted { m, twist_pow, .. } => *m == 1 || twist_pow[1] == 1,
        }
    }

    pub fn name(&self, a: Element) -> &str {
        &self.names[a.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Element `x^a y^b` of a dihedral, dicyclic, metacyclic or cyclic group.
    /// Exponents are reduced modulo the generator orders.
    pub fn xy(&self, a: u32, b: u32) -> Element {
        match &self.arith {
            Arith::Twisted { m, q, .. } => {
                // x^a with a >= m needs the x^m = y^wrap rule
                let base = Element(b % q);
                let x = if *m > 1 { Element(*q) } else { self.identity() };
                self.mul(self.pow(x, a as u64), base)
            }
            Arith::Product { .. } => panic!("xy() needs a group presented by x and y"),
        }
    }

    /// Coordinates `(a, b)` of `x^a y^b`, for groups presented by x and y.
    pub fn xy_exponents(&self, e: Element) -> Option<(u32, u32)> {
        match &self.arith {
            Arith::Twisted { q, .. } => Some((e.0 / q, e.0 % q)),
            Arith::Product { .. } => None,
        }
    }

    /// Order of the cyclic subgroup `H = <y>` for dihedral and dicyclic groups.
    pub fn h_order(&self) -> Result<usize, GroupError> {
        match (&self.spec, &self.arith) {
            (GroupSpec::Dihedral(_) | GroupSpec::Dicyclic(_), Arith::Twisted { q, .. }) => Ok(*q as usize),
            _ => Err(GroupError::Unsupported {
                operation: "coset split",
                spec: self.spec.to_string(),
            }),
        }
    }

    pub fn coset_split(&self, a: Element) -> Result<Coset, GroupError> {
        let h = self.h_order()?;
        Ok(if a.index() < h { Coset::H } else { Coset::N })
    }

    pub fn center(&self) -> Vec<Element> {
        self.elements()
            .filter(|&z| self.elements().all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }

    /// Evaluates a word such as `x*y^3`, `y^-1*x` or `g1*g2^2`.
    ///
    /// Letters are `x` and `y` for groups presented by them, `g1..gk` for
    /// products of cyclic groups; `1` and `e` denote the identity.
    pub fn parse_element(&self, word: &str) -> Result<Element, GroupError> {
        let err = |token: &str, reason: &str| GroupError::Parse {
            token: token.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = word.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err(word, "empty element word"));
        }
        let mut acc = self.identity();
        for factor in compact.split('*') {
            let (atom, exp) = match factor.split_once('^') {
                Some((atom, exp)) => {
                    let k: i64 = exp.parse().map_err(|_| err(exp, "expected an integer exponent"))?;
                    (atom, k)
                }
                None => (factor, 1),
            };
            let base = self.generator(atom).ok_or_else(|| err(atom, "unknown generator"))?;
            let ord = self.element_order(base) as i64;
            let k = exp.rem_euclid(ord.max(1)) as u64;
            acc = self.mul(acc, self.pow(base, k));
        }
        Ok(acc)
    }

    fn generator(&self, atom: &str) -> Option<Element> {
        match atom {
            "1" | "e" => return Some(self.identity()),
            _ => {}
        }
        match &self.arith {
            Arith::Twisted { m, q, .. } => match atom {
                "y" => Some(Element(1 % q)),
                "x" if *m > 1 => Some(Element(*q)),
                _ => None,
            },
            Arith::Product { moduli } => {
                let i: usize = atom.strip_prefix('g')?.parse().ok()?;
                if i == 0 || i > moduli.len() {
                    return None;
                }
                let mut coords = vec![0; moduli.len()];
                coords[i - 1] = 1 % moduli[i - 1];
                Some(Element(product_index(moduli, &coords) as u32))
            }
        }
    }
}

/// The surjection `Q_4n -> D_2n` with kernel `{1, y^n}`.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    pub source: Group,
    pub target: Group,
    images: Vec<Element>,
}

impl QuotientMap {
    pub fn apply(&self, a: Element) -> Element {
        self.images[a.index()]
    }

    pub fn kernel(&self) -> Vec<Element> {
        self.source
            .elements()
            .filter(|&a| self.apply(a) == self.target.identity())
            .collect()
    }
}

/// Builds `x_Q -> x_D, y_Q -> y_D` and checks it is a surjective homomorphism.
pub fn quotient_map(n: u32) -> Result<QuotientMap, GroupError> {
    let source = Group::build(&GroupSpec::Dicyclic(n))?;
    let target = Group::build(&GroupSpec::Dihedral(n))?;
    let images: Vec<Element> = source
        .elements()
        .map(|a| {
            let (eps, k) = source.xy_exponents(a).expect("dicyclic is presented by x, y");
            target.xy(eps, k % n)
        })
        .collect();
    let map = QuotientMap { source, target, images };
    let fail = |relation: &str| GroupError::Relation {
        spec: format!("Q:{n} -> D:{n}"),
        relation: relation.to_string(),
    };
    for a in map.source.elements() {
        for b in map.source.elements() {
            let lhs = map.apply(map.source.mul(a, b));
            let rhs = map.target.mul(map.apply(a), map.apply(b));
            if lhs != rhs {
                return Err(fail("phi(ab) = phi(a) phi(b)"));
            }
        }
    }
    let mut hit = vec![false; map.target.order()];
    for a in map.source.elements() {
        hit[map.apply(a).index()] = true;
    }
    if hit.iter().any(|h| !h) {
        return Err(fail("phi is surjective"));
    }
    if map.kernel() != vec![map.source.identity(), map.source.xy(0, n)] {
        return Err(fail("ker phi = {1, y^n}"));
    }
    Ok(map)
}

/// Names `e, j, -e, -j, i, k, -i, -k` for the elements of `Q:2`, via
/// `x -> i`, `y -> j` and `ij = k`. The identity is `e`, the central
/// involution `y^2 = x^2` is `-e`.
pub fn quaternion_names(group: &Group) -> Result<Vec<String>, GroupError> {
    if group.spec() != &GroupSpec::Dicyclic(2) {
        return Err(GroupError::Unsupported {
            operation: "quaternion naming",
            spec: group.spec().to_string(),
        });
    }
    let i = group.xy(1, 0);
    let j = group.xy(0, 1);
    let k = group.mul(i, j);
    let minus = group.xy(0, 2);
    let mut names = vec![String::new(); 8];
    for (base, label) in [(group.identity(), "e"), (i, "i"), (j, "j"), (k, "k")] {
        names[base.index()] = label.to_string();
        names[group.mul(minus, base).index()] = format!("-{label}");
    }
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(text: &str) -> Group {
        Group::build(&text.parse().unwrap()).unwrap()
    }

    #[test]
    fn dihedral_six_basics() {
        let g = build("D:3");
        assert_eq!(g.order(), 6);
        assert_eq!(g.exponent(), 6);
        let mut orders: Vec<u32> = g.elements().map(|a| g.element_order(a)).collect();
        orders.sort();
        orders.dedup();
        assert_eq!(orders, vec![1, 2, 3]);
        assert_eq!(g.inverse(g.xy(0, 1)), g.xy(0, 2));
    }

    #[test]
    fn quaternion_center_and_orders() {
        let g = build("Q:2");
        assert_eq!(g.order(), 8);
        assert_eq!(g.center(), vec![g.identity(), g.xy(0, 2)]);
        assert_eq!(g.element_order(g.xy(1, 0)), 4);
        assert_eq!(g.inverse(g.xy(1, 0)), g.xy(1, 2));
    }

    #[test]
    fn trivial_group() {
        let g = build("C:1");
        assert_eq!(g.order(), 1);
        assert_eq!(g.exponent(), 1);
        assert_eq!(g.element_order(g.identity()), 1);
        assert_eq!(g.name(g.identity()), "1");
    }

    #[test]
    fn closed_form_products() {
        let d8 = build("D:4");
        assert_eq!(d8.mul(d8.xy(1, 1), d8.xy(1, 3)), d8.xy(0, 2));
        let q8 = build("Q:2");
        assert_eq!(q8.mul(q8.xy(1, 1), q8.xy(1, 1)), q8.xy(0, 2));
    }

    #[test]
    fn exponents() {
        assert_eq!(build("D:6").exponent(), 6);
        assert_eq!(build("CxC:4,2").exponent(), 4);
        assert_eq!(build("M:7,3,2").exponent(), 21);
    }

    #[test]
    fn coset_split_kinds() {
        let d6 = build("D:3");
        assert_eq!(d6.coset_split(d6.xy(0, 2)).unwrap(), Coset::H);
        assert_eq!(d6.coset_split(d6.identity()).unwrap(), Coset::H);
        let q12 = build("Q:3");
        assert_eq!(q12.coset_split(q12.xy(1, 5)).unwrap(), Coset::N);
        assert!(build("C:4").coset_split(Element(1)).is_err());
    }

    #[test]
    fn parse_words() {
        let g = build("D:5");
        assert_eq!(g.parse_element("x*y^2").unwrap(), g.xy(1, 2));
        assert_eq!(g.parse_element(" y ^ -1 ").unwrap(), g.xy(0, 4));
        // y x = x y^-1
        assert_eq!(g.parse_element("y*x").unwrap(), g.xy(1, 4));
        assert_eq!(g.parse_element("1").unwrap(), g.identity());
        match g.parse_element("x*z") {
            Err(GroupError::Parse { token, .. }) => assert_eq!(token, "z"),
            other => panic!("{other:?}"),
        }
        let p = build("CxC:2,4");
        assert_eq!(p.parse_element("g1*g2^3").unwrap().index(), 7);
        assert!(p.parse_element("g3").is_err());
    }

    #[test]
    fn every_name_parses_back() {
        for text in ["C:6", "D:4", "Q:3", "M:5,4,2", "CxC:2,3"] {
            let g = build(text);
            for a in g.elements() {
                assert_eq!(g.parse_element(g.name(a)).unwrap(), a, "{text} {}", g.name(a));
            }
        }
    }

    #[test]
    fn quotient_examples() {
        let phi = quotient_map(2).unwrap();
        assert_eq!(phi.apply(phi.source.xy(0, 2)), phi.target.identity());
        assert_eq!(phi.apply(phi.source.xy(0, 3)), phi.target.xy(0, 1));
        let phi3 = quotient_map(3).unwrap();
        assert_eq!(phi3.apply(phi3.source.xy(1, 4)), phi3.target.xy(1, 1));
    }

    #[test]
    fn quaternion_naming() {
        let g = build("Q:2");
        let names = quaternion_names(&g).unwrap();
        assert_eq!(names[g.xy(1, 0).index()], "i");
        assert_eq!(names[g.xy(0, 1).index()], "j");
        assert_eq!(names[g.xy(1, 1).index()], "k");
        assert_eq!(names[g.xy(0, 2).index()], "-e");
        assert_eq!(names[g.identity().index()], "e");
        assert!(quaternion_names(&build("Q:3")).is_err());
    }

    #[test]
    fn large_group_uses_spot_checks() {
        let g = build("Q:1100");
        assert!(!g.has_table());
        assert_eq!(g.order(), 4400);
        assert_eq!(g.mul(g.xy(1, 7), g.xy(1, 10)), g.xy(0, 1103));
    }
}
