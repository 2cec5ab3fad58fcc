//! Exact zero-sum computations in small finite groups.
//!
//! Decides whether a sequence has a nonempty subsequence whose product, in
//! some order, is the identity; computes Davenport constants by exhaustive
//! search; enumerates the extremal product-1-free sequences and compares them
//! with their closed-form characterizations for cyclic, dihedral, dicyclic and
//! metacyclic groups.

pub mod bitset;
pub mod davenport;
pub mod engine;
pub mod error;
pub mod extremal;
pub mod group;
mod presentation;
pub mod report;
mod search;
pub mod sequence;
pub mod spec;

pub use bitset::ElementSet;
pub use davenport::{max_free_length, SearchOptions, SearchResult};
pub use engine::{has_product_in, is_product1_free, oracle_reachable, reachable_products, ReachableSet};
pub use error::{EngineError, GroupError, SearchError, SequenceError};
pub use extremal::{enumerate_extremal, verify_theorem, CharacterizationFamily};
pub use group::{quaternion_names, quotient_map, Coset, Element, Group, QuotientMap};
pub use report::{Target, Verdict, VerificationReport};
pub use sequence::GSequence;
pub use spec::GroupSpec;
