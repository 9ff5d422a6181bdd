//! Minimal-pair mining from pronunciation dictionaries.
//!
//! Pronunciations become graph vertices, single-phone substitutions become
//! edges, and maximal cliques of that graph are the candidate minimal-pair
//! sets.

mod cliques;
mod dict;
mod graph;
mod sets;

pub use cliques::{enumerate_cliques, enumerate_cliques_in};
pub use dict::{parse_mfa_dict, PronDict, PronEntry};
pub use graph::{build_graph, MinimalPairGraph};
pub use sets::{cliques_to_sets, MinimalPairSet, PhoneClass, PhoneInventory, PositionClass};
