//! A trie whose edges all live in one fixed-capacity hash table.
//!
//! Every edge `x --y--> z` is stored as the dictionary item `(x, y) -> z` in a
//! single [`EdgeTable`] of `H` slots, hashed by the coordinate hash
//! `h(x, y) = (x * m + y) mod H`. The table is sized once from the node
//! capacity `n_max` and a load factor `alpha` (`H = ceil((n_max - 1) / alpha)`)
//! and never grows, so the memory footprint is a closed-form function of
//! `n_max` alone and does not depend on the alphabet size `m`.
//!
//! Collisions are resolved by separate chaining. Because of the structure of
//! the coordinate hash, no slot can ever hold more than `ceil(n_max * m / H)`
//! keys; the [`analyzer`] module checks this and the underlying collision
//! condition exhaustively on small instances.
//!
//! ```
//! use coordtrie::{Alphabet, StringSet};
//!
//! let mut set = StringSet::new(Alphabet::bytes(), 16, 0.75).unwrap();
//! for w in ["he", "she", "his", "hers"] {
//!     set.insert(w).unwrap();
//! }
//! assert!(set.contains("hers"));
//! assert!(!set.contains("her"));
//! assert_eq!(set.node_count(), 10);
//! assert_eq!(set.enumerate("h"), ["he", "hers", "his"]);
//! ```

pub mod alphabet;
pub mod analyzer;
pub mod bench;
pub mod cli;
pub mod edge_table;
mod flags;
pub mod oracle;
pub mod string_set;
pub mod trie;

pub use alphabet::{Alphabet, AlphabetError, Symbol, SymbolId};
pub use analyzer::{GcdCoordinate, TableReport};
pub use edge_table::{EdgeKey, EdgeTable, TableError, DEFAULT_LOAD_FACTOR};
pub use oracle::DirectTrie;
pub use string_set::{SetError, StringSet};
pub use trie::{Footprint, NodeId, Trie, TrieError, ROOT};
