//! The coordinate hash trie: node allocation, terminal flags and the three
//! basic node operations (walk, insert child, delete leaf child) over a
//! single [`EdgeTable`].
//!
//! Nodes carry no per-node storage besides two bits (live, terminal). Child
//! enumeration therefore scans all `m` symbols, which is the `O(m)` price of
//! keeping the whole structure at `O(n_max)` space.

use thiserror::Error;

use crate::alphabet::SymbolId;
pub use crate::edge_table::NodeId;
use crate::edge_table::{self, EdgeKey, EdgeTable, TableError};
use crate::flags::FlagSet;

pub const ROOT: NodeId = 0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrieError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("node {0} is not live")]
    DeadNode(NodeId),
    #[error("symbol {0} out of range")]
    SymbolOutOfRange(SymbolId),
    #[error("node {x} already has a child on symbol {y}")]
    EdgeExists { x: NodeId, y: SymbolId },
    #[error("all {n_max} nodes are in use")]
    CapacityExhausted { n_max: usize },
    #[error("node {x} has no child on symbol {y}")]
    NoSuchEdge { x: NodeId, y: SymbolId },
    #[error("child {0} is not a leaf")]
    ChildNotLeaf(NodeId),
    #[error(transparent)]
    Table(TableError),
}

impl From<TableError> for TrieError {
    fn from(e: TableError) -> Self {
        match e {
            TableError::InvalidParameter(msg) => TrieError::InvalidParameter(msg),
            other => TrieError::Table(other),
        }
    }
}

/// Analytic byte accounting, split by component.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Footprint {
    /// Slot heads (or the dense `n_max x m` matrix for the direct-mapped trie).
    pub slots: usize,
    pub entry_pool: usize,
    /// Live and terminal bit sets.
    pub flags: usize,
    /// Free-list stack.
    pub allocator: usize,
}

impl Footprint {
    pub fn total(&self) -> usize {
        self.slots + self.entry_pool + self.flags + self.allocator
    }

    /// Footprint of a [`Trie`] built with these parameters. Independent of `m`.
    pub fn coordinate_trie(n_max: usize, alpha: f64) -> Result<Self, TrieError> {
        let slots = edge_table::slot_count_for(n_max, alpha)?;
        Ok(Self {
            slots: slots * edge_table::SLOT_BYTES,
            entry_pool: n_max.saturating_sub(1) * edge_table::ENTRY_BYTES,
            flags: 2 * FlagSet::bytes_for(n_max),
            allocator: n_max.saturating_sub(1) * std::mem::size_of::<NodeId>(),
        })
    }

    /// Footprint of a [`DirectTrie`](crate::oracle::DirectTrie) with these parameters.
    pub fn direct_trie(n_max: usize, m: usize) -> Self {
        Self {
            slots: n_max * m * std::mem::size_of::<NodeId>(),
            entry_pool: 0,
            flags: 2 * FlagSet::bytes_for(n_max),
            allocator: n_max.saturating_sub(1) * std::mem::size_of::<NodeId>(),
        }
    }
}

/// Coordinate hash trie over nodes `[0, n_max)` and symbols `[0, m)`.
#[derive(Clone, Debug)]
pub struct Trie {
    edges: EdgeTable,
    live: FlagSet,
    terminal: FlagSet,
    free: Vec<NodeId>,
    next_fresh: NodeId,
    nodes: usize,
    // (address, capacity) of free, live and terminal right after construction.
    initial_buffers: [(usize, usize); 3],
}

impl Trie {
    /// A trie holding only the root, with memory for `n_max` nodes reserved.
    pub fn new(n_max: usize, m: usize, alpha: f64) -> Result<Self, TrieError> {
        let edges = EdgeTable::new(n_max, m, alpha)?;
        let mut live = FlagSet::new(n_max);
        live.set(ROOT as usize, true);
        let mut t = Self {
            edges,
            live,
            terminal: FlagSet::new(n_max),
            free: Vec::with_capacity(n_max - 1),
            next_fresh: 1,
            nodes: 1,
            initial_buffers: [(0, 0); 3],
        };
        t.initial_buffers = t.buffer_identities();
        Ok(t)
    }

    pub fn n_max(&self) -> usize {
        self.edges.n_max()
    }

    pub fn alphabet_size(&self) -> usize {
        self.edges.alphabet_size()
    }

    pub fn edges(&self) -> &EdgeTable {
        &self.edges
    }

    /// Live node count `n`, root included.
    pub fn node_count(&self) -> usize {
        self.nodes
    }

    /// Always `node_count() - 1`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_live(&self, x: NodeId) -> bool {
        self.live.get(x as usize)
    }

    pub fn live_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.live.iter_ones().map(|i| i as NodeId)
    }

    pub fn terminal_count(&self) -> usize {
        self.terminal.count_ones()
    }

    fn check_live(&self, x: NodeId) -> Result<(), TrieError> {
        if self.is_live(x) {
            Ok(())
        } else {
            Err(TrieError::DeadNode(x))
        }
    }

    fn check_edge_args(&self, x: NodeId, y: SymbolId) -> Result<EdgeKey, TrieError> {
        self.check_live(x)?;
        if y as usize >= self.alphabet_size() {
            return Err(TrieError::SymbolOutOfRange(y));
        }
        Ok(EdgeKey::new(x, y))
    }

    /// Child of `x` along `y`, if any.
    pub fn walk(&self, x: NodeId, y: SymbolId) -> Result<Option<NodeId>, TrieError> {
        self.walk_probed(x, y).map(|(z, _)| z)
    }

    /// [`walk`](Self::walk) plus the number of edge-table entries visited.
    pub fn walk_probed(&self, x: NodeId, y: SymbolId) -> Result<(Option<NodeId>, usize), TrieError> {
        let key = self.check_edge_args(x, y)?;
        Ok(self.edges.find_probed(key)?)
    }

    /// Creates a new leaf under `x` on symbol `y` and returns its id.
    ///
    /// Freed ids are reused last-in first-out before fresh ones are handed out.
    pub fn insert_child(&mut self, x: NodeId, y: SymbolId) -> Result<NodeId, TrieError> {
        let key = self.check_edge_args(x, y)?;
        if self.edges.find(key)?.is_some() {
            return Err(TrieError::EdgeExists { x, y });
        }
        if self.nodes == self.n_max() {
            return Err(TrieError::CapacityExhausted { n_max: self.n_max() });
        }
        let z = match self.free.pop() {
            Some(z) => z,
            None => {
                let z = self.next_fresh;
                self.next_fresh += 1;
                z
            }
        };
        self.edges.insert(key, z)?;
        self.live.set(z as usize, true);
        self.nodes += 1;
        Ok(z)
    }

    /// Deletes the leaf child of `x` on `y`. Refuses children that have children.
    pub fn delete_leaf_child(&mut self, x: NodeId, y: SymbolId) -> Result<(), TrieError> {
        let key = self.check_edge_args(x, y)?;
        let z = self
            .edges
            .find(key)?
            .ok_or(TrieError::NoSuchEdge { x, y })?;
        if !self.is_leaf(z)? {
            return Err(TrieError::ChildNotLeaf(z));
        }
        self.edges.remove(key)?;
        self.live.set(z as usize, false);
        self.terminal.set(z as usize, false);
        self.free.push(z);
        self.nodes -= 1;
        Ok(())
    }

    /// True iff `x` has no children. Scans all `m` symbols.
    pub fn is_leaf(&self, x: NodeId) -> Result<bool, TrieError> {
        self.check_live(x)?;
        Ok(self.child_iter(x).next().is_none())
    }

    pub fn set_terminal(&mut self, x: NodeId, flag: bool) -> Result<(), TrieError> {
        self.check_live(x)?;
        self.terminal.set(x as usize, flag);
        Ok(())
    }

    pub fn is_terminal(&self, x: NodeId) -> Result<bool, TrieError> {
        self.check_live(x)?;
        Ok(self.terminal.get(x as usize))
    }

    /// Outgoing edges of `x` in ascending symbol order. Scans all `m` symbols.
    pub fn children(&self, x: NodeId) -> Result<Vec<(SymbolId, NodeId)>, TrieError> {
        self.check_live(x)?;
        Ok(self.child_iter(x).collect())
    }

    pub(crate) fn child_iter(&self, x: NodeId) -> impl Iterator<Item = (SymbolId, NodeId)> + '_ {
        (0..self.alphabet_size() as SymbolId).filter_map(move |y| {
            // x is live and y < m, so the key is in range
            self.edges
                .find(EdgeKey::new(x, y))
                .ok()
                .flatten()
                .map(|z| (y, z))
        })
    }

    /// Analytic byte accounting; equals [`allocated_bytes`](Self::allocated_bytes).
    pub fn footprint(&self) -> Footprint {
        Footprint {
            slots: self.edges.slot_count() * edge_table::SLOT_BYTES,
            entry_pool: self.edges.capacity() * edge_table::ENTRY_BYTES,
            flags: 2 * FlagSet::bytes_for(self.n_max()),
            allocator: (self.n_max() - 1) * std::mem::size_of::<NodeId>(),
        }
    }

    /// Bytes actually reserved by all heap buffers.
    pub fn allocated_bytes(&self) -> usize {
        self.edges.allocated_bytes()
            + self.live.allocated_bytes()
            + self.terminal.allocated_bytes()
            + self.free.capacity() * std::mem::size_of::<NodeId>()
    }

    fn buffer_identities(&self) -> [(usize, usize); 3] {
        [
            (self.free.as_ptr() as usize, self.free.capacity()),
            self.live.buffer_identity(),
            self.terminal.buffer_identity(),
        ]
    }

    /// Buffers reallocated since construction. Zero for a correct trie.
    pub fn growth_events(&self) -> usize {
        let now = self.buffer_identities();
        self.edges.growth_events()
            + now
                .iter()
                .zip(&self.initial_buffers)
                .filter(|(a, b)| a != b)
                .count()
    }
}
