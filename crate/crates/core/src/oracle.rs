//! Direct-mapped trie: a dense `n_max x m` matrix where `A[x][y] = z` records
//! the edge `x --y--> z` and `0` means "no edge" (nothing points at the root).
//!
//! Used as ground truth in differential tests and as the space baseline in
//! benchmarks. Same operations, same error taxonomy and the same id
//! allocation policy as [`Trie`](crate::Trie).

use crate::alphabet::SymbolId;
use crate::flags::FlagSet;
use crate::trie::{Footprint, NodeId, TrieError, ROOT};

#[derive(Clone, Debug)]
pub struct DirectTrie {
    n_max: usize,
    m: usize,
    table: Vec<NodeId>,
    live: FlagSet,
    terminal: FlagSet,
    free: Vec<NodeId>,
    next_fresh: NodeId,
    nodes: usize,
}

impl DirectTrie {
    pub fn new(n_max: usize, m: usize) -> Result<Self, TrieError> {
        if n_max == 0 || m == 0 || n_max > u32::MAX as usize || m > u32::MAX as usize {
            return Err(TrieError::InvalidParameter(format!(
                "n_max = {n_max} and m = {m} must be positive 32-bit values"
            )));
        }
        let cells = n_max.checked_mul(m).ok_or_else(|| {
            TrieError::InvalidParameter(format!("{n_max} x {m} matrix too large"))
        })?;
        let mut live = FlagSet::new(n_max);
        live.set(ROOT as usize, true);
        Ok(Self {
            n_max,
            m,
            table: vec![0; cells],
            live,
            terminal: FlagSet::new(n_max),
            free: Vec::with_capacity(n_max - 1),
            next_fresh: 1,
            nodes: 1,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn alphabet_size(&self) -> usize {
        self.m
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.nodes - 1
    }

    pub fn is_live(&self, x: NodeId) -> bool {
        self.live.get(x as usize)
    }

    fn cell(&self, x: NodeId, y: SymbolId) -> Result<usize, TrieError> {
        if !self.is_live(x) {
            return Err(TrieError::DeadNode(x));
        }
        if y as usize >= self.m {
            return Err(TrieError::SymbolOutOfRange(y));
        }
        Ok(x as usize * self.m + y as usize)
    }

    pub fn walk(&self, x: NodeId, y: SymbolId) -> Result<Option<NodeId>, TrieError> {
        let c = self.cell(x, y)?;
        Ok(Some(self.table[c]).filter(|&z| z != 0))
    }

    pub fn insert_child(&mut self, x: NodeId, y: SymbolId) -> Result<NodeId, TrieError> {
        let c = self.cell(x, y)?;
        if self.table[c] != 0 {
            return Err(TrieError::EdgeExists { x, y });
        }
        if self.nodes == self.n_max {
            return Err(TrieError::CapacityExhausted { n_max: self.n_max });
        }
        let z = self.free.pop().unwrap_or_else(|| {
            self.next_fresh += 1;
            self.next_fresh - 1
        });
        self.table[c] = z;
        self.live.set(z as usize, true);
        self.nodes += 1;
        Ok(z)
    }

    pub fn delete_leaf_child(&mut self, x: NodeId, y: SymbolId) -> Result<(), TrieError> {
        let c = self.cell(x, y)?;
        let z = self.table[c];
        if z == 0 {
            return Err(TrieError::NoSuchEdge { x, y });
        }
        if !self.is_leaf(z)? {
            return Err(TrieError::ChildNotLeaf(z));
        }
        self.table[c] = 0;
        self.live.set(z as usize, false);
        self.terminal.set(z as usize, false);
        self.free.push(z);
        self.nodes -= 1;
        Ok(())
    }

    fn row(&self, x: NodeId) -> Result<&[NodeId], TrieError> {
        if !self.is_live(x) {
            return Err(TrieError::DeadNode(x));
        }
        let start = x as usize * self.m;
        Ok(&self.table[start..start + self.m])
    }

    pub fn is_leaf(&self, x: NodeId) -> Result<bool, TrieError> {
        Ok(self.row(x)?.iter().all(|&z| z == 0))
    }

    pub fn set_terminal(&mut self, x: NodeId, flag: bool) -> Result<(), TrieError> {
        self.row(x)?;
        self.terminal.set(x as usize, flag);
        Ok(())
    }

    pub fn is_terminal(&self, x: NodeId) -> Result<bool, TrieError> {
        self.row(x)?;
        Ok(self.terminal.get(x as usize))
    }

    pub fn children(&self, x: NodeId) -> Result<Vec<(SymbolId, NodeId)>, TrieError> {
        Ok(self
            .row(x)?
            .iter()
            .enumerate()
            .filter(|(_, &z)| z != 0)
            .map(|(y, &z)| (y as SymbolId, z))
            .collect())
    }

    pub fn footprint(&self) -> Footprint {
        Footprint::direct_trie(self.n_max, self.m)
    }
}
