//! Fixed-capacity, separately chained hash table over edge keys `(x, y)`.
//!
//! The table owns exactly two buffers, both sized at construction:
//!
//! ```text
//! heads: [u32; H]            first pool index of each slot's chain (NIL when empty)
//! pool:  [Entry; capacity]   chain nodes; unused ones form an intrusive free list
//! ```
//!
//! `H = max(1, ceil((n_max - 1) / alpha))` and `capacity = n_max - 1`, the
//! number of edges of a full trie on `n_max` nodes. Chains keep insertion
//! order and deletion splices, so every operation visits only the entries of
//! one slot.

use std::fmt;

use thiserror::Error;

use crate::alphabet::SymbolId;

/// Node index in `[0, n_max)`; `0` is the root.
pub type NodeId = u32;

pub const DEFAULT_LOAD_FACTOR: f64 = 0.75;

const NIL: u32 = u32::MAX;

/// Parent node and edge label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeKey {
    pub x: NodeId,
    pub y: SymbolId,
}

impl EdgeKey {
    pub const fn new(x: NodeId, y: SymbolId) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("edge key {0} out of range")]
    KeyOutOfRange(EdgeKey),
    #[error("edge key {0} already present")]
    DuplicateKey(EdgeKey),
    #[error("edge table full ({capacity} entries)")]
    TableFull { capacity: usize },
    #[error("edge value may not be the root")]
    ValueIsRoot,
    #[error("edge value {0} out of range")]
    ValueOutOfRange(NodeId),
    #[error("edge key {0} not found")]
    KeyNotFound(EdgeKey),
}

/// `(x * m + y) mod H`, widened so it is exact for any `u64` inputs.
pub fn coord_hash(x: u64, y: u64, m: u64, slot_count: u64) -> u64 {
    ((u128::from(x) * u128::from(m) + u128::from(y)) % u128::from(slot_count)) as u64
}

/// `max(1, ceil((n_max - 1) / alpha))`.
///
/// A quotient within a relative 1e-9 of an integer is taken as that integer,
/// so `9 / 0.75` gives 12 even if the division lands a few ulps high.
pub fn slot_count_for(n_max: usize, alpha: f64) -> Result<usize, TableError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(TableError::InvalidParameter(format!(
            "load factor must be a positive finite number, got {alpha}"
        )));
    }
    let edges = n_max.saturating_sub(1) as f64;
    let q = edges / alpha;
    let nearest = q.round();
    let slots = if (q - nearest).abs() <= 1e-9 * q.max(1.0) {
        nearest
    } else {
        q.ceil()
    };
    if slots >= NIL as f64 {
        return Err(TableError::InvalidParameter(format!(
            "{slots} slots exceed the supported table size"
        )));
    }
    Ok((slots as usize).max(1))
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    x: NodeId,
    y: SymbolId,
    value: NodeId,
    next: u32,
}

const VACANT: Entry = Entry {
    x: 0,
    y: 0,
    value: 0,
    next: NIL,
};

/// Size in bytes of one slot head.
pub const SLOT_BYTES: usize = std::mem::size_of::<u32>();
/// Size in bytes of one pooled chain entry.
pub const ENTRY_BYTES: usize = std::mem::size_of::<Entry>();

/// The global edge table of a coordinate hash trie.
#[derive(Clone, Debug)]
pub struct EdgeTable {
    n_max: usize,
    m: usize,
    alpha: f64,
    heads: Vec<u32>,
    pool: Vec<Entry>,
    free_head: u32,
    len: usize,
    // (address, capacity) of `heads` and `pool` right after construction.
    initial_buffers: [(usize, usize); 2],
}

impl EdgeTable {
    /// Table for a trie of at most `n_max` nodes over an alphabet of `m` symbols.
    pub fn new(n_max: usize, m: usize, alpha: f64) -> Result<Self, TableError> {
        Self::check_dims(n_max, m)?;
        let slots = slot_count_for(n_max, alpha)?;
        Self::build(n_max, m, alpha, slots, n_max - 1)
    }

    /// Analysis-mode table with an explicit slot count and room for all
    /// `n_max * m` keys, so the full key space can be inserted at once.
    /// Not a valid trie backing store.
    pub fn for_analysis(n_max: usize, m: usize, slot_count: usize) -> Result<Self, TableError> {
        Self::check_dims(n_max, m)?;
        if slot_count == 0 || slot_count >= NIL as usize {
            return Err(TableError::InvalidParameter(format!(
                "slot count {slot_count} out of range"
            )));
        }
        let keys = n_max
            .checked_mul(m)
            .filter(|&k| k < NIL as usize)
            .ok_or_else(|| {
                TableError::InvalidParameter(format!("key space {n_max} x {m} too large"))
            })?;
        let alpha = n_max.saturating_sub(1) as f64 / slot_count as f64;
        Self::build(n_max, m, alpha, slot_count, keys)
    }

    fn check_dims(n_max: usize, m: usize) -> Result<(), TableError> {
        if n_max == 0 || m == 0 {
            return Err(TableError::InvalidParameter(format!(
                "capacity and alphabet size must be positive (n_max = {n_max}, m = {m})"
            )));
        }
        // Node ids and symbols are u32; x * m + y then always fits in u64.
        if n_max > u32::MAX as usize || m > u32::MAX as usize {
            return Err(TableError::InvalidParameter(format!(
                "n_max = {n_max} and m = {m} must both fit in 32 bits"
            )));
        }
        Ok(())
    }

    fn build(
        n_max: usize,
        m: usize,
        alpha: f64,
        slots: usize,
        capacity: usize,
    ) -> Result<Self, TableError> {
        let heads = vec![NIL; slots];
        let mut pool = vec![VACANT; capacity];
        for (i, e) in pool.iter_mut().enumerate() {
            e.next = if i + 1 < capacity { (i + 1) as u32 } else { NIL };
        }
        let free_head = if capacity > 0 { 0 } else { NIL };
        let initial_buffers = [
            (heads.as_ptr() as usize, heads.capacity()),
            (pool.as_ptr() as usize, pool.capacity()),
        ];
        Ok(Self {
            n_max,
            m,
            alpha,
            heads,
            pool,
            free_head,
            len: 0,
            initial_buffers,
        })
    }

    /// Number of slots `H`.
    pub fn slot_count(&self) -> usize {
        self.heads.len()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn alphabet_size(&self) -> usize {
        self.m
    }

    pub fn load_factor(&self) -> f64 {
        self.alpha
    }

    /// Maximum number of entries the pool can hold.
    pub fn capacity(&self) -> usize {
        self.pool.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Slot index of `key`: `(x * m + y) mod H`.
    #[inline]
    pub fn slot_of(&self, key: EdgeKey) -> usize {
        let flat = u64::from(key.x) * self.m as u64 + u64::from(key.y);
        (flat % self.heads.len() as u64) as usize
    }

    fn check_key(&self, key: EdgeKey) -> Result<(), TableError> {
        if key.x as usize >= self.n_max || key.y as usize >= self.m {
            Err(TableError::KeyOutOfRange(key))
        } else {
            Ok(())
        }
    }

    /// Walks the chain of `key`'s slot. Returns `(previous, found)` pool
    /// indices and the number of entries visited; when the key is absent
    /// `previous` is the chain tail.
    #[inline]
    fn locate(&self, key: EdgeKey) -> (u32, u32, usize) {
        let mut prev = NIL;
        let mut cur = self.heads[self.slot_of(key)];
        let mut probes = 0;
        while cur != NIL {
            probes += 1;
            let e = &self.pool[cur as usize];
            if e.x == key.x && e.y == key.y {
                return (prev, cur, probes);
            }
            prev = cur;
            cur = e.next;
        }
        (prev, NIL, probes)
    }

    pub fn find(&self, key: EdgeKey) -> Result<Option<NodeId>, TableError> {
        self.find_probed(key).map(|(z, _)| z)
    }

    /// Like [`find`](Self::find), also returning the number of chain entries visited.
    pub fn find_probed(&self, key: EdgeKey) -> Result<(Option<NodeId>, usize), TableError> {
        self.check_key(key)?;
        let (_, found, probes) = self.locate(key);
        let z = (found != NIL).then(|| self.pool[found as usize].value);
        Ok((z, probes))
    }

    pub fn insert(&mut self, key: EdgeKey, value: NodeId) -> Result<(), TableError> {
        self.insert_probed(key, value).map(|_| ())
    }

    /// Appends `key -> value` to the tail of its slot's chain; returns entries visited.
    pub fn insert_probed(&mut self, key: EdgeKey, value: NodeId) -> Result<usize, TableError> {
        self.check_key(key)?;
        if value == 0 {
            return Err(TableError::ValueIsRoot);
        }
        if value as usize >= self.n_max {
            return Err(TableError::ValueOutOfRange(value));
        }
        let (tail, found, probes) = self.locate(key);
        if found != NIL {
            return Err(TableError::DuplicateKey(key));
        }
        let idx = self.free_head;
        if idx == NIL {
            return Err(TableError::TableFull {
                capacity: self.pool.len(),
            });
        }
        let e = &mut self.pool[idx as usize];
        self.free_head = e.next;
        *e = Entry {
            x: key.x,
            y: key.y,
            value,
            next: NIL,
        };
        if tail == NIL {
            let slot = self.slot_of(key);
            self.heads[slot] = idx;
        } else {
            self.pool[tail as usize].next = idx;
        }
        self.len += 1;
        Ok(probes)
    }

    /// Removes `key` and returns its value.
    pub fn remove(&mut self, key: EdgeKey) -> Result<NodeId, TableError> {
        self.remove_probed(key).map(|(z, _)| z)
    }

    pub fn remove_probed(&mut self, key: EdgeKey) -> Result<(NodeId, usize), TableError> {
        self.check_key(key)?;
        let (prev, found, probes) = self.locate(key);
        if found == NIL {
            return Err(TableError::KeyNotFound(key));
        }
        let Entry { value, next, .. } = self.pool[found as usize];
        if prev == NIL {
            let slot = self.slot_of(key);
            self.heads[slot] = next;
        } else {
            self.pool[prev as usize].next = next;
        }
        self.pool[found as usize] = Entry {
            next: self.free_head,
            ..VACANT
        };
        self.free_head = found;
        self.len -= 1;
        Ok((value, probes))
    }

    /// Entries of one slot in chain order.
    pub fn bucket(&self, slot: usize) -> impl Iterator<Item = (EdgeKey, NodeId)> + '_ {
        let mut cur = self.heads[slot];
        std::iter::from_fn(move || {
            if cur == NIL {
                return None;
            }
            let e = &self.pool[cur as usize];
            cur = e.next;
            Some((EdgeKey::new(e.x, e.y), e.value))
        })
    }

    /// All entries, slot by slot.
    pub fn iter(&self) -> impl Iterator<Item = (EdgeKey, NodeId)> + '_ {
        (0..self.slot_count()).flat_map(move |s| self.bucket(s))
    }

    /// Number of entries in each slot.
    pub fn bucket_occupancies(&self) -> Vec<usize> {
        (0..self.slot_count())
            .map(|s| self.bucket(s).count())
            .collect()
    }

    pub fn occupancy(&self, slot: usize) -> usize {
        self.bucket(slot).count()
    }

    /// Analytic size: `H * SLOT_BYTES + capacity * ENTRY_BYTES`.
    pub fn footprint_bytes(&self) -> usize {
        Self::footprint_for(self.slot_count(), self.capacity())
    }

    pub fn footprint_for(slot_count: usize, capacity: usize) -> usize {
        slot_count * SLOT_BYTES + capacity * ENTRY_BYTES
    }

    /// Bytes actually reserved by the two buffers.
    pub fn allocated_bytes(&self) -> usize {
        self.heads.capacity() * SLOT_BYTES + self.pool.capacity() * ENTRY_BYTES
    }

    /// Number of buffers whose address or capacity differs from construction time.
    pub fn growth_events(&self) -> usize {
        let now = [
            (self.heads.as_ptr() as usize, self.heads.capacity()),
            (self.pool.as_ptr() as usize, self.pool.capacity()),
        ];
        now.iter()
            .zip(&self.initial_buffers)
            .filter(|(a, b)| a != b)
            .count()
    }
}
