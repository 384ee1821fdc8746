//! Randomized harnesses shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use coordtrie::{Alphabet, DirectTrie, NodeId, SetError, StringSet, SymbolId, Trie, TrieError, ROOT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub enum TrieOp {
    Walk(NodeId, SymbolId),
    InsertChild(NodeId, SymbolId),
    DeleteLeafChild(NodeId, SymbolId),
    SetTerminal(NodeId, bool),
    IsTerminal(NodeId),
    IsLeaf(NodeId),
    Children(NodeId),
}

/// Trie-id to oracle-id relabeling. Allocation policies match, so this stays
/// the identity, but comparisons never rely on that.
struct Relabel {
    fwd: HashMap<NodeId, NodeId>,
}

impl Relabel {
    fn new() -> Self {
        Self {
            fwd: HashMap::from([(ROOT, ROOT)]),
        }
    }

    fn map(&self, x: NodeId) -> NodeId {
        // unmapped ids are dead on the trie side and passed through unchanged
        self.fwd.get(&x).copied().unwrap_or(x)
    }

    fn err(&self, e: TrieError) -> TrieError {
        match e {
            TrieError::DeadNode(x) => TrieError::DeadNode(self.map(x)),
            TrieError::ChildNotLeaf(z) => TrieError::ChildNotLeaf(self.map(z)),
            other => other,
        }
    }

    fn res<T>(&self, r: Result<T, TrieError>, f: impl FnOnce(T) -> T) -> Result<T, TrieError> {
        r.map(f).map_err(|e| self.err(e))
    }
}

fn pick_op(rng: &mut ChaCha8Rng, trie: &Trie) -> TrieOp {
    let n_max = trie.n_max() as NodeId;
    let m = trie.alphabet_size() as SymbolId;
    let live: Vec<NodeId> = trie.live_nodes().collect();
    let node = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.9) {
            live[rng.random_range(0..live.len())]
        } else {
            rng.random_range(0..n_max + 2)
        }
    };
    let symbol = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.97) {
            rng.random_range(0..m)
        } else {
            m
        }
    };
    match rng.random_range(0..100) {
        0..=34 => {
            let x = node(rng);
            TrieOp::InsertChild(x, symbol(rng))
        }
        35..=59 => {
            let x = node(rng);
            // prefer existing edges so deletion actually happens
            let existing = if trie.is_live(x) { trie.children(x).unwrap() } else { Vec::new() };
            let y = if !existing.is_empty() && rng.random_bool(0.8) {
                existing[rng.random_range(0..existing.len())].0
            } else {
                symbol(rng)
            };
            TrieOp::DeleteLeafChild(x, y)
        }
        60..=79 => {
            let x = node(rng);
            TrieOp::Walk(x, symbol(rng))
        }
        80..=89 => {
            let x = node(rng);
            TrieOp::SetTerminal(x, rng.random_bool(0.6))
        }
        90..=93 => TrieOp::IsTerminal(node(rng)),
        94..=96 => TrieOp::IsLeaf(node(rng)),
        _ => TrieOp::Children(node(rng)),
    }
}

/// Outcome of one differential run.
#[derive(Debug, Default)]
pub struct DiffStats {
    pub ops: usize,
    pub errors: usize,
    pub inserts: usize,
    pub deletes: usize,
    pub max_nodes: usize,
}

/// Drives a [`Trie`] and a [`DirectTrie`] with the same `ops` random
/// operations and returns the first divergence, if any.
pub fn differential_run(n_max: usize, m: usize, ops: usize, seed: u64) -> Result<DiffStats, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trie = Trie::new(n_max, m, 0.75).map_err(|e| e.to_string())?;
    let mut oracle = DirectTrie::new(n_max, m).map_err(|e| e.to_string())?;
    let mut ids = Relabel::new();
    let mut stats = DiffStats::default();

    for step in 0..ops {
        let op = pick_op(&mut rng, &trie);
        let fail = |what: String| format!("seed {seed} step {step} {op:?}: {what}");
        let agree = match op.clone() {
            TrieOp::Walk(x, y) => {
                let t = ids.res(trie.walk(x, y), |z| z.map(|z| ids.map(z)));
                let o = oracle.walk(ids.map(x), y);
                (t == o).then_some(t.is_err()).ok_or_else(|| format!("{t:?} vs {o:?}"))
            }
            TrieOp::InsertChild(x, y) => {
                let t = trie.insert_child(x, y);
                let o = oracle.insert_child(ids.map(x), y);
                match (t, o) {
                    (Ok(zt), Ok(zo)) => {
                        if ids.fwd.values().any(|&v| v == zo) {
                            Err(format!("oracle reused live id {zo}"))
                        } else {
                            ids.fwd.insert(zt, zo);
                            stats.inserts += 1;
                            Ok(false)
                        }
                    }
                    (Err(et), Err(eo)) if ids.err(et.clone()) == eo => Ok(true),
                    (t, o) => Err(format!("{t:?} vs {o:?}")),
                }
            }
            TrieOp::DeleteLeafChild(x, y) => {
                let child = trie.walk(x, y).ok().flatten();
                let t = ids.res(trie.delete_leaf_child(x, y), |u| u);
                let o = oracle.delete_leaf_child(ids.map(x), y);
                if t == o {
                    if t.is_ok() {
                        ids.fwd.remove(&child.expect("deleted edge existed"));
                        stats.deletes += 1;
                    }
                    Ok(t.is_err())
                } else {
                    Err(format!("{t:?} vs {o:?}"))
                }
            }
            TrieOp::SetTerminal(x, flag) => {
                let t = ids.res(trie.set_terminal(x, flag), |u| u);
                let o = oracle.set_terminal(ids.map(x), flag);
                (t == o).then_some(t.is_err()).ok_or_else(|| format!("{t:?} vs {o:?}"))
            }
            TrieOp::IsTerminal(x) => {
                let t = ids.res(trie.is_terminal(x), |b| b);
                let o = oracle.is_terminal(ids.map(x));
                (t == o).then_some(t.is_err()).ok_or_else(|| format!("{t:?} vs {o:?}"))
            }
            TrieOp::IsLeaf(x) => {
                let t = ids.res(trie.is_leaf(x), |b| b);
                let o = oracle.is_leaf(ids.map(x));
                (t == o).then_some(t.is_err()).ok_or_else(|| format!("{t:?} vs {o:?}"))
            }
            TrieOp::Children(x) => {
                let t = ids.res(trie.children(x), |c| {
                    c.into_iter().map(|(y, z)| (y, ids.map(z))).collect()
                });
                let o = oracle.children(ids.map(x));
                (t == o).then_some(t.is_err()).ok_or_else(|| format!("{t:?} vs {o:?}"))
            }
        };
        match agree {
            Ok(was_error) => stats.errors += usize::from(was_error),
            Err(what) => return Err(fail(what)),
        }

        if (trie.node_count(), trie.edge_count()) != (oracle.node_count(), oracle.edge_count()) {
            return Err(fail(format!(
                "counts ({}, {}) vs ({}, {})",
                trie.node_count(),
                trie.edge_count(),
                oracle.node_count(),
                oracle.edge_count()
            )));
        }
        if trie.edge_count() + 1 != trie.node_count() {
            return Err(fail("tree invariant broken".into()));
        }
        stats.max_nodes = stats.max_nodes.max(trie.node_count());
        if step % 512 == 0 || step + 1 == ops {
            check_structure(&trie, &oracle, &ids).map_err(fail)?;
        }
        stats.ops += 1;
    }
    Ok(stats)
}

fn check_structure(trie: &Trie, oracle: &DirectTrie, ids: &Relabel) -> Result<(), String> {
    let live: Vec<NodeId> = trie.live_nodes().collect();
    if live.len() != trie.node_count() || ids.fwd.len() != live.len() {
        return Err("live set out of sync".into());
    }
    let mut has_parent = BTreeSet::new();
    for &x in &live {
        if x as usize >= trie.n_max() {
            return Err(format!("node id {x} out of range"));
        }
        let o = ids.map(x);
        if !oracle.is_live(o) {
            return Err(format!("{x} live on trie but {o} dead on oracle"));
        }
        let tc: Vec<_> = trie
            .children(x)
            .unwrap()
            .into_iter()
            .map(|(y, z)| (y, ids.map(z)))
            .collect();
        if tc != oracle.children(o).unwrap() {
            return Err(format!("children of {x} differ"));
        }
        if trie.is_terminal(x).unwrap() != oracle.is_terminal(o).unwrap() {
            return Err(format!("terminal flag of {x} differs"));
        }
        for (_, z) in trie.children(x).unwrap() {
            if !trie.is_live(z) || !has_parent.insert(z) {
                return Err(format!("edge value {z} dead or shared"));
            }
        }
    }
    if has_parent.len() + 1 != live.len() || has_parent.contains(&ROOT) {
        return Err("not every non-root node has exactly one parent".into());
    }
    Ok(())
}

/// Reference model for [`StringSet`]: the member set plus, for every nonempty
/// prefix, how many members extend it.
pub struct SetModel {
    pub members: BTreeSet<String>,
    prefixes: HashMap<String, usize>,
}

impl SetModel {
    pub fn new() -> Self {
        Self {
            members: BTreeSet::new(),
            prefixes: HashMap::new(),
        }
    }

    fn nonempty_prefixes(w: &str) -> impl Iterator<Item = &str> {
        w.char_indices().map(|(i, c)| &w[..i + c.len_utf8()])
    }

    /// Nodes the trie must hold for the current members.
    pub fn nodes(&self) -> usize {
        1 + self.prefixes.len()
    }

    pub fn missing_nodes(&self, w: &str) -> usize {
        Self::nonempty_prefixes(w)
            .filter(|p| !self.prefixes.contains_key(*p))
            .count()
    }

    pub fn insert(&mut self, w: &str) -> bool {
        if !self.members.insert(w.to_string()) {
            return false;
        }
        for p in Self::nonempty_prefixes(w) {
            *self.prefixes.entry(p.to_string()).or_default() += 1;
        }
        true
    }

    pub fn remove(&mut self, w: &str) -> bool {
        if !self.members.remove(w) {
            return false;
        }
        for p in Self::nonempty_prefixes(w) {
            let c = self.prefixes.get_mut(p).unwrap();
            *c -= 1;
            if *c == 0 {
                self.prefixes.remove(p);
            }
        }
        true
    }

    pub fn with_prefix(&self, prefix: &str) -> Vec<String> {
        self.members
            .range(prefix.to_string()..)
            .take_while(|w| w.starts_with(prefix))
            .cloned()
            .collect()
    }
}

#[derive(Debug, Default)]
pub struct SetStats {
    pub ops: usize,
    pub removes: usize,
    pub capacity_rejections: usize,
    pub max_members: usize,
}

fn random_word(rng: &mut ChaCha8Rng, symbols: &[char], max_len: usize) -> String {
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| {
            if rng.random_bool(0.01) {
                'z' // outside every test alphabet
            } else {
                symbols[rng.random_range(0..symbols.len())]
            }
        })
        .collect()
}

/// Every leaf other than an empty root is terminal.
pub fn leaves_are_terminal(set: &StringSet) -> bool {
    let t = set.trie();
    t.live_nodes()
        .filter(|&x| x != ROOT)
        .all(|x| !t.is_leaf(x).unwrap() || t.is_terminal(x).unwrap())
}

/// Drives a [`StringSet`] and a [`SetModel`] with the same random operations.
pub fn set_model_run(m: usize, n_max: usize, ops: usize, seed: u64) -> Result<SetStats, String> {
    let symbols: Vec<char> = ('a'..).take(m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = StringSet::new(Alphabet::explicit(symbols.iter().copied()).unwrap(), n_max, 0.75)
        .map_err(|e| e.to_string())?;
    let mut model = SetModel::new();
    let mut stats = SetStats::default();
    // bias removals toward present words
    let mut recent: Vec<String> = Vec::new();

    for step in 0..ops {
        let fail = |what: String| format!("seed {seed} step {step}: {what}");
        let roll = rng.random_range(0..100);
        if roll < 40 {
            let w = random_word(&mut rng, &symbols, 6);
            let got = set.insert(&w);
            let expect = if w.contains('z') {
                Err(SetError::UnknownSymbol(coordtrie::Symbol::Char('z')))
            } else if model.members.contains(&w) {
                Ok(false)
            } else {
                let needed = model.missing_nodes(&w);
                let available = n_max - model.nodes();
                if needed > available {
                    Err(SetError::CapacityExhausted { needed, available })
                } else {
                    Ok(true)
                }
            };
            if got != expect {
                return Err(fail(format!("insert {w:?}: {got:?} vs {expect:?}")));
            }
            match got {
                Ok(true) => {
                    model.insert(&w);
                    recent.push(w);
                }
                Err(SetError::CapacityExhausted { .. }) => stats.capacity_rejections += 1,
                _ => {}
            }
        } else if roll < 70 {
            let w = if !recent.is_empty() && rng.random_bool(0.8) {
                recent.swap_remove(rng.random_range(0..recent.len()))
            } else {
                random_word(&mut rng, &symbols, 6)
            };
            let got = set.remove(&w);
            let expect = model.remove(&w);
            if got != expect {
                return Err(fail(format!("remove {w:?}: {got} vs {expect}")));
            }
            stats.removes += 1;
            if !leaves_are_terminal(&set) {
                return Err(fail(format!("non-terminal leaf after removing {w:?}")));
            }
        } else if roll < 92 {
            let w = random_word(&mut rng, &symbols, 6);
            let (got, expect) = (set.contains(&w), model.members.contains(&w));
            if got != expect {
                return Err(fail(format!("contains {w:?}: {got} vs {expect}")));
            }
        } else {
            let prefix = random_word(&mut rng, &symbols, 2);
            let (got, expect) = (set.enumerate(&prefix), model.with_prefix(&prefix));
            if got != expect {
                return Err(fail(format!("enumerate {prefix:?}: {got:?} vs {expect:?}")));
            }
        }
        if set.len() != model.members.len()
            || set.node_count() != model.nodes()
            || set.trie().terminal_count() != set.len()
        {
            return Err(fail(format!(
                "counts: members {} vs {}, nodes {} vs {}",
                set.len(),
                model.members.len(),
                set.node_count(),
                model.nodes()
            )));
        }
        stats.max_members = stats.max_members.max(set.len());
        stats.ops += 1;
    }
    Ok(stats)
}
