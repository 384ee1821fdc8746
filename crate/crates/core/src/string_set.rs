//! String dictionary over a [`Trie`]: membership, insertion, deletion with
//! leaf pruning, and ordered prefix enumeration.

use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError, Symbol, SymbolId};
use crate::trie::{NodeId, Trie, TrieError, ROOT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetError {
    #[error("symbol {0} is not in the alphabet")]
    UnknownSymbol(Symbol),
    #[error("word needs {needed} new nodes but only {available} remain")]
    CapacityExhausted { needed: usize, available: usize },
    #[error(transparent)]
    Trie(#[from] TrieError),
}

impl From<AlphabetError> for SetError {
    fn from(e: AlphabetError) -> Self {
        match e {
            AlphabetError::UnknownSymbol(s) => SetError::UnknownSymbol(s),
            other => unreachable!("encoding only fails on unknown symbols: {other}"),
        }
    }
}

/// Set of strings stored in a coordinate hash trie.
///
/// Every leaf of the underlying trie is terminal: removal prunes the
/// branch that only the removed word used.
#[derive(Clone, Debug)]
pub struct StringSet {
    trie: Trie,
    alphabet: Alphabet,
    members: usize,
}

impl StringSet {
    pub fn new(alphabet: Alphabet, n_max: usize, alpha: f64) -> Result<Self, SetError> {
        let trie = Trie::new(n_max, alphabet.size(), alpha)?;
        Ok(Self {
            trie,
            alphabet,
            members: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn node_count(&self) -> usize {
        self.trie.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.trie.edge_count()
    }

    pub fn trie(&self) -> &Trie {
        &self.trie
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Node reached by walking `word` from the root, or `None` when the path breaks.
    fn locate(&self, word: &str) -> Result<Option<NodeId>, SetError> {
        let mut x = ROOT;
        for y in self.alphabet.encode_word(word) {
            match self.trie.walk(x, y?)? {
                Some(z) => x = z,
                None => return Ok(None),
            }
        }
        Ok(Some(x))
    }

    /// Membership test. Words with symbols outside the alphabet are never members.
    pub fn contains(&self, word: &str) -> bool {
        match self.locate(word) {
            Ok(Some(x)) => self.trie.is_terminal(x).unwrap_or(false),
            _ => false,
        }
    }

    /// Adds `word`; returns `true` if it was not already a member.
    ///
    /// Either the whole path is created or nothing changes: the number of
    /// missing nodes is checked against the remaining capacity first.
    pub fn insert(&mut self, word: &str) -> Result<bool, SetError> {
        let mut x = ROOT;
        let mut missing = 0usize;
        for y in self.alphabet.encode_word(word) {
            let y = y?;
            if missing == 0 {
                match self.trie.walk(x, y)? {
                    Some(z) => x = z,
                    None => missing = 1,
                }
            } else {
                missing += 1;
            }
        }
        let available = self.trie.n_max() - self.trie.node_count();
        if missing > available {
            return Err(SetError::CapacityExhausted {
                needed: missing,
                available,
            });
        }

        let mut x = ROOT;
        for y in self.alphabet.encode_word(word) {
            let y = y?;
            x = match self.trie.walk(x, y)? {
                Some(z) => z,
                None => self.trie.insert_child(x, y)?,
            };
        }
        let added = !self.trie.is_terminal(x)?;
        if added {
            self.trie.set_terminal(x, true)?;
            self.members += 1;
        }
        Ok(added)
    }

    /// Removes `word` and prunes every node on its path that is left as a
    /// non-terminal leaf. Returns `false` (and changes nothing) if absent.
    ///
    /// Each pruning step pays an `O(m)` leaf check.
    pub fn remove(&mut self, word: &str) -> bool {
        let Ok(symbols) = self.alphabet.encode_word_vec(word) else {
            return false;
        };
        let mut path = Vec::with_capacity(symbols.len() + 1);
        path.push(ROOT);
        for &y in &symbols {
            match self.trie.walk(*path.last().unwrap(), y) {
                Ok(Some(z)) => path.push(z),
                _ => return false,
            }
        }
        let last = *path.last().unwrap();
        if !self.trie.is_terminal(last).unwrap_or(false) {
            return false;
        }
        self.trie
            .set_terminal(last, false)
            .expect("path nodes are live");
        self.members -= 1;

        for (i, &y) in symbols.iter().enumerate().rev() {
            let node = path[i + 1];
            let prunable = !self.trie.is_terminal(node).expect("live")
                && self.trie.is_leaf(node).expect("live");
            if !prunable {
                break;
            }
            self.trie
                .delete_leaf_child(path[i], y)
                .expect("edge on walked path");
        }
        true
    }

    /// Members starting with `prefix`, in ascending symbol-id order.
    ///
    /// Depth-first with an explicit stack, so deep chains cannot overflow the
    /// call stack. Prefixes with unknown symbols match nothing.
    pub fn enumerate(&self, prefix: &str) -> Vec<String> {
        let Ok(mut label) = self.alphabet.encode_word_vec(prefix) else {
            return Vec::new();
        };
        let Ok(Some(start)) = self.locate(prefix) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut stack: Vec<(NodeId, usize, Option<SymbolId>)> = vec![(start, label.len(), None)];
        while let Some((x, depth, symbol)) = stack.pop() {
            label.truncate(depth);
            if let Some(y) = symbol {
                label.push(y);
            }
            if self.trie.is_terminal(x).expect("reachable nodes are live") {
                out.push(self.alphabet.decode_word(&label).expect("ids come from the alphabet"));
            }
            let children = self.trie.children(x).expect("reachable nodes are live");
            for &(y, z) in children.iter().rev() {
                stack.push((z, label.len(), Some(y)));
            }
        }
        out
    }

    /// All members in ascending order.
    pub fn members(&self) -> Vec<String> {
        self.enumerate("")
    }
}

/// Nodes a trie needs to hold `words` (root included): one plus the number of
/// distinct nonempty prefixes.
pub fn required_nodes<'a, I>(alphabet: &Alphabet, words: I) -> Result<usize, SetError>
where
    I: IntoIterator<Item = &'a str>,
{
    let encoded = words
        .into_iter()
        .map(|w| alphabet.encode_word_vec(w))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(required_nodes_encoded(&encoded))
}

/// [`required_nodes`] for words already encoded as symbol ids.
pub fn required_nodes_encoded(words: &[Vec<SymbolId>]) -> usize {
    let mut sorted: Vec<&[SymbolId]> = words.iter().map(Vec::as_slice).collect();
    sorted.sort_unstable();
    sorted.dedup();
    let mut total = 1;
    let mut prev: &[SymbolId] = &[];
    for w in sorted {
        let shared = prev.iter().zip(w).take_while(|(a, b)| a == b).count();
        total += w.len() - shared;
        prev = w;
    }
    total
}
