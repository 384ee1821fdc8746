//! Workload driver measuring probe counts and exact byte accounting.
//!
//! Cost is measured in edge-table entries visited per walk rather than wall
//! time; byte totals come from [`Footprint`], i.e. from the structure
//! parameters, not from process RSS.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::alphabet::{Alphabet, SymbolId};
use crate::analyzer;
use crate::edge_table::{EdgeKey, DEFAULT_LOAD_FACTOR};
use crate::string_set::required_nodes_encoded as required_nodes;
use crate::trie::{Footprint, NodeId, Trie, TrieError, ROOT};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("workload needs {required} nodes but capacity is {n_max}")]
    CapacityExhausted { required: usize, n_max: usize },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Trie(#[from] TrieError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Workload {
    /// UTF-8 word file, bytes alphabet (`m = 256`).
    Wordlist(PathBuf),
    /// `strings` words of `length` symbols drawn uniformly from `[0, m)`.
    UniformRandom { strings: usize, length: usize },
    /// Same-slot edge families from [`adversarial_workload`].
    Adversarial,
}

impl Workload {
    fn name(&self) -> &'static str {
        match self {
            Workload::Wordlist(_) => "wordlist",
            Workload::UniformRandom { .. } => "uniform",
            Workload::Adversarial => "adversarial",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub workload: Workload,
    /// Node capacity. `None` sizes the trie to exactly what the workload needs
    /// (not allowed for the adversarial workload).
    pub n_max: Option<usize>,
    /// Alphabet size; ignored for wordlists, which always use 256.
    pub m: usize,
    pub alpha: f64,
    pub seed: u64,
    pub trials: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            workload: Workload::UniformRandom {
                strings: 1000,
                length: 8,
            },
            n_max: None,
            m: 26,
            alpha: DEFAULT_LOAD_FACTOR,
            seed: 0,
            trials: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchResult {
    pub schema_version: u32,
    pub workload: String,
    pub trial: usize,
    pub seed: u64,
    pub n_max: usize,
    pub m: usize,
    pub alpha: f64,
    #[serde(rename = "H")]
    pub slot_count: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub member_count: usize,
    pub hit_queries: usize,
    pub miss_queries: usize,
    pub walks: u64,
    pub mean_probes_per_walk: f64,
    pub max_probes_per_walk: usize,
    pub max_occupancy: usize,
    pub theorem2_bound: u64,
    pub bytes_total: usize,
    pub bytes_per_node: f64,
    pub oracle_bytes_total: usize,
    pub growth_events: usize,
    pub build_time_ns: u64,
    pub query_time_ns: u64,
}

impl BenchResult {
    /// JSON object with sorted keys and no whitespace.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("plain data serializes");
        serde_json::to_string(&value).expect("plain data serializes")
    }
}

/// Reads a wordlist: UTF-8, one word per line, blank lines skipped,
/// duplicates dropped (first occurrence kept).
pub fn load_wordlist(path: impl AsRef<Path>) -> Result<Vec<String>, BenchError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_wordlist(&text))
}

pub fn parse_wordlist(text: &str) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    text.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.is_empty())
        .filter(|l| seen.insert(*l))
        .map(str::to_string)
        .collect()
}

/// The deterministic random words used by the uniform workload.
pub fn uniform_words(strings: usize, length: usize, m: usize, seed: u64) -> Vec<Vec<SymbolId>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..strings)
        .map(|_| (0..length).map(|_| rng.random_range(0..m as SymbolId)).collect())
        .collect()
}

/// Largest `strings` for which the uniform workload fits in `n_max` nodes.
///
/// Words are generated from one sequential stream, so the first `k` words do
/// not depend on how many are requested.
pub fn uniform_fill_count(n_max: usize, length: usize, m: usize, seed: u64) -> Result<usize, BenchError> {
    if length == 0 {
        return Err(BenchError::Config("word length must be positive".into()));
    }
    let full_tree = (0..=length as u32)
        .try_fold(0usize, |acc, i| m.checked_pow(i).and_then(|p| acc.checked_add(p)));
    if full_tree.is_some_and(|nodes| nodes <= n_max) {
        return Err(BenchError::Config(format!(
            "every word of length {length} over {m} symbols fits in {n_max} nodes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = Trie::new(n_max, m, 1.0)?;
    let mut word = vec![0; length];
    let mut count = 0;
    loop {
        for s in word.iter_mut() {
            *s = rng.random_range(0..m as SymbolId);
        }
        if !insert_path(&mut probe, &word)? {
            return Ok(count);
        }
        count += 1;
    }
}

/// Inserts `word` unless it would exceed capacity; returns whether it fit.
fn insert_path(t: &mut Trie, word: &[SymbolId]) -> Result<bool, TrieError> {
    let mut x = ROOT;
    let mut depth = 0;
    while depth < word.len() {
        match t.walk(x, word[depth])? {
            Some(z) => x = z,
            None => break,
        }
        depth += 1;
    }
    if word.len() - depth > t.n_max() - t.node_count() {
        return Ok(false);
    }
    for &y in &word[depth..] {
        x = t.insert_child(x, y)?;
    }
    t.set_terminal(x, true)?;
    Ok(true)
}

/// Same-slot insertion plan; `inserts[i]` creates node `i + 1` on a fresh trie.
#[derive(Clone, Debug, PartialEq)]
pub struct AdversarialPlan {
    pub slot: usize,
    pub slot_count: usize,
    /// Every edge to insert, in order: class keys and the filler edges that
    /// bring their parents into existence.
    pub inserts: Vec<EdgeKey>,
    /// Inserted keys that all hash to `slot`.
    pub class_keys: Vec<EdgeKey>,
    /// Absent keys with live parents, hashing to `slot` where possible.
    pub miss_keys: Vec<EdgeKey>,
}

const ADVERSARIAL_SLOT_CANDIDATES: usize = 64;

/// Builds a plan that packs as many live edges into one slot as the tree
/// shape allows.
///
/// A slot's keys are the flat values `s, s + H, s + 2H, ...`, i.e. one
/// GCD-coordinate congruence class. Node ids are handed out sequentially, so
/// a class key `(x, y)` can only be inserted once node `x` exists; when no
/// class key is ready, a filler edge outside the slot creates the next node.
/// The best of the first few slots is chosen.
pub fn adversarial_workload(n_max: usize, m: usize, slot_count: usize) -> Result<AdversarialPlan, BenchError> {
    if n_max == 0 || m == 0 || slot_count == 0 {
        return Err(BenchError::Config(format!(
            "adversarial workload needs positive n_max, m and H (got {n_max}, {m}, {slot_count})"
        )));
    }
    if n_max.checked_mul(m).is_none_or(|k| k > u32::MAX as usize) {
        return Err(BenchError::Config(format!("key space {n_max} x {m} too large")));
    }
    (0..slot_count.min(ADVERSARIAL_SLOT_CANDIDATES))
        .map(|s| plan_for_slot(n_max, m, slot_count, s))
        .max_by(|a, b| {
            a.class_keys
                .len()
                .cmp(&b.class_keys.len())
                .then(b.slot.cmp(&a.slot))
        })
        .ok_or_else(|| BenchError::Config("no slots".into()))
}

fn plan_for_slot(n_max: usize, m: usize, slot_count: usize, slot: usize) -> AdversarialPlan {
    let keys = n_max * m;
    let key_of = |flat: usize| EdgeKey::new((flat / m) as NodeId, (flat % m) as SymbolId);
    let class: Vec<usize> = (slot..keys).step_by(slot_count).collect();
    let mut next_class = 0;
    let mut filler = 0usize;
    let mut inserts = Vec::with_capacity(n_max.saturating_sub(1));
    let mut class_keys = Vec::new();
    let mut next_node = 1;
    while next_node < n_max {
        if next_class < class.len() && class[next_class] / m < next_node {
            let k = key_of(class[next_class]);
            next_class += 1;
            inserts.push(k);
            class_keys.push(k);
        } else {
            while filler < keys && filler % slot_count == slot {
                filler += 1;
            }
            if filler >= keys || filler / m >= next_node {
                break;
            }
            inserts.push(key_of(filler));
            filler += 1;
        }
        next_node += 1;
    }

    let live = next_node;
    let mut miss_keys: Vec<EdgeKey> = class[next_class..]
        .iter()
        .filter(|&&f| f / m < live)
        .take(class_keys.len())
        .map(|&f| key_of(f))
        .collect();
    if miss_keys.len() < class_keys.len() {
        // top up with absent keys of the live nodes, lowest flat value first
        let mut used: Vec<bool> = vec![false; live * m];
        for k in inserts.iter().chain(&miss_keys) {
            used[k.x as usize * m + k.y as usize] = true;
        }
        let extra = (0..live * m)
            .filter(|&f| !used[f])
            .take(class_keys.len() - miss_keys.len())
            .map(key_of)
            .collect::<Vec<_>>();
        miss_keys.extend(extra);
    }
    AdversarialPlan {
        slot,
        slot_count,
        inserts,
        class_keys,
        miss_keys,
    }
}

#[derive(Default)]
struct ProbeStats {
    walks: u64,
    total: u64,
    max: usize,
}

impl ProbeStats {
    fn record(&mut self, probes: usize) {
        self.walks += 1;
        self.total += probes as u64;
        self.max = self.max.max(probes);
    }

    fn mean(&self) -> f64 {
        if self.walks == 0 {
            0.0
        } else {
            self.total as f64 / self.walks as f64
        }
    }
}

/// Walks `word` from the root until it leaves the trie, recording probes.
fn probe_word(t: &Trie, word: &[SymbolId], stats: &mut ProbeStats) -> Result<(), TrieError> {
    let mut x = ROOT;
    for &y in word {
        let (z, probes) = t.walk_probed(x, y)?;
        stats.record(probes);
        match z {
            Some(z) => x = z,
            None => break,
        }
    }
    Ok(())
}

/// Runs every trial of `c`. Trials run on separate threads; results come back
/// in trial order.
pub fn run_bench(c: &BenchConfig) -> Result<Vec<BenchResult>, BenchError> {
    if c.trials == 0 {
        return Err(BenchError::Config("trials must be at least 1".into()));
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..c.trials)
            .map(|trial| scope.spawn(move || run_trial(c, trial)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bench trial panicked"))
            .collect()
    })
}

/// One trial; trial `i` uses seed `c.seed + i`.
pub fn run_trial(c: &BenchConfig, trial: usize) -> Result<BenchResult, BenchError> {
    let seed = c.seed.wrapping_add(trial as u64);
    match &c.workload {
        Workload::Adversarial => run_adversarial(c, trial, seed),
        Workload::Wordlist(path) => {
            let alphabet = Alphabet::bytes();
            let words = load_wordlist(path)?
                .iter()
                .map(|w| alphabet.encode_word_vec(w).expect("bytes alphabet is total"))
                .collect();
            run_words(c, trial, seed, words, alphabet.size())
        }
        Workload::UniformRandom { strings, length } => {
            if c.m == 0 {
                return Err(BenchError::Config("m must be positive".into()));
            }
            let words = uniform_words(*strings, *length, c.m, seed);
            run_words(c, trial, seed, words, c.m)
        }
    }
}

fn run_words(
    c: &BenchConfig,
    trial: usize,
    seed: u64,
    words: Vec<Vec<SymbolId>>,
    m: usize,
) -> Result<BenchResult, BenchError> {
    let required = required_nodes(&words);
    let n_max = c.n_max.unwrap_or(required);
    if required > n_max {
        return Err(BenchError::CapacityExhausted { required, n_max });
    }

    let started = Instant::now();
    let mut t = Trie::new(n_max, m, c.alpha)?;
    for w in &words {
        let fit = insert_path(&mut t, w)?;
        debug_assert!(fit);
    }
    let build_time = started.elapsed();

    let mut members = words;
    members.sort_unstable();
    members.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    let misses: Vec<Vec<SymbolId>> = members
        .iter()
        .filter(|w| !w.is_empty() && m > 1)
        .map(|w| {
            let mut miss = w.clone();
            let i = rng.random_range(0..miss.len());
            let shift = rng.random_range(1..m as SymbolId);
            miss[i] = (miss[i] + shift) % m as SymbolId;
            miss
        })
        .collect();

    let started = Instant::now();
    let mut stats = ProbeStats::default();
    for w in members.iter().chain(&misses) {
        probe_word(&t, w, &mut stats)?;
    }
    let query_time = started.elapsed();

    Ok(finish(c, trial, seed, &t, members.len(), misses.len(), stats, build_time, query_time))
}

fn run_adversarial(c: &BenchConfig, trial: usize, seed: u64) -> Result<BenchResult, BenchError> {
    let n_max = c
        .n_max
        .ok_or_else(|| BenchError::Config("the adversarial workload needs an explicit capacity".into()))?;
    let started = Instant::now();
    let mut t = Trie::new(n_max, c.m, c.alpha)?;
    let plan = adversarial_workload(n_max, c.m, t.edges().slot_count())?;
    for (i, k) in plan.inserts.iter().enumerate() {
        let z = t.insert_child(k.x, k.y)?;
        debug_assert_eq!(z as usize, i + 1);
    }
    let build_time = started.elapsed();

    let started = Instant::now();
    let mut stats = ProbeStats::default();
    for k in plan.class_keys.iter().chain(&plan.miss_keys) {
        let (_, probes) = t.walk_probed(k.x, k.y)?;
        stats.record(probes);
    }
    let query_time = started.elapsed();

    Ok(finish(
        c,
        trial,
        seed,
        &t,
        plan.class_keys.len(),
        plan.miss_keys.len(),
        stats,
        build_time,
        query_time,
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    c: &BenchConfig,
    trial: usize,
    seed: u64,
    t: &Trie,
    hit_queries: usize,
    miss_queries: usize,
    stats: ProbeStats,
    build_time: std::time::Duration,
    query_time: std::time::Duration,
) -> BenchResult {
    let n_max = t.n_max();
    let m = t.alphabet_size();
    let report = analyzer::report(t.edges());
    let bytes_total = t.footprint().total();
    BenchResult {
        schema_version: SCHEMA_VERSION,
        workload: c.workload.name().to_string(),
        trial,
        seed,
        n_max,
        m,
        alpha: c.alpha,
        slot_count: report.slot_count,
        node_count: t.node_count(),
        edge_count: t.edge_count(),
        member_count: t.terminal_count(),
        hit_queries,
        miss_queries,
        walks: stats.walks,
        mean_probes_per_walk: stats.mean(),
        max_probes_per_walk: stats.max,
        max_occupancy: report.max_occupancy,
        theorem2_bound: report.theorem2_bound,
        bytes_total,
        bytes_per_node: bytes_total as f64 / t.node_count() as f64,
        oracle_bytes_total: Footprint::direct_trie(n_max, m).total(),
        growth_events: t.growth_events(),
        build_time_ns: build_time.as_nanos() as u64,
        query_time_ns: query_time.as_nanos() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::collides_by_lemma1;

    fn uniform(strings: usize, length: usize, m: usize, n_max: Option<usize>) -> BenchConfig {
        BenchConfig {
            workload: Workload::UniformRandom { strings, length },
            n_max,
            m,
            ..BenchConfig::default()
        }
    }

    fn strip_times(mut r: BenchResult) -> BenchResult {
        r.build_time_ns = 0;
        r.query_time_ns = 0;
        r
    }

    #[test]
    fn uniform_probes_within_bound() {
        let r = run_trial(&uniform(1000, 8, 26, None), 0).unwrap();
        assert!(r.max_probes_per_walk as u64 <= r.theorem2_bound);
        assert_eq!(r.theorem2_bound, (r.n_max as u64 * 26).div_ceil(r.slot_count as u64));
        assert_eq!(r.member_count, 1000);
        assert_eq!(r.hit_queries, r.miss_queries);
        assert_eq!(r.growth_events, 0);
        assert_eq!(r.node_count, r.n_max);
    }

    #[test]
    fn deterministic_except_timing() {
        let c = BenchConfig {
            trials: 3,
            ..uniform(100, 4, 26, None)
        };
        let a: Vec<_> = run_bench(&c).unwrap().into_iter().map(strip_times).collect();
        let b: Vec<_> = run_bench(&c).unwrap().into_iter().map(strip_times).collect();
        assert_eq!(a, b);
        assert_ne!(a[0].seed, a[1].seed);
    }

    #[test]
    fn space_does_not_depend_on_alphabet() {
        let small = run_trial(&uniform(300, 8, 26, Some(4096)), 0).unwrap();
        let large = run_trial(&uniform(300, 8, 256, Some(4096)), 0).unwrap();
        assert_eq!(small.bytes_total, large.bytes_total);
        assert!(large.oracle_bytes_total > small.oracle_bytes_total);
    }

    #[test]
    fn capacity_errors_report_requirement() {
        let err = run_trial(&uniform(10, 4, 26, Some(5)), 0).unwrap_err();
        match err {
            BenchError::CapacityExhausted { required, n_max } => {
                assert_eq!(n_max, 5);
                assert_eq!(required, required_nodes(&uniform_words(10, 4, 26, 0)));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn empty_wordlist() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.txt");
        std::fs::write(&path, "").unwrap();
        let c = BenchConfig {
            workload: Workload::Wordlist(path),
            ..BenchConfig::default()
        };
        let r = run_trial(&c, 0).unwrap();
        assert_eq!((r.node_count, r.member_count, r.walks), (1, 0, 0));
        assert_eq!(r.mean_probes_per_walk, 0.0);
        let missing = BenchConfig {
            workload: Workload::Wordlist(dir.path().join("nope.txt")),
            ..BenchConfig::default()
        };
        assert!(matches!(run_trial(&missing, 0), Err(BenchError::Io { .. })));
    }

    #[test]
    fn wordlist_parsing() {
        assert_eq!(parse_wordlist("he\n\nshe\nhe\r\nhis\n"), ["he", "she", "his"]);
        assert!(parse_wordlist("").is_empty());
    }

    #[test]
    fn fill_count_fits_exactly() {
        for (n, m) in [(256, 26), (1000, 4), (64, 2)] {
            let k = uniform_fill_count(n, 8, m, 3).unwrap();
            let words = uniform_words(k, 8, m, 3);
            assert!(required_nodes(&words) <= n);
            assert!(required_nodes(&uniform_words(k + 1, 8, m, 3)) > n);
        }
        // 1 + 2 + 4 nodes hold every binary word of length 2
        assert!(matches!(uniform_fill_count(7, 2, 2, 0), Err(BenchError::Config(_))));
        assert!(uniform_fill_count(6, 2, 2, 0).is_ok());
    }

    #[test]
    fn adversarial_keys_share_one_class() {
        let t = Trie::new(16, 4, 0.75).unwrap();
        let h = t.edges().slot_count();
        let plan = adversarial_workload(16, 4, h).unwrap();
        assert!(plan.class_keys.len() >= 2);
        for a in &plan.class_keys {
            for b in &plan.class_keys {
                assert!(collides_by_lemma1(*a, *b, h as u64, 4).unwrap());
            }
            assert_eq!(t.edges().slot_of(*a), plan.slot);
        }
        let c = BenchConfig {
            workload: Workload::Adversarial,
            n_max: Some(16),
            m: 4,
            ..BenchConfig::default()
        };
        let r = run_trial(&c, 0).unwrap();
        assert!(r.max_probes_per_walk >= 2);
        assert!(r.max_probes_per_walk as u64 <= r.theorem2_bound);
        assert_eq!(r.max_occupancy, plan.class_keys.len());
        assert_eq!(r.growth_events, 0);
    }

    #[test]
    fn adversarial_degenerate_shapes() {
        // m = 1: the trie is a chain
        let plan = adversarial_workload(8, 1, 3).unwrap();
        assert!(plan.inserts.len() <= 7);
        for k in &plan.class_keys {
            assert_eq!(k.x as usize % 3, plan.slot);
        }
        assert!(adversarial_workload(1, 4, 1).unwrap().inserts.is_empty());
        assert!(adversarial_workload(0, 4, 1).is_err());
        let c = BenchConfig {
            workload: Workload::Adversarial,
            ..BenchConfig::default()
        };
        assert!(matches!(run_trial(&c, 0), Err(BenchError::Config(_))));
    }
}
