//! Exact checks of the coordinate hash's collision structure.
//!
//! With `G = gcd(H, m)`, every flat key `x * m + y` splits into a GCD
//! coordinate `(x', y') = (flat / G, flat mod G)`. Two keys share a slot iff
//! `y'_1 = y'_2` and `x'_1 = x'_2 (mod H / G)`. Since `x' < n_max * m / G`,
//! each congruence class, and hence each slot, holds at most
//! `ceil(n_max * m / H)` keys.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::edge_table::{coord_hash, EdgeKey, EdgeTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Euclid's algorithm.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GcdCoordinate {
    pub x_prime: u64,
    pub y_prime: u64,
    /// `gcd(H, m)`.
    pub g: u64,
}

impl GcdCoordinate {
    /// `x' * G + y'`, which equals `x * m + y`.
    pub fn flat(&self) -> u64 {
        self.x_prime * self.g + self.y_prime
    }
}

fn check_hm(slot_count: u64, m: u64) -> Result<(), AnalysisError> {
    if slot_count == 0 || m == 0 {
        return Err(AnalysisError::InvalidParameter(format!(
            "H and m must be positive (H = {slot_count}, m = {m})"
        )));
    }
    Ok(())
}

/// GCD coordinate of edge key `(x, y)` for a table of `slot_count` slots.
pub fn gcd_coordinate(
    x: u64,
    y: u64,
    slot_count: u64,
    m: u64,
) -> Result<GcdCoordinate, AnalysisError> {
    check_hm(slot_count, m)?;
    if y >= m {
        return Err(AnalysisError::InvalidParameter(format!(
            "symbol {y} out of range for m = {m}"
        )));
    }
    let flat = x.checked_mul(m).and_then(|v| v.checked_add(y)).ok_or_else(|| {
        AnalysisError::InvalidParameter(format!("x * m + y overflows for x = {x}, m = {m}"))
    })?;
    let g = gcd(slot_count, m);
    Ok(GcdCoordinate {
        x_prime: flat / g,
        y_prime: flat % g,
        g,
    })
}

/// Collision predicate computed from GCD coordinates, without evaluating the hash.
pub fn collides_by_lemma1(
    a: EdgeKey,
    b: EdgeKey,
    slot_count: u64,
    m: u64,
) -> Result<bool, AnalysisError> {
    let ca = gcd_coordinate(a.x.into(), a.y.into(), slot_count, m)?;
    let cb = gcd_coordinate(b.x.into(), b.y.into(), slot_count, m)?;
    let period = slot_count / ca.g;
    Ok(ca.y_prime == cb.y_prime && ca.x_prime % period == cb.x_prime % period)
}

/// Outcome of an exhaustive pairwise check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma1Check {
    pub pairs_checked: u64,
    /// First pair where the predicate and the hash disagree.
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub a: EdgeKey,
    pub b: EdgeKey,
    pub predicate: bool,
    pub same_slot: bool,
}

impl Lemma1Check {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Compares the GCD-coordinate predicate with direct hash equality over every
/// ordered pair of keys in `[0, n_max) x [0, m)`. Both directions of the
/// equivalence are covered since every pair is tested for agreement.
pub fn verify_lemma1_exhaustive(n_max: u64, m: u64, slot_count: u64) -> Result<Lemma1Check, AnalysisError> {
    check_hm(slot_count, m)?;
    let keys: Vec<EdgeKey> = all_keys(n_max, m).collect();
    let slots: Vec<u64> = keys
        .iter()
        .map(|k| coord_hash(k.x.into(), k.y.into(), m, slot_count))
        .collect();
    let mut pairs = 0;
    for (i, &a) in keys.iter().enumerate() {
        for (j, &b) in keys.iter().enumerate() {
            pairs += 1;
            let predicate = collides_by_lemma1(a, b, slot_count, m)?;
            let same_slot = slots[i] == slots[j];
            if predicate != same_slot {
                return Ok(Lemma1Check {
                    pairs_checked: pairs,
                    counterexample: Some(Counterexample {
                        a,
                        b,
                        predicate,
                        same_slot,
                    }),
                });
            }
        }
    }
    Ok(Lemma1Check {
        pairs_checked: pairs,
        counterexample: None,
    })
}

/// Checks that GCD coordinates are injective over the key space, that
/// `x' * G + y' = x * m + y` and that both components stay in range.
/// Returns the number of keys that fail.
pub fn verify_bijection(n_max: u64, m: u64, slot_count: u64) -> Result<usize, AnalysisError> {
    check_hm(slot_count, m)?;
    let g = gcd(slot_count, m);
    let x_bound = n_max * m / g;
    let mut seen = HashSet::new();
    let mut failures = 0;
    for k in all_keys(n_max, m) {
        let c = gcd_coordinate(k.x.into(), k.y.into(), slot_count, m)?;
        let flat = u64::from(k.x) * m + u64::from(k.y);
        let ok = c.flat() == flat
            && c.g == g
            && c.y_prime < g
            && c.x_prime < x_bound
            && seen.insert((c.x_prime, c.y_prime));
        failures += usize::from(!ok);
    }
    Ok(failures)
}

/// Worst-case slot occupancy `ceil(n_max * m / H)`.
pub fn theorem2_bound(n_max: u64, m: u64, slot_count: u64) -> u64 {
    (n_max * m).div_ceil(slot_count)
}

fn all_keys(n_max: u64, m: u64) -> impl Iterator<Item = EdgeKey> {
    (0..n_max as u32).flat_map(move |x| (0..m as u32).map(move |y| EdgeKey::new(x, y)))
}

/// Inserts every key of `[0, n_max) x [0, m)` into an analysis-mode table with
/// `slot_count` slots and returns its report.
pub fn saturate(n_max: usize, m: usize, slot_count: usize) -> Result<TableReport, AnalysisError> {
    if n_max < 2 {
        return Err(AnalysisError::InvalidParameter(
            "saturation needs a non-root edge value, so n_max >= 2".into(),
        ));
    }
    let mut t = EdgeTable::for_analysis(n_max, m, slot_count)
        .map_err(|e| AnalysisError::InvalidParameter(e.to_string()))?;
    for k in all_keys(n_max as u64, m as u64) {
        t.insert(k, 1)
            .map_err(|e| AnalysisError::InvalidParameter(e.to_string()))?;
    }
    Ok(report(&t))
}

/// Occupancy statistics of a table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableReport {
    #[serde(rename = "H")]
    pub slot_count: usize,
    #[serde(rename = "G")]
    pub g: u64,
    pub entries: usize,
    pub max_occupancy: usize,
    pub mean_occupancy: f64,
    pub theorem2_bound: u64,
    /// `histogram[k]` is the number of slots holding exactly `k` entries.
    pub histogram: Vec<usize>,
}

impl TableReport {
    pub fn within_bound(&self) -> bool {
        self.max_occupancy as u64 <= self.theorem2_bound
    }
}

pub fn report(t: &EdgeTable) -> TableReport {
    let occupancies = t.bucket_occupancies();
    let max_occupancy = occupancies.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0; max_occupancy + 1];
    for &o in &occupancies {
        histogram[o] += 1;
    }
    let h = t.slot_count() as u64;
    let m = t.alphabet_size() as u64;
    TableReport {
        slot_count: t.slot_count(),
        g: gcd(h, m),
        entries: t.len(),
        max_occupancy,
        mean_occupancy: t.len() as f64 / h as f64,
        theorem2_bound: theorem2_bound(t.n_max() as u64, m, h),
        histogram,
    }
}
