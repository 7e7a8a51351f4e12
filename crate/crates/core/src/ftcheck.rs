//! `t`-distinctness of fault sets, strict fault tolerance, and the three
//! pairwise conditions that make the four-block protocol fault tolerant.
//!
//! Minimal weight is taken modulo the stabilizer group of the prepared
//! logical `|0>` state (see [`crate::code::ErrorGroup`]).
//!
//! Because coset canonicalization is linear, a product `∏F₂` equivalent to
//! `∏F₁` is found with hash lookups on canonical representatives instead of
//! pairwise comparisons.

use std::collections::HashMap;

use serde::Serialize;

use crate::circuit::PrepCircuit;
use crate::code::{Basis, CssCode, ErrorGroup};
use crate::faults::{fault_set, FaultSet, PauliError};
use crate::{Error, Result};

/// Largest `t` accepted by the distinctness checks.
pub const DISTINCT_CAP: usize = 3;

/// A violation of `t`-distinctness: equivalent products whose minimal weight
/// exceeds the number of faults involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinctnessWitness {
    pub basis: Basis,
    pub subset_1: Vec<u64>,
    pub subset_2: Vec<u64>,
    pub combined_weight_bound: usize,
}

impl DistinctnessWitness {
    pub fn product_1(&self) -> u64 {
        self.subset_1.iter().fold(0, |a, &e| a ^ e)
    }

    pub fn product_2(&self) -> u64 {
        self.subset_2.iter().fold(0, |a, &e| a ^ e)
    }

    /// Re-checks the certificate from scratch.
    pub fn is_valid(&self, code: &CssCode) -> bool {
        let g = code.error_group(self.basis);
        let bound = self.subset_1.len() + self.subset_2.len();
        bound == self.combined_weight_bound
            && !self.subset_1.is_empty()
            && !self.subset_2.is_empty()
            && g.equivalent(self.product_1(), self.product_2())
            && !g.weight_leq(self.product_1(), bound).unwrap_or(true)
    }
}

fn check_t(t: usize) -> Result<()> {
    if t > DISTINCT_CAP {
        return Err(Error::CapExceeded {
            what: "distinctness t",
            value: t,
            cap: DISTINCT_CAP,
        });
    }
    Ok(())
}

// true iff the coset of `e` has no representative of weight <= bound
fn heavy(g: &ErrorGroup, e: u64, bound: usize) -> bool {
    !g.weight_leq(e, bound).expect("bound within cap")
}

/// Canonical representatives of a reference fault set, for constant-time
/// "is this coset hit by one reference element" queries.
#[derive(Clone, Debug)]
pub struct RefIndex {
    words: Vec<u64>,
    by_canon: HashMap<u64, u64>,
}

impl RefIndex {
    pub fn new(g: &ErrorGroup, words: &[u64]) -> Self {
        let mut by_canon = HashMap::with_capacity(words.len());
        for &w in words {
            by_canon.entry(g.canon(w)).or_insert(w);
        }
        Self {
            words: words.to_vec(),
            by_canon,
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, canon: u64) -> Option<u64> {
        self.by_canon.get(&canon).copied()
    }
}

/// Searches for a `t`-distinctness violation between `e1` and `e2`.
/// Returns `Ok(None)` when the sets are `t`-distinct.
///
/// Subset pairs are scanned by increasing total size, so the first witness
/// found is one of smallest size.
pub fn is_t_distinct(e1: &FaultSet, e2: &FaultSet, t: usize, code: &CssCode) -> Result<Option<DistinctnessWitness>> {
    assert_eq!(e1.basis(), e2.basis(), "distinctness across bases");
    check_t(t)?;
    let basis = e1.basis();
    let g = code.error_group(basis);
    let idx2 = RefIndex::new(g, e2.words());
    let witness = |s1: Vec<u64>, s2: Vec<u64>| {
        let bound = s1.len() + s2.len();
        Some(DistinctnessWitness {
            basis,
            subset_1: s1,
            subset_2: s2,
            combined_weight_bound: bound,
        })
    };

    if t >= 2 {
        for &a in e1.words() {
            if let Some(b) = idx2.get(g.canon(a)) {
                if heavy(g, a, 2) {
                    return Ok(witness(vec![a], vec![b]));
                }
            }
        }
    }
    if t >= 3 {
        // |F1| = 1, |F2| = 2
        for &a in e1.words() {
            if !heavy(g, a, 3) {
                continue;
            }
            let ca = g.canon(a);
            for &b in e2.words() {
                if let Some(c) = idx2.get(ca ^ g.canon(b)) {
                    if c != b {
                        return Ok(witness(vec![a], vec![b, c]));
                    }
                }
            }
        }
        // |F1| = 2, |F2| = 1
        let idx1 = RefIndex::new(g, e1.words());
        for &b in e2.words() {
            if !heavy(g, b, 3) {
                continue;
            }
            let cb = g.canon(b);
            for &a in e1.words() {
                if let Some(c) = idx1.get(cb ^ g.canon(a)) {
                    if c != a {
                        return Ok(witness(vec![a, c], vec![b]));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// True iff `existing ∪ {new_error}` is `t`-distinct to `reference`, assuming
/// `existing` already is. Only subset pairs whose first subset contains the
/// new error are examined.
pub fn incremental_distinct(
    existing: &FaultSet,
    new_error: &PauliError,
    reference: &FaultSet,
    t: usize,
    code: &CssCode,
) -> Result<bool> {
    check_t(t)?;
    let g = code.error_group(new_error.basis);
    let idx = RefIndex::new(g, reference.words());
    Ok(incremental_distinct_indexed(
        existing.words(),
        new_error.word(),
        &idx,
        t,
        g,
    ))
}

/// [`incremental_distinct`] against a prebuilt reference index. `t` must be
/// within [`DISTINCT_CAP`].
pub fn incremental_distinct_indexed(
    existing: &[u64],
    new_error: u64,
    reference: &RefIndex,
    t: usize,
    g: &ErrorGroup,
) -> bool {
    if new_error == 0 || t < 2 {
        return true;
    }
    let cn = g.canon(new_error);
    if reference.get(cn).is_some() && heavy(g, new_error, 2) {
        return false;
    }
    if t >= 3 {
        if heavy(g, new_error, 3) {
            for &b in reference.words() {
                if let Some(c) = reference.get(cn ^ g.canon(b)) {
                    if c != b {
                        return false;
                    }
                }
            }
        }
        for &a in existing {
            if a == new_error {
                continue;
            }
            let p = new_error ^ a;
            if reference.get(cn ^ g.canon(a)).is_some() && heavy(g, p, 3) {
                return false;
            }
        }
    }
    true
}

/// Searches all subsets of at most `⌊(d−1)/2⌋` errors from the fault set of
/// `c` for one whose product is heavier than its size.
pub fn is_strictly_ft(c: &PrepCircuit, code: &CssCode, basis: Basis) -> Result<Option<Vec<u64>>> {
    let t = code.t()?;
    check_t(t)?;
    let g = code.error_group(basis);
    let errs = fault_set(c, basis);
    let w = errs.words();
    for (i, &a) in w.iter().enumerate() {
        if heavy(g, a, 1) {
            return Ok(Some(vec![a]));
        }
        if t < 2 {
            continue;
        }
        for (j, &b) in w.iter().enumerate().skip(i + 1) {
            if heavy(g, a ^ b, 2) {
                return Ok(Some(vec![a, b]));
            }
            if t < 3 {
                continue;
            }
            for &c3 in &w[j + 1..] {
                if heavy(g, a ^ b ^ c3, 3) {
                    return Ok(Some(vec![a, b, c3]));
                }
            }
        }
    }
    Ok(None)
}

/// One of the three pairwise protocol conditions.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: usize,
    pub basis: Basis,
    pub description: &'static str,
    pub passed: bool,
    pub witness: Option<WitnessReport>,
}

/// Serializable form of a [`DistinctnessWitness`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub condition: usize,
    pub t: usize,
    pub basis: Basis,
    pub subset_1: Vec<Vec<usize>>,
    pub subset_2: Vec<Vec<usize>>,
    pub combined_weight_bound: usize,
}

fn qubits(w: u64) -> Vec<usize> {
    (0..64).filter(|q| w >> q & 1 == 1).collect()
}

impl WitnessReport {
    pub fn new(condition: usize, t: usize, w: &DistinctnessWitness) -> Self {
        Self {
            condition,
            t,
            basis: w.basis,
            subset_1: w.subset_1.iter().map(|&e| qubits(e)).collect(),
            subset_2: w.subset_2.iter().map(|&e| qubits(e)).collect(),
            combined_weight_bound: w.combined_weight_bound,
        }
    }
}

/// Outcome of [`verify_quadruple`].
#[derive(Clone, Debug, Serialize)]
pub struct QuadrupleReport {
    pub code: String,
    pub t: usize,
    pub prepares: [bool; 4],
    pub conditions: Vec<ConditionReport>,
    pub passed: bool,
}

impl QuadrupleReport {
    pub fn witnesses(&self) -> Vec<&WitnessReport> {
        self.conditions.iter().filter_map(|c| c.witness.as_ref()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Fault-set pairs of the three protocol conditions, in order.
pub fn condition_sets(circuits: [&PrepCircuit; 4]) -> [(FaultSet, FaultSet); 3] {
    let fx = |i: usize| fault_set(circuits[i], Basis::X);
    let fz = |i: usize| fault_set(circuits[i], Basis::Z);
    [
        (fx(0), fx(1)),
        (fx(2), fx(3)),
        (fz(0).union(&fz(1)), fz(2).union(&fz(3))),
    ]
}

const CONDITION_TEXT: [&str; 3] = [
    "E_X(C1) vs E_X(C2)",
    "E_X(C3) vs E_X(C4)",
    "E_Z(C1) u E_Z(C2) vs E_Z(C3) u E_Z(C4)",
];

/// Checks the three distinctness conditions with `t = ⌊(d−1)/2⌋`. Circuits
/// that do not prepare the code's `|0>` are reported and the distinctness
/// checks are skipped.
pub fn verify_quadruple(circuits: [&PrepCircuit; 4], code: &CssCode) -> Result<QuadrupleReport> {
    let t = code.t()?;
    check_t(t)?;
    for c in circuits {
        if c.n() != code.n() {
            return Err(Error::Invalid(format!(
                "circuit has {} qubits but the code has {}",
                c.n(),
                code.n()
            )));
        }
    }
    let prepares = circuits.map(|c| c.verify_prepares(code));
    if prepares.iter().any(|&p| !p) {
        return Ok(QuadrupleReport {
            code: code.name().to_string(),
            t,
            prepares,
            conditions: Vec::new(),
            passed: false,
        });
    }
    let mut conditions = Vec::new();
    for (i, (a, b)) in condition_sets(circuits).iter().enumerate() {
        let w = is_t_distinct(a, b, t, code)?;
        conditions.push(ConditionReport {
            condition: i + 1,
            basis: a.basis(),
            description: CONDITION_TEXT[i],
            passed: w.is_none(),
            witness: w.as_ref().map(|w| WitnessReport::new(i + 1, t, w)),
        });
    }
    let passed = conditions.iter().all(|c| c.passed);
    Ok(QuadrupleReport {
        code: code.name().to_string(),
        t,
        prepares,
        conditions,
        passed,
    })
}

/// Full witnesses of a quadruple, with their condition number.
pub fn quadruple_witnesses(circuits: [&PrepCircuit; 4], code: &CssCode) -> Result<Vec<(usize, DistinctnessWitness)>> {
    let t = code.t()?;
    let mut out = Vec::new();
    for (i, (a, b)) in condition_sets(circuits).iter().enumerate() {
        if let Some(w) = is_t_distinct(a, b, t, code)? {
            out.push((i + 1, w));
        }
    }
    Ok(out)
}
