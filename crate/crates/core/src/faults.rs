//! Propagated single-fault errors (fault sets) and coset weight queries.
//!
//! Errors are stored as `u64` supports: bit `q` is qubit `q`.

use std::collections::HashSet;

use crate::circuit::{Cnot, PrepCircuit};
use crate::code::{Basis, CssCode};
use crate::gf2::BitVector;
use crate::Result;

/// A Pauli error of a single type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliError {
    pub basis: Basis,
    pub support: BitVector,
}

impl PauliError {
    pub fn new(basis: Basis, support: BitVector) -> Self {
        Self { basis, support }
    }

    pub fn from_word(basis: Basis, n: usize, word: u64) -> Self {
        Self::new(basis, BitVector::from_word(n, word))
    }

    pub fn from_qubits(basis: Basis, n: usize, qubits: &[usize]) -> Self {
        Self::new(basis, BitVector::from_indices(n, qubits))
    }

    pub fn word(&self) -> u64 {
        self.support.to_word()
    }

    pub fn weight(&self) -> usize {
        self.support.weight()
    }
}

/// Conjugation images of single-qubit Paulis through a circuit suffix.
///
/// Prepending gates one at a time walks the suffix backwards, which is how
/// reverse synthesis grows a circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuffixImages {
    pub x: Vec<u64>,
    pub z: Vec<u64>,
}

impl SuffixImages {
    pub fn identity(n: usize) -> Self {
        let units: Vec<u64> = (0..n).map(|q| 1u64 << q).collect();
        Self {
            x: units.clone(),
            z: units,
        }
    }

    /// Prepends `g` to the suffix and returns the new X and Z images of the
    /// faults sitting just before it: `X_c` and `Z_t`.
    #[inline]
    pub fn prepend(&mut self, g: Cnot) -> (u64, u64) {
        self.x[g.control] ^= self.x[g.target];
        self.z[g.target] ^= self.z[g.control];
        (self.x[g.control], self.z[g.target])
    }

    /// Image of an arbitrary support under the suffix.
    pub fn apply(&self, basis: Basis, e: u64) -> u64 {
        let img = match basis {
            Basis::X => &self.x,
            Basis::Z => &self.z,
        };
        let mut out = 0;
        let mut w = e;
        while w != 0 {
            out ^= img[w.trailing_zeros() as usize];
            w &= w - 1;
        }
        out
    }
}

/// Propagates a single-qubit `basis` Pauli placed before gate `after_gate`
/// through the rest of the circuit.
pub fn propagate(c: &PrepCircuit, basis: Basis, seed_qubit: usize, after_gate: usize) -> PauliError {
    assert!(seed_qubit < c.n(), "seed qubit {seed_qubit} out of range");
    PauliError::from_word(basis, c.n(), propagate_word(c, basis, 1u64 << seed_qubit, after_gate))
}

/// Word form of [`propagate`] for an arbitrary support.
pub fn propagate_word(c: &PrepCircuit, basis: Basis, mut e: u64, after_gate: usize) -> u64 {
    assert!(after_gate <= c.cx_count(), "gate position {after_gate} out of range");
    for g in &c.gates()[after_gate..] {
        match basis {
            Basis::X => {
                if e >> g.control & 1 == 1 {
                    e ^= 1u64 << g.target;
                }
            }
            Basis::Z => {
                if e >> g.target & 1 == 1 {
                    e ^= 1u64 << g.control;
                }
            }
        }
    }
    e
}

/// Where a fault-set element first arose: the gate position it was seeded
/// before (`gate == cx_count` means after the last gate) and the seed qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Origin {
    pub gate: usize,
    pub qubit: usize,
}

/// Deduplicated set of propagated errors of one basis, in insertion order.
#[derive(Clone, Debug)]
pub struct FaultSet {
    basis: Basis,
    n: usize,
    errors: Vec<u64>,
    origins: Vec<Origin>,
    index: HashSet<u64>,
}

impl FaultSet {
    pub fn empty(basis: Basis, n: usize) -> Self {
        Self {
            basis,
            n,
            errors: Vec::new(),
            origins: Vec::new(),
            index: HashSet::new(),
        }
    }

    /// The `n` single-qubit errors, the starting point of every fault set.
    pub fn singles(basis: Basis, n: usize, at_gate: usize) -> Self {
        let mut s = Self::empty(basis, n);
        for q in 0..n {
            s.insert_with_origin(
                1u64 << q,
                Origin {
                    gate: at_gate,
                    qubit: q,
                },
            );
        }
        s
    }

    pub fn from_words(basis: Basis, n: usize, words: &[u64]) -> Self {
        let mut s = Self::empty(basis, n);
        for &w in words {
            s.insert(w);
        }
        s
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn words(&self) -> &[u64] {
        &self.errors
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }

    pub fn contains(&self, e: u64) -> bool {
        self.index.contains(&e)
    }

    pub fn insert(&mut self, e: u64) -> bool {
        self.insert_with_origin(
            e,
            Origin {
                gate: usize::MAX,
                qubit: usize::MAX,
            },
        )
    }

    pub fn insert_with_origin(&mut self, e: u64, origin: Origin) -> bool {
        if e == 0 || !self.index.insert(e) {
            return false;
        }
        self.errors.push(e);
        self.origins.push(origin);
        true
    }

    /// Drops elements inserted after the first `len`.
    pub fn truncate(&mut self, len: usize) {
        for e in self.errors.drain(len..) {
            self.index.remove(&e);
        }
        self.origins.truncate(len);
    }

    pub fn union(&self, other: &FaultSet) -> FaultSet {
        assert_eq!(self.basis, other.basis, "union of fault sets of different bases");
        let mut out = self.clone();
        for (&e, &o) in other.errors.iter().zip(&other.origins) {
            out.insert_with_origin(e, o);
        }
        out
    }

    pub fn errors(&self) -> Vec<PauliError> {
        self.errors
            .iter()
            .map(|&w| PauliError::from_word(self.basis, self.n, w))
            .collect()
    }

    pub fn is_subset_of(&self, other: &FaultSet) -> bool {
        self.errors.iter().all(|e| other.contains(*e))
    }
}

/// All errors from one `basis` fault at any gate boundary, plus the bare
/// single-qubit errors.
pub fn fault_set(c: &PrepCircuit, basis: Basis) -> FaultSet {
    let m = c.cx_count();
    let mut set = FaultSet::singles(basis, c.n(), m);
    let mut images = SuffixImages::identity(c.n());
    for (j, &g) in c.gates().iter().enumerate().rev() {
        let (x, z) = images.prepend(g);
        match basis {
            Basis::X => set.insert_with_origin(
                x,
                Origin {
                    gate: j,
                    qubit: g.control,
                },
            ),
            Basis::Z => set.insert_with_origin(
                z,
                Origin {
                    gate: j,
                    qubit: g.target,
                },
            ),
        };
    }
    set
}

/// True iff some error of weight at most `t` is equivalent to `e` on the
/// logical `|0>` state. Fails for `t` above the cap.
pub fn weight_leq(e: &PauliError, t: usize, code: &CssCode) -> Result<bool> {
    code.error_group(e.basis).weight_leq(e.word(), t)
}

/// True iff `e1 ⊕ e2` acts trivially on the logical `|0>` state.
pub fn equivalent(e1: &PauliError, e2: &PauliError, code: &CssCode) -> bool {
    assert_eq!(e1.basis, e2.basis, "equivalence across bases");
    code.error_group(e1.basis).equivalent(e1.word(), e2.word())
}
