//! Pauli-frame propagation with precomputed fault effects.
//!
//! Frames evolve linearly under CNOTs, so the outcome of a shot is the XOR
//! of the outcomes of its individual faults. [`FrameSim`] flattens a
//! protocol into moments, enumerates every fault location, and stores the
//! effect of each (location, Pauli) pair once.

use std::ops::BitXorAssign;

use crate::circuit::InitBasis;
use crate::code::{Basis, CssCode};
use crate::protocol::{Op, ProtocolSchedule, BLOCKS};

/// What can go wrong at a location and how many Pauli choices it has.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocationKind {
    /// Flip of a freshly initialized qubit (X on `|0>`, Z on `|+>`).
    Init(InitBasis),
    /// One of 15 nontrivial two-qubit Paulis after a CNOT.
    Cx,
    /// X, Y or Z on an idle qubit.
    Idle,
    /// Flip of a measurement record.
    Measure(Basis),
    /// X, Y or Z on the ideal block of the Z gadget.
    Depolarize,
}

impl LocationKind {
    pub fn pauli_count(self) -> usize {
        match self {
            LocationKind::Init(_) | LocationKind::Measure(_) => 1,
            LocationKind::Cx => 15,
            LocationKind::Idle | LocationKind::Depolarize => 3,
        }
    }
}

/// A fault location: after the operation at `moment` acting on `qubits`
/// (the second entry is only meaningful for CNOTs).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Location {
    pub moment: usize,
    pub kind: LocationKind,
    pub qubits: (usize, usize),
}

/// Single-qubit Pauli as (x, z) bits.
#[inline]
fn single_pauli(kind: LocationKind, index: usize) -> (bool, bool) {
    match kind {
        LocationKind::Idle | LocationKind::Depolarize => [(true, false), (false, true), (true, true)][index],
        _ => unreachable!("not a single-qubit depolarizing location"),
    }
}

/// Two-qubit Pauli `index` in `0..15` as ((x_c, z_c), (x_t, z_t)); index 0 is `X⊗I`.
#[inline]
pub fn two_qubit_pauli(index: usize) -> ((bool, bool), (bool, bool)) {
    assert!(index < 15, "two-qubit Pauli index {index} out of range");
    let code = index + 1;
    let c = code & 3;
    let t = code >> 2;
    ((c & 1 == 1, c & 2 == 2), (t & 1 == 1, t & 2 == 2))
}

/// Outcome of a shot relative to the noiseless run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Effect {
    /// Measurement record flips per block (the survivor's entry stays zero).
    pub records: [u64; BLOCKS],
    /// X and Z frames of the survivor block at the end of the protocol.
    pub residual_x: u64,
    pub residual_z: u64,
    /// Z gadget: X-basis record of the survivor and Z frame of the ideal block.
    pub gadget_record: u64,
    pub gadget_z: u64,
}

impl BitXorAssign<&Effect> for Effect {
    #[inline]
    fn bitxor_assign(&mut self, o: &Effect) {
        for b in 0..BLOCKS {
            self.records[b] ^= o.records[b];
        }
        self.residual_x ^= o.residual_x;
        self.residual_z ^= o.residual_z;
        self.gadget_record ^= o.gadget_record;
        self.gadget_z ^= o.gadget_z;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FlatOp {
    Init { qubit: usize, basis: InitBasis },
    Cx { control: usize, target: usize },
    Idle { qubit: usize },
    Measure { qubit: usize, basis: Basis },
    Depolarize { qubit: usize },
}

/// Deterministic parities checked for acceptance.
#[derive(Clone, Debug)]
pub struct AcceptanceCheck {
    // per block: rows whose parity with the record must vanish
    rows: [Vec<u64>; BLOCKS],
}

impl AcceptanceCheck {
    pub fn new(schedule: &ProtocolSchedule) -> Self {
        let code = schedule.code();
        let mut rows: [Vec<u64>; BLOCKS] = Default::default();
        for &(b, basis) in schedule.measurements() {
            rows[b] = match basis {
                Basis::Z => code
                    .h_z()
                    .row_words64()
                    .into_iter()
                    .chain(code.logicals_z().row_words64())
                    .collect(),
                Basis::X => code.h_x().row_words64(),
            };
        }
        Self { rows }
    }

    #[inline]
    pub fn accepts(&self, records: &[u64; BLOCKS]) -> bool {
        self.rows
            .iter()
            .zip(records)
            .all(|(rows, &m)| m == 0 || rows.iter().all(|&r| (r & m).count_ones() % 2 == 0))
    }
}

/// Deterministic result of one shot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub effect: Effect,
    pub accepted: bool,
}

/// A protocol flattened into moments, with every fault effect precomputed.
#[derive(Clone, Debug)]
pub struct FrameSim {
    n: usize,
    qubits: usize,
    survivor: usize,
    moments: Vec<Vec<FlatOp>>,
    // first moment of the Z gadget (== moments.len() without it)
    gadget_start: usize,
    locations: Vec<Location>,
    // effects[offsets[l] + k] is Pauli k at location l
    offsets: Vec<usize>,
    effects: Vec<Effect>,
    check: AcceptanceCheck,
}

impl FrameSim {
    /// Flattens `schedule`; with `gadget`, appends the Z-estimation gadget:
    /// an ideal `|+>_L` block depolarized, a transversal CNOT from the
    /// survivor onto it, and an X-basis measurement of the survivor.
    pub fn new(schedule: &ProtocolSchedule, gadget: bool) -> Self {
        let n = schedule.n();
        assert!(n <= 64, "frame simulation packs a block into one word");
        let survivor = schedule.output_block();
        let mut moments: Vec<Vec<FlatOp>> = schedule
            .timeline()
            .into_iter()
            .map(|m| {
                m.ops
                    .into_iter()
                    .map(|op| match op {
                        Op::Init { qubit, basis } => FlatOp::Init { qubit, basis },
                        Op::Cx { control, target } => FlatOp::Cx { control, target },
                        Op::Idle { qubit } => FlatOp::Idle { qubit },
                        Op::Measure { qubit, basis } => FlatOp::Measure { qubit, basis },
                    })
                    .collect()
            })
            .collect();
        let gadget_start = moments.len();
        let mut qubits = BLOCKS * n;
        if gadget {
            let p = BLOCKS * n;
            qubits += n;
            moments.push((0..n).map(|q| FlatOp::Depolarize { qubit: p + q }).collect());
            moments.push(
                (0..n)
                    .map(|q| FlatOp::Cx {
                        control: survivor * n + q,
                        target: p + q,
                    })
                    .collect(),
            );
            moments.push(
                (0..n)
                    .map(|q| FlatOp::Measure {
                        qubit: survivor * n + q,
                        basis: Basis::X,
                    })
                    .collect(),
            );
        }
        let mut sim = FrameSim {
            n,
            qubits,
            survivor,
            moments,
            gadget_start,
            locations: Vec::new(),
            offsets: Vec::new(),
            effects: Vec::new(),
            check: AcceptanceCheck::new(schedule),
        };
        sim.enumerate_locations();
        sim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn has_gadget(&self) -> bool {
        self.gadget_start < self.moments.len()
    }

    pub fn acceptance(&self) -> &AcceptanceCheck {
        &self.check
    }

    /// Effect of Pauli `pauli` at location index `loc`.
    #[inline]
    pub fn effect(&self, loc: usize, pauli: usize) -> &Effect {
        debug_assert!(pauli < self.locations[loc].kind.pauli_count());
        &self.effects[self.offsets[loc] + pauli]
    }

    /// Total number of (location, Pauli) fault events.
    pub fn event_count(&self) -> usize {
        self.effects.len()
    }

    fn enumerate_locations(&mut self) {
        for (mi, moment) in self.moments.iter().enumerate() {
            for op in moment {
                let (kind, qubits) = match *op {
                    FlatOp::Init { qubit, basis } => (LocationKind::Init(basis), (qubit, qubit)),
                    FlatOp::Cx { control, target } => (LocationKind::Cx, (control, target)),
                    FlatOp::Idle { qubit } => (LocationKind::Idle, (qubit, qubit)),
                    FlatOp::Measure { qubit, basis } => (LocationKind::Measure(basis), (qubit, qubit)),
                    FlatOp::Depolarize { qubit } => (LocationKind::Depolarize, (qubit, qubit)),
                };
                self.locations.push(Location {
                    moment: mi,
                    kind,
                    qubits,
                });
            }
        }
        let mut effects = Vec::new();
        let mut offsets = Vec::with_capacity(self.locations.len());
        for loc in &self.locations {
            offsets.push(effects.len());
            // effects of the basic components, combined per Pauli
            let basic = |x: &[usize], z: &[usize]| self.propagate_pauli(loc.moment + 1, x, z);
            match loc.kind {
                LocationKind::Init(InitBasis::Zero) => effects.push(basic(&[loc.qubits.0], &[])),
                LocationKind::Init(InitBasis::Plus) => effects.push(basic(&[], &[loc.qubits.0])),
                LocationKind::Measure(_) => effects.push(self.record_flip(loc.moment, loc.qubits.0)),
                LocationKind::Idle | LocationKind::Depolarize => {
                    let q = [loc.qubits.0];
                    for k in 0..3 {
                        let (x, z) = single_pauli(loc.kind, k);
                        effects.push(basic(if x { &q[..] } else { &[] }, if z { &q[..] } else { &[] }));
                    }
                }
                LocationKind::Cx => {
                    let (c, t) = loc.qubits;
                    for k in 0..15 {
                        let ((xc, zc), (xt, zt)) = two_qubit_pauli(k);
                        let xs: Vec<usize> = [(xc, c), (xt, t)].iter().filter(|p| p.0).map(|p| p.1).collect();
                        let zs: Vec<usize> = [(zc, c), (zt, t)].iter().filter(|p| p.0).map(|p| p.1).collect();
                        effects.push(basic(&xs, &zs));
                    }
                }
            }
        }
        self.offsets = offsets;
        self.effects = effects;
    }

    fn record_slot(&self, moment: usize, qubit: usize) -> (bool, usize, usize) {
        // (in gadget, block, bit)
        (moment >= self.gadget_start, qubit / self.n, qubit % self.n)
    }

    fn record_flip(&self, moment: usize, qubit: usize) -> Effect {
        let mut e = Effect::default();
        let (gadget, block, bit) = self.record_slot(moment, qubit);
        if gadget {
            e.gadget_record ^= 1u64 << bit;
        } else {
            e.records[block] ^= 1u64 << bit;
        }
        e
    }

    /// Propagates X on `xs` and Z on `zs`, present just before moment `start`, to the end.
    fn propagate_pauli(&self, start: usize, xs: &[usize], zs: &[usize]) -> Effect {
        let mut x = vec![false; self.qubits];
        let mut z = vec![false; self.qubits];
        for &q in xs {
            x[q] ^= true;
        }
        for &q in zs {
            z[q] ^= true;
        }
        self.run_frames(start, &mut x, &mut z, &[])
    }

    // Evolves frames from moment `start`. `flips` lists (moment, op index)
    // pairs whose fault is applied after that op, used by the direct simulator.
    fn run_frames(&self, start: usize, x: &mut [bool], z: &mut [bool], flips: &[(usize, usize, FaultPauli)]) -> Effect {
        let mut e = Effect::default();
        let n = self.n;
        let snapshot = |x: &[bool], z: &[bool], e: &mut Effect| {
            for q in 0..n {
                let g = self.survivor * n + q;
                e.residual_x |= u64::from(x[g]) << q;
                e.residual_z |= u64::from(z[g]) << q;
            }
        };
        for m in start..=self.moments.len() {
            if m == self.gadget_start {
                snapshot(x, z, &mut e);
            }
            if m == self.moments.len() {
                break;
            }
            for (oi, op) in self.moments[m].iter().enumerate() {
                match *op {
                    FlatOp::Cx { control, target } => {
                        x[target] ^= x[control];
                        z[control] ^= z[target];
                    }
                    FlatOp::Measure { qubit, basis } => {
                        let bit = match basis {
                            Basis::Z => x[qubit],
                            Basis::X => z[qubit],
                        };
                        if bit {
                            e ^= &self.record_flip(m, qubit);
                        }
                    }
                    _ => {}
                }
                for &(fm, fo, pauli) in flips {
                    if fm == m && fo == oi {
                        match pauli {
                            FaultPauli::Frame { xs, zs } => {
                                for (q, on) in xs {
                                    x[q] ^= on;
                                }
                                for (q, on) in zs {
                                    z[q] ^= on;
                                }
                            }
                            FaultPauli::RecordFlip(q) => e ^= &self.record_flip(m, q),
                        }
                    }
                }
            }
        }
        if self.has_gadget() {
            let p = BLOCKS * n;
            for q in 0..n {
                e.gadget_z |= u64::from(z[p + q]) << q;
            }
        }
        e
    }

    /// Outcome of a shot with exactly the listed (location index, Pauli index) faults.
    pub fn inject(&self, faults: &[(usize, usize)]) -> ShotRecord {
        let mut e = Effect::default();
        for &(loc, pauli) in faults {
            assert!(loc < self.locations.len(), "location {loc} out of range");
            assert!(
                pauli < self.locations[loc].kind.pauli_count(),
                "Pauli {pauli} invalid at location {loc}"
            );
            e ^= self.effect(loc, pauli);
        }
        ShotRecord {
            effect: e,
            accepted: self.check.accepts(&e.records),
        }
    }

    /// Same as [`FrameSim::inject`] but by evolving frames gate by gate
    /// instead of summing precomputed effects.
    pub fn inject_direct(&self, faults: &[(usize, usize)]) -> ShotRecord {
        let mut flips = Vec::new();
        for &(li, pauli) in faults {
            let loc = self.locations[li];
            let op_index = self.moments[loc.moment]
                .iter()
                .position(|op| flat_qubits(op) == loc.qubits)
                .expect("location exists in its moment");
            let fp = match loc.kind {
                LocationKind::Init(InitBasis::Zero) => FaultPauli::Frame {
                    xs: [(loc.qubits.0, true), (0, false)],
                    zs: [(0, false), (0, false)],
                },
                LocationKind::Init(InitBasis::Plus) => FaultPauli::Frame {
                    xs: [(0, false), (0, false)],
                    zs: [(loc.qubits.0, true), (0, false)],
                },
                LocationKind::Measure(_) => FaultPauli::RecordFlip(loc.qubits.0),
                LocationKind::Idle | LocationKind::Depolarize => {
                    let (x, z) = single_pauli(loc.kind, pauli);
                    FaultPauli::Frame {
                        xs: [(loc.qubits.0, x), (0, false)],
                        zs: [(loc.qubits.0, z), (0, false)],
                    }
                }
                LocationKind::Cx => {
                    let ((xc, zc), (xt, zt)) = two_qubit_pauli(pauli);
                    let (c, t) = loc.qubits;
                    FaultPauli::Frame {
                        xs: [(c, xc), (t, xt)],
                        zs: [(c, zc), (t, zt)],
                    }
                }
            };
            flips.push((loc.moment, op_index, fp));
        }
        let mut x = vec![false; self.qubits];
        let mut z = vec![false; self.qubits];
        let e = self.run_frames(0, &mut x, &mut z, &flips);
        ShotRecord {
            effect: e,
            accepted: self.check.accepts(&e.records),
        }
    }

    /// Location indices grouped by kind, for structural counting.
    pub fn count_kind(&self, pred: impl Fn(LocationKind) -> bool) -> usize {
        self.locations.iter().filter(|l| pred(l.kind)).count()
    }
}

#[derive(Clone, Copy, Debug)]
enum FaultPauli {
    Frame {
        xs: [(usize, bool); 2],
        zs: [(usize, bool); 2],
    },
    RecordFlip(usize),
}

fn flat_qubits(op: &FlatOp) -> (usize, usize) {
    match *op {
        FlatOp::Init { qubit, .. }
        | FlatOp::Idle { qubit }
        | FlatOp::Measure { qubit, .. }
        | FlatOp::Depolarize { qubit } => (qubit, qubit),
        FlatOp::Cx { control, target } => (control, target),
    }
}

/// Checks that the code defines the block width expected by the simulator.
pub fn supported(code: &CssCode) -> bool {
    code.n() <= 64 && code.m_x() <= 64 && code.m_z() + code.k() <= 64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::tests::steane_encoder;
    use crate::code::registry_lookup;
    use crate::protocol::build_protocol;
    use proptest::prelude::*;

    fn steane_sim(gadget: bool) -> FrameSim {
        let code = registry_lookup("steane").unwrap();
        let c = steane_encoder();
        FrameSim::new(&build_protocol([&c, &c, &c, &c], &code).unwrap(), gadget)
    }

    #[test]
    fn pauli_table_is_complete() {
        let mut seen = std::collections::HashSet::new();
        for k in 0..15 {
            let p = two_qubit_pauli(k);
            assert!(p != ((false, false), (false, false)));
            assert!(seen.insert(p));
        }
    }

    #[test]
    fn noiseless_shot_accepts() {
        let s = steane_sim(true);
        let r = s.inject(&[]);
        assert!(r.accepted);
        assert_eq!(r.effect, Effect::default());
    }

    #[test]
    fn location_counts_are_structural() {
        let s = steane_sim(false);
        let c = steane_encoder();
        let n = 7;
        let prep_depth = c.depth();
        let moments_with_gates = prep_depth + 2;
        let gates = 4 * c.cx_count() + 3 * n;
        let busy_qubit_slots = 2 * gates;
        let idle = moments_with_gates * 4 * n - busy_qubit_slots + n;
        assert_eq!(s.count_kind(|k| matches!(k, LocationKind::Init(_))), 4 * n);
        assert_eq!(s.count_kind(|k| k == LocationKind::Cx), gates);
        assert_eq!(s.count_kind(|k| k == LocationKind::Idle), idle);
        assert_eq!(s.count_kind(|k| matches!(k, LocationKind::Measure(_))), 3 * n);
        assert_eq!(s.locations().len(), 4 * n + gates + idle + 3 * n);
    }

    #[test]
    fn x_on_block_one_at_end_of_prep_reaches_block_two() {
        // X on a block-1 qubit idling in the last prep layer is copied to block 2
        let s = steane_sim(false);
        let last_prep = steane_encoder().depth();
        let (li, loc) = s
            .locations()
            .iter()
            .enumerate()
            .find(|(_, l)| l.moment == last_prep && l.kind == LocationKind::Idle && l.qubits.0 < 7)
            .unwrap();
        let q = loc.qubits.0;
        let r = s.inject(&[(li, 0)]);
        assert_eq!(r.effect.records[1], 1u64 << q);
        assert!(!r.accepted);
        assert_eq!(r.effect.residual_x, 1u64 << q);
    }

    proptest! {
        #[test]
        fn precomputed_matches_direct(picks in proptest::collection::vec((any::<prop::sample::Index>(), 0usize..15), 0..4), gadget in any::<bool>()) {
            let s = steane_sim(gadget);
            let faults: Vec<(usize, usize)> = picks
                .iter()
                .map(|(i, k)| {
                    let li = i.index(s.locations().len());
                    (li, k % s.locations()[li].kind.pauli_count())
                })
                .collect();
            prop_assert_eq!(s.inject(&faults), s.inject_direct(&faults));
        }
    }
}
