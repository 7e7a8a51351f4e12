//! Stabilizer tableau stored column-major: bit `r` of `x[q]` is the X part of
//! row `r` on qubit `q`. Rows `0..n` are destabilizers, `n..2n` stabilizers,
//! row `2n` is scratch.

use ftsp::code::Basis;
use ftsp::protocol::{Op, ProtocolSchedule, BLOCKS};
use ftsp::sim::{FrameSim, LocationKind};
use ftsp::{CssCode, InitBasis, PrepCircuit};

use super::odd;

#[derive(Clone, Debug)]
pub struct Tableau {
    n: usize,
    x: Vec<u128>,
    z: Vec<u128>,
    r: u128,
}

impl Tableau {
    /// `|0...0>` on `n` qubits.
    pub fn new(n: usize) -> Self {
        assert!(2 * n < 128);
        let mut t = Tableau {
            n,
            x: vec![0; n],
            z: vec![0; n],
            r: 0,
        };
        for q in 0..n {
            t.x[q] |= 1u128 << q;
            t.z[q] |= 1u128 << (n + q);
        }
        t
    }

    pub fn h(&mut self, q: usize) {
        self.r ^= self.x[q] & self.z[q];
        std::mem::swap(&mut self.x[q], &mut self.z[q]);
    }

    pub fn cx(&mut self, a: usize, b: usize) {
        self.r ^= self.x[a] & self.z[b] & !(self.x[b] ^ self.z[a]);
        self.x[b] ^= self.x[a];
        self.z[a] ^= self.z[b];
    }

    /// Applies the Pauli with X part `px` and Z part `pz` on qubit `q`.
    pub fn pauli(&mut self, q: usize, px: bool, pz: bool) {
        if px {
            self.r ^= self.z[q];
        }
        if pz {
            self.r ^= self.x[q];
        }
    }

    fn bit(v: u128, row: usize) -> bool {
        v >> row & 1 == 1
    }

    // row h := row i * row h
    fn rowsum(&mut self, h: usize, i: usize) {
        let mut e: i32 = 0;
        for q in 0..self.n {
            let (x1, z1) = (Self::bit(self.x[q], i), Self::bit(self.z[q], i));
            let (x2, z2) = (Self::bit(self.x[q], h), Self::bit(self.z[q], h));
            e += match (x1, z1) {
                (false, false) => 0,
                (true, true) => z2 as i32 - x2 as i32,
                (true, false) => z2 as i32 * (2 * x2 as i32 - 1),
                (false, true) => x2 as i32 * (1 - 2 * z2 as i32),
            };
        }
        e += 2 * Self::bit(self.r, h) as i32 + 2 * Self::bit(self.r, i) as i32;
        let m = e.rem_euclid(4);
        assert!(m == 0 || m == 2, "stabilizer rows must commute");
        self.set_r(h, m == 2);
        for q in 0..self.n {
            if Self::bit(self.x[q], i) {
                self.x[q] ^= 1u128 << h;
            }
            if Self::bit(self.z[q], i) {
                self.z[q] ^= 1u128 << h;
            }
        }
    }

    fn set_r(&mut self, row: usize, v: bool) {
        self.r = (self.r & !(1u128 << row)) | (u128::from(v) << row);
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        for q in 0..self.n {
            let xb = Self::bit(self.x[q], src);
            let zb = Self::bit(self.z[q], src);
            self.x[q] = (self.x[q] & !(1u128 << dst)) | (u128::from(xb) << dst);
            self.z[q] = (self.z[q] & !(1u128 << dst)) | (u128::from(zb) << dst);
        }
        let rb = Self::bit(self.r, src);
        self.set_r(dst, rb);
    }

    fn clear_row(&mut self, row: usize) {
        for q in 0..self.n {
            self.x[q] &= !(1u128 << row);
            self.z[q] &= !(1u128 << row);
        }
        self.set_r(row, false);
    }

    /// Z measurement; random outcomes are taken as 0.
    pub fn measure_z(&mut self, a: usize) -> bool {
        let n = self.n;
        let stab_mask = ((1u128 << n) - 1) << n;
        let hits = self.x[a] & stab_mask;
        if hits != 0 {
            let p = hits.trailing_zeros() as usize;
            for i in 0..2 * n {
                if i != p && Self::bit(self.x[a], i) {
                    self.rowsum(i, p);
                }
            }
            self.copy_row(p - n, p);
            self.clear_row(p);
            self.z[a] |= 1u128 << p;
            false
        } else {
            let s = 2 * n;
            self.clear_row(s);
            for i in 0..n {
                if Self::bit(self.x[a], i) {
                    self.rowsum(s, i + n);
                }
            }
            Self::bit(self.r, s)
        }
    }

    pub fn measure_x(&mut self, a: usize) -> bool {
        self.h(a);
        let m = self.measure_z(a);
        self.h(a);
        m
    }

    /// Sign of a Pauli without Y parts (X part `px`, Z part `pz`, bit q =
    /// qubit q): `Some(false)` for +1, `Some(true)` for -1, `None` if random.
    pub fn expectation(&mut self, px: u64, pz: u64) -> Option<bool> {
        let n = self.n;
        let row_anticommutes = |t: &Tableau, row: usize| {
            let mut parity = false;
            for q in 0..n {
                let (x, z) = (Self::bit(t.x[q], row), Self::bit(t.z[q], row));
                parity ^= (x && pz >> q & 1 == 1) ^ (z && px >> q & 1 == 1);
            }
            parity
        };
        if (n..2 * n).any(|row| row_anticommutes(self, row)) {
            return None;
        }
        let s = 2 * n;
        self.clear_row(s);
        for i in 0..n {
            if row_anticommutes(self, i) {
                self.rowsum(s, i + n);
            }
        }
        for q in 0..n {
            assert_eq!(Self::bit(self.x[q], s), px >> q & 1 == 1);
            assert_eq!(Self::bit(self.z[q], s), pz >> q & 1 == 1);
        }
        Some(Self::bit(self.r, s))
    }
}

/// Deterministic observables of one shot, each `true` when flipped relative
/// to the noiseless run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observables {
    /// Acceptance parities of the measured blocks.
    pub checks: Vec<bool>,
    /// Survivor block: X stabilizers, then Z stabilizers and logical Z.
    pub survivor: Vec<bool>,
    /// Z gadget: X-check parities of the record, then X stabilizers and logical X of the copy.
    pub gadget: Vec<bool>,
}

fn check_rows(code: &CssCode, basis: Basis) -> Vec<u64> {
    match basis {
        Basis::Z => code
            .h_z()
            .row_words64()
            .into_iter()
            .chain(code.logicals_z().row_words64())
            .collect(),
        Basis::X => code.h_x().row_words64(),
    }
}

fn survivor_rows(code: &CssCode) -> (Vec<u64>, Vec<u64>) {
    (code.h_x().row_words64(), check_rows(code, Basis::Z))
}

fn gadget_rows(code: &CssCode) -> Vec<u64> {
    code.h_x()
        .row_words64()
        .into_iter()
        .chain(code.logicals_x().row_words64())
        .collect()
}

/// Observables predicted by the frame simulator.
pub fn frame_observables(schedule: &ProtocolSchedule, sim: &FrameSim, faults: &[(usize, usize)]) -> Observables {
    let code = schedule.code();
    let e = sim.inject(faults).effect;
    let mut checks = Vec::new();
    for &(b, basis) in schedule.measurements() {
        checks.extend(check_rows(code, basis).iter().map(|&r| odd(r, e.records[b])));
    }
    let (xs, zs) = survivor_rows(code);
    let mut survivor: Vec<bool> = xs.iter().map(|&r| odd(r, e.residual_z)).collect();
    survivor.extend(zs.iter().map(|&r| odd(r, e.residual_x)));
    let mut gadget = Vec::new();
    if sim.has_gadget() {
        gadget.extend(code.h_x().row_words64().iter().map(|&r| odd(r, e.gadget_record)));
        gadget.extend(gadget_rows(code).iter().map(|&r| odd(r, e.gadget_z)));
    }
    Observables {
        checks,
        survivor,
        gadget,
    }
}

// decodes the simulator's location conventions independently
fn apply_fault(t: &mut Tableau, kind: LocationKind, qubits: (usize, usize), pauli: usize, flip: &mut bool) {
    let single = |k: usize| [(true, false), (false, true), (true, true)][k];
    match kind {
        LocationKind::Init(InitBasis::Zero) => t.pauli(qubits.0, true, false),
        LocationKind::Init(InitBasis::Plus) => t.pauli(qubits.0, false, true),
        LocationKind::Measure(_) => *flip = !*flip,
        LocationKind::Idle | LocationKind::Depolarize => {
            let (x, z) = single(pauli);
            t.pauli(qubits.0, x, z);
        }
        LocationKind::Cx => {
            // index + 1 = c + 4 t with 1 = X, 2 = Z, 3 = Y on each qubit
            let code = pauli + 1;
            let (c, tg) = (code % 4, code / 4);
            t.pauli(qubits.0, c & 1 == 1, c & 2 == 2);
            t.pauli(qubits.1, tg & 1 == 1, tg & 2 == 2);
        }
    }
}

/// Observables from a full tableau simulation with the listed faults.
/// `plus_prep` prepares the code's `|0>`; with transversal Hadamards it
/// yields the ideal `|+>` of the gadget (valid for self-dual codes).
pub fn tableau_observables(
    schedule: &ProtocolSchedule,
    sim: &FrameSim,
    faults: &[(usize, usize)],
    plus_prep: &PrepCircuit,
) -> Observables {
    let code = schedule.code();
    let n = schedule.n();
    let gadget = sim.has_gadget();
    let total = BLOCKS * n + if gadget { n } else { 0 };
    let mut t = Tableau::new(total);
    let locs: Vec<_> = faults.iter().map(|&(l, p)| (sim.locations()[l], p)).collect();
    let faults_at = |moment: usize, qubits: (usize, usize)| {
        locs.iter()
            .filter(move |(l, _)| l.moment == moment && l.qubits == qubits)
            .map(|(l, p)| (l.kind, l.qubits, *p))
            .collect::<Vec<_>>()
    };
    let mut records = [0u64; BLOCKS];
    let timeline = schedule.timeline();
    for (mi, moment) in timeline.iter().enumerate() {
        for op in &moment.ops {
            let (qubits, outcome) = match *op {
                Op::Init { qubit, basis } => {
                    if basis == InitBasis::Plus {
                        t.h(qubit);
                    }
                    ((qubit, qubit), None)
                }
                Op::Cx { control, target } => {
                    t.cx(control, target);
                    ((control, target), None)
                }
                Op::Idle { qubit } => ((qubit, qubit), None),
                Op::Measure { qubit, basis } => {
                    let m = match basis {
                        Basis::Z => t.measure_z(qubit),
                        Basis::X => t.measure_x(qubit),
                    };
                    ((qubit, qubit), Some(m))
                }
            };
            let mut flip = false;
            for (kind, qs, p) in faults_at(mi, qubits) {
                apply_fault(&mut t, kind, qs, p, &mut flip);
            }
            if let Some(m) = outcome {
                if m ^ flip {
                    records[qubits.0 / n] |= 1u64 << (qubits.0 % n);
                }
            }
        }
    }
    let mut checks = Vec::new();
    for &(b, basis) in schedule.measurements() {
        checks.extend(check_rows(code, basis).iter().map(|&r| odd(r, records[b])));
    }
    let base = schedule.output_block() * n;
    let (xs, zs) = survivor_rows(code);
    let mut survivor: Vec<bool> = xs
        .iter()
        .map(|&r| t.expectation(r << base, 0).expect("X stabilizer is deterministic"))
        .collect();
    survivor.extend(
        zs.iter()
            .map(|&r| t.expectation(0, r << base).expect("Z stabilizer is deterministic")),
    );

    let mut gadget_obs = Vec::new();
    if gadget {
        let pb = BLOCKS * n;
        for (q, &b) in plus_prep.init().iter().enumerate() {
            if b == InitBasis::Plus {
                t.h(pb + q);
            }
        }
        for g in plus_prep.gates() {
            t.cx(pb + g.control, pb + g.target);
        }
        for q in 0..n {
            t.h(pb + q);
        }
        let start = timeline.len();
        for q in 0..n {
            let mut flip = false;
            for (kind, qs, p) in faults_at(start, (pb + q, pb + q)) {
                apply_fault(&mut t, kind, qs, p, &mut flip);
            }
        }
        for q in 0..n {
            t.cx(base + q, pb + q);
            let mut flip = false;
            for (kind, qs, p) in faults_at(start + 1, (base + q, pb + q)) {
                apply_fault(&mut t, kind, qs, p, &mut flip);
            }
        }
        let mut record = 0u64;
        for q in 0..n {
            let m = t.measure_x(base + q);
            let mut flip = false;
            for (kind, qs, p) in faults_at(start + 2, (base + q, base + q)) {
                apply_fault(&mut t, kind, qs, p, &mut flip);
            }
            if m ^ flip {
                record |= 1u64 << q;
            }
        }
        gadget_obs.extend(code.h_x().row_words64().iter().map(|&r| odd(r, record)));
        for r in gadget_rows(code) {
            gadget_obs.push(t.expectation(r << pb, 0).expect("copy stabilizer is deterministic"));
        }
    }
    Observables {
        checks,
        survivor,
        gadget: gadget_obs,
    }
}
