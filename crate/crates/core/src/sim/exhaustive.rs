//! Exhaustive fault injection and witness replay.

use serde::Serialize;

use crate::code::{Basis, CssCode, WEIGHT_CAP};
use crate::faults::fault_set;
use crate::ftcheck::DistinctnessWitness;
use crate::protocol::ProtocolSchedule;
use crate::{Error, Result};

use super::frame::{two_qubit_pauli, Effect, FrameSim, Location, LocationKind};

/// Default cap on the number of enumerated fault combinations.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

/// Options for [`exhaustive_inject`].
#[derive(Clone, Copy, Debug)]
pub struct InjectConfig {
    /// Largest number of simultaneous faults.
    pub max_faults: usize,
    /// Refuse to run when more combinations than this would be enumerated.
    pub budget: u128,
    /// Only inject at initialization and preparation-layer locations.
    pub prep_only: bool,
    /// Keep at most this many counterexamples in the report.
    pub keep: usize,
}

impl InjectConfig {
    pub fn new(max_faults: usize) -> Self {
        Self {
            max_faults,
            budget: DEFAULT_BUDGET,
            prep_only: false,
            keep: 100,
        }
    }
}

/// One injected fault, described for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaultEvent {
    pub location: usize,
    pub moment: usize,
    pub kind: String,
    pub qubits: Vec<usize>,
    pub pauli: String,
}

/// An accepted fault combination leaving a residual heavier than its size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub faults: Vec<FaultEvent>,
    pub residual_x: Vec<usize>,
    pub residual_z: Vec<usize>,
    pub x_too_heavy: bool,
    pub z_too_heavy: bool,
}

/// Result of [`exhaustive_inject`]. An empty counterexample list means the
/// protocol is strictly fault tolerant up to `max_faults` faults.
#[derive(Clone, Debug, Serialize)]
pub struct InjectReport {
    pub code: String,
    pub max_faults: usize,
    pub prep_only: bool,
    pub locations: usize,
    pub events: usize,
    pub combinations: u128,
    pub accepted: u128,
    pub counterexample_count: u128,
    pub counterexamples: Vec<Counterexample>,
}

impl InjectReport {
    pub fn passed(&self) -> bool {
        self.counterexample_count == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn pauli_label(kind: LocationKind, pauli: usize) -> String {
    let single = |x: bool, z: bool| match (x, z) {
        (false, false) => 'I',
        (true, false) => 'X',
        (false, true) => 'Z',
        (true, true) => 'Y',
    };
    match kind {
        LocationKind::Init(crate::circuit::InitBasis::Zero) => "X".into(),
        LocationKind::Init(crate::circuit::InitBasis::Plus) => "Z".into(),
        LocationKind::Measure(_) => "flip".into(),
        LocationKind::Idle | LocationKind::Depolarize => ["X", "Z", "Y"][pauli].into(),
        LocationKind::Cx => {
            let ((xc, zc), (xt, zt)) = two_qubit_pauli(pauli);
            [single(xc, zc), single(xt, zt)].iter().collect()
        }
    }
}

fn kind_label(kind: LocationKind) -> String {
    match kind {
        LocationKind::Init(_) => "init",
        LocationKind::Cx => "cx",
        LocationKind::Idle => "idle",
        LocationKind::Measure(_) => "measure",
        LocationKind::Depolarize => "depolarize",
    }
    .into()
}

/// Describes a (location, Pauli) pair of `sim`.
pub fn describe(sim: &FrameSim, loc: usize, pauli: usize) -> FaultEvent {
    let l: &Location = &sim.locations()[loc];
    let qubits = if l.kind == LocationKind::Cx {
        vec![l.qubits.0, l.qubits.1]
    } else {
        vec![l.qubits.0]
    };
    FaultEvent {
        location: loc,
        moment: l.moment,
        kind: kind_label(l.kind),
        qubits,
        pauli: pauli_label(l.kind, pauli),
    }
}

fn qubits(w: u64) -> Vec<usize> {
    (0..64).filter(|q| w >> q & 1 == 1).collect()
}

/// Whether the output residual of `e` is heavier than `faults` in X or Z.
pub fn residual_too_heavy(code: &CssCode, e: &Effect, faults: usize) -> Result<(bool, bool)> {
    let heavy =
        |basis: Basis, w: u64| -> Result<bool> { Ok(code.error_group(basis).min_weight_upto(w, faults)?.is_none()) };
    Ok((heavy(Basis::X, e.residual_x)?, heavy(Basis::Z, e.residual_z)?))
}

// elementary symmetric polynomial e_k of the per-location event counts
fn combination_count(counts: &[usize], k: usize) -> u128 {
    let mut e = vec![0u128; k + 1];
    e[0] = 1;
    for &c in counts {
        for j in (1..=k).rev() {
            e[j] = e[j].saturating_add(e[j - 1].saturating_mul(c as u128));
        }
    }
    e[1..].iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// Injects every combination of at most `cfg.max_faults` faults at distinct
/// locations and reports accepted runs whose output residual is heavier,
/// modulo the stabilizers of the logical `|0>`, than the number of faults.
pub fn exhaustive_inject(schedule: &ProtocolSchedule, cfg: &InjectConfig) -> Result<InjectReport> {
    let code = schedule.code();
    if cfg.max_faults > WEIGHT_CAP {
        return Err(Error::CapExceeded {
            what: "injected fault count",
            value: cfg.max_faults,
            cap: WEIGHT_CAP,
        });
    }
    let sim = FrameSim::new(schedule, false);
    let prep_end = schedule.prep_depth();
    let locs: Vec<usize> = (0..sim.locations().len())
        .filter(|&i| !cfg.prep_only || sim.locations()[i].moment <= prep_end)
        .collect();
    let counts: Vec<usize> = locs.iter().map(|&i| sim.locations()[i].kind.pauli_count()).collect();
    let combinations = combination_count(&counts, cfg.max_faults);
    if combinations > cfg.budget {
        return Err(Error::CapExceeded {
            what: "fault combinations",
            value: usize::try_from(combinations).unwrap_or(usize::MAX),
            cap: usize::try_from(cfg.budget).unwrap_or(usize::MAX),
        });
    }
    let mut report = InjectReport {
        code: code.name().to_string(),
        max_faults: cfg.max_faults,
        prep_only: cfg.prep_only,
        locations: locs.len(),
        events: counts.iter().sum(),
        combinations,
        accepted: 0,
        counterexample_count: 0,
        counterexamples: Vec::new(),
    };
    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(cfg.max_faults);
    recurse(&sim, code, cfg, &locs, 0, Effect::default(), &mut chosen, &mut report)?;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    sim: &FrameSim,
    code: &CssCode,
    cfg: &InjectConfig,
    locs: &[usize],
    from: usize,
    acc: Effect,
    chosen: &mut Vec<(usize, usize)>,
    report: &mut InjectReport,
) -> Result<()> {
    if chosen.len() == cfg.max_faults {
        return Ok(());
    }
    for (i, &li) in locs.iter().enumerate().skip(from) {
        for pauli in 0..sim.locations()[li].kind.pauli_count() {
            let mut e = acc;
            e ^= sim.effect(li, pauli);
            chosen.push((li, pauli));
            if sim.acceptance().accepts(&e.records) {
                report.accepted += 1;
                let (hx, hz) = residual_too_heavy(code, &e, chosen.len())?;
                if hx || hz {
                    report.counterexample_count += 1;
                    if report.counterexamples.len() < cfg.keep {
                        report.counterexamples.push(Counterexample {
                            faults: chosen.iter().map(|&(l, p)| describe(sim, l, p)).collect(),
                            residual_x: qubits(e.residual_x),
                            residual_z: qubits(e.residual_z),
                            x_too_heavy: hx,
                            z_too_heavy: hz,
                        });
                    }
                }
            }
            recurse(sim, code, cfg, locs, i + 1, e, chosen, report)?;
            chosen.pop();
        }
    }
    Ok(())
}

/// Maps the fault-set elements of a distinctness witness for protocol
/// condition `condition` (1 to 3) to concrete gate faults of the schedule:
/// an X-type element becomes `XX` after its originating CNOT, a Z-type one
/// `ZZ`, and a bare single-qubit error a fault in the last preparation layer.
pub fn replay_witness(
    schedule: &ProtocolSchedule,
    sim: &FrameSim,
    condition: usize,
    witness: &DistinctnessWitness,
) -> Result<Vec<(usize, usize)>> {
    let (left, right) = match condition {
        1 => ([0, 0], [1, 1]),
        2 => ([2, 2], [3, 3]),
        3 => ([0, 1], [2, 3]),
        _ => return Err(Error::Invalid(format!("no protocol condition {condition}"))),
    };
    let mut out = Vec::new();
    for (subset, blocks) in [(&witness.subset_1, left), (&witness.subset_2, right)] {
        for &e in subset {
            let fault = blocks
                .iter()
                .find_map(|&b| locate(schedule, sim, b, witness.basis, e))
                .ok_or_else(|| Error::Invalid(format!("witness element {:?} not in a fault set", qubits(e))))?;
            out.push(fault);
        }
    }
    Ok(out)
}

fn locate(schedule: &ProtocolSchedule, sim: &FrameSim, block: usize, basis: Basis, e: u64) -> Option<(usize, usize)> {
    let circuit = &schedule.blocks()[block];
    let set = fault_set(circuit, basis);
    let idx = set.words().iter().position(|&w| w == e)?;
    let origin = set.origins()[idx];
    let n = schedule.n();
    let find = |moment: usize, pred: &dyn Fn(&Location) -> bool| {
        sim.locations().iter().position(|l| l.moment == moment && pred(l))
    };
    if origin.gate < circuit.cx_count() {
        let g = circuit.gates()[origin.gate];
        let moment = 1 + circuit.layer_of()[origin.gate];
        let qs = (block * n + g.control, block * n + g.target);
        let li = find(moment, &|l| l.kind == LocationKind::Cx && l.qubits == qs)?;
        // XX is Pauli index 4, ZZ index 9
        return Some((li, if basis == Basis::X { 4 } else { 9 }));
    }
    let q = block * n + origin.qubit;
    let moment = schedule.prep_depth();
    if moment == 0 {
        return None;
    }
    let li = find(moment, &|l| {
        l.qubits.0 == q || (l.kind == LocationKind::Cx && l.qubits.1 == q)
    })?;
    let loc = sim.locations()[li];
    let pauli = match loc.kind {
        LocationKind::Idle => usize::from(basis == Basis::Z),
        LocationKind::Cx => {
            let on_control = loc.qubits.0 == q;
            let bit = if basis == Basis::X { 1 } else { 2 };
            let code = if on_control { bit } else { bit << 2 };
            code - 1
        }
        _ => return None,
    };
    Some((li, pauli))
}
