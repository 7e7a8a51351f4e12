//! The four-block verification gadget.
//!
//! Blocks 1..=4 each hold one preparation circuit. Transversal CNOTs copy X
//! errors from control to target block and Z errors from target to control;
//! blocks 2 and 4 are measured in Z, block 3 in X, and block 1 survives.
//!
//! Time steps, used for scheduling and idle noise:
//!
//! 1. initialization of every qubit;
//! 2. the ASAP layers of all four preparation circuits, side by side;
//! 3. `TCX 1 2` and `TCX 3 4` in one layer, then `TCX 3 1`;
//! 4. measurement of blocks 2, 3, 4 while block 1 idles.

use serde::Serialize;

use crate::circuit::{InitBasis, PrepCircuit};
use crate::code::{Basis, CssCode};
use crate::gf2::BitVector;
use crate::{Error, Result};

pub const BLOCKS: usize = 4;

/// One physical operation in the flattened protocol, on global qubit indices
/// `block * n + q` (blocks zero-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Init { qubit: usize, basis: InitBasis },
    Cx { control: usize, target: usize },
    Idle { qubit: usize },
    Measure { qubit: usize, basis: Basis },
}

/// Operations that happen in parallel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moment {
    pub ops: Vec<Op>,
}

/// Four preparation circuits with the transversal rounds and measurements.
#[derive(Clone, Debug)]
pub struct ProtocolSchedule {
    code: CssCode,
    blocks: [PrepCircuit; BLOCKS],
    // zero-based (control block, target block), in temporal order
    transversal: Vec<(usize, usize)>,
    // zero-based block and basis
    measurements: Vec<(usize, Basis)>,
}

/// Depth of a schedule under the two counting conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProtocolDepth {
    /// Preparation layers plus transversal layers.
    pub cnot_layers: usize,
    /// Additionally counting the initialization and measurement steps.
    pub with_init_and_measurement: usize,
}

impl ProtocolSchedule {
    pub fn code(&self) -> &CssCode {
        &self.code
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn blocks(&self) -> &[PrepCircuit; BLOCKS] {
        &self.blocks
    }

    pub fn transversal(&self) -> &[(usize, usize)] {
        &self.transversal
    }

    pub fn measurements(&self) -> &[(usize, Basis)] {
        &self.measurements
    }

    pub fn total_qubits(&self) -> usize {
        BLOCKS * self.n()
    }

    /// The unmeasured block (zero-based).
    pub fn output_block(&self) -> usize {
        (0..BLOCKS)
            .find(|b| self.measurements.iter().all(|m| m.0 != *b))
            .expect("validated schedules have one survivor")
    }

    pub fn measurement_basis(&self, block: usize) -> Option<Basis> {
        self.measurements.iter().find(|m| m.0 == block).map(|m| m.1)
    }

    /// Transversal rounds grouped into ASAP layers over blocks.
    pub fn transversal_layers(&self) -> Vec<Vec<(usize, usize)>> {
        let mut free = [0usize; BLOCKS];
        let mut layers: Vec<Vec<(usize, usize)>> = Vec::new();
        for &(a, b) in &self.transversal {
            let l = free[a].max(free[b]);
            free[a] = l + 1;
            free[b] = l + 1;
            if l == layers.len() {
                layers.push(Vec::new());
            }
            layers[l].push((a, b));
        }
        layers
    }

    pub fn prep_depth(&self) -> usize {
        self.blocks.iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn depth(&self) -> ProtocolDepth {
        let cnot_layers = self.prep_depth() + self.transversal_layers().len();
        ProtocolDepth {
            cnot_layers,
            with_init_and_measurement: cnot_layers + 2,
        }
    }

    pub fn total_cx(&self) -> usize {
        self.blocks.iter().map(|c| c.cx_count()).sum::<usize>() + self.transversal.len() * self.n()
    }

    /// The flattened schedule. Every qubit not acted on in a gate or
    /// measurement step gets an explicit [`Op::Idle`].
    pub fn timeline(&self) -> Vec<Moment> {
        let n = self.n();
        let total = self.total_qubits();
        let mut moments = Vec::new();

        let mut init = Vec::with_capacity(total);
        for (b, c) in self.blocks.iter().enumerate() {
            for (q, &basis) in c.init().iter().enumerate() {
                init.push(Op::Init {
                    qubit: b * n + q,
                    basis,
                });
            }
        }
        moments.push(Moment { ops: init });

        let with_idles = |gates: Vec<(usize, usize)>| {
            let mut busy = vec![false; total];
            let mut ops = Vec::with_capacity(total);
            for &(c, t) in &gates {
                busy[c] = true;
                busy[t] = true;
                ops.push(Op::Cx { control: c, target: t });
            }
            ops.extend((0..total).filter(|&q| !busy[q]).map(|qubit| Op::Idle { qubit }));
            Moment { ops }
        };

        let layers: Vec<Vec<Vec<usize>>> = self.blocks.iter().map(|c| c.layers()).collect();
        for l in 0..self.prep_depth() {
            let mut gates = Vec::new();
            for (b, c) in self.blocks.iter().enumerate() {
                if let Some(layer) = layers[b].get(l) {
                    gates.extend(layer.iter().map(|&g| {
                        let g = c.gates()[g];
                        (b * n + g.control, b * n + g.target)
                    }));
                }
            }
            moments.push(with_idles(gates));
        }

        for layer in self.transversal_layers() {
            let gates = layer
                .iter()
                .flat_map(|&(a, b)| (0..n).map(move |q| (a * n + q, b * n + q)))
                .collect();
            moments.push(with_idles(gates));
        }

        let mut ops = Vec::with_capacity(total);
        for b in 0..BLOCKS {
            for q in 0..n {
                let qubit = b * n + q;
                ops.push(match self.measurement_basis(b) {
                    Some(basis) => Op::Measure { qubit, basis },
                    None => Op::Idle { qubit },
                });
            }
        }
        moments.push(Moment { ops });
        moments
    }

    /// Protocol text: the circuit format per block, introduced by `BLOCK b`,
    /// followed by `TCX a b` and `MEAS b Z|X` lines. Blocks are numbered 1..=4.
    pub fn serialize(&self) -> String {
        let mut out = format!("# protocol for {}\n", self.code.name());
        for (b, c) in self.blocks.iter().enumerate() {
            out.push_str(&format!("BLOCK {}\n", b + 1));
            out.push_str(&c.serialize());
        }
        for &(a, b) in &self.transversal {
            out.push_str(&format!("TCX {} {}\n", a + 1, b + 1));
        }
        for &(b, basis) in &self.measurements {
            out.push_str(&format!("MEAS {} {basis}\n", b + 1));
        }
        out
    }

    pub fn parse(text: &str, code: &CssCode) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut block_text: [Option<(usize, String)>; BLOCKS] = Default::default();
        let mut current: Option<usize> = None;
        let mut transversal = Vec::new();
        let mut measurements = Vec::new();
        let block_index = |s: &str, line: usize| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(b) if (1..=BLOCKS).contains(&b) => Ok(b - 1),
                _ => Err(err(line, format!("expected a block number 1-{BLOCKS}, got '{s}'"))),
            }
        };
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "BLOCK" => {
                    if toks.len() != 2 {
                        return Err(err(line_no, "expected 'BLOCK b'".into()));
                    }
                    let b = block_index(toks[1], line_no)?;
                    if block_text[b].is_some() {
                        return Err(err(line_no, format!("block {} defined twice", b + 1)));
                    }
                    block_text[b] = Some((line_no, String::new()));
                    current = Some(b);
                }
                "TCX" => {
                    if toks.len() != 3 {
                        return Err(err(line_no, "expected 'TCX a b'".into()));
                    }
                    if !measurements.is_empty() {
                        return Err(err(line_no, "TCX after a measurement".into()));
                    }
                    let (a, b) = (block_index(toks[1], line_no)?, block_index(toks[2], line_no)?);
                    if a == b {
                        return Err(err(line_no, "control equals target".into()));
                    }
                    transversal.push((a, b));
                    current = None;
                }
                "MEAS" => {
                    if toks.len() != 3 {
                        return Err(err(line_no, "expected 'MEAS b Z|X'".into()));
                    }
                    let b = block_index(toks[1], line_no)?;
                    let basis = match toks[2] {
                        "Z" => Basis::Z,
                        "X" => Basis::X,
                        other => return Err(err(line_no, format!("unknown basis '{other}', expected Z or X"))),
                    };
                    if measurements.iter().any(|m: &(usize, Basis)| m.0 == b) {
                        return Err(err(line_no, format!("block {} measured twice", b + 1)));
                    }
                    measurements.push((b, basis));
                    current = None;
                }
                _ => {
                    let Some(b) = current else {
                        return Err(err(line_no, format!("'{}' outside a BLOCK section", toks[0])));
                    };
                    let entry = block_text[b].as_mut().expect("current block exists");
                    // keep line numbers aligned with the enclosing file
                    while entry.1.lines().count() + entry.0 < line_no - 1 {
                        entry.1.push('\n');
                    }
                    entry.1.push_str(raw);
                    entry.1.push('\n');
                }
            }
        }
        let mut blocks = Vec::with_capacity(BLOCKS);
        for (b, entry) in block_text.into_iter().enumerate() {
            let Some((start, body)) = entry else {
                return Err(err(text.lines().count(), format!("missing BLOCK {}", b + 1)));
            };
            let c = PrepCircuit::parse(&body).map_err(|e| match e {
                Error::Parse { line, msg } => err(start + line, msg),
                other => other,
            })?;
            blocks.push(c);
        }
        let blocks: [PrepCircuit; BLOCKS] = blocks.try_into().expect("four blocks");
        Self::assemble(blocks, transversal, measurements, code)
    }

    fn assemble(
        blocks: [PrepCircuit; BLOCKS],
        transversal: Vec<(usize, usize)>,
        measurements: Vec<(usize, Basis)>,
        code: &CssCode,
    ) -> Result<Self> {
        for (b, c) in blocks.iter().enumerate() {
            if c.n() != code.n() {
                return Err(Error::Invalid(format!(
                    "block {} has {} qubits but the code has {}",
                    b + 1,
                    c.n(),
                    code.n()
                )));
            }
        }
        if measurements.len() != BLOCKS - 1 {
            return Err(Error::Invalid(format!(
                "expected {} measured blocks and one survivor, got {} measurements",
                BLOCKS - 1,
                measurements.len()
            )));
        }
        Ok(Self {
            code: code.clone(),
            blocks,
            transversal,
            measurements,
        })
    }
}

/// The standard gadget: `TCX 1 2`, `TCX 3 4`, `TCX 3 1`, then measure 2 in Z, 3 in X, 4 in Z.
pub fn build_protocol(circuits: [&PrepCircuit; 4], code: &CssCode) -> Result<ProtocolSchedule> {
    ProtocolSchedule::assemble(
        circuits.map(|c| c.clone()),
        vec![(0, 1), (2, 3), (2, 0)],
        vec![(1, Basis::Z), (2, Basis::X), (3, Basis::Z)],
        code,
    )
}

/// Parities of one measured block that the noiseless gadget fixes to zero.
///
/// A Z-basis record of `|0>_L` has trivial `h_z` syndrome and logical Z
/// parity. An X-basis record of `|0>_L` has trivial `h_x` syndrome; its
/// logical X parity is uniformly random and carries no information.
pub fn block_trivial(code: &CssCode, basis: Basis, m: &BitVector) -> bool {
    match basis {
        Basis::Z => code.h_z().mul_vec(m).is_zero() && code.logicals_z().mul_vec(m).is_zero(),
        Basis::X => code.h_x().mul_vec(m).is_zero(),
    }
}

/// Acceptance of the standard gadget from the frame records of blocks 2 (Z), 3 (X) and 4 (Z).
pub fn acceptance(code: &CssCode, m2: &BitVector, m3: &BitVector, m4: &BitVector) -> bool {
    block_trivial(code, Basis::Z, m2) && block_trivial(code, Basis::X, m3) && block_trivial(code, Basis::Z, m4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::tests::steane_encoder;
    use crate::code::registry_lookup;

    fn steane_schedule() -> ProtocolSchedule {
        let code = registry_lookup("steane").unwrap();
        let c = steane_encoder();
        build_protocol([&c, &c, &c, &c], &code).unwrap()
    }

    #[test]
    fn steane_layout() {
        let s = steane_schedule();
        assert_eq!(s.total_qubits(), 28);
        let layers = s.transversal_layers();
        assert_eq!(layers.len(), 2);
        assert_eq!(layers[0].len() * s.n(), 14);
        assert_eq!(layers[1].len() * s.n(), 7);
        assert_eq!(s.output_block(), 0);
        assert_eq!(s.depth().cnot_layers, steane_encoder().depth() + 2);
    }

    #[test]
    fn timeline_covers_every_qubit_each_step() {
        let s = steane_schedule();
        for m in s.timeline() {
            let mut seen = vec![0; s.total_qubits()];
            for op in &m.ops {
                match *op {
                    Op::Init { qubit, .. } | Op::Idle { qubit } | Op::Measure { qubit, .. } => seen[qubit] += 1,
                    Op::Cx { control, target } => {
                        seen[control] += 1;
                        seen[target] += 1;
                    }
                }
            }
            assert!(seen.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn acceptance_examples() {
        let code = registry_lookup("steane").unwrap();
        let z = BitVector::zeros(7);
        assert!(acceptance(&code, &z, &z, &z));
        let flipped = BitVector::from_indices(7, &[0]);
        assert!(!acceptance(&code, &flipped, &z, &z));
        let stab = code.h_z().row(0);
        assert!(acceptance(&code, &stab, &z, &z));
        // a logical Z-basis outcome flip is rejected
        let lx = code.logicals_x().row(0);
        assert!(!acceptance(&code, &lx, &z, &z));
    }

    #[test]
    fn text_round_trip() {
        let s = steane_schedule();
        let text = s.serialize();
        assert!(text.contains("TCX 1 2") && text.contains("MEAS 3 X"));
        let back = ProtocolSchedule::parse(&text, s.code()).unwrap();
        assert_eq!(back.serialize(), text);
        let bad = text.replace("TCX 3 1", "TCX 3 3");
        assert!(ProtocolSchedule::parse(&bad, s.code()).is_err());
        let broken = text.replacen("CX 0 2", "CX 0 0", 1);
        match ProtocolSchedule::parse(&broken, s.code()) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(text.lines().nth(line - 1).unwrap(), "CX 0 2");
                assert!(msg.contains("control equals target"));
            }
            other => panic!("{other:?}"),
        }
    }
}
