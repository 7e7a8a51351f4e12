//! CNOT preparation circuits: initialization bases, gate order, ASAP layering.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::code::CssCode;
use crate::gf2::{BitMatrix, BitVector, RowSpace};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitBasis {
    Zero,
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cnot {
    pub control: usize,
    pub target: usize,
}

impl Cnot {
    pub fn new(control: usize, target: usize) -> Self {
        Self { control, target }
    }

    pub fn touches(&self, q: usize) -> bool {
        self.control == q || self.target == q
    }
}

impl fmt::Display for Cnot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CX {} {}", self.control, self.target)
    }
}

/// Product-state initialization followed by CNOTs in temporal order.
///
/// The gate list is the only stored order; layers are derived on demand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrepCircuit {
    n: usize,
    init: Vec<InitBasis>,
    gates: Vec<Cnot>,
}

impl PrepCircuit {
    pub fn new(init: Vec<InitBasis>, gates: Vec<Cnot>) -> Result<Self> {
        let n = init.len();
        for (i, g) in gates.iter().enumerate() {
            if g.control >= n || g.target >= n {
                return Err(Error::Invalid(format!("gate {i} ({g}) has a qubit index >= {n}")));
            }
            if g.control == g.target {
                return Err(Error::Invalid(format!("gate {i}: control equals target")));
            }
        }
        Ok(Self { n, init, gates })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn init(&self) -> &[InitBasis] {
        &self.init
    }

    pub fn gates(&self) -> &[Cnot] {
        &self.gates
    }

    pub fn cx_count(&self) -> usize {
        self.gates.len()
    }

    pub fn count_init(&self, basis: InitBasis) -> usize {
        self.init.iter().filter(|&&b| b == basis).count()
    }

    /// ASAP layer index of every gate.
    pub fn layer_of(&self) -> Vec<usize> {
        let mut free = vec![0usize; self.n];
        self.gates
            .iter()
            .map(|g| {
                let l = free[g.control].max(free[g.target]);
                free[g.control] = l + 1;
                free[g.target] = l + 1;
                l
            })
            .collect()
    }

    /// Gate indices grouped by ASAP layer.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for (i, l) in self.layer_of().into_iter().enumerate() {
            if l == layers.len() {
                layers.push(Vec::new());
            }
            layers[l].push(i);
        }
        layers
    }

    pub fn depth(&self) -> usize {
        self.layer_of().into_iter().max().map_or(0, |l| l + 1)
    }

    /// X and Z stabilizer generators of the state this circuit prepares, as
    /// obtained by pushing the product-state generators through the gates.
    pub fn output_stabilizers(&self) -> (BitMatrix, BitMatrix) {
        let rows = |basis: InitBasis| -> Vec<BitVector> {
            (0..self.n)
                .filter(|&q| self.init[q] == basis)
                .map(|q| BitVector::from_indices(self.n, &[q]))
                .collect()
        };
        let mut sx = BitMatrix::from_rows(self.n, &rows(InitBasis::Plus));
        let mut sz = BitMatrix::from_rows(self.n, &rows(InitBasis::Zero));
        for g in &self.gates {
            sx.col_add_in_place(g.control, g.target);
            sz.col_add_in_place(g.target, g.control);
        }
        (sx, sz)
    }

    /// True iff the circuit prepares the logical `|0>` state of `code`: the X
    /// stabilizers span `h_x` and the Z stabilizers span `h_z` plus the
    /// logical Z operators.
    pub fn verify_prepares(&self, code: &CssCode) -> bool {
        assert_eq!(self.n, code.n(), "circuit and code qubit counts differ");
        if self.count_init(InitBasis::Plus) != code.m_x() {
            return false;
        }
        let (sx, sz) = self.output_stabilizers();
        let same_span = |a: &BitMatrix, b: &BitMatrix| RowSpace::new(a).to_matrix() == RowSpace::new(b).to_matrix();
        same_span(&sx, code.h_x()) && same_span(&sz, &code.h_z().stack(code.logicals_z()))
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("QUBITS {}\n", self.n);
        for (q, b) in self.init.iter().enumerate() {
            let c = match b {
                InitBasis::Zero => 'Z',
                InitBasis::Plus => 'P',
            };
            out.push_str(&format!("INIT {q} {c}\n"));
        }
        for g in &self.gates {
            out.push_str(&format!("{g}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut n: Option<usize> = None;
        let mut init: Vec<Option<InitBasis>> = Vec::new();
        let mut gates = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let index = |s: &str| -> Result<usize> {
                s.parse::<usize>()
                    .map_err(|_| err(line_no, format!("expected a qubit index, got '{s}'")))
            };
            match (toks[0], n) {
                ("QUBITS", None) => {
                    if toks.len() != 2 {
                        return Err(err(line_no, "expected 'QUBITS n'".into()));
                    }
                    let count = index(toks[1])?;
                    n = Some(count);
                    init = vec![None; count];
                }
                ("QUBITS", Some(_)) => return Err(err(line_no, "duplicate QUBITS header".into())),
                (_, None) => return Err(err(line_no, "missing QUBITS header".into())),
                ("INIT", Some(count)) => {
                    if toks.len() != 3 {
                        return Err(err(line_no, "expected 'INIT q Z|P'".into()));
                    }
                    let q = index(toks[1])?;
                    if q >= count {
                        return Err(err(line_no, format!("qubit {q} out of range for {count} qubits")));
                    }
                    let b = match toks[2] {
                        "Z" => InitBasis::Zero,
                        "P" => InitBasis::Plus,
                        other => return Err(err(line_no, format!("unknown basis '{other}', expected Z or P"))),
                    };
                    if init[q].replace(b).is_some() {
                        return Err(err(line_no, format!("qubit {q} initialized twice")));
                    }
                }
                ("CX", Some(count)) => {
                    if toks.len() != 3 {
                        return Err(err(line_no, "expected 'CX c t'".into()));
                    }
                    let (c, t) = (index(toks[1])?, index(toks[2])?);
                    if c >= count || t >= count {
                        return Err(err(line_no, format!("qubit index out of range for {count} qubits")));
                    }
                    if c == t {
                        return Err(err(line_no, "control equals target".into()));
                    }
                    gates.push(Cnot::new(c, t));
                }
                (op, Some(_)) => return Err(err(line_no, format!("unknown opcode '{op}'"))),
            }
        }
        if n.is_none() {
            return Err(err(last_line.max(1), "missing QUBITS header".into()));
        }
        let init = init
            .into_iter()
            .enumerate()
            .map(|(q, b)| b.ok_or_else(|| err(last_line, format!("qubit {q} has no INIT line"))))
            .collect::<Result<Vec<_>>>()?;
        PrepCircuit::new(init, gates)
    }
}
