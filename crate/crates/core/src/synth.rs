//! Preparation-circuit synthesis by column elimination of `h_x`.
//!
//! A CNOT `c → t` acts on the X check matrix as "add column `c` to column
//! `t`". Eliminating `h_x` down to `m_X` unit columns and reversing the gate
//! sequence gives a circuit that prepares the code state from `|+>` on the
//! surviving columns and `|0>` elsewhere. Because the circuit is built from
//! its end, each newly chosen gate is prepended, and fault sets only grow.
//!
//! [`guided_synth`] runs the same elimination as a depth-first search that
//! rejects gates whose new faults break `t`-distinctness to a reference fault
//! set, backtracking and restarting as needed.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Cnot, InitBasis, PrepCircuit};
use crate::code::{Basis, CssCode};
use crate::faults::{fault_set, FaultSet, SuffixImages};
use crate::ftcheck::{incremental_distinct_indexed, verify_quadruple, RefIndex, DISTINCT_CAP};
use crate::gf2::{BitMatrix, BitVector};
use crate::{Error, Result};

/// Search parameters. Every field has a default, so a partial JSON object is a valid config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    /// Backtracks allowed before a restart.
    pub max_backtracks: usize,
    pub max_restarts: usize,
    /// Probability, per search level, of trying the second-best cost tier first.
    pub perturbation_prob: f64,
    /// Forbid sharing a final-layer CNOT with a reference circuit.
    pub forbid_ref_last_layer: bool,
    /// Forbid reproducing a reference's final `CX_ij CX_jk` chain.
    pub forbid_ref_substructures: bool,
    /// Start the fourth circuit from the reduced row-echelon form of `h_x`.
    pub start_from_rref: bool,
    /// Also start the third circuit from the reduced row-echelon form.
    pub start_from_rref_c3: bool,
    /// Prefer CNOTs that fit in the current layer.
    pub depth_aware: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_backtracks: 500,
            max_restarts: 20,
            perturbation_prob: 0.05,
            forbid_ref_last_layer: true,
            forbid_ref_substructures: true,
            start_from_rref: true,
            start_from_rref_c3: false,
            depth_aware: true,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.perturbation_prob) {
            return Err(Error::Invalid(format!(
                "perturbation_prob must lie in [0, 1], got {}",
                self.perturbation_prob
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SynthConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Number of nonzero entries of `h` after adding column `gate.control` to column `gate.target`.
pub fn cost(h: &BitMatrix, gate: Cnot) -> usize {
    h.col_add(gate.control, gate.target).nnz()
}

/// Counters from one synthesis call.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SynthStats {
    pub restarts: usize,
    pub backtracks: usize,
    pub checks: usize,
}

/// References and options for [`guided_synth_with`].
#[derive(Clone, Debug, Default)]
pub struct Guidance<'a> {
    pub ref_x: Option<&'a FaultSet>,
    pub ref_z: Option<&'a FaultSet>,
    /// Z faults already committed elsewhere that count as part of the circuit's own set.
    pub own_z_seed: Option<&'a FaultSet>,
    /// Reference circuits for the structural constraints.
    pub ref_circuits: Vec<&'a PrepCircuit>,
    pub start_from_rref: bool,
}

// Column-major working copy of the check matrix: one word per qubit column.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Columns {
    rows: usize,
    cols: Vec<u64>,
}

impl Columns {
    fn from_matrix(h: &BitMatrix) -> Self {
        assert!(
            h.rows() <= 64,
            "check matrices with more than 64 rows are not supported"
        );
        let cols = (0..h.cols())
            .map(|c| (0..h.rows()).filter(|&r| h.get(r, c)).fold(0u64, |a, r| a | 1u64 << r))
            .collect();
        Self { rows: h.rows(), cols }
    }

    fn to_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, self.cols.len());
        for (c, &w) in self.cols.iter().enumerate() {
            for r in 0..self.rows {
                if w >> r & 1 == 1 {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    fn nonzero(&self) -> usize {
        self.cols.iter().filter(|&&w| w != 0).count()
    }

    fn rref(&mut self) {
        *self = Columns::from_matrix(&self.to_matrix().rref().0);
    }
}

// Gates of `c` that are last on both qubits (layer 0 from the end), and
// those whose later neighbours all lie in that layer (layer 1).
fn final_layers(c: &PrepCircuit) -> (Vec<Cnot>, Vec<Cnot>) {
    let mut depth_from_end = vec![0usize; c.n()];
    let mut layer = vec![0usize; c.cx_count()];
    for (i, g) in c.gates().iter().enumerate().rev() {
        let l = depth_from_end[g.control].max(depth_from_end[g.target]);
        layer[i] = l;
        depth_from_end[g.control] = l + 1;
        depth_from_end[g.target] = l + 1;
    }
    let pick = |k| {
        c.gates()
            .iter()
            .zip(&layer)
            .filter(|(_, &l)| l == k)
            .map(|(g, _)| *g)
            .collect()
    };
    (pick(0), pick(1))
}

// Structural bans derived from reference circuits.
#[derive(Clone, Debug, Default)]
struct Constraints {
    last_layer: HashSet<Cnot>,
    // (later gate, earlier gate) chains CX_ij CX_jk from reference final layers
    chains: HashSet<(Cnot, Cnot)>,
}

impl Constraints {
    fn new(code: &CssCode, refs: &[&PrepCircuit], cfg: &SynthConfig) -> Self {
        let mut out = Constraints::default();
        let g = code.error_group(Basis::X);
        for r in refs {
            let (last, second) = final_layers(r);
            if cfg.forbid_ref_last_layer {
                out.last_layer.extend(last.iter().copied());
            }
            if cfg.forbid_ref_substructures {
                for &a in &second {
                    for &b in &last {
                        if a.target == b.control && a.control != b.target {
                            let e = (1u64 << a.control) | (1u64 << a.target) | (1u64 << b.target);
                            if !g.weight_leq(e, 2).expect("within cap") {
                                out.chains.insert((b, a));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

// True iff `g` shares a qubit with the gates of the current layer.
#[inline]
fn opens_layer(used: u64, g: Cnot) -> bool {
    (used >> g.control | used >> g.target) & 1 == 1
}

#[derive(Clone, Debug)]
struct Level {
    cols: Columns,
    images: SuffixImages,
    x_len: usize,
    z_len: usize,
    used: u64,
    rev_layer: usize,
    candidates: Vec<Cnot>,
    next: usize,
}

struct Search<'a> {
    code: &'a CssCode,
    t: usize,
    cfg: &'a SynthConfig,
    ref_x: Option<RefIndex>,
    ref_z: Option<RefIndex>,
    constraints: Constraints,
    own_x: FaultSet,
    own_z: FaultSet,
    stats: SynthStats,
}

impl<'a> Search<'a> {
    // Improving candidates ordered by (leaves current layer, cost, shuffled
    // lexicographic order). Applies row reduction first if nothing improves.
    fn candidates(&self, level: &mut Level, rng: &mut ChaCha8Rng) -> Vec<Cnot> {
        let n = level.cols.cols.len();
        let mut scored = Vec::new();
        for attempt in 0..2 {
            scored.clear();
            let cols = &level.cols.cols;
            for c in 0..n {
                if cols[c] == 0 {
                    continue;
                }
                for t in 0..n {
                    if t == c || cols[t] == 0 {
                        continue;
                    }
                    let before = cols[t].count_ones();
                    let after = (cols[t] ^ cols[c]).count_ones();
                    if after < before {
                        scored.push((Cnot::new(c, t), before - after));
                    }
                }
            }
            if !scored.is_empty() || attempt == 1 {
                break;
            }
            level.cols.rref();
        }
        scored.shuffle(rng);
        let used = level.used;
        let depth_aware = self.cfg.depth_aware;
        // larger gain means lower resulting cost
        let key = |(g, gain): &(Cnot, u32)| (depth_aware && opens_layer(used, *g), std::cmp::Reverse(*gain));
        scored.sort_by_key(key);
        if self.cfg.perturbation_prob > 0.0 && rng.random_bool(self.cfg.perturbation_prob) && !scored.is_empty() {
            let len = scored.len();
            let k0 = key(&scored[0]);
            let end1 = scored.iter().position(|s| key(s) != k0).unwrap_or(len);
            if end1 < len {
                let k1 = key(&scored[end1]);
                let end2 = scored[end1..]
                    .iter()
                    .position(|s| key(s) != k1)
                    .map_or(len, |p| end1 + p);
                scored[..end2].rotate_left(end1);
            }
        }
        scored.into_iter().map(|(g, _)| g).collect()
    }

    fn allowed(&self, g: Cnot, level: &Level, placed: &[(Cnot, usize)]) -> bool {
        let rev_layer = level.rev_layer + usize::from(opens_layer(level.used, g));
        if rev_layer == 0 && self.constraints.last_layer.contains(&g) {
            return false;
        }
        if rev_layer == 1 && !self.constraints.chains.is_empty() {
            for &(later, layer) in placed {
                if layer == 0 && self.constraints.chains.contains(&(later, g)) {
                    return false;
                }
            }
        }
        true
    }

    // Tentatively extends the own fault sets; returns false (leaving them
    // unchanged) if distinctness to a reference breaks.
    fn try_extend(&mut self, ex: u64, ez: u64) -> bool {
        if let Some(r) = &self.ref_x {
            self.stats.checks += 1;
            if !incremental_distinct_indexed(self.own_x.words(), ex, r, self.t, self.code.error_group(Basis::X)) {
                return false;
            }
        }
        if let Some(r) = &self.ref_z {
            self.stats.checks += 1;
            if !incremental_distinct_indexed(self.own_z.words(), ez, r, self.t, self.code.error_group(Basis::Z)) {
                return false;
            }
        }
        self.own_x.insert(ex);
        self.own_z.insert(ez);
        true
    }

    // One restart. Ok(Some(gates in elimination order, final columns)) on
    // success, Ok(None) when the backtrack budget or the tree is exhausted.
    fn run(&mut self, start: &Columns, rng: &mut ChaCha8Rng, best: &mut usize) -> Option<(Vec<Cnot>, Columns)> {
        let m = self.code.m_x();
        let n = self.code.n();
        let base_x = self.own_x.len();
        let base_z = self.own_z.len();
        let mut root = Level {
            cols: start.clone(),
            images: SuffixImages::identity(n),
            x_len: base_x,
            z_len: base_z,
            used: 0,
            rev_layer: 0,
            candidates: Vec::new(),
            next: 0,
        };
        root.candidates = self.candidates(&mut root, rng);
        let mut stack = vec![root];
        // gate placed from each level, with its reverse layer
        let mut placed: Vec<(Cnot, usize)> = Vec::new();
        let mut backtracks = 0;
        loop {
            let depth = stack.len() - 1;
            *best = (*best).max(depth);
            if stack[depth].cols.nonzero() == m {
                let cols = stack[depth].cols.clone();
                self.own_x.truncate(stack[depth].x_len);
                self.own_z.truncate(stack[depth].z_len);
                return Some((placed.iter().map(|p| p.0).collect(), cols));
            }
            let mut advanced = false;
            while stack[depth].next < stack[depth].candidates.len() {
                let level = &stack[depth];
                let g = level.candidates[level.next];
                stack[depth].next += 1;
                let level = &stack[depth];
                if !self.allowed(g, level, &placed) {
                    continue;
                }
                let mut images = level.images.clone();
                let (ex, ez) = images.prepend(g);
                if !self.try_extend(ex, ez) {
                    continue;
                }
                let gmask = (1u64 << g.control) | (1u64 << g.target);
                let (used, rev_layer) = if opens_layer(level.used, g) {
                    (gmask, level.rev_layer + 1)
                } else {
                    (level.used | gmask, level.rev_layer)
                };
                let mut cols = level.cols.clone();
                cols.cols[g.target] ^= cols.cols[g.control];
                let mut child = Level {
                    cols,
                    images,
                    x_len: self.own_x.len(),
                    z_len: self.own_z.len(),
                    used,
                    rev_layer,
                    candidates: Vec::new(),
                    next: 0,
                };
                child.candidates = self.candidates(&mut child, rng);
                placed.push((g, rev_layer));
                stack.push(child);
                advanced = true;
                break;
            }
            if advanced {
                continue;
            }
            // dead end: undo the last gate; it stays blocked at its level
            // because that level resumes after it in candidate order
            if depth == 0 {
                return None;
            }
            stack.pop();
            placed.pop();
            let parent = stack.last().expect("non-root level has a parent");
            self.own_x.truncate(parent.x_len);
            self.own_z.truncate(parent.z_len);
            backtracks += 1;
            self.stats.backtracks += 1;
            if backtracks > self.cfg.max_backtracks {
                self.own_x.truncate(base_x);
                self.own_z.truncate(base_z);
                return None;
            }
        }
    }
}

fn circuit_from_elimination(n: usize, eliminated: &[Cnot], cols: &Columns) -> PrepCircuit {
    let init = (0..n)
        .map(|q| {
            if cols.cols[q] != 0 {
                InitBasis::Plus
            } else {
                InitBasis::Zero
            }
        })
        .collect();
    let gates = eliminated.iter().rev().copied().collect();
    PrepCircuit::new(init, gates).expect("elimination gates are valid")
}

/// Fault-set guided synthesis with explicit guidance. `stage` names the run in errors.
pub fn guided_synth_with(
    code: &CssCode,
    guidance: &Guidance<'_>,
    t: usize,
    cfg: &SynthConfig,
    stage: &str,
) -> Result<(PrepCircuit, SynthStats)> {
    cfg.validate()?;
    if t > DISTINCT_CAP {
        return Err(Error::CapExceeded {
            what: "distinctness t",
            value: t,
            cap: DISTINCT_CAP,
        });
    }
    if code.m_x() > 64 {
        return Err(Error::Invalid("more than 64 X checks".into()));
    }
    let n = code.n();
    let mut own_z = FaultSet::singles(Basis::Z, n, usize::MAX);
    if let Some(seed) = guidance.own_z_seed {
        own_z = own_z.union(seed);
    }
    let mut search = Search {
        code,
        t,
        cfg,
        ref_x: guidance
            .ref_x
            .map(|r| RefIndex::new(code.error_group(Basis::X), r.words())),
        ref_z: guidance
            .ref_z
            .map(|r| RefIndex::new(code.error_group(Basis::Z), r.words())),
        constraints: Constraints::new(code, &guidance.ref_circuits, cfg),
        own_x: FaultSet::singles(Basis::X, n, usize::MAX),
        own_z,
        stats: SynthStats::default(),
    };
    let mut start = Columns::from_matrix(code.h_x());
    if guidance.start_from_rref {
        start.rref();
    }
    let mut best = 0;
    for r in 0..=cfg.max_restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ r as u64);
        if let Some((gates, cols)) = search.run(&start, &mut rng, &mut best) {
            search.stats.restarts = r;
            let c = circuit_from_elimination(n, &gates, &cols);
            debug_assert!(c.verify_prepares(code));
            return Ok((c, search.stats));
        }
        log::debug!(
            "{stage}: restart {} after {} backtracks",
            r + 1,
            search.stats.backtracks
        );
    }
    Err(Error::SynthesisExhausted {
        stage: stage.to_string(),
        restarts: cfg.max_restarts,
        backtracks: search.stats.backtracks,
        best_gates: best,
    })
}

/// Greedy elimination with no fault-set constraints.
pub fn greedy_synth(code: &CssCode, cfg: &SynthConfig) -> Result<PrepCircuit> {
    Ok(guided_synth_with(code, &Guidance::default(), 0, cfg, "greedy")?.0)
}

/// Synthesizes a circuit whose X fault set is `t`-distinct to `ref_x` and
/// whose Z fault set is `t`-distinct to `ref_z` (each when given).
pub fn guided_synth(
    code: &CssCode,
    ref_x: Option<&FaultSet>,
    ref_z: Option<&FaultSet>,
    t: usize,
    cfg: &SynthConfig,
) -> Result<PrepCircuit> {
    let guidance = Guidance {
        ref_x,
        ref_z,
        ..Guidance::default()
    };
    Ok(guided_synth_with(code, &guidance, t, cfg, "guided")?.0)
}

/// Textbook encoder from the reduced row-echelon form of `h_x`: each pivot
/// qubit starts in `|+>` and fans out to the rest of its row.
pub fn rref_circuit(code: &CssCode) -> PrepCircuit {
    let (r, pivots) = code.h_x().rref_with_pivots();
    let mut init = vec![InitBasis::Zero; code.n()];
    let mut gates = Vec::new();
    for (row, &p) in pivots.iter().enumerate() {
        init[p] = InitBasis::Plus;
        let v: BitVector = r.row(row);
        gates.extend(v.iter_ones().filter(|&q| q != p).map(|q| Cnot::new(p, q)));
    }
    PrepCircuit::new(init, gates).expect("fan-out gates are valid")
}

/// The four circuits of the protocol with per-stage statistics.
#[derive(Clone, Debug)]
pub struct Quadruple {
    pub circuits: [PrepCircuit; 4],
    pub stats: [SynthStats; 4],
}

/// Runs the four-stage pipeline:
/// C1 greedy; C2 guided by `E_X(C1)`; C3 guided by `E_Z(C1) ∪ E_Z(C2)`;
/// C4 guided by `E_X(C3)` and `E_Z(C1) ∪ E_Z(C2)`, with `E_Z(C3)` counted
/// as part of its own Z set so the C3/C4 cross terms are covered.
pub fn synth_quadruple(code: &CssCode, cfg: &SynthConfig) -> Result<Quadruple> {
    let t = code.t()?;
    let stage_cfg = |k: u64| SynthConfig {
        seed: cfg.seed.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        ..cfg.clone()
    };
    let (c1, s1) = guided_synth_with(code, &Guidance::default(), t, &stage_cfg(0), "C1")?;
    let fx1 = fault_set(&c1, Basis::X);
    let (c2, s2) = guided_synth_with(
        code,
        &Guidance {
            ref_x: Some(&fx1),
            ref_circuits: vec![&c1],
            ..Guidance::default()
        },
        t,
        &stage_cfg(1),
        "C2",
    )?;
    let z12 = fault_set(&c1, Basis::Z).union(&fault_set(&c2, Basis::Z));
    let (c3, s3) = guided_synth_with(
        code,
        &Guidance {
            ref_z: Some(&z12),
            ref_circuits: vec![&c1, &c2],
            start_from_rref: cfg.start_from_rref_c3,
            ..Guidance::default()
        },
        t,
        &stage_cfg(2),
        "C3",
    )?;
    let fx3 = fault_set(&c3, Basis::X);
    let fz3 = fault_set(&c3, Basis::Z);
    let (c4, s4) = guided_synth_with(
        code,
        &Guidance {
            ref_x: Some(&fx3),
            ref_z: Some(&z12),
            own_z_seed: Some(&fz3),
            ref_circuits: vec![&c3],
            start_from_rref: cfg.start_from_rref,
        },
        t,
        &stage_cfg(3),
        "C4",
    )?;
    let report = verify_quadruple([&c1, &c2, &c3, &c4], code)?;
    if !report.passed {
        return Err(Error::Invalid(format!(
            "synthesized quadruple failed verification: {}",
            report.to_json()
        )));
    }
    Ok(Quadruple {
        circuits: [c1, c2, c3, c4],
        stats: [s1, s2, s3, s4],
    })
}

/// Four copies of the greedy circuit: the non-fault-tolerant baseline.
pub fn identical_quadruple(code: &CssCode, cfg: &SynthConfig) -> Result<[PrepCircuit; 4]> {
    let c = greedy_synth(
        code,
        &SynthConfig {
            seed: cfg.seed,
            ..cfg.clone()
        },
    )?;
    Ok([c.clone(), c.clone(), c.clone(), c])
}
