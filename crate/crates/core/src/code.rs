//! CSS codes: validation, logical operators, distance and the built-in registry.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::gf2::{low_mask, mat_mul_t, BitMatrix, BitVector, RowSpace};
use crate::{Error, Result};

/// Largest qubit count accepted by [`CssCode::validate`]; every error fits one word.
pub const MAX_QUBITS: usize = 64;
/// Largest qubit count for which [`CssCode::distance`] enumerates.
pub const DISTANCE_CAP: usize = 40;
/// Largest threshold accepted by [`ErrorGroup::weight_leq`].
pub const WEIGHT_CAP: usize = 4;
// Weights up to this value are tabulated per coset.
const TABLE_WEIGHT: usize = 3;

/// Pauli type of an error or check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
}

impl Basis {
    pub fn opposite(self) -> Basis {
        match self {
            Basis::X => Basis::Z,
            Basis::Z => Basis::X,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::X => "X",
            Basis::Z => "Z",
        })
    }
}

/// Errors of one Pauli type modulo the stabilizer group of the prepared state.
///
/// For X errors the group is the span of `h_x`. For Z errors acting on the
/// logical `|0>` state it is the span of `h_z` together with the logical Z
/// operators, since those also stabilize the state.
#[derive(Clone, Debug)]
pub struct ErrorGroup {
    n: usize,
    space: RowSpace,
    unit: Vec<u64>,
    table: OnceLock<HashMap<u64, u8>>,
}

impl ErrorGroup {
    fn new(n: usize, generators: &BitMatrix) -> Self {
        let space = RowSpace::new(generators);
        let unit = (0..n).map(|i| space.reduce_word(1u64 << i)).collect();
        Self {
            n,
            space,
            unit,
            table: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &RowSpace {
        &self.space
    }

    /// Canonical coset representative. Linear in its argument.
    #[inline]
    pub fn canon(&self, e: u64) -> u64 {
        self.space.reduce_word(e)
    }

    #[inline]
    pub fn equivalent(&self, a: u64, b: u64) -> bool {
        self.space.contains_word(a ^ b)
    }

    fn table(&self) -> &HashMap<u64, u8> {
        self.table.get_or_init(|| {
            let mut table = HashMap::new();
            for w in 0..=TABLE_WEIGHT.min(self.n) {
                for_each_combination(self.n, w, |support, _| {
                    let c = support.iter().fold(0u64, |acc, &q| acc ^ self.unit[q]);
                    table.entry(c).or_insert(w as u8);
                });
            }
            table
        })
    }

    /// Minimal weight of the coset of `e` if it is at most `cap`, else `None`.
    pub fn min_weight_upto(&self, e: u64, cap: usize) -> Result<Option<usize>> {
        if cap > WEIGHT_CAP {
            return Err(Error::CapExceeded {
                what: "weight threshold",
                value: cap,
                cap: WEIGHT_CAP,
            });
        }
        let c = self.canon(e);
        let table = self.table();
        if let Some(&w) = table.get(&c) {
            return Ok((w as usize <= cap).then_some(w as usize));
        }
        if cap <= TABLE_WEIGHT {
            return Ok(None);
        }
        // weight 4 splits into two parts of weight at most 2
        let mut found = false;
        for a in 0..self.n {
            for b in a + 1..self.n {
                let r = c ^ self.unit[a] ^ self.unit[b];
                if table.get(&r).is_some_and(|&w| w <= 2) {
                    found = true;
                }
            }
        }
        Ok(found.then_some(4))
    }

    /// True iff some error of weight at most `t` is equivalent to `e`.
    pub fn weight_leq(&self, e: u64, t: usize) -> Result<bool> {
        Ok(self.min_weight_upto(e, t)?.is_some())
    }
}

/// An `[[n, k, d]]` CSS code with logical operators paired so that
/// `logicals_x · logicals_zᵀ` is the identity.
#[derive(Clone, Debug)]
pub struct CssCode {
    name: String,
    n: usize,
    k: usize,
    d: OnceLock<Option<usize>>,
    h_x: BitMatrix,
    h_z: BitMatrix,
    logicals_x: BitMatrix,
    logicals_z: BitMatrix,
    x_group: ErrorGroup,
    z_group: ErrorGroup,
    z_stabilizers: RowSpace,
}

impl CssCode {
    /// Validates a pair of check matrices. Dependent rows are dropped with a warning.
    pub fn validate(h_x: &BitMatrix, h_z: &BitMatrix) -> Result<CssCode> {
        Self::validate_named("custom", h_x, h_z)
    }

    pub fn validate_named(name: &str, h_x: &BitMatrix, h_z: &BitMatrix) -> Result<CssCode> {
        if h_x.cols() != h_z.cols() {
            return Err(Error::Invalid(format!(
                "column mismatch: HX has {} columns, HZ has {}",
                h_x.cols(),
                h_z.cols()
            )));
        }
        let n = h_x.cols();
        if n > MAX_QUBITS {
            return Err(Error::CapExceeded {
                what: "qubit count",
                value: n,
                cap: MAX_QUBITS,
            });
        }
        let prod = mat_mul_t(h_x, h_z);
        for i in 0..prod.rows() {
            if let Some(j) = prod.row(i).iter_ones().next() {
                return Err(Error::Invalid(format!(
                    "CSS condition violated: HX row {i} anticommutes with HZ row {j}"
                )));
            }
        }
        let (h_x, kept_x) = h_x.independent_rows();
        let (h_z, kept_z) = h_z.independent_rows();
        if kept_x.len() < prod.rows() || kept_z.len() < prod.cols() {
            log::warn!(
                "{name}: dropped {} dependent HX rows and {} dependent HZ rows",
                prod.rows() - kept_x.len(),
                prod.cols() - kept_z.len()
            );
        }
        let k = n - h_x.rows() - h_z.rows();
        let (logicals_x, logicals_z) = logical_operators(&h_x, &h_z, k);

        let x_group = ErrorGroup::new(n, &h_x);
        let z_group = ErrorGroup::new(n, &h_z.stack(&logicals_z));
        let z_stabilizers = RowSpace::new(&h_z);
        Ok(CssCode {
            name: name.to_string(),
            n,
            k,
            d: OnceLock::new(),
            h_x,
            h_z,
            logicals_x,
            logicals_z,
            x_group,
            z_group,
            z_stabilizers,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m_x(&self) -> usize {
        self.h_x.rows()
    }

    pub fn m_z(&self) -> usize {
        self.h_z.rows()
    }

    pub fn h_x(&self) -> &BitMatrix {
        &self.h_x
    }

    pub fn h_z(&self) -> &BitMatrix {
        &self.h_z
    }

    pub fn checks(&self, basis: Basis) -> &BitMatrix {
        match basis {
            Basis::X => &self.h_x,
            Basis::Z => &self.h_z,
        }
    }

    pub fn logicals_x(&self) -> &BitMatrix {
        &self.logicals_x
    }

    pub fn logicals_z(&self) -> &BitMatrix {
        &self.logicals_z
    }

    pub fn logicals(&self, basis: Basis) -> &BitMatrix {
        match basis {
            Basis::X => &self.logicals_x,
            Basis::Z => &self.logicals_z,
        }
    }

    /// Equivalence classes of `basis`-type errors on the logical `|0>` state.
    pub fn error_group(&self, basis: Basis) -> &ErrorGroup {
        match basis {
            Basis::X => &self.x_group,
            Basis::Z => &self.z_group,
        }
    }

    /// The stabilizer row space of one basis, without logical operators.
    pub fn stabilizer_space(&self, basis: Basis) -> &RowSpace {
        match basis {
            Basis::X => self.x_group.space(),
            Basis::Z => &self.z_stabilizers,
        }
    }

    /// Records a known distance, skipping enumeration.
    pub fn with_distance(self, d: usize) -> Self {
        let _ = self.d.set(Some(d));
        self
    }

    /// Code distance, computed on first use. Errors if `n` exceeds [`DISTANCE_CAP`]
    /// and no distance was recorded.
    pub fn d(&self) -> Result<usize> {
        let d = *self
            .d
            .get_or_init(|| match (self.distance(Basis::X), self.distance(Basis::Z)) {
                (Ok(a), Ok(b)) => Some(a.min(b)),
                _ => None,
            });
        d.ok_or(Error::CapExceeded {
            what: "qubit count for distance",
            value: self.n,
            cap: DISTANCE_CAP,
        })
    }

    /// `⌊(d − 1) / 2⌋`.
    pub fn t(&self) -> Result<usize> {
        Ok(self.d()?.saturating_sub(1) / 2)
    }

    /// Minimum weight of a `basis`-type logical operator: a vector in
    /// `ker(h_opposite)` outside the `basis` stabilizer space.
    pub fn distance(&self, basis: Basis) -> Result<usize> {
        if self.n > DISTANCE_CAP {
            return Err(Error::CapExceeded {
                what: "qubit count for distance",
                value: self.n,
                cap: DISTANCE_CAP,
            });
        }
        if self.k == 0 {
            return Ok(0);
        }
        let opposite = self.checks(basis.opposite()).transpose();
        let col_syndrome: Vec<u64> = (0..self.n)
            .map(|q| if opposite.cols() == 0 { 0 } else { opposite.row_word(q) })
            .collect();
        let stab = self.stabilizer_space(basis);
        for w in 1..=self.n {
            let mut hit = false;
            for_each_combination(self.n, w, |support, word| {
                if hit {
                    return;
                }
                let s = support.iter().fold(0u64, |acc, &q| acc ^ col_syndrome[q]);
                if s == 0 && !stab.contains_word(word) {
                    hit = true;
                }
            });
            if hit {
                return Ok(w);
            }
        }
        unreachable!("a code with k > 0 has a logical operator")
    }

    /// True iff relabelling qubit `i` as `perm[i]` maps both stabilizer groups onto themselves.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        if perm.len() != self.n {
            return false;
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return false;
            }
            seen[p] = true;
        }
        [Basis::X, Basis::Z].iter().all(|&b| {
            let moved = self.checks(b).permute_columns(perm);
            let space = self.stabilizer_space(b);
            (0..moved.rows()).all(|r| space.contains(&moved.row(r)))
        })
    }

    /// The check file text for this code.
    pub fn serialize(&self) -> String {
        serialize_check_file(&self.h_x, &self.h_z)
    }
}

/// Calls `f(support, word)` for every `w`-subset of `0..n`, in lexicographic order.
pub(crate) fn for_each_combination(n: usize, w: usize, mut f: impl FnMut(&[usize], u64)) {
    fn rec(n: usize, w: usize, start: usize, buf: &mut Vec<usize>, word: u64, f: &mut impl FnMut(&[usize], u64)) {
        if buf.len() == w {
            f(buf, word);
            return;
        }
        let remaining = w - buf.len();
        for q in start..=n - remaining {
            buf.push(q);
            rec(n, w, q + 1, buf, word | (1u64 << q), f);
            buf.pop();
        }
    }
    if w > n {
        return;
    }
    let mut buf = Vec::with_capacity(w);
    rec(n, w, 0, &mut buf, 0, &mut f);
}

// Logical X from ker(h_z) outside span(h_x), logical Z from ker(h_x) outside
// span(h_z), then symplectic Gram-Schmidt so that X_i · Z_j = δ_ij.
fn logical_operators(h_x: &BitMatrix, h_z: &BitMatrix, k: usize) -> (BitMatrix, BitMatrix) {
    let n = h_x.cols();
    let complement = |stab: &BitMatrix, opposite: &BitMatrix| -> Vec<BitVector> {
        let mut space = RowSpace::new(stab);
        let kernel = opposite.kernel();
        let mut out = Vec::new();
        for r in 0..kernel.rows() {
            let v = kernel.row(r);
            if space.insert(&v) {
                out.push(v);
            }
        }
        out
    };
    let mut xs = complement(h_x, h_z);
    let mut zs = complement(h_z, h_x);
    assert_eq!(xs.len(), k, "logical X count");
    assert_eq!(zs.len(), k, "logical Z count");

    for i in 0..k {
        let j = (i..k)
            .find(|&j| xs[i].dot(&zs[j]))
            .expect("logical operators pair up under the symplectic form");
        zs.swap(i, j);
        for l in 0..k {
            if l == i {
                continue;
            }
            if xs[l].dot(&zs[i]) {
                let xi = xs[i].clone();
                xs[l].xor_assign(&xi);
            }
            if xs[i].dot(&zs[l]) {
                let zi = zs[i].clone();
                zs[l].xor_assign(&zi);
            }
        }
    }
    (BitMatrix::from_rows(n, &xs), BitMatrix::from_rows(n, &zs))
}

/// Parses the check file format: an `HX` line followed by 0/1 rows, then an
/// `HZ` line followed by 0/1 rows. `#` starts a comment.
pub fn parse_check_file(text: &str) -> Result<(BitMatrix, BitMatrix)> {
    let mut sections: [Option<Vec<Vec<u8>>>; 2] = [None, None];
    let mut current: Option<usize> = None;
    let mut width: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let section = match line {
            "HX" => Some(0),
            "HZ" => Some(1),
            _ => None,
        };
        if let Some(s) = section {
            if sections[s].is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("duplicate section {line}"),
                });
            }
            sections[s] = Some(Vec::new());
            current = Some(s);
            continue;
        }
        let Some(s) = current else {
            return Err(Error::Parse {
                line: line_no,
                msg: "row before any HX/HZ section header".into(),
            });
        };
        let mut row = Vec::new();
        for tok in line.split_whitespace() {
            match tok {
                "0" => row.push(0),
                "1" => row.push(1),
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("unexpected token '{tok}'; rows hold space-separated 0/1 entries"),
                    })
                }
            }
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("ragged row: {} entries, expected {w}", row.len()),
                })
            }
            _ => {}
        }
        sections[s].as_mut().expect("section opened").push(row);
    }
    let total = text.lines().count();
    let [hx, hz] = sections;
    let hx = hx.ok_or(Error::Parse {
        line: total,
        msg: "missing HX section".into(),
    })?;
    let hz = hz.ok_or(Error::Parse {
        line: total,
        msg: "missing HZ section".into(),
    })?;
    let cols = width.unwrap_or(0);
    let build = |rows: &[Vec<u8>]| {
        let vecs: Vec<BitVector> = rows.iter().map(|r| BitVector::from_bits(r)).collect();
        BitMatrix::from_rows(cols, &vecs)
    };
    Ok((build(&hx), build(&hz)))
}

pub fn serialize_check_file(h_x: &BitMatrix, h_z: &BitMatrix) -> String {
    let mut out = String::new();
    for (header, m) in [("HX", h_x), ("HZ", h_z)] {
        out.push_str(header);
        out.push('\n');
        for r in 0..m.rows() {
            let row: Vec<&str> = (0..m.cols()).map(|c| if m.get(r, c) { "1" } else { "0" }).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

struct RegistryEntry {
    name: &'static str,
    text: &'static str,
    distance: usize,
    summary: &'static str,
}

const REGISTRY: &[RegistryEntry] = &[
    RegistryEntry {
        name: "steane",
        text: include_str!("../codes/steane.txt"),
        distance: 3,
        summary: "[[7,1,3]] Steane code",
    },
    RegistryEntry {
        name: "shor",
        text: include_str!("../codes/shor.txt"),
        distance: 3,
        summary: "[[9,1,3]] Shor code",
    },
    RegistryEntry {
        name: "rsc_9",
        text: include_str!("../codes/rsc_9.txt"),
        distance: 3,
        summary: "[[9,1,3]] rotated surface code",
    },
    RegistryEntry {
        name: "carbon",
        text: include_str!("../codes/carbon.txt"),
        distance: 4,
        summary: "[[12,2,4]] carbon code",
    },
    RegistryEntry {
        name: "tetrahedral",
        text: include_str!("../codes/tetrahedral.txt"),
        distance: 3,
        summary: "[[15,1,3]] tetrahedral (3D color) code",
    },
    RegistryEntry {
        name: "cc_4_8_8_17",
        text: include_str!("../codes/cc_4_8_8_17.txt"),
        distance: 5,
        summary: "[[17,1,5]] 4.8.8 color code",
    },
    RegistryEntry {
        name: "cc_6_6_6_19",
        text: include_str!("../codes/cc_6_6_6_19.txt"),
        distance: 5,
        summary: "[[19,1,5]] 6.6.6 color code",
    },
    RegistryEntry {
        name: "golay",
        text: include_str!("../codes/golay.txt"),
        distance: 7,
        summary: "[[23,1,7]] Golay code",
    },
    RegistryEntry {
        name: "rsc_25",
        text: include_str!("../codes/rsc_25.txt"),
        distance: 5,
        summary: "[[25,1,5]] rotated surface code",
    },
    RegistryEntry {
        name: "cc_4_8_8_31",
        text: include_str!("../codes/cc_4_8_8_31.txt"),
        distance: 7,
        summary: "[[31,1,7]] 4.8.8 color code",
    },
    RegistryEntry {
        name: "cc_6_6_6_37",
        text: include_str!("../codes/cc_6_6_6_37.txt"),
        distance: 7,
        summary: "[[37,1,7]] 6.6.6 color code",
    },
];

/// 120° rotation of the 19-qubit 6.6.6 color code in registry qubit order;
/// qubit `i` maps to `ROTATION_6_6_6_19[i]`.
pub const ROTATION_6_6_6_19: [usize; 19] = [18, 17, 9, 13, 6, 12, 16, 5, 8, 15, 1, 3, 7, 11, 0, 2, 4, 10, 14];

pub fn registry_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|e| e.name).collect()
}

/// `(name, summary)` pairs for listing.
pub fn registry_summaries() -> Vec<(&'static str, &'static str)> {
    REGISTRY.iter().map(|e| (e.name, e.summary)).collect()
}

/// Registered distance for `name`, if any.
pub fn registry_distance(name: &str) -> Option<usize> {
    REGISTRY.iter().find(|e| e.name == name).map(|e| e.distance)
}

/// Loads a built-in code. The registered distance is attached without enumeration.
pub fn registry_lookup(name: &str) -> Result<CssCode> {
    let entry = REGISTRY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCode {
            name: name.to_string(),
            available: registry_names().iter().map(|s| s.to_string()).collect(),
        })?;
    let (h_x, h_z) = parse_check_file(entry.text)?;
    Ok(CssCode::validate_named(entry.name, &h_x, &h_z)?.with_distance(entry.distance))
}

/// Mask of the low `n` bits, for word-form errors.
pub fn qubit_mask(n: usize) -> u64 {
    low_mask(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn steane() -> CssCode {
        registry_lookup("steane").unwrap()
    }

    // brute-force distance: all vectors, checked against syndrome and span enumeration
    fn brute_distance(code: &CssCode, basis: Basis) -> usize {
        let n = code.n();
        let opp = code.checks(basis.opposite());
        let same = code.checks(basis);
        let mut span = std::collections::HashSet::new();
        for mask in 0u64..(1 << same.rows()) {
            let mut acc = 0u64;
            for r in 0..same.rows() {
                if mask >> r & 1 == 1 {
                    acc ^= same.row_word(r);
                }
            }
            span.insert(acc);
        }
        (1u64..(1 << n))
            .filter(|&v| (0..opp.rows()).all(|r| (opp.row_word(r) & v).count_ones().is_multiple_of(2)))
            .filter(|v| !span.contains(v))
            .map(|v| v.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn steane_validates() {
        let c = steane();
        assert_eq!((c.n(), c.k(), c.m_x(), c.m_z()), (7, 1, 3, 3));
        assert!(mat_mul_t(c.h_x(), c.h_z()).is_zero());
        assert_eq!(c.h_x().rank(), 3);
        assert_eq!(c.distance(Basis::X).unwrap(), 3);
        assert_eq!(c.distance(Basis::Z).unwrap(), 3);
        assert_eq!(brute_distance(&c, Basis::X), 3);
    }

    #[test]
    fn css_violation_names_rows() {
        let a = BitMatrix::from_bit_rows(&[[1, 0]]);
        let err = CssCode::validate(&a, &a).unwrap_err().to_string();
        assert!(err.contains("HX row 0") && err.contains("HZ row 0"), "{err}");
    }

    #[test]
    fn trivial_code() {
        let e = BitMatrix::zeros(0, 1);
        let c = CssCode::validate(&e, &e).unwrap();
        assert_eq!(c.k(), 1);
        assert_eq!(c.logicals_x().row(0).to_bits(), vec![1]);
        assert_eq!(c.logicals_z().row(0).to_bits(), vec![1]);
        assert_eq!(c.d().unwrap(), 1);
    }

    #[test]
    fn dependent_rows_are_dropped() {
        let h = BitMatrix::from_bit_rows(&[[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1]]);
        let z = BitMatrix::zeros(0, 4);
        let c = CssCode::validate(&h, &z).unwrap();
        assert_eq!(c.m_x(), 2);
        assert_eq!(c.k(), 2);
    }

    #[test]
    fn registry_codes_validate_with_registered_distance() {
        for name in registry_names() {
            let code = registry_lookup(name).unwrap();
            let expected = registry_distance(name).unwrap();
            let fresh = CssCode::validate(code.h_x(), code.h_z()).unwrap();
            assert_eq!(fresh.d().unwrap(), expected, "{name}");
            assert!(
                mat_mul_t(code.logicals_x(), code.logicals_z()) == BitMatrix::identity(code.k()),
                "{name}"
            );
        }
    }

    #[test]
    fn color_code_17_matches_brute_force() {
        let c = registry_lookup("cc_4_8_8_17").unwrap();
        assert_eq!((c.n(), c.k()), (17, 1));
        assert_eq!(brute_distance(&c, Basis::X), 5);
        assert_eq!(brute_distance(&c, Basis::Z), 5);
    }

    #[test]
    fn unknown_code_lists_names() {
        let err = registry_lookup("nonexistent").unwrap_err().to_string();
        assert!(err.contains("steane") && err.contains("cc_4_8_8_17"), "{err}");
    }

    #[test]
    fn rotation_is_automorphism() {
        let c = registry_lookup("cc_6_6_6_19").unwrap();
        assert!(c.is_automorphism(&ROTATION_6_6_6_19));
        // composing three 120° rotations gives the identity
        let mut q: Vec<usize> = (0..19).collect();
        for _ in 0..3 {
            q = q.iter().map(|&i| ROTATION_6_6_6_19[i]).collect();
        }
        assert_eq!(q, (0..19).collect::<Vec<_>>());
        let mut not_perm = ROTATION_6_6_6_19;
        not_perm[0] = not_perm[1];
        assert!(!c.is_automorphism(&not_perm));
        let mut swap: Vec<usize> = (0..19).collect();
        swap.swap(0, 1);
        assert!(!c.is_automorphism(&swap));
    }

    #[test]
    fn parse_examples() {
        let text = "HX\n1 0 1 0 1 0 1\n0 1 1 0 0 1 1\n0 0 0 1 1 1 1\nHZ\n1 0 1 0 1 0 1\n0 1 1 0 0 1 1\n0 0 0 1 1 1 1\n";
        let (hx, hz) = parse_check_file(text).unwrap();
        assert_eq!(&hx, steane().h_x());
        assert_eq!(&hz, steane().h_z());

        let commented = "# header\n\nHX  # x checks\n1 0 1 0 1 0 1\n\n0 1 1 0 0 1 1 # row\n0 0 0 1 1 1 1\n# between\nHZ\n1 0 1 0 1 0 1\n0 1 1 0 0 1 1\n\n0 0 0 1 1 1 1\n";
        assert_eq!(parse_check_file(commented).unwrap(), (hx, hz));

        match parse_check_file("HX\n1 0 1\n1 0\nHZ\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            parse_check_file("1 0\nHX\nHZ\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_check_file("HX\n1 2\nHZ\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_check_file("HX\n1 1\n").is_err());
    }

    #[test]
    fn round_trip_registry() {
        for name in registry_names() {
            let code = registry_lookup(name).unwrap();
            let (hx, hz) = parse_check_file(&code.serialize()).unwrap();
            assert_eq!(&hx, code.h_x(), "{name}");
            assert_eq!(&hz, code.h_z(), "{name}");
        }
    }

    #[test]
    fn z_group_includes_logical_z() {
        let c = steane();
        let lz = c.logicals_z().row_word(0);
        assert!(c.error_group(Basis::Z).equivalent(lz, 0));
        assert!(!c.stabilizer_space(Basis::Z).contains_word(lz));
        let lx = c.logicals_x().row_word(0);
        assert!(!c.error_group(Basis::X).equivalent(lx, 0));
    }

    #[test]
    fn weight_four_queries() {
        let c = registry_lookup("cc_4_8_8_17").unwrap();
        let g = c.error_group(Basis::X);
        // a logical operator has minimal weight 5
        let lx = c.logicals_x().row_word(0);
        assert!(!g.weight_leq(lx, 4).unwrap());
        let four = 0b1111u64 << 4;
        assert_eq!(
            g.min_weight_upto(four ^ c.h_x().row_word(0), 4)
                .unwrap()
                .map(|w| w <= 4),
            Some(true)
        );
        assert!(g.weight_leq(0, 5).is_err());
    }

    proptest! {
        #[test]
        fn min_weight_matches_brute_force(bits in any::<u64>()) {
            let c = registry_lookup("cc_4_8_8_17").unwrap();
            for basis in [Basis::X, Basis::Z] {
                let e = bits & qubit_mask(17);
                let g = c.error_group(basis);
                let best = (0u64..(1 << 17))
                    .filter(|&v| g.equivalent(v, e))
                    .map(|v| v.count_ones() as usize)
                    .min()
                    .unwrap();
                for t in 0..=4 {
                    prop_assert_eq!(g.weight_leq(e, t).unwrap(), best <= t);
                }
            }
        }
    }
}
