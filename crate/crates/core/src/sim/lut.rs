//! Lookup-table decoding.

use std::collections::HashMap;

use crate::code::{for_each_combination, Basis, CssCode};

/// Syndrome-indexed table of minimum-weight corrections for one error type.
#[derive(Clone, Debug)]
pub struct LutDecoder {
    basis: Basis,
    checks: Vec<u64>,
    table: HashMap<u64, u64>,
    max_weight: usize,
}

impl LutDecoder {
    /// Builds the table for `basis`-type errors, detected by the opposite checks.
    ///
    /// Weights are enumerated upward until every reachable syndrome has an
    /// entry or the weight reaches `d`. Syndromes left uncovered decode to
    /// `None` (heralded failure).
    pub fn new(code: &CssCode, basis: Basis) -> crate::Result<Self> {
        let checks = code.checks(basis.opposite()).row_words64();
        let rank = code.checks(basis.opposite()).rank();
        let reachable = 1usize << rank;
        let cap = code.d()?;
        let n = code.n();
        let mut table = HashMap::with_capacity(reachable);
        table.insert(0, 0);
        let mut max_weight = 0;
        for w in 1..=cap.min(n) {
            if table.len() == reachable {
                break;
            }
            for_each_combination(n, w, |_, e| {
                let s = syndrome_of(&checks, e);
                table.entry(s).or_insert(e);
            });
            max_weight = w;
        }
        log::debug!(
            "{} LUT for {}: {} of {} syndromes, weight <= {}",
            basis,
            code.name(),
            table.len(),
            reachable,
            max_weight
        );
        Ok(Self {
            basis,
            checks,
            table,
            max_weight,
        })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Largest enumerated correction weight.
    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    #[inline]
    pub fn syndrome(&self, error: u64) -> u64 {
        syndrome_of(&self.checks, error)
    }

    /// Correction for a syndrome, `None` when heralded.
    #[inline]
    pub fn lookup(&self, syndrome: u64) -> Option<u64> {
        self.table.get(&syndrome).copied()
    }

    /// Correction for the syndrome of `error`.
    #[inline]
    pub fn decode(&self, error: u64) -> Option<u64> {
        self.lookup(self.syndrome(error))
    }
}

#[inline]
fn syndrome_of(checks: &[u64], e: u64) -> u64 {
    checks
        .iter()
        .enumerate()
        .fold(0, |s, (i, &r)| s | (u64::from((r & e).count_ones() & 1) << i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::registry_lookup;

    #[test]
    fn steane_single_errors_decode_to_themselves() {
        let code = registry_lookup("steane").unwrap();
        for basis in [Basis::X, Basis::Z] {
            let lut = LutDecoder::new(&code, basis).unwrap();
            assert_eq!(lut.len(), 8);
            assert_eq!(lut.max_weight(), 1);
            assert_eq!(lut.decode(0), Some(0));
            for q in 0..7 {
                assert_eq!(lut.decode(1 << q), Some(1 << q));
            }
        }
    }

    #[test]
    fn corrections_are_minimum_weight() {
        // brute-force oracle over all 2^17 errors
        let code = registry_lookup("cc_4_8_8_17").unwrap();
        let lut = LutDecoder::new(&code, Basis::X).unwrap();
        let mut best: HashMap<u64, u32> = HashMap::new();
        for e in 0u64..1 << 17 {
            let w = best.entry(lut.syndrome(e)).or_insert(u32::MAX);
            *w = (*w).min(e.count_ones());
        }
        assert_eq!(best.len(), lut.len());
        for (s, w) in best {
            let c = lut.lookup(s).unwrap();
            assert_eq!(c.count_ones(), w);
            assert_eq!(lut.syndrome(c), s);
        }
    }

    #[test]
    fn correctable_errors_are_corrected_up_to_stabilizers() {
        let code = registry_lookup("cc_6_6_6_19").unwrap();
        let lut = LutDecoder::new(&code, Basis::Z).unwrap();
        for w in 0..=2 {
            for_each_combination(19, w, |_, e| {
                let c = lut.decode(e).unwrap();
                assert!(code.stabilizer_space(Basis::Z).contains_word(c ^ e));
            });
        }
    }
}
