//! Circuit-level noise model.

use serde::Serialize;

/// Probabilities of each fault class at physical error rate `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseModel {
    pub p: f64,
    /// Total probability of a nontrivial two-qubit Pauli after a CNOT; each of the 15 gets a fifteenth.
    pub two_qubit_depol: f64,
    /// Flip probability of an initialization or a measurement record.
    pub prep_meas_flip: f64,
    /// Total idle depolarizing strength per qubit and time step; each of X, Y, Z gets a third.
    pub idle_depol: f64,
    /// Single-qubit depolarizing strength on the ideal `|+>` block of the Z gadget.
    pub gadget_depol: f64,
}

impl NoiseModel {
    pub fn new(p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p), "physical error rate {p} outside [0, 1]");
        Self {
            p,
            two_qubit_depol: p,
            prep_meas_flip: 2.0 * p / 3.0,
            idle_depol: p / 100.0,
            gadget_depol: p,
        }
    }

    pub fn noiseless() -> Self {
        Self::new(0.0)
    }
}
