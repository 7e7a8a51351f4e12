//! Shared helpers for the integration tests: an Aaronson-Gottesman
//! stabilizer tableau used as an oracle for the Pauli-frame simulator.

#![allow(dead_code)]

pub mod tableau;

use ftsp::code::registry_lookup;
use ftsp::protocol::{build_protocol, ProtocolSchedule};
use ftsp::synth::{synth_quadruple, SynthConfig};
use ftsp::CssCode;

/// Synthesized quadruple of a registry code under the default config.
pub fn quadruple(name: &str) -> (CssCode, [ftsp::PrepCircuit; 4]) {
    let code = registry_lookup(name).unwrap();
    let q = synth_quadruple(&code, &SynthConfig::default()).unwrap();
    (code, q.circuits)
}

pub fn schedule(code: &CssCode, c: &[ftsp::PrepCircuit; 4]) -> ProtocolSchedule {
    build_protocol([&c[0], &c[1], &c[2], &c[3]], code).unwrap()
}

/// Runs the `ftsp` binary.
pub fn ftsp(args: &[&str]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_ftsp"))
        .args(args)
        .output()
        .unwrap()
}

/// Parity of `a & b`.
pub fn odd(a: u64, b: u64) -> bool {
    (a & b).count_ones() % 2 == 1
}
