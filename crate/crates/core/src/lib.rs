//! Compile classical Boolean formulas into ancilla-free phase oracles and
//! Pauli-Z cost Hamiltonians, then recover every satisfying assignment with a
//! simulated QAOA loop.
//!
//! Pipeline: [`boolexpr`] → [`synth`] (disjoint ESOP) → [`circuit`] (Boolean
//! oracle, then phase oracle) → [`hamiltonian`] (H_C and H_M) → [`qaoasim`]
//! and [`optimize`] (variational loop and verification).
//!
//! Qubit `j` is variable `j` everywhere. Bitstrings are rendered with qubit 0
//! as the rightmost character.

pub mod boolexpr;
pub mod circuit;
pub mod dyadic;
pub mod error;
pub mod fixtures;
pub mod hamiltonian;
pub mod optimize;
pub mod qaoasim;
pub mod synth;

pub use boolexpr::{BoolExpr, Expr, TruthTable, MAX_VARS};
pub use circuit::{
    build_boolean_oracle, build_esop_oracle, gate_report, transform_to_phase, BooleanGate,
    BooleanOracleCircuit, GateReport, GateRow, PhaseGate, PhaseOracleCircuit, Stage,
};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use hamiltonian::{
    build_mixer, compose_hf, compose_hg, generate_hc, Mixer, MixerConvention, PauliZPolynomial,
};
pub use optimize::{
    brute_force_solutions, extract_solutions, minimize, solve, NelderMead, ObjectiveMode,
    OptimizationResult, Problem, SolveConfig, SolveReport,
};
pub use qaoasim::{Histogram, QaoaParams, Statevector};
pub use synth::{dsop_synthesize, parse_cubes, Cube, EsopForm};

/// Renders assignment `x` over `n` qubits, qubit 0 rightmost.
pub fn bitstring(x: u32, n: usize) -> String {
    (0..n)
        .rev()
        .map(|j| if (x >> j) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`bitstring`].
pub fn parse_bitstring(s: &str) -> Result<u32> {
    if s.len() > MAX_VARS {
        return Err(Error::TooManyVariables {
            count: s.len(),
            cap: MAX_VARS,
        });
    }
    s.chars().try_fold(0u32, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::InvalidArgument(format!("not a bitstring: {s:?}"))),
    })
}

/// Packs `x[j]` into bit `j`.
pub fn pack_bits(x: &[bool]) -> u32 {
    x.iter()
        .enumerate()
        .fold(0, |acc, (j, &b)| acc | ((b as u32) << j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_zero_is_rightmost() {
        // (a,b,c) = (1,0,1) with a = qubit 0
        assert_eq!(bitstring(0b101, 3), "101");
        assert_eq!(bitstring(0b011, 3), "011");
        assert_eq!(bitstring(0b001, 4), "0001");
        assert_eq!(bitstring(0, 0), "");
        assert_eq!(parse_bitstring("0110").unwrap(), 0b0110);
        assert!(parse_bitstring("01a").is_err());
        assert_eq!(pack_bits(&[true, false, false]), 1);
    }
}
