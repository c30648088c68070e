//! The five reference applications and their known solution sets.

use crate::boolexpr::BoolExpr;
use crate::synth::{parse_cubes, EsopForm};

/// One reference application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Application {
    pub name: &'static str,
    pub formula: &'static str,
    /// Explicit variable order; empty means first appearance.
    pub order: &'static [&'static str],
    /// Satisfying assignments, qubit 0 rightmost, ascending.
    pub solutions: &'static [&'static str],
}

impl Application {
    pub fn expr(&self) -> BoolExpr {
        BoolExpr::parse_with_order(self.formula, self.order).expect("fixture formula parses")
    }

    pub fn num_vars(&self) -> usize {
        self.expr().num_vars()
    }
}

pub const POS: Application = Application {
    name: "pos",
    formula: "(a | b | ~c) & (~a | c) & (~b | c)",
    order: &[],
    solutions: &["000", "101", "110", "111"],
};

pub const SOP: Application = Application {
    name: "sop",
    formula: "(a & b & ~c) | (~a & c) | (~b & c)",
    order: &[],
    solutions: &["011", "100", "101", "110"],
};

pub const ESOP: Application = Application {
    name: "esop",
    formula: "(a & b & ~c) ^ (~a & c) ^ (~b & c)",
    order: &[],
    solutions: &["011", "101", "110"],
};

pub const SUDOKU: Application = Application {
    name: "sudoku",
    formula: "(cell_1 ^ cell_2) & (cell_1 ^ cell_3) & (cell_2 ^ cell_4) & (cell_3 ^ cell_4)",
    order: &[],
    solutions: &["0110", "1001"],
};

pub const HALF_ADDER: Application = Application {
    name: "half_adder",
    formula: "((a0 ^ b0) | ((a0 & b0) ^ (a1 ^ b1))) & ((a1 & b1) | ((a0 & b0) & (a1 ^ b1)))",
    order: &["a0", "a1", "b0", "b1"],
    solutions: &["1011", "1110", "1111"],
};

pub const APPLICATIONS: [Application; 5] = [POS, SOP, ESOP, SUDOKU, HALF_ADDER];

/// The ESOP form of the POS example, `~a~b~c ^ a~bc ^ bc`.
pub const POS_CUBES: &str = "~a~b~c ^ a~bc ^ bc";

/// The ESOP application as a cube list, `ab~c ^ ~ac ^ ~bc`.
pub const ESOP_CUBES: &str = "ab~c ^ ~ac ^ ~bc";

pub fn pos_cubes() -> EsopForm {
    parse_cubes(POS_CUBES).expect("fixture cubes parse")
}

pub fn esop_cubes() -> EsopForm {
    parse_cubes(ESOP_CUBES).expect("fixture cubes parse")
}

/// Exact `H_C` of the POS example as `(subset mask, numerator, exponent)`
/// with a = bit 0, b = bit 1, c = bit 2.
pub const POS_HC_TERMS: [(u32, i64, u32); 5] = [
    (0b000, -1, 1),
    (0b100, 1, 2),
    (0b101, -1, 2),
    (0b110, -1, 2),
    (0b111, -1, 2),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstring;

    #[test]
    fn fixtures_match_their_solution_sets() {
        for app in APPLICATIONS {
            let e = app.expr();
            let n = e.num_vars();
            let sols: Vec<String> = (0..1u32 << n)
                .filter(|&x| e.eval_bits(x))
                .map(|x| bitstring(x, n))
                .collect();
            assert_eq!(sols, app.solutions, "{}", app.name);
        }
        assert!(!esop_cubes().is_disjoint());
        assert!(pos_cubes().is_disjoint());
    }
}
