//! Diagonal cost Hamiltonians as Pauli-Z polynomials with exact dyadic
//! coefficients, and the transverse-field mixer.
//!
//! Convention: `Z|0> = +|0>`, `Z|1> = -|1>`, so the term `Z_S` evaluates to
//! `(-1)^{popcount(S & x)}` on basis state `x`.
//!
//! Composition of one gate:
//! - Boolean `MCX(Q -> f)`: `H_f = 2^{-|Q|} prod_{j in Q} (I - Z_j)`, whose
//!   diagonal is the AND of the controls.
//! - Phase `MCZ(Q)`: `H_g = -H_f`, diagonal `-1` exactly where all of `Q` are 1.
//! - An X frame `F` around a gate maps every `Z_S` to `(-1)^{|S & F|} Z_S`.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg};

use serde::Serialize;

use crate::boolexpr::MAX_VARS;
use crate::circuit::{BooleanGate, PhaseGate, PhaseOracleCircuit};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::synth::EsopForm;

/// Sum of `coeff * Z_S` over qubit subsets `S` (bitmasks). The empty subset
/// is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliZPolynomial {
    n: usize,
    terms: BTreeMap<u32, Dyadic>,
}

impl PauliZPolynomial {
    pub fn zero(n: usize) -> Self {
        PauliZPolynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize, coeff: Dyadic) -> Self {
        let mut p = Self::zero(n);
        p.add_term(0, coeff);
        p
    }

    /// Builds from `(subset, coefficient)` pairs, merging repeats.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (u32, Dyadic)>) -> Result<Self> {
        let limit = if n >= 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut p = Self::zero(n);
        for (mask, c) in terms {
            if mask & !limit != 0 {
                return Err(Error::InvalidArgument(format!(
                    "term {mask:#b} acts outside {n} qubits"
                )));
            }
            p.add_term(mask, c);
        }
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, mask: u32, coeff: Dyadic) {
        let c = self.terms.entry(mask).or_insert(Dyadic::ZERO);
        *c += coeff;
        if c.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn coeff(&self, mask: u32) -> Dyadic {
        self.terms.get(&mask).copied().unwrap_or(Dyadic::ZERO)
    }

    /// Non-zero terms in ascending mask order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, Dyadic)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, k: Dyadic) -> Self {
        let mut p = Self::zero(self.n);
        for (m, c) in self.terms() {
            p.add_term(m, c * k);
        }
        p
    }

    /// Conjugation by `X` on every qubit in `flipped`.
    pub fn x_conjugate(&self, flipped: u32) -> Self {
        PauliZPolynomial {
            n: self.n,
            terms: self
                .terms()
                .map(|(m, c)| {
                    if (m & flipped).count_ones() % 2 == 1 {
                        (m, -c)
                    } else {
                        (m, c)
                    }
                })
                .collect(),
        }
    }

    /// Exact energies of all `2^n` basis states (fast Walsh-Hadamard transform).
    pub fn diag_exact(&self) -> Result<Vec<Dyadic>> {
        if self.n > MAX_VARS {
            return Err(Error::TooManyVariables {
                count: self.n,
                cap: MAX_VARS,
            });
        }
        let size = 1usize << self.n;
        let mut v = vec![Dyadic::ZERO; size];
        for (m, c) in self.terms() {
            v[m as usize] = c;
        }
        let mut h = 1;
        while h < size {
            for block in (0..size).step_by(2 * h) {
                for i in block..block + h {
                    let (a, b) = (v[i], v[i + h]);
                    v[i] = a + b;
                    v[i + h] = a - b;
                }
            }
            h *= 2;
        }
        Ok(v)
    }

    pub fn diag(&self) -> Result<Vec<f64>> {
        Ok(self.diag_exact()?.iter().map(Dyadic::to_f64).collect())
    }

    /// Energy of a single basis state.
    pub fn energy(&self, x: u32) -> Dyadic {
        self.terms()
            .map(|(m, c)| if (m & x).count_ones() % 2 == 1 { -c } else { c })
            .fold(Dyadic::ZERO, |a, b| a + b)
    }

    /// `('ZIZ', coeff)` pairs, qubit 0 rightmost, identity first then
    /// ascending mask.
    pub fn to_pauli_strings(&self) -> Vec<(String, f64)> {
        self.terms()
            .map(|(m, c)| (pauli_label(m, self.n, 'Z'), c.to_f64()))
            .collect()
    }

    pub fn to_json(&self) -> HamiltonianJson {
        let strings = self.to_pauli_strings();
        HamiltonianJson {
            paulis: strings.iter().map(|(s, _)| s.clone()).collect(),
            coeffs: strings.iter().map(|(_, c)| *c).collect(),
            exact: Some(self.terms().map(|(_, c)| c.to_string()).collect()),
        }
    }
}

impl Add for &PauliZPolynomial {
    type Output = PauliZPolynomial;
    fn add(self, rhs: &PauliZPolynomial) -> PauliZPolynomial {
        let mut p = self.clone();
        p += rhs;
        p
    }
}

impl AddAssign<&PauliZPolynomial> for PauliZPolynomial {
    fn add_assign(&mut self, rhs: &PauliZPolynomial) {
        self.n = self.n.max(rhs.n);
        for (m, c) in rhs.terms() {
            self.add_term(m, c);
        }
    }
}

impl Neg for &PauliZPolynomial {
    type Output = PauliZPolynomial;
    fn neg(self) -> PauliZPolynomial {
        self.scale(-Dyadic::ONE)
    }
}

impl Mul for &PauliZPolynomial {
    type Output = PauliZPolynomial;
    fn mul(self, rhs: &PauliZPolynomial) -> PauliZPolynomial {
        // Z_S Z_T = Z_{S xor T}
        let mut p = PauliZPolynomial::zero(self.n.max(rhs.n));
        for (a, ca) in self.terms() {
            for (b, cb) in rhs.terms() {
                p.add_term(a ^ b, ca * cb);
            }
        }
        p
    }
}

fn pauli_label(mask: u32, n: usize, op: char) -> String {
    (0..n)
        .rev()
        .map(|j| if (mask >> j) & 1 == 1 { op } else { 'I' })
        .collect()
}

/// JSON layout `{"paulis": [...], "coeffs": [...]}`; `exact` carries the
/// rational coefficients for cost Hamiltonians.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HamiltonianJson {
    pub paulis: Vec<String>,
    pub coeffs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<String>>,
}

/// `2^{-|Q|} prod_{j in Q} (I - Z_j)` over `n` qubits.
fn and_projector(n: usize, qubits: u32) -> PauliZPolynomial {
    let k = qubits.count_ones();
    let mut p = PauliZPolynomial::zero(n);
    let mut sub = qubits;
    loop {
        let sign = if sub.count_ones() % 2 == 1 { -1 } else { 1 };
        p.add_term(sub, Dyadic::new(sign, k));
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & qubits;
    }
    p
}

fn mask_of(qubits: &[usize]) -> u32 {
    qubits.iter().fold(0, |m, &q| m | (1 << q))
}

/// Boolean composition rule for a CX/MCX gate onto `fqubit`; the result acts
/// on qubits `0..fqubit` and its diagonal is the gate's Boolean function.
pub fn compose_hf(gate: &BooleanGate, fqubit: usize) -> Result<PauliZPolynomial> {
    match gate {
        BooleanGate::Mcx { controls, target } if *target == fqubit && !controls.is_empty() => {
            if let Some(&q) = controls.iter().find(|&&q| q >= fqubit) {
                return Err(Error::UnsupportedGate(format!(
                    "{gate}: control q{q} is not an input qubit"
                )));
            }
            Ok(and_projector(fqubit, mask_of(controls)))
        }
        _ => Err(Error::UnsupportedGate(format!(
            "{gate}: expected a CX or MCX onto q{fqubit}"
        ))),
    }
}

/// Phase composition rule for a Z/CZ/MCZ gate over `n` qubits: the negated
/// Boolean rule. A global phase composes to `-I`.
pub fn compose_hg(gate: &PhaseGate, n: usize) -> Result<PauliZPolynomial> {
    match gate {
        PhaseGate::Mcz(qs) if !qs.is_empty() => {
            if let Some(&q) = qs.iter().find(|&&q| q >= n) {
                return Err(Error::UnsupportedGate(format!("{gate}: q{q} out of range")));
            }
            Ok(-&and_projector(n, mask_of(qs)))
        }
        PhaseGate::GlobalPhase => Ok(PauliZPolynomial::identity(n, -Dyadic::ONE)),
        _ => Err(Error::UnsupportedGate(format!(
            "{gate}: only Z-type gates compose into H_g"
        ))),
    }
}

/// Conjugation of `poly` by X on the qubits in `flipped`.
pub fn x_conjugate(poly: &PauliZPolynomial, flipped: &[usize]) -> PauliZPolynomial {
    poly.x_conjugate(mask_of(flipped))
}

/// One Z-type gate's contribution while walking a phase oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HgStep {
    pub gate_index: usize,
    /// Composition of the bare gate.
    pub raw: PauliZPolynomial,
    /// X frame in force at the gate.
    pub frame: u32,
    /// `raw` conjugated by `frame`; this is what enters H_C.
    pub conjugated: PauliZPolynomial,
}

/// Per-gate composition steps, left to right.
pub fn hc_steps(circ: &PhaseOracleCircuit) -> Vec<HgStep> {
    let n = circ.n_inputs();
    let mut frame = 0u32;
    let mut steps = Vec::new();
    for (i, g) in circ.gates().iter().enumerate() {
        match g {
            PhaseGate::X(q) => frame ^= 1 << q,
            _ => {
                let raw = compose_hg(g, n).expect("validated phase oracle");
                let conjugated = raw.x_conjugate(frame);
                steps.push(HgStep {
                    gate_index: i,
                    raw,
                    frame,
                    conjugated,
                });
            }
        }
    }
    steps
}

/// H_C of a phase oracle: the sum of every gate's H_g under the X frame in
/// force at that gate, with like terms combined exactly.
pub fn generate_hc(circ: &PhaseOracleCircuit) -> PauliZPolynomial {
    let mut hc = PauliZPolynomial::zero(circ.n_inputs());
    for step in hc_steps(circ) {
        hc += &step.conjugated;
    }
    hc
}

/// Warning for ESOP forms whose cubes overlap: the cost diagonal then counts
/// satisfied cubes, so its minima need not be the function's solutions.
pub fn overlap_warning(form: &EsopForm) -> Option<String> {
    if form.is_disjoint() {
        None
    } else {
        Some(format!(
            "ESOP form `{form}` has overlapping cubes; H_C energies count satisfied cubes and \
             minimum-energy states may not be solutions"
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MixerConvention {
    /// `RX(omega * beta)` on each qubit.
    #[default]
    Gate,
    /// `exp(-i beta omega X)`, i.e. `RX(2 * omega * beta)`.
    Hamiltonian,
}

impl std::str::FromStr for MixerConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gate" => Ok(MixerConvention::Gate),
            "hamiltonian" => Ok(MixerConvention::Hamiltonian),
            _ => Err(Error::InvalidArgument(format!(
                "unknown mixer convention {s:?}"
            ))),
        }
    }
}

/// Transverse-field mixer `sum_j omega_j X_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixer {
    omegas: Vec<f64>,
    convention: MixerConvention,
}

pub const DEFAULT_OMEGA: f64 = 2.0;

pub fn build_mixer(n: usize, omega: f64) -> Result<Mixer> {
    Mixer::uniform(n, omega, MixerConvention::Gate)
}

impl Mixer {
    pub fn uniform(n: usize, omega: f64, convention: MixerConvention) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "mixer needs at least one qubit".into(),
            ));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "omega must be positive, got {omega}"
            )));
        }
        Ok(Mixer {
            omegas: vec![omega; n],
            convention,
        })
    }

    pub fn with_convention(mut self, convention: MixerConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn convention(&self) -> MixerConvention {
        self.convention
    }

    /// RX rotation angle on qubit `j` for mixer angle `beta`.
    pub fn angle(&self, j: usize, beta: f64) -> f64 {
        match self.convention {
            MixerConvention::Gate => self.omegas[j] * beta,
            MixerConvention::Hamiltonian => 2.0 * self.omegas[j] * beta,
        }
    }

    /// `(["XI..I", ..., "I..IX"], [omega...])`, highest qubit first.
    pub fn to_pauli_strings(&self) -> (Vec<String>, Vec<f64>) {
        let n = self.omegas.len();
        (0..n)
            .rev()
            .map(|j| (pauli_label(1 << j, n, 'X'), self.omegas[j]))
            .unzip()
    }

    pub fn to_json(&self) -> HamiltonianJson {
        let (paulis, coeffs) = self.to_pauli_strings();
        HamiltonianJson {
            paulis,
            coeffs,
            exact: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_esop_oracle, transform_to_phase};
    use crate::synth::parse_cubes;

    fn d(num: i64, exp: u32) -> Dyadic {
        Dyadic::new(num, exp)
    }

    // qubits a=0, b=1, c=2
    const A: u32 = 1;
    const B: u32 = 2;
    const C: u32 = 4;

    fn naive_energy(p: &PauliZPolynomial, x: u32) -> f64 {
        p.terms()
            .map(|(m, c)| {
                let s = if (m & x).count_ones() % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                s * c.to_f64()
            })
            .sum()
    }

    #[test]
    fn hf_for_cx() {
        let g = BooleanGate::mcx(vec![0], 1).unwrap();
        let p = compose_hf(&g, 1).unwrap();
        assert_eq!(p.coeff(0), d(1, 1));
        assert_eq!(p.coeff(1), d(-1, 1));
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn hf_toffoli_diagonal_is_and() {
        let g = BooleanGate::mcx(vec![0, 1], 2).unwrap();
        let p = compose_hf(&g, 2).unwrap();
        // 1/4 I - 1/4 (Z0 + Z1 - Z0 Z1)
        let expected = PauliZPolynomial::from_terms(
            2,
            [(0, d(1, 2)), (A, d(-1, 2)), (B, d(-1, 2)), (A | B, d(1, 2))],
        )
        .unwrap();
        assert_eq!(p, expected);
        assert_eq!(p.diag().unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn hf_rejects_bad_gates() {
        assert!(compose_hf(&BooleanGate::X(1), 1).is_err());
        let wrong_target = BooleanGate::mcx(vec![0], 1).unwrap();
        assert!(compose_hf(&wrong_target, 2).is_err());
        let empty = BooleanGate::Mcx {
            controls: vec![],
            target: 1,
        };
        assert!(compose_hf(&empty, 1).is_err());
    }

    #[test]
    fn hg_rules_one_two_three() {
        let z = compose_hg(&PhaseGate::Mcz(vec![2]), 3).unwrap();
        assert_eq!(
            z,
            PauliZPolynomial::from_terms(3, [(0, d(-1, 1)), (C, d(1, 1))]).unwrap()
        );

        let cz = compose_hg(&PhaseGate::Mcz(vec![1, 2]), 3).unwrap();
        let hg5 = PauliZPolynomial::from_terms(
            3,
            [(0, d(-1, 2)), (B, d(1, 2)), (C, d(1, 2)), (B | C, d(-1, 2))],
        )
        .unwrap();
        assert_eq!(cz, hg5);

        let ccz = compose_hg(&PhaseGate::Mcz(vec![0, 1, 2]), 3).unwrap();
        let e = d(1, 3);
        let hg1 = PauliZPolynomial::from_terms(
            3,
            [
                (0, -e),
                (A, e),
                (B, e),
                (C, e),
                (A | B, -e),
                (A | C, -e),
                (B | C, -e),
                (A | B | C, e),
            ],
        )
        .unwrap();
        assert_eq!(ccz, hg1);
        assert!(compose_hg(&PhaseGate::X(0), 3).is_err());
        assert!(compose_hg(&PhaseGate::Mcz(vec![]), 3).is_err());
    }

    #[test]
    fn x_conjugation_flips_signs() {
        let hg1 = compose_hg(&PhaseGate::Mcz(vec![0, 1, 2]), 3).unwrap();
        let hg2 = x_conjugate(&hg1, &[0, 1, 2]);
        let e = d(-1, 3);
        for m in 0..8 {
            assert_eq!(hg2.coeff(m), e, "mask {m}");
        }
        assert_eq!(x_conjugate(&hg1, &[]), hg1);
    }

    #[test]
    fn x_conjugation_permutes_diagonal() {
        let p = PauliZPolynomial::from_terms(
            3,
            [
                (0, d(3, 2)),
                (A, d(-1, 3)),
                (B | C, d(5, 4)),
                (A | B | C, d(-7, 1)),
            ],
        )
        .unwrap();
        let base = p.diag().unwrap();
        for flipped in 0..8u32 {
            let q = p.x_conjugate(flipped).diag().unwrap();
            for x in 0..8u32 {
                assert_eq!(q[x as usize], base[(x ^ flipped) as usize]);
            }
        }
    }

    #[test]
    fn hc_of_pos_phase_oracle() {
        let p = transform_to_phase(&build_esop_oracle(
            &parse_cubes("~a~b~c ^ a~bc ^ bc").unwrap(),
        ))
        .unwrap();
        let hc = generate_hc(&p);
        let expected = PauliZPolynomial::from_terms(
            3,
            [
                (0, d(-1, 1)),
                (C, d(1, 2)),
                (A | C, d(-1, 2)),
                (B | C, d(-1, 2)),
                (A | B | C, d(-1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(hc, expected);
        let diag = hc.diag().unwrap();
        let solutions = [0b000, 0b101, 0b110, 0b111];
        for x in 0..8u32 {
            let want = if solutions.contains(&x) { -1.0 } else { 0.0 };
            assert_eq!(diag[x as usize], want);
            assert_eq!(naive_energy(&hc, x), want);
        }
        assert_eq!(
            hc.to_pauli_strings(),
            vec![
                ("III".to_string(), -0.5),
                ("ZII".to_string(), 0.25),
                ("ZIZ".to_string(), -0.25),
                ("ZZI".to_string(), -0.25),
                ("ZZZ".to_string(), -0.25),
            ]
        );
    }

    #[test]
    fn hc_trivial_cases() {
        let empty = PhaseOracleCircuit::new(3, vec![]).unwrap();
        assert!(generate_hc(&empty).is_empty());
        assert_eq!(generate_hc(&empty).diag().unwrap(), vec![0.0; 8]);
        let z = PhaseOracleCircuit::new(1, vec![PhaseGate::Mcz(vec![0])]).unwrap();
        assert_eq!(
            generate_hc(&z),
            PauliZPolynomial::from_terms(1, [(0, d(-1, 1)), (1, d(1, 1))]).unwrap()
        );
        let c = PauliZPolynomial::identity(2, d(3, 1));
        assert_eq!(c.diag().unwrap(), vec![1.5; 4]);
    }

    #[test]
    fn pauli_string_rendering() {
        assert_eq!(
            PauliZPolynomial::identity(2, Dyadic::ONE).to_pauli_strings(),
            vec![("II".to_string(), 1.0)]
        );
        assert_eq!(
            PauliZPolynomial::from_terms(3, [(1, d(1, 1))])
                .unwrap()
                .to_pauli_strings(),
            vec![("IIZ".to_string(), 0.5)]
        );
    }

    #[test]
    fn polynomial_product_uses_xor_of_subsets() {
        let za = PauliZPolynomial::from_terms(2, [(A, Dyadic::ONE)]).unwrap();
        let i_minus_zb =
            PauliZPolynomial::from_terms(2, [(0, Dyadic::ONE), (B, -Dyadic::ONE)]).unwrap();
        let prod = &za * &i_minus_zb;
        assert_eq!(prod.coeff(A), Dyadic::ONE);
        assert_eq!(prod.coeff(A | B), -Dyadic::ONE);
        assert_eq!(&(&za * &za), &PauliZPolynomial::identity(2, Dyadic::ONE));
    }

    #[test]
    fn mixer_rendering() {
        let m = build_mixer(3, DEFAULT_OMEGA).unwrap();
        assert_eq!(
            m.to_pauli_strings(),
            (
                vec!["XII".to_string(), "IXI".to_string(), "IIX".to_string()],
                vec![2.0, 2.0, 2.0]
            )
        );
        let m1 = build_mixer(1, 2.0).unwrap();
        assert_eq!(m1.to_pauli_strings(), (vec!["X".to_string()], vec![2.0]));
        assert_eq!(build_mixer(3, 1.0).unwrap().omegas(), [1.0, 1.0, 1.0]);
        assert!(build_mixer(0, 2.0).is_err());
        assert!(build_mixer(2, 0.0).is_err());
        assert_eq!(m.angle(0, 0.5), 1.0);
        assert_eq!(
            m.with_convention(MixerConvention::Hamiltonian)
                .angle(0, 0.5),
            2.0
        );
    }

    #[test]
    fn json_layout() {
        let p = PauliZPolynomial::from_terms(2, [(0, d(-1, 1)), (2, d(1, 2))]).unwrap();
        let json = serde_json::to_string(&p.to_json()).unwrap();
        assert_eq!(
            json,
            r#"{"paulis":["II","ZI"],"coeffs":[-0.5,0.25],"exact":["-1/2","1/4"]}"#
        );
        let m = serde_json::to_string(&build_mixer(2, 2.0).unwrap().to_json()).unwrap();
        assert_eq!(m, r#"{"paulis":["XI","IX"],"coeffs":[2.0,2.0]}"#);
    }

    #[test]
    fn overlapping_forms_warn() {
        assert!(overlap_warning(&parse_cubes("~a~b ^ c").unwrap()).is_some());
        assert!(overlap_warning(&parse_cubes("~a~b~c ^ a~bc ^ bc").unwrap()).is_none());
    }
}
