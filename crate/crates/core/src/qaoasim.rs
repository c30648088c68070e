//! Dense statevector simulation of `H^n (e^{-i gamma H_C} e^{-i beta H_M})^p`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring;
use crate::boolexpr::MAX_VARS;
use crate::circuit::{PhaseGate, PhaseOracleCircuit};
use crate::error::{Error, Result};
use crate::hamiltonian::Mixer;

pub const GAMMA_MAX: f64 = 2.0 * PI;
pub const BETA_MAX: f64 = PI;

/// Amplitude `x` holds qubit `j` at bit `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "statevector needs at least one qubit".into(),
        ));
    }
    if n > MAX_VARS {
        return Err(Error::TooManyVariables {
            count: n,
            cap: MAX_VARS,
        });
    }
    Ok(())
}

pub fn init_plus_state(n: usize) -> Result<Statevector> {
    Statevector::plus(n)
}

impl Statevector {
    pub fn plus(n: usize) -> Result<Self> {
        check_width(n)?;
        let size = 1usize << n;
        let a = Complex64::new((size as f64).sqrt().recip(), 0.0);
        Ok(Statevector {
            n,
            amps: vec![a; size],
        })
    }

    pub fn basis(n: usize, x: u32) -> Result<Self> {
        check_width(n)?;
        let size = 1usize << n;
        if x as usize >= size {
            return Err(Error::InvalidArgument(format!(
                "basis index {x} exceeds {n} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); size];
        amps[x as usize] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let size = amps.len();
        if !size.is_power_of_two() || size < 2 {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {size} is not 2^n with n >= 1"
            )));
        }
        let n = size.trailing_zeros() as usize;
        check_width(n)?;
        Ok(Statevector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.amps.len() {
            return Err(Error::WidthMismatch {
                expected: self.amps.len(),
                found: len,
            });
        }
        Ok(())
    }

    /// `amp_x *= e^{-i gamma E(x)}`.
    pub fn apply_cost_layer(&mut self, energies: &[f64], gamma: f64) -> Result<()> {
        self.check_len(energies.len())?;
        for (a, &e) in self.amps.iter_mut().zip(energies) {
            *a *= Complex64::from_polar(1.0, -gamma * e);
        }
        Ok(())
    }

    /// `RX(theta)` on qubit `q`.
    pub fn apply_rx(&mut self, q: usize, theta: f64) {
        let c = Complex64::new((theta / 2.0).cos(), 0.0);
        let s = Complex64::new(0.0, -(theta / 2.0).sin());
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = c * a0 + s * a1;
                self.amps[i | bit] = s * a0 + c * a1;
            }
        }
    }

    pub fn apply_mixer_layer(&mut self, mixer: &Mixer, beta: f64) -> Result<()> {
        if mixer.num_qubits() != self.n {
            return Err(Error::WidthMismatch {
                expected: self.n,
                found: mixer.num_qubits(),
            });
        }
        for q in 0..self.n {
            self.apply_rx(q, mixer.angle(q, beta));
        }
        Ok(())
    }

    /// Applies the phase oracle gate by gate.
    pub fn apply_phase_oracle(&mut self, circ: &PhaseOracleCircuit) -> Result<()> {
        if circ.n_inputs() != self.n {
            return Err(Error::WidthMismatch {
                expected: self.n,
                found: circ.n_inputs(),
            });
        }
        for g in circ.gates() {
            match g {
                PhaseGate::X(q) => {
                    let bit = 1usize << q;
                    for i in 0..self.amps.len() {
                        if i & bit == 0 {
                            self.amps.swap(i, i | bit);
                        }
                    }
                }
                PhaseGate::Mcz(qs) => {
                    let mask = qs.iter().fold(0usize, |m, &q| m | (1 << q));
                    for (i, a) in self.amps.iter_mut().enumerate() {
                        if i & mask == mask {
                            *a = -*a;
                        }
                    }
                }
                PhaseGate::GlobalPhase => self.amps.iter_mut().for_each(|a| *a = -*a),
            }
        }
        Ok(())
    }

    /// `sum_x |amp_x|^2 E(x)`.
    pub fn expectation(&self, energies: &[f64]) -> Result<f64> {
        self.check_len(energies.len())?;
        Ok(self
            .amps
            .iter()
            .zip(energies)
            .map(|(a, &e)| a.norm_sqr() * e)
            .sum())
    }

    /// Seeded multinomial draw from `|amp|^2`.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<Histogram> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tally = vec![0u64; self.amps.len()];
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            tally[idx] += 1;
        }
        let counts = tally
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(x, &c)| (bitstring(x as u32, self.n), c))
            .collect();
        Ok(Histogram { shots, counts })
    }
}

/// Measurement tallies keyed by bitstring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl Histogram {
    pub fn new(counts: BTreeMap<String, u64>) -> Self {
        Histogram {
            shots: counts.values().sum(),
            counts,
        }
    }

    pub fn frequency(&self, key: &str) -> f64 {
        if self.shots == 0 {
            return 0.0;
        }
        self.counts.get(key).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    /// Width of the recorded bitstrings, if any.
    pub fn num_qubits(&self) -> Option<usize> {
        self.counts.keys().next().map(String::len)
    }
}

/// Angles for `p` layers: `gammas` in `[0, 2pi]`, `betas` in `[0, pi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QaoaParams {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::InvalidParams("p must be at least 1".into()));
        }
        if gammas.len() != betas.len() {
            return Err(Error::InvalidParams(format!(
                "{} gammas but {} betas",
                gammas.len(),
                betas.len()
            )));
        }
        for &g in &gammas {
            if !(0.0..=GAMMA_MAX).contains(&g) {
                return Err(Error::InvalidParams(format!("gamma {g} outside [0, 2pi]")));
            }
        }
        for &b in &betas {
            if !(0.0..=BETA_MAX).contains(&b) {
                return Err(Error::InvalidParams(format!("beta {b} outside [0, pi]")));
            }
        }
        Ok(QaoaParams { gammas, betas })
    }

    pub fn zeros(p: usize) -> Result<Self> {
        QaoaParams::new(vec![0.0; p], vec![0.0; p])
    }

    /// From the flat layout `[gamma_1..gamma_p, beta_1..beta_p]`.
    pub fn from_flat(x: &[f64]) -> Result<Self> {
        if !x.len().is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "odd parameter count {}",
                x.len()
            )));
        }
        let p = x.len() / 2;
        QaoaParams::new(x[..p].to_vec(), x[p..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Per-coordinate bounds in the flat layout.
    pub fn bounds(p: usize) -> Vec<(f64, f64)> {
        let mut b = vec![(0.0, GAMMA_MAX); p];
        b.extend(std::iter::repeat_n((0.0, BETA_MAX), p));
        b
    }
}

/// Uniform superposition followed by `p` cost/mixer layers.
pub fn run_qaoa(hc_diag: &[f64], mixer: &Mixer, params: &QaoaParams) -> Result<Statevector> {
    let mut state = Statevector::plus(mixer.num_qubits())?;
    state.check_len(hc_diag.len())?;
    for (&g, &b) in params.gammas.iter().zip(&params.betas) {
        state.apply_cost_layer(hc_diag, g)?;
        state.apply_mixer_layer(mixer, b)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_mixer, MixerConvention};

    const POS_DIAG: [f64; 8] = [-1.0, 0.0, 0.0, 0.0, 0.0, -1.0, -1.0, -1.0];

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn plus_state() {
        let s = Statevector::plus(1).unwrap();
        assert!(close(
            s.amplitudes()[0].re,
            std::f64::consts::FRAC_1_SQRT_2,
            1e-15
        ));
        let s3 = Statevector::plus(3).unwrap();
        assert!(s3
            .amplitudes()
            .iter()
            .all(|a| a.im == 0.0 && a == &s3.amplitudes()[0]));
        assert!(close(s3.norm(), 1.0, 1e-15));
        assert!(Statevector::plus(0).is_err());
        assert!(Statevector::plus(17).is_err());
    }

    #[test]
    fn cost_layer() {
        let mut s = Statevector::plus(3).unwrap();
        let orig = s.clone();
        s.apply_cost_layer(&POS_DIAG, 0.0).unwrap();
        assert_eq!(s, orig);
        s.apply_cost_layer(&POS_DIAG, PI).unwrap();
        for (x, &e) in POS_DIAG.iter().enumerate() {
            let want = if e == -1.0 {
                -orig.amplitudes()[x]
            } else {
                orig.amplitudes()[x]
            };
            assert!((s.amplitudes()[x] - want).norm() < 1e-15);
        }
        let mut t = orig.clone();
        t.apply_cost_layer(&[0.7; 8], 1.3).unwrap();
        assert_eq!(t.probabilities(), orig.probabilities());
        assert!(t.apply_cost_layer(&[0.0; 4], 1.0).is_err());
    }

    #[test]
    fn mixer_layer() {
        let m = build_mixer(1, 2.0).unwrap();
        let mut s = Statevector::basis(1, 0).unwrap();
        s.apply_mixer_layer(&m, PI / 2.0).unwrap();
        assert!(close(s.probabilities()[1], 1.0, 1e-15));
        assert!((s.amplitudes()[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);

        let mut id = Statevector::plus(2).unwrap();
        let before = id.clone();
        id.apply_mixer_layer(&build_mixer(2, 2.0).unwrap(), 0.0)
            .unwrap();
        assert_eq!(id, before);

        let mh = build_mixer(1, 2.0)
            .unwrap()
            .with_convention(MixerConvention::Hamiltonian);
        let mut h = Statevector::basis(1, 0).unwrap();
        h.apply_mixer_layer(&mh, PI / 4.0).unwrap();
        assert!(close(h.probabilities()[1], 1.0, 1e-15));
    }

    #[test]
    fn mixer_matches_dense_kronecker() {
        let n = 3;
        let m = build_mixer(n, 2.0).unwrap();
        let beta = 0.37;
        let theta = m.angle(0, beta);
        let rx = [
            [
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::new(0.0, -(theta / 2.0).sin()),
            ],
            [
                Complex64::new(0.0, -(theta / 2.0).sin()),
                Complex64::new((theta / 2.0).cos(), 0.0),
            ],
        ];
        let amps: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new((i as f64 * 0.3).cos(), (i as f64 * 0.7).sin()))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<Complex64> = amps.iter().map(|a| a / norm).collect();
        let mut s = Statevector::from_amplitudes(amps.clone()).unwrap();
        s.apply_mixer_layer(&m, beta).unwrap();
        for row in 0..8usize {
            let mut acc = Complex64::new(0.0, 0.0);
            for col in 0..8usize {
                let mut e = Complex64::new(1.0, 0.0);
                for q in 0..n {
                    e *= rx[(row >> q) & 1][(col >> q) & 1];
                }
                acc += e * amps[col];
            }
            assert!((acc - s.amplitudes()[row]).norm() < 1e-12);
        }
    }

    #[test]
    fn run_and_expectation() {
        let m = build_mixer(3, 2.0).unwrap();
        let s = run_qaoa(&POS_DIAG, &m, &QaoaParams::zeros(1).unwrap()).unwrap();
        assert_eq!(s, Statevector::plus(3).unwrap());
        assert!(close(s.expectation(&POS_DIAG).unwrap(), -0.5, 1e-15));
        let b = Statevector::basis(3, 0).unwrap();
        assert_eq!(b.expectation(&POS_DIAG).unwrap(), -1.0);
        assert_eq!(s.expectation(&[0.0; 8]).unwrap(), 0.0);
        let params = QaoaParams::new(vec![1.0, 2.0, 3.0], vec![0.5, 1.5, 2.5]).unwrap();
        let r = run_qaoa(&POS_DIAG, &m, &params).unwrap();
        assert!(close(r.norm(), 1.0, 1e-10));
        let e = r.expectation(&POS_DIAG).unwrap();
        assert!((-1.0..=0.0).contains(&e));
    }

    #[test]
    fn params_validation() {
        assert!(QaoaParams::new(vec![7.0], vec![0.0]).is_err());
        assert!(QaoaParams::new(vec![0.0], vec![3.2]).is_err());
        assert!(QaoaParams::new(vec![0.0], vec![]).is_err());
        assert!(QaoaParams::new(vec![], vec![]).is_err());
        let p = QaoaParams::from_flat(&[1.0, 2.0, 0.1, 0.2]).unwrap();
        assert_eq!(p.gammas(), [1.0, 2.0]);
        assert_eq!(p.betas(), [0.1, 0.2]);
        assert_eq!(p.to_flat(), vec![1.0, 2.0, 0.1, 0.2]);
        assert_eq!(
            QaoaParams::bounds(1),
            vec![(0.0, GAMMA_MAX), (0.0, BETA_MAX)]
        );
    }

    #[test]
    fn sampling() {
        let b = Statevector::basis(3, 0b101).unwrap();
        let h = b.sample(1024, 7).unwrap();
        assert_eq!(h.counts.len(), 1);
        assert_eq!(h.counts["101"], 1024);
        let u = Statevector::plus(2).unwrap();
        assert_eq!(u.sample(500, 3).unwrap(), u.sample(500, 3).unwrap());
        assert!(u.sample(0, 3).is_err());
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(json, r#"{"shots":1024,"counts":{"101":1024}}"#);
    }

    #[test]
    fn uniform_sampling_within_three_sigma() {
        let u = Statevector::plus(2).unwrap();
        let shots = 1_000_000u64;
        let h = u.sample(shots, 11).unwrap();
        let sigma = (shots as f64 * 0.25 * 0.75).sqrt();
        for k in ["00", "01", "10", "11"] {
            assert!((h.counts[k] as f64 - 250_000.0).abs() < 3.0 * sigma, "{k}");
        }
        assert_eq!(h.counts.values().sum::<u64>(), shots);
    }

    #[test]
    fn phase_oracle_application() {
        let circ = PhaseOracleCircuit::new(
            2,
            vec![PhaseGate::X(0), PhaseGate::Mcz(vec![0, 1]), PhaseGate::X(0)],
        )
        .unwrap();
        for x in 0..4u32 {
            let mut s = Statevector::basis(2, x).unwrap();
            s.apply_phase_oracle(&circ).unwrap();
            let want = circ.phase_of_bits(x) as f64;
            assert_eq!(s.amplitudes()[x as usize], Complex64::new(want, 0.0));
        }
    }
}
