//! Classical half of the loop: Nelder-Mead over `(gamma, beta)`, the solve
//! driver, solution extraction and brute-force verification.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boolexpr::{BoolExpr, TruthTable};
use crate::circuit::{
    build_boolean_oracle, build_esop_oracle, gate_report, transform_to_phase, GateReport, Stage,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{generate_hc, overlap_warning, Mixer, MixerConvention, DEFAULT_OMEGA};
use crate::qaoasim::{run_qaoa, Histogram, QaoaParams, BETA_MAX, GAMMA_MAX};
use crate::synth::{dsop_synthesize, EsopForm};
use crate::{bitstring, parse_bitstring};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Why a minimization run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    BudgetExhausted,
}

/// Budget-limited, bound-projecting evaluation of an objective. Every call is
/// recorded in the trace.
pub struct Evaluator<'a> {
    f: &'a mut dyn FnMut(&[f64]) -> f64,
    bounds: Vec<(f64, f64)>,
    budget: usize,
    trace: Vec<(Vec<f64>, f64)>,
    best: Option<usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        f: &'a mut dyn FnMut(&[f64]) -> f64,
        bounds: Vec<(f64, f64)>,
        budget: usize,
    ) -> Self {
        Evaluator {
            f,
            bounds,
            budget,
            trace: Vec::new(),
            best: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn project(&self, x: &mut [f64]) {
        for (v, &(lo, hi)) in x.iter_mut().zip(&self.bounds) {
            *v = v.clamp(lo, hi);
        }
    }

    pub fn nfev(&self) -> usize {
        self.trace.len()
    }

    /// Projects `x` in place and evaluates it; `None` once the budget is spent.
    pub fn eval(&mut self, x: &mut [f64]) -> Option<f64> {
        if self.trace.len() >= self.budget {
            return None;
        }
        self.project(x);
        let fx = (self.f)(x);
        if self.best.is_none_or(|b| fx < self.trace[b].1) {
            self.best = Some(self.trace.len());
        }
        self.trace.push((x.to_vec(), fx));
        Some(fx)
    }
}

/// A derivative-free local minimizer driving an [`Evaluator`].
pub trait Minimizer {
    fn run(&self, eval: &mut Evaluator<'_>, x0: &[f64]) -> Status;
}

/// Nelder-Mead simplex with projection onto the box after every move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    /// Initial simplex edge as a fraction of each coordinate's range.
    pub initial_step: f64,
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            initial_step: 0.15,
            f_tol: 1e-6,
            x_tol: 1e-5,
        }
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

impl Minimizer for NelderMead {
    fn run(&self, ev: &mut Evaluator<'_>, x0: &[f64]) -> Status {
        let d = ev.dim();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
        let mut start = x0.to_vec();
        let Some(f0) = ev.eval(&mut start) else {
            return Status::BudgetExhausted;
        };
        simplex.push((start.clone(), f0));
        for i in 0..d {
            let (lo, hi) = ev.bounds()[i];
            let h = self.initial_step * (hi - lo);
            let mut v = start.clone();
            v[i] = if v[i] + h <= hi { v[i] + h } else { v[i] - h };
            let Some(fv) = ev.eval(&mut v) else {
                return Status::BudgetExhausted;
            };
            simplex.push((v, fv));
        }

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let f_spread = simplex[d].1 - simplex[0].1;
            let x_spread = simplex[1..]
                .iter()
                .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if f_spread <= self.f_tol && x_spread <= self.x_tol {
                return Status::Converged;
            }

            let mut centroid = vec![0.0; d];
            for (v, _) in &simplex[..d] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / d as f64;
                }
            }
            let worst = simplex[d].clone();

            let mut xr = lerp(&centroid, &worst.0, -1.0);
            let Some(fr) = ev.eval(&mut xr) else {
                return Status::BudgetExhausted;
            };

            if fr < simplex[0].1 {
                let mut xe = lerp(&centroid, &worst.0, -2.0);
                let Some(fe) = ev.eval(&mut xe) else {
                    return Status::BudgetExhausted;
                };
                simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[d - 1].1 {
                simplex[d] = (xr, fr);
                continue;
            }
            let (mut xc, limit) = if fr < worst.1 {
                (lerp(&centroid, &xr, 0.5), fr)
            } else {
                (lerp(&centroid, &worst.0, 0.5), worst.1)
            };
            let Some(fc) = ev.eval(&mut xc) else {
                return Status::BudgetExhausted;
            };
            if fc < limit {
                simplex[d] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let mut xs = lerp(&best, &vertex.0, 0.5);
                let Some(fs) = ev.eval(&mut xs) else {
                    return Status::BudgetExhausted;
                };
                *vertex = (xs, fs);
            }
        }
    }
}

/// Outcome of one minimization run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub best: QaoaParams,
    pub best_energy: f64,
    pub nfev: usize,
    /// Every evaluation in order, as flat `[gammas, betas]` and energy.
    pub trace: Vec<(Vec<f64>, f64)>,
    pub status: Status,
}

impl OptimizationResult {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    /// Running minimum of the trace energies.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.trace
            .iter()
            .scan(f64::INFINITY, |m, (_, f)| {
                *m = m.min(*f);
                Some(*m)
            })
            .collect()
    }
}

/// Smallest budget accepted for depth `p`.
pub fn min_budget(p: usize) -> usize {
    2 * p + 2
}

/// Uniform draw of `gamma in [0, 2pi]`, `beta in [0, pi]` for `p` layers.
pub fn random_params(p: usize, seed: u64) -> QaoaParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gammas = (0..p).map(|_| rng.random_range(0.0..=GAMMA_MAX)).collect();
    let betas = (0..p).map(|_| rng.random_range(0.0..=BETA_MAX)).collect();
    QaoaParams::new(gammas, betas).expect("draws lie within bounds")
}

/// Minimizes from a seeded random start with the default Nelder-Mead.
pub fn minimize(
    objective: impl FnMut(&QaoaParams) -> f64,
    p: usize,
    budget: usize,
    seed: u64,
) -> Result<OptimizationResult> {
    minimize_from(
        &NelderMead::default(),
        objective,
        &random_params(p, seed),
        budget,
    )
}

/// Minimizes from `x0` with any [`Minimizer`].
pub fn minimize_from(
    minimizer: &dyn Minimizer,
    mut objective: impl FnMut(&QaoaParams) -> f64,
    x0: &QaoaParams,
    budget: usize,
) -> Result<OptimizationResult> {
    let p = x0.p();
    if budget < min_budget(p) {
        return Err(Error::InvalidBudget {
            budget,
            minimum: min_budget(p),
        });
    }
    let mut flat = |x: &[f64]| objective(&QaoaParams::from_flat(x).expect("projected into bounds"));
    let mut ev = Evaluator::new(&mut flat, QaoaParams::bounds(p), budget);
    let status = minimizer.run(&mut ev, &x0.to_flat());
    let best = ev.best.expect("at least one evaluation");
    let (x, e) = ev.trace[best].clone();
    Ok(OptimizationResult {
        best: QaoaParams::from_flat(&x)?,
        best_energy: e,
        nfev: ev.trace.len(),
        trace: ev.trace,
        status,
    })
}

/// How the objective estimates `<H_C>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    Exact,
    /// Mean energy over `shots` samples; evaluation `k` uses a seed derived
    /// from `seed` and `k`.
    Sampled {
        shots: u64,
        seed: u64,
    },
}

/// `<H_C>` of the QAOA state as a function of the angles.
#[derive(Debug, Clone)]
pub struct QaoaObjective {
    diag: Vec<f64>,
    mixer: Mixer,
    mode: ObjectiveMode,
    calls: u64,
}

pub fn qaoa_objective(hc_diag: Vec<f64>, mixer: Mixer, mode: ObjectiveMode) -> QaoaObjective {
    QaoaObjective {
        diag: hc_diag,
        mixer,
        mode,
        calls: 0,
    }
}

impl QaoaObjective {
    pub fn value(&mut self, params: &QaoaParams) -> f64 {
        let state = run_qaoa(&self.diag, &self.mixer, params).expect("widths agree");
        self.calls += 1;
        match self.mode {
            ObjectiveMode::Exact => state.expectation(&self.diag).expect("widths agree"),
            ObjectiveMode::Sampled { shots, seed } => {
                let hist = state
                    .sample(shots, derive_seed(seed, self.calls))
                    .expect("shots >= 1");
                hist.counts
                    .iter()
                    .map(|(k, &c)| c as f64 * self.diag[parse_bitstring(k).unwrap() as usize])
                    .sum::<f64>()
                    / shots as f64
            }
        }
    }
}

/// splitmix64 mixing of a base seed with a stream tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn table_solutions(table: &TruthTable) -> BTreeSet<String> {
    table
        .minterms()
        .into_iter()
        .map(|x| bitstring(x, table.num_vars()))
        .collect()
}

/// Every satisfying assignment by exhaustive enumeration.
pub fn brute_force_solutions(expr: &BoolExpr) -> Result<BTreeSet<String>> {
    let n = expr.num_vars();
    Ok((0..1u32 << n)
        .filter(|&x| expr.eval_bits(x))
        .map(|x| bitstring(x, n))
        .collect())
}

/// Peak-reading policy for measured histograms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtractPolicy {
    pub alpha: f64,
}

impl Default for ExtractPolicy {
    fn default() -> Self {
        ExtractPolicy { alpha: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extraction {
    pub solutions: BTreeSet<String>,
    /// False when no string rises above 1.5x the uniform frequency; every
    /// observed string is then returned.
    pub concentrated: bool,
}

pub const NO_CONCENTRATION: &str = "no concentration: histogram peak is within 1.5x of uniform";

/// Strings with frequency `>= max(alpha * f_max, 1.5 / 2^n)`.
pub fn extract_solutions(hist: &Histogram, policy: ExtractPolicy) -> Result<Extraction> {
    let n = hist.num_qubits().ok_or(Error::EmptyHistogram)?;
    if hist.shots == 0 {
        return Err(Error::EmptyHistogram);
    }
    let shots = hist.shots as f64;
    let f_max = hist.counts.values().copied().max().unwrap_or(0) as f64 / shots;
    let floor = 1.5 / (1u64 << n) as f64;
    if f_max < floor {
        return Ok(Extraction {
            solutions: hist.counts.keys().cloned().collect(),
            concentrated: false,
        });
    }
    let threshold = (policy.alpha * f_max).max(floor);
    Ok(Extraction {
        solutions: hist
            .counts
            .iter()
            .filter(|(_, &c)| c as f64 / shots >= threshold)
            .map(|(k, _)| k.clone())
            .collect(),
        concentrated: true,
    })
}

/// Input to [`solve`].
#[derive(Debug, Clone)]
pub enum Problem {
    Formula(BoolExpr),
    Esop(EsopForm),
}

impl Problem {
    pub fn num_vars(&self) -> usize {
        match self {
            Problem::Formula(e) => e.num_vars(),
            Problem::Esop(f) => f.num_vars(),
        }
    }

    pub fn truth_table(&self) -> Result<TruthTable> {
        match self {
            Problem::Formula(e) => e.truth_table(),
            Problem::Esop(f) => f.truth_table(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveConfig {
    /// Fixed depth; `None` escalates `p = 1..=max_p`.
    pub p: Option<usize>,
    pub max_p: usize,
    pub shots: u64,
    /// Evaluations per restart.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    pub objective: ObjectiveMode,
    pub mixer_convention: MixerConvention,
    pub omega: f64,
    pub extract: ExtractPolicy,
    /// A restart is accepted once its extracted peaks hold more than this mass
    /// and at least the solution mass implied by its energy.
    pub target_mass: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            p: None,
            max_p: 6,
            shots: 1024,
            budget: 500,
            restarts: 5,
            seed: DEFAULT_SEED,
            objective: ObjectiveMode::Exact,
            mixer_convention: MixerConvention::Gate,
            omega: DEFAULT_OMEGA,
            extract: ExtractPolicy::default(),
            target_mass: 0.7,
        }
    }
}

impl SolveConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.p == Some(0) {
            return bad("p must be at least 1");
        }
        if self.max_p == 0 {
            return bad("max-p must be at least 1");
        }
        if self.shots == 0 {
            return bad("shots must be at least 1");
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if let ObjectiveMode::Sampled { shots: 0, .. } = self.objective {
            return bad("sampled objective needs at least 1 shot");
        }
        let p_max = self.p.unwrap_or(self.max_p);
        if self.budget < min_budget(p_max) {
            return Err(Error::InvalidBudget {
                budget: self.budget,
                minimum: min_budget(p_max),
            });
        }
        Ok(())
    }
}

/// Summary of one depth tried during escalation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Attempt {
    pub p: usize,
    pub energy: f64,
    pub nfev: usize,
    pub peak_mass: f64,
    pub concentrated: bool,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub solutions: Vec<String>,
    pub success_probability: f64,
    pub approximation_ratio: f64,
    /// Evaluations spent at the reported depth, over all restarts.
    pub nfev: usize,
    pub p: usize,
    pub histogram: Histogram,
    pub gate_report: GateReport,
    pub seed: u64,
    pub energy: f64,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub converged: bool,
    /// Whether `solutions` equals the brute-force solution set.
    pub verified: bool,
    /// Whether the reported restart met the acceptance criterion.
    pub accepted: bool,
    pub expected_solutions: Vec<String>,
    pub esop: String,
    pub variables: Vec<String>,
    pub total_nfev: usize,
    pub attempts: Vec<Attempt>,
    pub warnings: Vec<String>,
}

/// Seed stream for the readout histogram of each restart.
const SAMPLE_STREAM: u64 = 1 << 63;

/// Allowed shortfall of the extracted peak mass against the solution mass
/// implied by the energy.
pub const MASS_TOLERANCE: f64 = 0.05;

struct Candidate {
    opt: OptimizationResult,
    histogram: Histogram,
    extraction: Extraction,
    peak_mass: f64,
    accepted: bool,
}

struct DepthRun {
    best: Candidate,
    restart_nfev: usize,
    all_converged: bool,
}

/// Full pipeline: synthesis, oracles, H_C, restarts of the variational loop
/// at increasing depth, sampling, extraction and verification.
pub fn solve(problem: &Problem, config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    let table = problem.truth_table()?;
    let mut warnings = Vec::new();

    let form = match problem {
        Problem::Esop(f) if f.is_disjoint() => f.clone(),
        Problem::Esop(f) => {
            warnings.extend(overlap_warning(f));
            warnings.push("resynthesized a disjoint form from the truth table".to_string());
            dsop_synthesize(&table).with_var_names(f.var_names())?
        }
        Problem::Formula(e) => dsop_synthesize(&table).with_var_names(e.var_names())?,
    };
    if table.count_ones() == 0 {
        return Err(Error::Unsatisfiable);
    }

    let n = form.num_vars();
    let esop_oracle = build_esop_oracle(&form);
    let phase = transform_to_phase(&esop_oracle)?;
    let boolean = match problem {
        Problem::Formula(e) => build_boolean_oracle(e).ok(),
        Problem::Esop(_) => None,
    };
    let mut stages = Vec::new();
    if let Some(b) = &boolean {
        stages.push(("boolean_oracle", Stage::Boolean(b)));
    }
    stages.push(("esop_oracle", Stage::Boolean(&esop_oracle)));
    stages.push(("phase_oracle", Stage::Phase(&phase)));
    let report = gate_report(&stages);

    let hc = generate_hc(&phase);
    let diag = hc.diag()?;
    let mixer = Mixer::uniform(n, config.omega, config.mixer_convention)?;
    let e_min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let e_max = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let depths: Vec<usize> = match config.p {
        Some(p) => vec![p],
        None => (1..=config.max_p).collect(),
    };

    let energy_range = (e_min, e_max);
    let mut attempts = Vec::new();
    let mut runs: Vec<DepthRun> = Vec::new();
    let mut total_nfev = 0;
    for &p in &depths {
        let run = run_depth(&diag, &mixer, p, config, energy_range)?;
        total_nfev += run.restart_nfev;
        attempts.push(Attempt {
            p,
            energy: run.best.opt.best_energy,
            nfev: run.restart_nfev,
            peak_mass: run.best.peak_mass,
            concentrated: run.best.extraction.concentrated,
            accepted: run.best.accepted,
        });
        let done = run.best.accepted;
        runs.push(run);
        if done {
            break;
        }
    }

    let chosen = if runs.last().is_some_and(|r| r.best.accepted) {
        runs.len() - 1
    } else {
        let mut best = 0;
        for (i, r) in runs.iter().enumerate() {
            if r.best.opt.best_energy < runs[best].best.opt.best_energy {
                best = i;
            }
        }
        best
    };
    let DepthRun {
        best: run,
        restart_nfev,
        all_converged,
    } = runs.swap_remove(chosen);
    if !run.accepted {
        warnings.push(format!(
            "no depth up to p = {} reached the acceptance criterion",
            depths.last().copied().unwrap_or(0)
        ));
    }
    if !run.extraction.concentrated {
        warnings.push(NO_CONCENTRATION.to_string());
    }
    if !all_converged {
        warnings.push("at least one restart exhausted its evaluation budget".to_string());
    }

    let expected = table_solutions(&table);
    let success_probability = run
        .histogram
        .counts
        .iter()
        .filter(|(k, _)| expected.contains(*k))
        .map(|(_, &c)| c)
        .sum::<u64>() as f64
        / run.histogram.shots as f64;
    let approximation_ratio = if e_min < 0.0 {
        run.opt.best_energy / e_min
    } else {
        1.0
    };

    Ok(SolveReport {
        solutions: run.extraction.solutions.iter().cloned().collect(),
        success_probability,
        approximation_ratio,
        nfev: restart_nfev,
        p: run.opt.best.p(),
        histogram: run.histogram,
        gate_report: report,
        seed: config.seed,
        energy: run.opt.best_energy,
        gammas: run.opt.best.gammas().to_vec(),
        betas: run.opt.best.betas().to_vec(),
        converged: all_converged,
        verified: run.extraction.solutions == expected,
        accepted: run.accepted,
        expected_solutions: expected.into_iter().collect(),
        esop: form.to_string(),
        variables: form.var_names().to_vec(),
        total_nfev,
        attempts,
        warnings,
    })
}

fn run_depth(
    diag: &[f64],
    mixer: &Mixer,
    p: usize,
    config: &SolveConfig,
    (e_min, e_max): (f64, f64),
) -> Result<DepthRun> {
    let mut best: Option<Candidate> = None;
    let mut restart_nfev = 0;
    let mut all_converged = true;
    for r in 0..config.restarts {
        let tag = ((p as u64) << 32) | r as u64;
        let mode = match config.objective {
            ObjectiveMode::Exact => ObjectiveMode::Exact,
            ObjectiveMode::Sampled { shots, seed } => ObjectiveMode::Sampled {
                shots,
                seed: derive_seed(seed, tag),
            },
        };
        let mut objective = qaoa_objective(diag.to_vec(), mixer.clone(), mode);
        let opt = minimize(
            |params| objective.value(params),
            p,
            config.budget,
            derive_seed(config.seed, tag),
        )?;
        restart_nfev += opt.nfev;
        all_converged &= opt.converged();

        let state = run_qaoa(diag, mixer, &opt.best)?;
        let histogram =
            state.sample(config.shots, derive_seed(config.seed, tag | SAMPLE_STREAM))?;
        let extraction = extract_solutions(&histogram, config.extract)?;
        let peak_mass: f64 = extraction
            .solutions
            .iter()
            .map(|k| histogram.frequency(k))
            .sum();
        let accepted = if e_max > e_min {
            let energy_mass = (e_max - opt.best_energy) / (e_max - e_min);
            extraction.concentrated
                && peak_mass > config.target_mass
                && peak_mass >= energy_mass - MASS_TOLERANCE
        } else {
            true
        };
        let cand = Candidate {
            opt,
            histogram,
            extraction,
            peak_mass,
            accepted,
        };
        let better = match &best {
            None => true,
            Some(b) => {
                (cand.accepted && !b.accepted)
                    || (cand.accepted == b.accepted && cand.opt.best_energy < b.opt.best_energy)
            }
        };
        if better {
            best = Some(cand);
        }
    }
    Ok(DepthRun {
        best: best.expect("restarts >= 1"),
        restart_nfev,
        all_converged,
    })
}
