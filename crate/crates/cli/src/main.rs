//! `bhtqaoa`: stage-by-stage command line for the Boolean-to-QAOA pipeline.

use std::path::Path;
use std::process::ExitCode;

use bhtqaoa_core::circuit::{build_boolean_oracle, BooleanOracleCircuit, PhaseOracleCircuit};
use bhtqaoa_core::hamiltonian::{overlap_warning, DEFAULT_OMEGA};
use bhtqaoa_core::optimize::{ObjectiveMode, DEFAULT_SEED};
use bhtqaoa_core::synth::parse_cubes_with_order;
use bhtqaoa_core::{
    bitstring, build_esop_oracle, dsop_synthesize, gate_report, generate_hc, solve, BoolExpr,
    Error, EsopForm, Mixer, MixerConvention, Problem, SolveConfig, SolveReport, Stage, TruthTable,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const EXIT_PARSE: u8 = 2;
const EXIT_COMPILE: u8 = 3;
const EXIT_UNSAT: u8 = 4;
const EXIT_BUDGET: u8 = 5;

#[derive(Parser)]
#[command(
    name = "bhtqaoa",
    version,
    about = "Compile Boolean formulas into phase oracles and QAOA Hamiltonians, then solve them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and dump its variables and true minterms.
    Parse(InputArgs),
    /// Build the Boolean, ESOP and phase oracles with a gate report.
    Compile(CompileArgs),
    /// Emit H_C and H_M as Pauli strings.
    Hamiltonian(HamiltonianArgs),
    /// Run the full variational loop and report the measured solutions.
    Solve(SolveArgs),
    /// List every satisfying assignment by brute force.
    Verify(InputArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Formula text, or a path to a file containing it.
    input: String,
    /// Read the input as an XOR-of-cubes list such as `~a~b~c ^ a~bc ^ bc`.
    #[arg(long)]
    cubes: bool,
    /// Comma-separated variable order; unlisted variables follow by first appearance.
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Fail with exit code 3 when the formula's own structure has no Boolean oracle.
    #[arg(long)]
    no_fallback: bool,
}

#[derive(Args)]
struct HamiltonianArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Mixer coefficient.
    #[arg(long, default_value_t = DEFAULT_OMEGA)]
    omega: f64,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Fixed number of layers; omit to escalate from 1 up to --max-p.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 6)]
    max_p: usize,
    #[arg(long, default_value_t = 1024)]
    shots: u64,
    /// Objective evaluations per restart.
    #[arg(long, default_value_t = 500)]
    budget: usize,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Objective::Exact)]
    objective: Objective,
    #[arg(long, value_enum, default_value_t = Convention::Gate)]
    mixer_convention: Convention,
    #[arg(long, default_value_t = DEFAULT_OMEGA)]
    omega: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Gate,
    Hamiltonian,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnsupportedStructure(_)
            | Error::Transform { .. }
            | Error::UnsupportedGate(_) => EXIT_COMPILE,
            Error::Unsatisfiable => EXIT_UNSAT,
            Error::InvalidBudget { .. } => EXIT_BUDGET,
            _ => EXIT_PARSE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<(String, u8), Failure>;

/// Parsed input: a formula or a cube list.
enum Source {
    Formula(BoolExpr),
    Cubes(EsopForm),
}

impl Source {
    fn load(args: &InputArgs) -> Result<Self, Failure> {
        let text = if Path::new(&args.input).is_file() {
            std::fs::read_to_string(&args.input).map_err(|e| Failure {
                code: EXIT_PARSE,
                message: format!("cannot read {}: {e}", args.input),
            })?
        } else {
            args.input.clone()
        };
        let text = text.trim();
        if args.cubes {
            Ok(Source::Cubes(parse_cubes_with_order(text, &args.vars)?))
        } else {
            Ok(Source::Formula(BoolExpr::parse_with_order(
                text, &args.vars,
            )?))
        }
    }

    fn var_names(&self) -> &[String] {
        match self {
            Source::Formula(e) => e.var_names(),
            Source::Cubes(f) => f.var_names(),
        }
    }

    fn truth_table(&self) -> Result<TruthTable, Failure> {
        Ok(match self {
            Source::Formula(e) => e.truth_table()?,
            Source::Cubes(f) => f.truth_table()?,
        })
    }

    fn text(&self) -> String {
        match self {
            Source::Formula(e) => e.unparse(),
            Source::Cubes(f) => f.to_string(),
        }
    }

    /// Cube list used for the ESOP and phase stages: the given cubes, or a
    /// synthesized disjoint cover of a formula.
    fn esop(&self) -> Result<EsopForm, Failure> {
        Ok(match self {
            Source::Cubes(f) => f.clone(),
            Source::Formula(e) => {
                dsop_synthesize(&e.truth_table()?).with_var_names(e.var_names())?
            }
        })
    }
}

fn minterm_strings(table: &TruthTable) -> Vec<String> {
    table
        .minterms()
        .into_iter()
        .map(|x| bitstring(x, table.num_vars()))
        .collect()
}

fn render(format: Format, value: &Value, text: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("serializable"),
        Format::Text => text(),
    }
}

fn cmd_parse(args: &InputArgs) -> CliResult {
    let src = Source::load(args)?;
    let table = src.truth_table()?;
    let minterms = minterm_strings(&table);
    let n = table.num_vars();
    let constant = if table.count_ones() == 0 {
        Some(false)
    } else if table.count_ones() == 1 << n {
        Some(true)
    } else {
        None
    };
    let value = json!({
        "expression": src.text(),
        "variables": src.var_names(),
        "num_vars": n,
        "minterms": minterms,
        "num_minterms": minterms.len(),
        "constant": constant,
    });
    let out = render(args.format, &value, || {
        let mut s = format!("expression: {}\n", src.text());
        for (j, v) in src.var_names().iter().enumerate() {
            s.push_str(&format!("q{j}: {v}\n"));
        }
        match constant {
            Some(c) => s.push_str(&format!("constant {}\n", if c { "true" } else { "false" })),
            None => s.push_str(&format!(
                "{} true minterms: {}\n",
                minterms.len(),
                minterms.join(" ")
            )),
        }
        s
    });
    Ok((out, 0))
}

fn cmd_compile(args: &CompileArgs) -> CliResult {
    let src = Source::load(&args.input)?;
    let mut warnings = Vec::new();
    let boolean: Option<BooleanOracleCircuit> = match &src {
        Source::Formula(e) => match build_boolean_oracle(e) {
            Ok(c) => Some(c),
            Err(err) if args.no_fallback => return Err(err.into()),
            Err(err) => {
                warnings.push(format!("{err}; showing the synthesized ESOP oracle only"));
                None
            }
        },
        Source::Cubes(_) => None,
    };
    let form = src.esop()?;
    let esop = build_esop_oracle(&form);
    let phase: PhaseOracleCircuit = bhtqaoa_core::transform_to_phase(&esop)?;
    let mut stages = Vec::new();
    if let Some(b) = &boolean {
        stages.push(("boolean_oracle", Stage::Boolean(b)));
    }
    stages.push(("esop_oracle", Stage::Boolean(&esop)));
    stages.push(("phase_oracle", Stage::Phase(&phase)));
    let report = gate_report(&stages);

    let value = json!({
        "variables": src.var_names(),
        "esop": form.to_string(),
        "disjoint": form.is_disjoint(),
        "boolean_oracle": boolean.as_ref().map(|b| b.to_text()),
        "esop_oracle": esop.to_text(),
        "phase_oracle": phase.to_text(),
        "gate_report": report,
        "warnings": warnings,
    });
    let out = render(args.input.format, &value, || {
        let mut s = String::new();
        for w in &warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        s.push_str(&format!("esop: {form}\n\n"));
        if let Some(b) = &boolean {
            s.push_str(&format!("# boolean oracle\n{}\n", b.to_text()));
        }
        s.push_str(&format!("# esop oracle\n{}\n", esop.to_text()));
        s.push_str(&format!("# phase oracle\n{}\n", phase.to_text()));
        s.push_str(&report.render_table());
        s
    });
    Ok((out, 0))
}

fn cmd_hamiltonian(args: &HamiltonianArgs) -> CliResult {
    let src = Source::load(&args.input)?;
    let form = src.esop()?;
    let warnings: Vec<String> = overlap_warning(&form).into_iter().collect();
    let phase = bhtqaoa_core::transform_to_phase(&build_esop_oracle(&form))?;
    let hc = generate_hc(&phase);
    let n = form.num_vars();
    let hm = if n == 0 {
        None
    } else {
        Some(Mixer::uniform(n, args.omega, MixerConvention::Gate)?)
    };
    let value = json!({
        "variables": src.var_names(),
        "esop": form.to_string(),
        "hc": hc.to_json(),
        "hm": hm.as_ref().map(Mixer::to_json),
        "warnings": warnings,
    });
    let out = render(args.input.format, &value, || {
        let mut s = String::new();
        for w in &warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        let (paulis, coeffs): (Vec<String>, Vec<String>) = hc
            .to_pauli_strings()
            .into_iter()
            .map(|(p, c)| (format!("'{p}'"), c.to_string()))
            .unzip();
        s.push_str(&format!(
            "H_C = ([{}], coeffs = [{}])\n",
            paulis.join(", "),
            coeffs.join(", ")
        ));
        if let Some(m) = &hm {
            let (p, c) = m.to_pauli_strings();
            let p: Vec<String> = p.iter().map(|x| format!("'{x}'")).collect();
            let c: Vec<String> = c.iter().map(|x| format!("{x:?}")).collect();
            s.push_str(&format!(
                "H_M = ([{}], coeffs = [{}])\n",
                p.join(", "),
                c.join(", ")
            ));
        }
        s
    });
    Ok((out, 0))
}

fn solve_text(r: &SolveReport) -> String {
    let mut s = String::new();
    for w in &r.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    s.push_str(&format!("solutions: {}\n", r.solutions.join(" ")));
    s.push_str(&format!(
        "verified: {} (brute force: {})\n",
        if r.verified { "yes" } else { "no" },
        r.expected_solutions.join(" ")
    ));
    s.push_str(&format!(
        "success probability: {:.4}\n",
        r.success_probability
    ));
    s.push_str(&format!(
        "approximation ratio: {:.4}\n",
        r.approximation_ratio
    ));
    s.push_str(&format!("energy: {:.6}\n", r.energy));
    s.push_str(&format!(
        "p: {}  nfev: {}  total nfev: {}  seed: {}\n",
        r.p, r.nfev, r.total_nfev, r.seed
    ));
    s.push_str(&format!("gammas: {:?}\nbetas: {:?}\n", r.gammas, r.betas));
    s.push_str(&format!("histogram ({} shots):\n", r.histogram.shots));
    for (k, c) in &r.histogram.counts {
        s.push_str(&format!("  {k} {c}\n"));
    }
    s
}

fn cmd_solve(args: &SolveArgs) -> CliResult {
    let src = Source::load(&args.input)?;
    let problem = match src {
        Source::Formula(e) => Problem::Formula(e),
        Source::Cubes(f) => Problem::Esop(f),
    };
    let config = SolveConfig {
        p: args.p,
        max_p: args.max_p,
        shots: args.shots,
        budget: args.budget,
        restarts: args.restarts,
        seed: args.seed,
        objective: match args.objective {
            Objective::Exact => ObjectiveMode::Exact,
            Objective::Sampled => ObjectiveMode::Sampled {
                shots: args.shots,
                seed: args.seed,
            },
        },
        mixer_convention: match args.mixer_convention {
            Convention::Gate => MixerConvention::Gate,
            Convention::Hamiltonian => MixerConvention::Hamiltonian,
        },
        omega: args.omega,
        ..SolveConfig::default()
    };
    let report = solve(&problem, &config)?;
    let value = serde_json::to_value(&report).expect("serializable");
    let out = render(args.input.format, &value, || solve_text(&report));
    Ok((out, if report.accepted { 0 } else { EXIT_BUDGET }))
}

fn cmd_verify(args: &InputArgs) -> CliResult {
    let src = Source::load(args)?;
    let solutions = minterm_strings(&src.truth_table()?);
    let value = json!(solutions);
    let out = render(args.format, &value, || {
        solutions.iter().map(|s| format!("{s}\n")).collect()
    });
    Ok((out, 0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Parse(a) => cmd_parse(a),
        Command::Compile(a) => cmd_compile(a),
        Command::Hamiltonian(a) => cmd_hamiltonian(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok((out, code)) => {
            print!("{out}");
            if !out.ends_with('\n') {
                println!();
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
