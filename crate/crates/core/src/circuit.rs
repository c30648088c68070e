//! Boolean-oracle and phase-oracle circuit IR.
//!
//! Qubit layout: inputs `0..n`, then ancillae, with the output qubit
//! (fqubit) last. A phase oracle has no ancillae at all.
//!
//! Gate kinds are deliberately few: `X` and multi-controlled `X` for Boolean
//! oracles, `X` and multi-controlled `Z` for phase oracles. Adjacent `X`
//! pairs are never cancelled; Hamiltonian generation reads them.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::boolexpr::{BoolExpr, Expr};
use crate::error::{Error, Result};
use crate::synth::{Cube, EsopForm};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BooleanGate {
    X(usize),
    /// Toffoli family; one control is a CX. Controls are sorted.
    Mcx {
        controls: Vec<usize>,
        target: usize,
    },
}

impl BooleanGate {
    pub fn mcx(mut controls: Vec<usize>, target: usize) -> Result<Self> {
        controls.sort_unstable();
        if controls.is_empty() {
            return Err(Error::InvalidArgument(
                "MCX needs at least one control".into(),
            ));
        }
        if controls.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "repeated control in {controls:?}"
            )));
        }
        if controls.contains(&target) {
            return Err(Error::InvalidArgument(format!(
                "target q{target} is also a control"
            )));
        }
        Ok(BooleanGate::Mcx { controls, target })
    }

    /// Number of qubits the gate touches.
    pub fn arity(&self) -> usize {
        match self {
            BooleanGate::X(_) => 1,
            BooleanGate::Mcx { controls, .. } => controls.len() + 1,
        }
    }

    fn max_qubit(&self) -> usize {
        match self {
            BooleanGate::X(q) => *q,
            BooleanGate::Mcx { controls, target } => {
                controls.iter().copied().max().unwrap_or(0).max(*target)
            }
        }
    }
}

impl fmt::Display for BooleanGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BooleanGate::X(q) => write!(f, "x q{q}"),
            BooleanGate::Mcx { controls, target } => {
                f.write_str("mcx")?;
                for c in controls {
                    write!(f, " q{c}")?;
                }
                write!(f, " -> q{target}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PhaseGate {
    X(usize),
    /// Multi-controlled Z over a sorted, non-empty qubit set. Size 1 is `Z`,
    /// size 2 is `CZ`.
    Mcz(Vec<usize>),
    /// Unconditional `-1`, the phase image of an uncontrolled flip of fqubit.
    GlobalPhase,
}

impl PhaseGate {
    pub fn mcz(mut qubits: Vec<usize>) -> Result<Self> {
        qubits.sort_unstable();
        if qubits.is_empty() {
            return Err(Error::InvalidArgument(
                "MCZ needs at least one qubit".into(),
            ));
        }
        if qubits.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "repeated qubit in {qubits:?}"
            )));
        }
        Ok(PhaseGate::Mcz(qubits))
    }

    pub fn arity(&self) -> usize {
        match self {
            PhaseGate::X(_) => 1,
            PhaseGate::Mcz(qs) => qs.len(),
            PhaseGate::GlobalPhase => 0,
        }
    }
}

impl fmt::Display for PhaseGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseGate::X(q) => write!(f, "x q{q}"),
            PhaseGate::Mcz(qs) => {
                f.write_str(if qs.len() == 1 { "z" } else { "mcz" })?;
                for q in qs {
                    write!(f, " q{q}")?;
                }
                Ok(())
            }
            PhaseGate::GlobalPhase => f.write_str("gphase"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanOracleCircuit {
    n_inputs: usize,
    n_ancilla: usize,
    gates: Vec<BooleanGate>,
}

impl BooleanOracleCircuit {
    pub fn new(n_inputs: usize, n_ancilla: usize, gates: Vec<BooleanGate>) -> Result<Self> {
        if n_ancilla == 0 {
            return Err(Error::InvalidArgument(
                "a Boolean oracle needs at least the output qubit".into(),
            ));
        }
        let width = n_inputs + n_ancilla;
        if let Some(g) = gates.iter().find(|g| g.max_qubit() >= width) {
            return Err(Error::InvalidArgument(format!(
                "gate `{g}` exceeds circuit width {width}"
            )));
        }
        Ok(BooleanOracleCircuit {
            n_inputs,
            n_ancilla,
            gates,
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    /// Ancilla count including fqubit.
    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn num_qubits(&self) -> usize {
        self.n_inputs + self.n_ancilla
    }

    pub fn fqubit(&self) -> usize {
        self.num_qubits() - 1
    }

    pub fn gates(&self) -> &[BooleanGate] {
        &self.gates
    }

    /// Scratch ancillae beyond fqubit must be uncomputed.
    pub fn has_mirror(&self) -> bool {
        self.n_ancilla > 1
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("qubits {} {}\n", self.n_inputs, self.n_ancilla);
        for g in &self.gates {
            let _ = writeln!(s, "{g}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (n_inputs, n_ancilla, body) = parse_header(text)?;
        let mut gates = Vec::new();
        for (line_no, line) in body {
            let mut words = line.split_whitespace();
            let op = words.next().unwrap_or_default();
            let rest: Vec<&str> = words.collect();
            let gate = match op {
                "x" if rest.len() == 1 => BooleanGate::X(parse_qubit(rest[0], line_no)?),
                "mcx" => {
                    let arrow = rest
                        .iter()
                        .position(|w| *w == "->")
                        .ok_or_else(|| line_error(line_no, "mcx needs `->`"))?;
                    if arrow + 2 != rest.len() {
                        return Err(line_error(line_no, "mcx needs exactly one target"));
                    }
                    let controls = rest[..arrow]
                        .iter()
                        .map(|w| parse_qubit(w, line_no))
                        .collect::<Result<Vec<_>>>()?;
                    BooleanGate::mcx(controls, parse_qubit(rest[arrow + 1], line_no)?)?
                }
                _ => return Err(line_error(line_no, &format!("unknown gate line {line:?}"))),
            };
            gates.push(gate);
        }
        BooleanOracleCircuit::new(n_inputs, n_ancilla, gates)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseOracleCircuit {
    n_inputs: usize,
    gates: Vec<PhaseGate>,
}

impl PhaseOracleCircuit {
    pub fn new(n_inputs: usize, gates: Vec<PhaseGate>) -> Result<Self> {
        let bad = gates.iter().find(|g| match g {
            PhaseGate::X(q) => *q >= n_inputs,
            PhaseGate::Mcz(qs) => qs.iter().any(|&q| q >= n_inputs),
            PhaseGate::GlobalPhase => false,
        });
        if let Some(g) = bad {
            return Err(Error::InvalidArgument(format!(
                "gate `{g}` exceeds circuit width {n_inputs}"
            )));
        }
        Ok(PhaseOracleCircuit { n_inputs, gates })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn gates(&self) -> &[PhaseGate] {
        &self.gates
    }

    /// Sign imparted on basis state `x`, read with an X-flip frame.
    pub fn phase_of_bits(&self, x: u32) -> i8 {
        let mut frame = 0u32;
        let mut sign = 1i8;
        for g in &self.gates {
            match g {
                PhaseGate::X(q) => frame ^= 1 << q,
                PhaseGate::Mcz(qs) => {
                    let phys = x ^ frame;
                    if qs.iter().all(|&q| (phys >> q) & 1 == 1) {
                        sign = -sign;
                    }
                }
                PhaseGate::GlobalPhase => sign = -sign,
            }
        }
        sign
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("qubits {} 0\n", self.n_inputs);
        for g in &self.gates {
            let _ = writeln!(s, "{g}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (n_inputs, n_ancilla, body) = parse_header(text)?;
        if n_ancilla != 0 {
            return Err(line_error(1, "a phase oracle has no ancillae"));
        }
        let mut gates = Vec::new();
        for (line_no, line) in body {
            let mut words = line.split_whitespace();
            let op = words.next().unwrap_or_default();
            let qs = words
                .map(|w| parse_qubit(w, line_no))
                .collect::<Result<Vec<_>>>()?;
            let gate = match (op, qs.len()) {
                ("x", 1) => PhaseGate::X(qs[0]),
                ("z", 1) | ("cz", 2) | ("mcz", _) => PhaseGate::mcz(qs)?,
                ("gphase", 0) => PhaseGate::GlobalPhase,
                _ => return Err(line_error(line_no, &format!("unknown gate line {line:?}"))),
            };
            gates.push(gate);
        }
        PhaseOracleCircuit::new(n_inputs, gates)
    }
}

fn line_error(line: usize, message: &str) -> Error {
    Error::InvalidArgument(format!("line {line}: {message}"))
}

fn parse_qubit(word: &str, line: usize) -> Result<usize> {
    word.strip_prefix('q')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| line_error(line, &format!("bad qubit {word:?}")))
}

type Body<'a> = Vec<(usize, &'a str)>;

fn parse_header(text: &str) -> Result<(usize, usize, Body<'_>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| line_error(1, "missing `qubits` header"))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    match words.as_slice() {
        ["qubits", a, b] => {
            let n = a
                .parse()
                .map_err(|_| line_error(line_no, "bad input count"))?;
            let m = b
                .parse()
                .map_err(|_| line_error(line_no, "bad ancilla count"))?;
            Ok((n, m, lines.collect()))
        }
        _ => Err(line_error(line_no, "expected `qubits <inputs> <ancillae>`")),
    }
}

/// ESOP oracle: one fqubit, and per cube `X` on its negated qubits, the MCX
/// onto fqubit, then the same `X` gates again. No mirror.
pub fn build_esop_oracle(form: &EsopForm) -> BooleanOracleCircuit {
    let n = form.num_vars();
    let f = n;
    let mut gates = Vec::new();
    for cube in form.cubes() {
        let negated: Vec<usize> = bits_of(cube.neg()).collect();
        let controls: Vec<usize> = bits_of(cube.care()).collect();
        gates.extend(negated.iter().map(|&q| BooleanGate::X(q)));
        if controls.is_empty() {
            gates.push(BooleanGate::X(f));
        } else {
            gates.push(BooleanGate::Mcx {
                controls,
                target: f,
            });
        }
        gates.extend(negated.iter().map(|&q| BooleanGate::X(q)));
    }
    BooleanOracleCircuit {
        n_inputs: n,
        n_ancilla: 1,
        gates,
    }
}

fn bits_of(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |j| (mask >> j) & 1 == 1)
}

/// Builds a Boolean oracle mirroring the formula's own structure.
///
/// XOR-of-products formulas (including a single product or literal) compile
/// directly to the single-ancilla ESOP oracle. Anything else gets one ancilla
/// per distinct internal subformula plus fqubit: subformulas are computed
/// forward, the root is combined into fqubit, and the forward part is then
/// mirrored in reverse. OR uses De Morgan (controls X-flipped, output
/// inverted); XOR uses one CX per operand. X gates on a qubit are emitted only
/// when its current polarity differs from what the next gate needs.
pub fn build_boolean_oracle(expr: &BoolExpr) -> Result<BooleanOracleCircuit> {
    let n = expr.num_vars();
    if let Some(cubes) = esop_cubes(expr.root()) {
        let form = EsopForm::new(n, cubes)?;
        return Ok(build_esop_oracle(&form));
    }

    let mut core = expr.root();
    let mut negated = false;
    while let Expr::Not(inner) = core {
        core = inner;
        negated = !negated;
    }
    let literal_cube = |pos: u32, neg: u32| {
        let (pos, neg) = if negated { (neg, pos) } else { (pos, neg) };
        Cube::new(pos, neg)
    };
    let cubes = match core {
        Expr::Const(v) if *v != negated => vec![Cube::ONE],
        Expr::Const(_) => vec![],
        Expr::Var(j) => vec![literal_cube(1 << j, 0)?],
        _ => {
            let mut b = Builder::new(n);
            b.compute(core, Q::F, Sink::Root)?;
            if negated {
                b.root.push(G::X(Q::F));
            }
            return Ok(b.finish());
        }
    };
    Ok(build_esop_oracle(&EsopForm::new(n, cubes)?))
}

fn esop_cubes(e: &Expr) -> Option<Vec<Cube>> {
    fn product(e: &Expr) -> Option<Option<Cube>> {
        if let Some((j, neg)) = e.as_literal() {
            let bit = 1 << j;
            return Some(Some(if neg {
                Cube::new(0, bit).ok()?
            } else {
                Cube::new(bit, 0).ok()?
            }));
        }
        match e {
            Expr::Const(true) => Some(Some(Cube::ONE)),
            Expr::Const(false) => Some(None),
            Expr::And(cs) => {
                let (mut pos, mut neg) = (0u32, 0u32);
                for c in cs {
                    let (j, n) = c.as_literal()?;
                    if n {
                        neg |= 1 << j;
                    } else {
                        pos |= 1 << j;
                    }
                }
                Cube::new(pos, neg).ok().map(Some)
            }
            _ => None,
        }
    }
    match e {
        Expr::Xor(cs) => {
            let mut cubes = Vec::new();
            for c in cs {
                cubes.extend(product(c)?);
            }
            Some(cubes)
        }
        _ => product(e).map(|c| c.into_iter().collect()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Q {
    In(usize),
    Anc(usize),
    F,
}

#[derive(Debug, Clone)]
enum G {
    X(Q),
    Mcx(Vec<Q>, Q),
}

#[derive(Clone, Copy)]
enum Sink {
    Forward,
    Root,
}

struct Builder {
    n: usize,
    forward: Vec<G>,
    root: Vec<G>,
    // qubits whose physical value is currently the negation of their logical value
    frame: HashMap<Q, bool>,
    // polarity at the end of the forward pass, replayed before the mirror
    forward_frame: Option<HashMap<Q, bool>>,
    memo: HashMap<Expr, usize>,
    n_anc: usize,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder {
            n,
            forward: Vec::new(),
            root: Vec::new(),
            frame: HashMap::new(),
            forward_frame: None,
            memo: HashMap::new(),
            n_anc: 0,
        }
    }

    fn sink(&mut self, s: Sink) -> &mut Vec<G> {
        match s {
            Sink::Forward => &mut self.forward,
            Sink::Root => &mut self.root,
        }
    }

    fn flipped(&self, q: Q) -> bool {
        self.frame.get(&q).copied().unwrap_or(false)
    }

    fn set_polarity(&mut self, q: Q, flipped: bool, sink: Sink) {
        if self.flipped(q) != flipped {
            self.frame.insert(q, flipped);
            self.sink(sink).push(G::X(q));
        }
    }

    /// Qubit and polarity carrying the value of `e`.
    fn signal(&mut self, e: &Expr) -> Result<(Q, bool)> {
        match e {
            Expr::Var(j) => Ok((Q::In(*j), false)),
            Expr::Not(c) => self.signal(c).map(|(q, neg)| (q, !neg)),
            Expr::Const(_) => Err(Error::UnsupportedStructure(
                "constant nested inside a connective".into(),
            )),
            _ => {
                if let Some(&k) = self.memo.get(e) {
                    return Ok((Q::Anc(k), false));
                }
                let k = self.n_anc;
                self.n_anc += 1;
                self.compute(e, Q::Anc(k), Sink::Forward)?;
                self.memo.insert(e.clone(), k);
                Ok((Q::Anc(k), false))
            }
        }
    }

    fn compute(&mut self, e: &Expr, target: Q, sink: Sink) -> Result<()> {
        let mut operands = Vec::new();
        for c in e.children() {
            operands.push(self.signal(c)?);
        }
        if matches!(sink, Sink::Root) && self.forward_frame.is_none() {
            self.forward_frame = Some(self.frame.clone());
        }
        match e {
            Expr::And(_) | Expr::Or(_) => {
                let is_or = matches!(e, Expr::Or(_));
                let mut seen: BTreeMap<Q, bool> = BTreeMap::new();
                for &(q, neg) in &operands {
                    if let Some(&prev) = seen.get(&q) {
                        if prev != neg {
                            return Err(Error::UnsupportedStructure(
                                "a clause contains a variable and its negation".into(),
                            ));
                        }
                    }
                    seen.insert(q, neg);
                }
                let mut controls = Vec::new();
                for (&q, &neg) in &seen {
                    self.set_polarity(q, neg ^ is_or, sink);
                    controls.push(q);
                }
                self.sink(sink).push(G::Mcx(controls, target));
                if is_or {
                    self.sink(sink).push(G::X(target));
                }
            }
            Expr::Xor(_) => {
                let mut parity = false;
                for &(q, neg) in &operands {
                    self.sink(sink).push(G::Mcx(vec![q], target));
                    parity ^= neg ^ self.flipped(q);
                }
                if parity {
                    self.sink(sink).push(G::X(target));
                }
            }
            _ => unreachable!("compute is only called on connectives"),
        }
        Ok(())
    }

    fn finish(mut self) -> BooleanOracleCircuit {
        let end_of_forward = self.forward_frame.take().unwrap_or_default();
        let mut restore: Vec<Q> = self
            .frame
            .keys()
            .chain(end_of_forward.keys())
            .copied()
            .filter(|q| self.flipped(*q) != end_of_forward.get(q).copied().unwrap_or(false))
            .collect();
        restore.sort();
        restore.dedup();

        let n = self.n;
        let n_anc = self.n_anc;
        let map = |q: Q| match q {
            Q::In(j) => j,
            Q::Anc(k) => n + k,
            Q::F => n + n_anc,
        };
        let lower = |g: &G| match g {
            G::X(q) => BooleanGate::X(map(*q)),
            G::Mcx(cs, t) => {
                let mut controls: Vec<usize> = cs.iter().map(|&q| map(q)).collect();
                controls.sort_unstable();
                BooleanGate::Mcx {
                    controls,
                    target: map(*t),
                }
            }
        };
        let mut gates: Vec<BooleanGate> = self.forward.iter().map(lower).collect();
        gates.extend(self.root.iter().map(lower));
        gates.extend(restore.into_iter().map(|q| BooleanGate::X(map(q))));
        gates.extend(self.forward.iter().rev().map(lower));
        self.forward.clear();
        BooleanOracleCircuit {
            n_inputs: n,
            n_ancilla: n_anc + 1,
            gates,
        }
    }
}

/// Final register of a classical run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalOutcome {
    pub fqubit: bool,
    /// Every ancilla except fqubit, in index order.
    pub residues: Vec<bool>,
    pub inputs: Vec<bool>,
}

/// Propagates basis state `|x>|0...0>` through the X/MCX gates.
pub fn classical_simulate(circ: &BooleanOracleCircuit, x: &[bool]) -> Result<ClassicalOutcome> {
    if x.len() != circ.n_inputs {
        return Err(Error::WidthMismatch {
            expected: circ.n_inputs,
            found: x.len(),
        });
    }
    let mut reg = x.to_vec();
    reg.resize(circ.num_qubits(), false);
    for g in &circ.gates {
        match g {
            BooleanGate::X(q) => reg[*q] ^= true,
            BooleanGate::Mcx { controls, target } => {
                if controls.iter().all(|&c| reg[c]) {
                    reg[*target] ^= true;
                }
            }
        }
    }
    let f = circ.fqubit();
    Ok(ClassicalOutcome {
        fqubit: reg[f],
        residues: reg[circ.n_inputs..f].to_vec(),
        inputs: reg[..circ.n_inputs].to_vec(),
    })
}

/// Rewrites a single-ancilla oracle as a phase oracle: `CX(q -> f)` becomes
/// `Z(q)`, `MCX(Q -> f)` becomes `MCZ(Q)`, input `X` gates are kept in place
/// and fqubit is dropped.
pub fn transform_to_phase(circ: &BooleanOracleCircuit) -> Result<PhaseOracleCircuit> {
    let f = circ.fqubit();
    let fail = |index: usize, g: &BooleanGate, reason: &str| Error::Transform {
        index,
        gate: g.to_string(),
        reason: reason.to_string(),
    };
    if circ.n_ancilla != 1 {
        let index = circ
            .gates
            .iter()
            .position(|g| matches!(g, BooleanGate::Mcx { target, .. } if *target != f))
            .unwrap_or(0);
        return Err(Error::Transform {
            index,
            gate: circ
                .gates
                .get(index)
                .map_or_else(|| "-".to_string(), ToString::to_string),
            reason: format!(
                "circuit has {} ancillae; only the output qubit may remain",
                circ.n_ancilla
            ),
        });
    }
    let mut gates = Vec::with_capacity(circ.gates.len());
    for (i, g) in circ.gates.iter().enumerate() {
        let pg = match g {
            BooleanGate::X(q) if *q == f => PhaseGate::GlobalPhase,
            BooleanGate::X(q) => PhaseGate::X(*q),
            BooleanGate::Mcx { controls, target } => {
                if *target != f {
                    return Err(fail(i, g, "target is not the output qubit"));
                }
                PhaseGate::Mcz(controls.clone())
            }
        };
        gates.push(pg);
    }
    Ok(PhaseOracleCircuit {
        n_inputs: circ.n_inputs,
        gates,
    })
}

/// `+1` or `-1` for basis state `x`.
pub fn phase_of(circ: &PhaseOracleCircuit, x: &[bool]) -> Result<i8> {
    if x.len() != circ.n_inputs {
        return Err(Error::WidthMismatch {
            expected: circ.n_inputs,
            found: x.len(),
        });
    }
    Ok(circ.phase_of_bits(crate::pack_bits(x)))
}

#[derive(Debug, Clone, Copy)]
pub enum Stage<'a> {
    Boolean(&'a BooleanOracleCircuit),
    Phase(&'a PhaseOracleCircuit),
}

/// Gate tallies for one circuit. Multi-qubit gates are keyed by the number of
/// qubits they touch, so a CX is `mcx[2]`, a 3-bit Toffoli `mcx[3]`, a CZ
/// `mcz[2]` and a CCZ `mcz[3]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateRow {
    #[serde(skip)]
    pub stage: String,
    pub input_qubits: usize,
    pub ancilla_qubits: usize,
    pub total_qubits: usize,
    pub x: usize,
    pub mcx: BTreeMap<usize, usize>,
    pub mcz: BTreeMap<usize, usize>,
    pub global_phase: usize,
    pub mirror: bool,
}

impl GateRow {
    pub fn mcx_count(&self, arity: usize) -> usize {
        self.mcx.get(&arity).copied().unwrap_or(0)
    }

    pub fn mcz_count(&self, arity: usize) -> usize {
        self.mcz.get(&arity).copied().unwrap_or(0)
    }

    fn of(stage: &str, circuit: Stage<'_>) -> Self {
        let mut row = GateRow {
            stage: stage.to_string(),
            input_qubits: 0,
            ancilla_qubits: 0,
            total_qubits: 0,
            x: 0,
            mcx: BTreeMap::new(),
            mcz: BTreeMap::new(),
            global_phase: 0,
            mirror: false,
        };
        match circuit {
            Stage::Boolean(c) => {
                row.input_qubits = c.n_inputs;
                row.ancilla_qubits = c.n_ancilla;
                row.mirror = c.has_mirror();
                for g in &c.gates {
                    match g {
                        BooleanGate::X(_) => row.x += 1,
                        BooleanGate::Mcx { .. } => *row.mcx.entry(g.arity()).or_default() += 1,
                    }
                }
            }
            Stage::Phase(c) => {
                row.input_qubits = c.n_inputs;
                for g in &c.gates {
                    match g {
                        PhaseGate::X(_) => row.x += 1,
                        PhaseGate::Mcz(_) => *row.mcz.entry(g.arity()).or_default() += 1,
                        PhaseGate::GlobalPhase => row.global_phase += 1,
                    }
                }
            }
        }
        row.total_qubits = row.input_qubits + row.ancilla_qubits;
        row
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GateReport {
    pub rows: Vec<GateRow>,
}

impl GateReport {
    pub fn row(&self, stage: &str) -> Option<&GateRow> {
        self.rows.iter().find(|r| r.stage == stage)
    }

    /// Human-readable table, one row per stage.
    pub fn render_table(&self) -> String {
        let arities: Vec<usize> = {
            let mut a: Vec<usize> = self
                .rows
                .iter()
                .flat_map(|r| r.mcx.keys().chain(r.mcz.keys()).copied())
                .collect();
            a.sort_unstable();
            a.dedup();
            a
        };
        let mut out = format!(
            "{:<24} {:>6} {:>8} {:>6} {:>4}",
            "stage", "inputs", "ancillae", "total", "X"
        );
        for k in &arities {
            let _ = write!(out, " {:>10}", format!("{k}-qubit"));
        }
        out.push_str("  mirror\n");
        for r in &self.rows {
            let _ = write!(
                out,
                "{:<24} {:>6} {:>8} {:>6} {:>4}",
                r.stage, r.input_qubits, r.ancilla_qubits, r.total_qubits, r.x
            );
            for k in &arities {
                let cell = match (r.mcx_count(*k), r.mcz_count(*k)) {
                    (0, 0) => "-".to_string(),
                    (a, 0) => a.to_string(),
                    (0, b) => format!("{b} (Z)"),
                    (a, b) => format!("{a}+{b} (Z)"),
                };
                let _ = write!(out, " {cell:>10}");
            }
            let _ = writeln!(out, "  {}", if r.mirror { "yes" } else { "no" });
        }
        out
    }
}

impl Serialize for GateReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.rows.len()))?;
        for r in &self.rows {
            map.serialize_entry(&r.stage, r)?;
        }
        map.end()
    }
}

/// Exact tallies for each named stage, in the order given.
pub fn gate_report(stages: &[(&str, Stage<'_>)]) -> GateReport {
    GateReport {
        rows: stages
            .iter()
            .map(|(name, c)| GateRow::of(name, *c))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::parse_cubes;

    fn all_inputs(n: usize) -> impl Iterator<Item = Vec<bool>> {
        (0..1u32 << n).map(move |x| (0..n).map(|j| (x >> j) & 1 == 1).collect())
    }

    #[test]
    fn esop_oracle_of_pos_cubes() {
        let c = build_esop_oracle(&parse_cubes("~a~b~c ^ a~bc ^ bc").unwrap());
        let r = gate_report(&[("esop", Stage::Boolean(&c))]).rows.remove(0);
        assert_eq!(r.total_qubits, 4);
        assert_eq!(r.ancilla_qubits, 1);
        assert_eq!(r.mcx_count(4), 2);
        assert_eq!(r.mcx_count(3), 1);
        assert_eq!(r.x, 8);
        assert!(!r.mirror);
    }

    #[test]
    fn esop_oracle_trivial_cases() {
        let c = build_esop_oracle(&EsopForm::new(2, vec![]).unwrap());
        assert!(c.gates().is_empty());
        let c = build_esop_oracle(&parse_cubes("abc").unwrap());
        assert_eq!(
            c.gates(),
            [BooleanGate::Mcx {
                controls: vec![0, 1, 2],
                target: 3
            }]
        );
        for x in all_inputs(3) {
            let out = classical_simulate(&c, &x).unwrap();
            assert_eq!(out.fqubit, x.iter().all(|&b| b));
        }
    }

    #[test]
    fn constant_one_cube_flips_fqubit() {
        let c = build_esop_oracle(&parse_cubes("1").unwrap());
        assert_eq!(c.gates(), [BooleanGate::X(0)]);
        let p = transform_to_phase(&c).unwrap();
        assert_eq!(p.gates(), [PhaseGate::GlobalPhase]);
        assert_eq!(p.phase_of_bits(0), -1);
    }

    #[test]
    fn pos_oracle_matches_reference_counts() {
        let e = BoolExpr::parse("(a | b | ~c) & (~a | c) & (~b | c)").unwrap();
        let c = build_boolean_oracle(&e).unwrap();
        assert_eq!(c.n_inputs(), 3);
        assert_eq!(c.n_ancilla(), 4);
        let r = gate_report(&[("pos", Stage::Boolean(&c))]).rows.remove(0);
        assert_eq!(r.mcx_count(3), 4);
        assert_eq!(r.mcx_count(4), 3);
        assert_eq!(r.x, 16);
        assert!(r.mirror);
    }

    #[test]
    fn sudoku_oracle_counts() {
        let e = BoolExpr::parse(
            "(cell_1 ^ cell_2) & (cell_1 ^ cell_3) & (cell_2 ^ cell_4) & (cell_3 ^ cell_4)",
        )
        .unwrap();
        let c = build_boolean_oracle(&e).unwrap();
        assert_eq!(c.n_ancilla(), 5);
        let r = gate_report(&[("sudoku", Stage::Boolean(&c))])
            .rows
            .remove(0);
        assert_eq!(r.mcx_count(2), 16);
        assert_eq!(r.mcx_count(5), 1);
        assert_eq!(r.x, 0);
    }

    #[test]
    fn single_product_needs_no_mirror() {
        let e = BoolExpr::parse("a & b").unwrap();
        let c = build_boolean_oracle(&e).unwrap();
        assert_eq!(c.n_ancilla(), 1);
        assert!(!c.has_mirror());
        assert_eq!(
            c.gates(),
            [BooleanGate::Mcx {
                controls: vec![0, 1],
                target: 2
            }]
        );
    }

    #[test]
    fn mirror_restores_ancillae_for_mixed_shapes() {
        for text in [
            "(a | b | ~c) & (~a | c) & (~b | c)",
            "(a & b & ~c) | (~a & c) | (~b & c)",
            "~((a | b) & (a ^ c)) ^ (b | ~c)",
            "((a0 ^ b0) | ((a0 & b0) ^ (a1 ^ b1))) & ((a1 & b1) | ((a0 & b0) & (a1 ^ b1)))",
            "~(a | b)",
            "(a ^ ~b) & (~a ^ ~c)",
            "~~(a & (b | c))",
            "~~~(a | b)",
            "~~a & b",
            "~~b",
            "~1",
            "~~~0",
        ] {
            let e = BoolExpr::parse(text).unwrap();
            let c = build_boolean_oracle(&e).unwrap();
            for x in all_inputs(e.num_vars()) {
                let out = classical_simulate(&c, &x).unwrap();
                assert_eq!(out.fqubit, e.eval(&x).unwrap(), "{text} at {x:?}");
                assert!(out.residues.iter().all(|&b| !b), "{text} residue at {x:?}");
                assert_eq!(out.inputs, x, "{text} inputs at {x:?}");
            }
        }
    }

    #[test]
    fn unsupported_structures() {
        let e = BoolExpr::parse("(a | 1) & b").unwrap();
        assert!(matches!(
            build_boolean_oracle(&e),
            Err(Error::UnsupportedStructure(_))
        ));
        let e = BoolExpr::parse("(a & ~a) | b").unwrap();
        assert!(matches!(
            build_boolean_oracle(&e),
            Err(Error::UnsupportedStructure(_))
        ));
    }

    #[test]
    fn transform_rules() {
        let cx =
            BooleanOracleCircuit::new(1, 1, vec![BooleanGate::mcx(vec![0], 1).unwrap()]).unwrap();
        assert_eq!(
            transform_to_phase(&cx).unwrap().gates(),
            [PhaseGate::Mcz(vec![0])]
        );
        let ccx = BooleanOracleCircuit::new(2, 1, vec![BooleanGate::mcx(vec![0, 1], 2).unwrap()])
            .unwrap();
        assert_eq!(
            transform_to_phase(&ccx).unwrap().gates(),
            [PhaseGate::Mcz(vec![0, 1])]
        );

        let c = build_esop_oracle(&parse_cubes("~a~b~c ^ a~bc ^ bc").unwrap());
        let p = transform_to_phase(&c).unwrap();
        let r = gate_report(&[("phase", Stage::Phase(&p))]).rows.remove(0);
        assert_eq!(
            (r.x, r.mcz_count(3), r.mcz_count(2), r.total_qubits),
            (8, 2, 1, 3)
        );
    }

    #[test]
    fn transform_rejects_multi_ancilla() {
        let e = BoolExpr::parse("(a | b) & (a | c)").unwrap();
        let c = build_boolean_oracle(&e).unwrap();
        match transform_to_phase(&c) {
            Err(Error::Transform { gate, .. }) => assert!(gate.starts_with("mcx")),
            other => panic!("{other:?}"),
        }
        let bad =
            BooleanOracleCircuit::new(2, 1, vec![BooleanGate::mcx(vec![0], 1).unwrap()]).unwrap();
        match transform_to_phase(&bad) {
            Err(Error::Transform { index, .. }) => assert_eq!(index, 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn phase_of_pos_cubes() {
        let c = build_esop_oracle(&parse_cubes("~a~b~c ^ a~bc ^ bc").unwrap());
        let p = transform_to_phase(&c).unwrap();
        assert_eq!(phase_of(&p, &[false, false, false]).unwrap(), -1);
        assert_eq!(phase_of(&p, &[true, false, false]).unwrap(), 1);
        let empty = PhaseOracleCircuit::new(2, vec![]).unwrap();
        assert_eq!(phase_of(&empty, &[true, false]).unwrap(), 1);
        assert!(phase_of(&p, &[true]).is_err());
    }

    #[test]
    fn empty_report_row_is_zero() {
        let p = PhaseOracleCircuit::new(0, vec![]).unwrap();
        let r = gate_report(&[("empty", Stage::Phase(&p))]).rows.remove(0);
        assert_eq!(
            (r.total_qubits, r.x, r.mcz.len(), r.mirror),
            (0, 0, 0, false)
        );
    }

    #[test]
    fn text_format_round_trips() {
        let e = BoolExpr::parse("(a | b | ~c) & (~a | c) & (~b | c)").unwrap();
        let c = build_boolean_oracle(&e).unwrap();
        let text = c.to_text();
        assert!(text.starts_with("qubits 3 4\n"));
        assert!(text.contains("mcx q0 q1 q2 -> q3"));
        assert_eq!(BooleanOracleCircuit::from_text(&text).unwrap(), c);

        let p = transform_to_phase(&build_esop_oracle(
            &parse_cubes("~a~b~c ^ a~bc ^ bc").unwrap(),
        ))
        .unwrap();
        let text = p.to_text();
        assert!(text.contains("mcz q1 q2"));
        assert_eq!(PhaseOracleCircuit::from_text(&text).unwrap(), p);
        assert!(PhaseOracleCircuit::from_text("qubits 2 0\nz q5\n").is_err());
        assert!(BooleanOracleCircuit::from_text("qubits 2 1\nmcx q0 q2\n").is_err());
    }

    #[test]
    fn report_json_is_keyed_by_stage() {
        let p = PhaseOracleCircuit::new(2, vec![PhaseGate::Mcz(vec![0, 1])]).unwrap();
        let rep = gate_report(&[("phase", Stage::Phase(&p))]);
        let json = serde_json::to_string(&rep).unwrap();
        assert_eq!(
            json,
            r#"{"phase":{"input_qubits":2,"ancilla_qubits":0,"total_qubits":2,"x":0,"mcx":{},"mcz":{"2":1},"global_phase":0,"mirror":false}}"#
        );
    }
}
