//! Disjoint ESOP (DSOP) synthesis from truth tables.
//!
//! A DSOP is an exclusive sum of products whose cubes never overlap, so the
//! XOR of the cubes equals their OR and every cube lies inside the on-set.
//! Minimum covers are exact up to [`EXACT_MAX_VARS`] variables and greedy above.

use std::fmt;

use crate::boolexpr::{TruthTable, MAX_VARS};
use crate::error::{Error, Result};

/// Widest function synthesized by exact branch-and-bound.
pub const EXACT_MAX_VARS: usize = 4;

/// A product term. Bit `j` of `pos` means literal `v_j`, of `neg` means `¬v_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pos: u32,
    neg: u32,
}

impl Cube {
    /// The empty product, i.e. constant 1.
    pub const ONE: Cube = Cube { pos: 0, neg: 0 };

    pub fn new(pos: u32, neg: u32) -> Result<Self> {
        if pos & neg != 0 {
            return Err(Error::InvalidArgument(format!(
                "cube has a variable both plain and negated (mask {:#b})",
                pos & neg
            )));
        }
        Ok(Cube { pos, neg })
    }

    /// The single-minterm cube of assignment `x` over `n` variables.
    pub fn minterm(x: u32, n: usize) -> Self {
        let all = mask(n);
        Cube {
            pos: x & all,
            neg: !x & all,
        }
    }

    pub fn pos(&self) -> u32 {
        self.pos
    }

    pub fn neg(&self) -> u32 {
        self.neg
    }

    /// Variables mentioned by the cube.
    pub fn care(&self) -> u32 {
        self.pos | self.neg
    }

    pub fn num_literals(&self) -> usize {
        self.care().count_ones() as usize
    }

    pub fn contains(&self, x: u32) -> bool {
        x & self.care() == self.pos
    }

    /// True when some assignment satisfies both cubes.
    pub fn intersects(&self, other: &Cube) -> bool {
        self.pos & other.neg == 0 && self.neg & other.pos == 0
    }

    /// Minterms covered over `n` variables, ascending.
    pub fn minterms(&self, n: usize) -> impl Iterator<Item = u32> + '_ {
        let free = mask(n) & !self.care();
        // enumerate submasks of `free`
        let mut sub = Some(free);
        std::iter::from_fn(move || {
            let s = sub?;
            sub = if s == 0 { None } else { Some((s - 1) & free) };
            Some(self.pos | s)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
    }

    /// Ordering key: more minterms first, then by mask value.
    fn sort_key(&self) -> (usize, u32, u32) {
        (self.num_literals(), self.care(), self.pos)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        CubeDisplay { cube: self, names }
    }
}

struct CubeDisplay<'a> {
    cube: &'a Cube,
    names: &'a [String],
}

impl fmt::Display for CubeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cube.care() == 0 {
            return f.write_str("1");
        }
        for j in 0..32 {
            if (self.cube.care() >> j) & 1 == 1 {
                if (self.cube.neg >> j) & 1 == 1 {
                    f.write_str("~")?;
                }
                match self.names.get(j) {
                    Some(name) => f.write_str(name)?,
                    None => write!(f, "x{j}")?,
                }
            }
        }
        Ok(())
    }
}

fn mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// XOR of product cubes over `n` named variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EsopForm {
    n: usize,
    vars: Vec<String>,
    cubes: Vec<Cube>,
    disjoint: bool,
}

impl EsopForm {
    /// Builds a form, checking that cubes fit in `n` variables and computing
    /// the disjointness flag.
    pub fn new(n: usize, cubes: Vec<Cube>) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::TooManyVariables {
                count: n,
                cap: MAX_VARS,
            });
        }
        if let Some(c) = cubes.iter().find(|c| c.care() & !mask(n) != 0) {
            return Err(Error::InvalidArgument(format!(
                "cube {c:?} mentions a variable outside 0..{n}"
            )));
        }
        let vars = (0..n).map(|j| format!("x{j}")).collect();
        let mut form = EsopForm {
            n,
            vars,
            cubes,
            disjoint: false,
        };
        form.disjoint = check_disjoint(&form);
        Ok(form)
    }

    pub fn with_var_names(mut self, names: &[String]) -> Result<Self> {
        if names.len() != self.n {
            return Err(Error::WidthMismatch {
                expected: self.n,
                found: names.len(),
            });
        }
        self.vars = names.to_vec();
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn is_disjoint(&self) -> bool {
        self.disjoint
    }

    pub fn eval_bits(&self, x: u32) -> bool {
        self.cubes.iter().filter(|c| c.contains(x)).count() % 2 == 1
    }

    /// Number of cubes satisfied at `x`.
    pub fn hits(&self, x: u32) -> usize {
        self.cubes.iter().filter(|c| c.contains(x)).count()
    }

    pub fn truth_table(&self) -> Result<TruthTable> {
        TruthTable::from_fn(self.n, |x| self.eval_bits(x))
    }
}

impl fmt::Display for EsopForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.cubes.iter().enumerate() {
            if i > 0 {
                f.write_str(" ^ ")?;
            }
            write!(f, "{}", c.display_with(&self.vars))?;
        }
        Ok(())
    }
}

/// XOR over cubes of whether `x` satisfies each one.
pub fn esop_evaluate(form: &EsopForm, x: &[bool]) -> Result<bool> {
    if x.len() != form.n {
        return Err(Error::WidthMismatch {
            expected: form.n,
            found: x.len(),
        });
    }
    Ok(form.eval_bits(crate::pack_bits(x)))
}

/// Pairwise test: no assignment satisfies two distinct cubes.
pub fn check_disjoint(form: &EsopForm) -> bool {
    let cs = &form.cubes;
    (0..cs.len()).all(|i| (i + 1..cs.len()).all(|k| !cs[i].intersects(&cs[k])))
}

/// Synthesizes a disjoint cover of the table's on-set.
///
/// Exact minimum cube count for `n <= 4`; for wider functions, each uncovered
/// minterm is grown greedily into the largest cube that stays inside the
/// uncovered on-set.
pub fn dsop_synthesize(table: &TruthTable) -> EsopForm {
    let n = table.num_vars();
    let mut cubes = if n <= EXACT_MAX_VARS {
        exact_cover(table)
    } else {
        greedy_cover(table)
    };
    cubes.sort_by_key(Cube::sort_key);
    EsopForm {
        n,
        vars: (0..n).map(|j| format!("x{j}")).collect(),
        cubes,
        disjoint: true,
    }
}

fn exact_cover(table: &TruthTable) -> Vec<Cube> {
    let n = table.num_vars();
    let onset: u32 = table
        .minterms()
        .into_iter()
        .fold(0, |acc, x| acc | (1 << x));
    if onset == 0 {
        return Vec::new();
    }

    // every implicant cube with the bitset of minterms it covers
    let mut implicants: Vec<(Cube, u32)> = Vec::new();
    for care in 0..=mask(n) {
        let mut pos = care;
        loop {
            let cube = Cube {
                pos,
                neg: care & !pos,
            };
            let covered = cube.minterms(n).fold(0u32, |acc, x| acc | (1 << x));
            if covered & !onset == 0 {
                implicants.push((cube, covered));
            }
            if pos == 0 {
                break;
            }
            pos = (pos - 1) & care;
        }
    }
    implicants.sort_by_key(|(c, _)| c.sort_key());

    struct Search<'a> {
        implicants: &'a [(Cube, u32)],
        onset: u32,
        best: Vec<Cube>,
        best_len: usize,
        stack: Vec<Cube>,
    }

    impl Search<'_> {
        fn go(&mut self, covered: u32) {
            if covered == self.onset {
                if self.stack.len() < self.best_len {
                    self.best_len = self.stack.len();
                    self.best = self.stack.clone();
                }
                return;
            }
            if self.stack.len() + 1 >= self.best_len {
                return;
            }
            let first = (self.onset & !covered).trailing_zeros();
            for &(cube, bits) in self.implicants {
                if bits & (1 << first) != 0 && bits & covered == 0 {
                    self.stack.push(cube);
                    self.go(covered | bits);
                    self.stack.pop();
                }
            }
        }
    }

    let mut search = Search {
        implicants: &implicants,
        onset,
        best: Vec::new(),
        best_len: onset.count_ones() as usize + 1,
        stack: Vec::new(),
    };
    search.go(0);
    search.best
}

fn greedy_cover(table: &TruthTable) -> Vec<Cube> {
    let n = table.num_vars();
    let mut uncovered: Vec<bool> = table.bits().to_vec();
    let mut cubes = Vec::new();
    for x in 0..(1u32 << n) {
        if !uncovered[x as usize] {
            continue;
        }
        let mut cube = Cube::minterm(x, n);
        for j in 0..n {
            let bit = 1u32 << j;
            let fits = cube.minterms(n).all(|m| uncovered[(m ^ bit) as usize]);
            if fits {
                cube = Cube {
                    pos: cube.pos & !bit,
                    neg: cube.neg & !bit,
                };
            }
        }
        for m in cube.minterms(n) {
            uncovered[m as usize] = false;
        }
        cubes.push(cube);
    }
    cubes
}

/// Parses a cube list such as `~a~b~c ^ a~bc ^ bc`.
///
/// Cubes are separated by `^` (or `⊕`). A literal is an optional `~`/`!`/`¬`
/// followed by a variable name: one lowercase letter plus optional digits
/// (`a`, `b0`, `x12`). Literals may be juxtaposed or separated by `&`, `∧`,
/// `*` or whitespace. A lone `1` is the constant-1 cube; the empty string is
/// the constant-0 form. Variables are indexed by first appearance.
pub fn parse_cubes(text: &str) -> Result<EsopForm> {
    parse_cubes_with_order::<&str>(text, &[])
}

/// Like [`parse_cubes`] with the listed variables pre-assigned to indices
/// `0..order.len()`.
pub fn parse_cubes_with_order<S: AsRef<str>>(text: &str, order: &[S]) -> Result<EsopForm> {
    let mut vars: Vec<String> = Vec::new();
    for name in order {
        let name = name.as_ref();
        if vars.iter().any(|v| v == name) {
            return Err(Error::InvalidArgument(format!(
                "duplicate variable in ordering: {name:?}"
            )));
        }
        vars.push(name.to_string());
    }

    let mut cubes = Vec::new();
    if text.trim().is_empty() {
        return finish(vars, cubes);
    }

    let mut offset = 0;
    for term in text.split(['^', '⊕']) {
        cubes.push(parse_cube(term, offset, &mut vars)?);
        offset += term.len() + 1;
    }
    finish(vars, cubes)
}

fn finish(vars: Vec<String>, cubes: Vec<Cube>) -> Result<EsopForm> {
    let n = vars.len();
    EsopForm::new(n, cubes)?.with_var_names(&vars)
}

fn parse_cube(term: &str, base: usize, vars: &mut Vec<String>) -> Result<Cube> {
    let syntax = |off: usize, message: String| Error::Syntax {
        offset: base + off,
        message,
    };
    let mut chars = term.char_indices().peekable();
    let (mut pos, mut neg) = (0u32, 0u32);
    let mut literals = 0usize;
    let mut saw_one = false;
    let mut negate = false;
    while let Some((i, c)) = chars.next() {
        match c {
            c if c.is_whitespace() => {}
            '&' | '∧' | '*' => {}
            '~' | '!' | '¬' => {
                if negate {
                    return Err(syntax(i, "double negation".into()));
                }
                negate = true;
            }
            '1' if !negate => saw_one = true,
            'a'..='z' => {
                let mut name = String::from(c);
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        name.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let j = match vars.iter().position(|v| *v == name) {
                    Some(j) => j,
                    None => {
                        if vars.len() == MAX_VARS {
                            return Err(Error::TooManyVariables {
                                count: MAX_VARS + 1,
                                cap: MAX_VARS,
                            });
                        }
                        vars.push(name);
                        vars.len() - 1
                    }
                };
                let bit = 1u32 << j;
                let (same, other) = if negate {
                    (&mut neg, pos)
                } else {
                    (&mut pos, neg)
                };
                if other & bit != 0 {
                    return Err(syntax(
                        i,
                        format!("variable {} appears with both polarities", vars[j]),
                    ));
                }
                *same |= bit;
                negate = false;
                literals += 1;
            }
            _ => return Err(syntax(i, format!("unexpected character {c:?}"))),
        }
    }
    if negate {
        return Err(syntax(term.len(), "dangling negation".into()));
    }
    if literals == 0 && !saw_one {
        return Err(syntax(0, "empty cube".into()));
    }
    if saw_one && literals > 0 {
        return Err(syntax(0, "constant 1 mixed with literals".into()));
    }
    Ok(Cube { pos, neg })
}
