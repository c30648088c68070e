//! Boolean formulas over named variables.
//!
//! Variables are numbered densely in order of first appearance in the source
//! text; that index is also the qubit index used by every later stage.
//!
//! Precedence from tightest to loosest: `~` (or `!`, `¬`), `&` (`∧`),
//! `^` (`⊕`), `|` (`∨`). Parentheses and square brackets group.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest variable count accepted anywhere in the pipeline.
pub const MAX_VARS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(bool),
    Var(usize),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Xor(Vec<Expr>),
}

impl Expr {
    /// Evaluates with variable `j` read from bit `j` of `x`.
    pub fn eval_bits(&self, x: u32) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Var(j) => (x >> j) & 1 == 1,
            Expr::Not(c) => !c.eval_bits(x),
            Expr::And(cs) => cs.iter().all(|c| c.eval_bits(x)),
            Expr::Or(cs) => cs.iter().any(|c| c.eval_bits(x)),
            Expr::Xor(cs) => cs.iter().fold(false, |acc, c| acc ^ c.eval_bits(x)),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Expr::Const(_) | Expr::Var(_))
    }

    /// A variable or a negated variable.
    pub fn as_literal(&self) -> Option<(usize, bool)> {
        match self {
            Expr::Var(j) => Some((*j, false)),
            Expr::Not(c) => match c.as_ref() {
                Expr::Var(j) => Some((*j, true)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn children(&self) -> &[Expr] {
        match self {
            Expr::And(cs) | Expr::Or(cs) | Expr::Xor(cs) => cs,
            Expr::Not(c) => std::slice::from_ref(c.as_ref()),
            _ => &[],
        }
    }

    fn check_arity(&self) -> Result<()> {
        match self {
            Expr::And(cs) | Expr::Or(cs) | Expr::Xor(cs) => {
                if cs.len() < 2 {
                    return Err(Error::InvalidArgument(
                        "n-ary connective needs at least two operands".into(),
                    ));
                }
                cs.iter().try_for_each(Expr::check_arity)
            }
            Expr::Not(c) => c.check_arity(),
            _ => Ok(()),
        }
    }

    fn visit_vars(&self, f: &mut impl FnMut(usize)) {
        match self {
            Expr::Var(j) => f(*j),
            _ => self.children().iter().for_each(|c| c.visit_vars(f)),
        }
    }

    fn remap(&self, map: &HashMap<usize, usize>) -> Expr {
        match self {
            Expr::Const(b) => Expr::Const(*b),
            Expr::Var(j) => Expr::Var(map[j]),
            Expr::Not(c) => Expr::Not(Box::new(c.remap(map))),
            Expr::And(cs) => Expr::And(cs.iter().map(|c| c.remap(map)).collect()),
            Expr::Or(cs) => Expr::Or(cs.iter().map(|c| c.remap(map)).collect()),
            Expr::Xor(cs) => Expr::Xor(cs.iter().map(|c| c.remap(map)).collect()),
        }
    }
}

/// A parsed formula together with its variable names, indexed by qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolExpr {
    root: Expr,
    vars: Vec<String>,
}

impl BoolExpr {
    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text, &[])?.run()
    }

    /// Parses with the given variables pre-assigned to indices `0..order.len()`.
    /// Variables not listed are appended in order of first appearance.
    pub fn parse_with_order<S: AsRef<str>>(text: &str, order: &[S]) -> Result<Self> {
        let order: Vec<&str> = order.iter().map(|s| s.as_ref()).collect();
        Parser::new(text, &order)?.run()
    }

    /// Builds a formula from an AST, renumbering variables densely in
    /// left-to-right order of appearance. Unused names are dropped.
    pub fn from_root(root: Expr, names: &[String]) -> Result<Self> {
        root.check_arity()?;
        let mut map = HashMap::new();
        let mut vars = Vec::new();
        let mut bad = None;
        root.visit_vars(&mut |j| {
            if j >= names.len() {
                bad = Some(j);
            } else if let std::collections::hash_map::Entry::Vacant(slot) = map.entry(j) {
                slot.insert(vars.len());
                vars.push(names[j].clone());
            }
        });
        if let Some(j) = bad {
            return Err(Error::InvalidArgument(format!(
                "variable index {j} has no name"
            )));
        }
        if vars.len() > MAX_VARS {
            return Err(Error::TooManyVariables {
                count: vars.len(),
                cap: MAX_VARS,
            });
        }
        Ok(BoolExpr {
            root: root.remap(&map),
            vars,
        })
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.vars.len() {
            return Err(Error::WidthMismatch {
                expected: self.vars.len(),
                found: x.len(),
            });
        }
        Ok(self.root.eval_bits(crate::pack_bits(x)))
    }

    pub fn eval_bits(&self, x: u32) -> bool {
        self.root.eval_bits(x)
    }

    pub fn truth_table(&self) -> Result<TruthTable> {
        TruthTable::from_fn(self.num_vars(), |x| self.root.eval_bits(x))
    }

    /// Fully parenthesized rendering that parses back to the same AST.
    pub fn unparse(&self) -> String {
        self.to_string()
    }

    fn write_expr(&self, e: &Expr, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, cs: &[Expr], op: &str| -> fmt::Result {
            if nested {
                f.write_str("(")?;
            }
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                self.write_expr(c, f, true)?;
            }
            if nested {
                f.write_str(")")?;
            }
            Ok(())
        };
        match e {
            Expr::Const(b) => f.write_str(if *b { "1" } else { "0" }),
            Expr::Var(j) => f.write_str(&self.vars[*j]),
            Expr::Not(c) => {
                f.write_str("~")?;
                self.write_expr(c, f, true)
            }
            Expr::And(cs) => join(f, cs, "&"),
            Expr::Or(cs) => join(f, cs, "|"),
            Expr::Xor(cs) => join(f, cs, "^"),
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_expr(&self.root, f, false)
    }
}

/// Output column of a function over `n` variables; `bits[x]` is `f(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    bits: Vec<bool>,
}

impl TruthTable {
    pub fn new(n: usize, bits: Vec<bool>) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::TooManyVariables {
                count: n,
                cap: MAX_VARS,
            });
        }
        if bits.len() != 1 << n {
            return Err(Error::WidthMismatch {
                expected: 1 << n,
                found: bits.len(),
            });
        }
        Ok(TruthTable { n, bits })
    }

    pub fn from_fn(n: usize, f: impl Fn(u32) -> bool) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::TooManyVariables {
                count: n,
                cap: MAX_VARS,
            });
        }
        let bits = (0..1u32 << n).map(f).collect();
        Ok(TruthTable { n, bits })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32) -> bool {
        self.bits[x as usize]
    }

    /// Assignments where the function is true, ascending.
    pub fn minterms(&self) -> Vec<u32> {
        (0..self.bits.len() as u32)
            .filter(|&x| self.get(x))
            .collect()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Const(bool),
    Not,
    And,
    Xor,
    Or,
    Open(char),
    Close(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some((i, c)) = it.next() {
        let tok = match c {
            c if c.is_whitespace() => continue,
            '~' | '!' | '¬' => Tok::Not,
            '&' | '∧' => Tok::And,
            '^' | '⊕' => Tok::Xor,
            '|' | '∨' => Tok::Or,
            '(' | '[' => Tok::Open(c),
            ')' | ']' => Tok::Close(c),
            '0' => Tok::Const(false),
            '1' => Tok::Const(true),
            'a'..='z' => {
                let mut name = String::from(c);
                while let Some(&(_, d)) = it.peek() {
                    if d.is_ascii_lowercase() || d.is_ascii_digit() || d == '_' {
                        name.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                Tok::Ident(name)
            }
            _ => {
                return Err(Error::Syntax {
                    offset: i,
                    message: format!("unexpected character {c:?}"),
                })
            }
        };
        out.push((i, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: Vec<String>,
    index: HashMap<String, usize>,
}

impl Parser {
    fn new(text: &str, order: &[&str]) -> Result<Self> {
        let toks = tokenize(text)?;
        if toks.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut p = Parser {
            toks,
            pos: 0,
            end: text.len(),
            vars: Vec::new(),
            index: HashMap::new(),
        };
        for name in order {
            let valid = name.starts_with(|c: char| c.is_ascii_lowercase())
                && name
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
            if !valid || p.index.contains_key(*name) {
                return Err(Error::InvalidArgument(format!(
                    "bad variable in ordering: {name:?}"
                )));
            }
            p.intern(name)?;
        }
        Ok(p)
    }

    fn intern(&mut self, name: &str) -> Result<usize> {
        if let Some(&j) = self.index.get(name) {
            return Ok(j);
        }
        if self.vars.len() == MAX_VARS {
            return Err(Error::TooManyVariables {
                count: MAX_VARS + 1,
                cap: MAX_VARS,
            });
        }
        let j = self.vars.len();
        self.vars.push(name.to_string());
        self.index.insert(name.to_string(), j);
        Ok(j)
    }

    fn run(mut self) -> Result<BoolExpr> {
        let root = self.or()?;
        if let Some((off, tok)) = self.toks.get(self.pos) {
            return Err(Error::Syntax {
                offset: *off,
                message: format!("unexpected {tok:?} after complete expression"),
            });
        }
        Ok(BoolExpr {
            root,
            vars: self.vars,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn chain(
        &mut self,
        op: Tok,
        next: fn(&mut Self) -> Result<Expr>,
        build: fn(Vec<Expr>) -> Expr,
    ) -> Result<Expr> {
        let mut items = vec![next(self)?];
        while self.peek() == Some(&op) {
            self.pos += 1;
            items.push(next(self)?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            build(items)
        })
    }

    fn or(&mut self) -> Result<Expr> {
        self.chain(Tok::Or, Self::xor, Expr::Or)
    }

    fn xor(&mut self) -> Result<Expr> {
        self.chain(Tok::Xor, Self::and, Expr::Xor)
    }

    fn and(&mut self) -> Result<Expr> {
        self.chain(Tok::And, Self::unary, Expr::And)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        let Some((_, tok)) = self.toks.get(self.pos).cloned() else {
            return Err(Error::Syntax {
                offset,
                message: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match tok {
            Tok::Ident(name) => Ok(Expr::Var(self.intern(&name)?)),
            Tok::Const(b) => Ok(Expr::Const(b)),
            Tok::Open(open) => {
                let inner = self.or()?;
                let close = if open == '(' { ')' } else { ']' };
                match self.peek() {
                    Some(Tok::Close(c)) if *c == close => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(Error::Syntax {
                        offset: self.offset(),
                        message: format!("expected {close:?}"),
                    }),
                }
            }
            other => Err(Error::Syntax {
                offset,
                message: format!("expected operand, found {other:?}"),
            }),
        }
    }
}
