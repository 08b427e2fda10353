//! Set constraints with projections over finite sets of simple types, and a
//! bounded search for finite models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::types::{parse_type_lenient, ParseError, Symbol, Type};

pub type SetVar = Symbol;

/// One set constraint. Set variables print like type variables (`'x`);
/// arrow expressions are simple types whose variables denote sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetAtom {
    /// `X = {t}`
    Singleton(SetVar, Type),
    /// `{t} <= X`
    Contains(Type, SetVar),
    /// `X <= Y`
    Subset(SetVar, SetVar),
    /// `X = Y1 | ... | Yk`
    Union(SetVar, Vec<SetVar>),
    /// `X = src(Y)`
    Src(SetVar, SetVar),
    /// `X = tgt(Y)`
    Tgt(SetVar, SetVar),
    /// `X <= E`: every element of `X` is an instance of `E`, where each
    /// variable of `E` ranges over its set.
    SubsetArrow(SetVar, Type),
    /// `card X = 1`
    Card1(SetVar),
    /// `X = {}`
    Empty(SetVar),
}

impl SetAtom {
    pub fn vars(&self) -> Vec<SetVar> {
        match self {
            SetAtom::Singleton(x, _)
            | SetAtom::Contains(_, x)
            | SetAtom::Card1(x)
            | SetAtom::Empty(x) => vec![x.clone()],
            SetAtom::Subset(x, y) | SetAtom::Src(x, y) | SetAtom::Tgt(x, y) => {
                vec![x.clone(), y.clone()]
            }
            SetAtom::Union(x, ys) => std::iter::once(x).chain(ys).cloned().collect(),
            SetAtom::SubsetArrow(x, e) => std::iter::once(x.clone()).chain(e.vars()).collect(),
        }
    }
}

fn var(name: &Symbol) -> Type {
    Type::Var(name.clone())
}

impl fmt::Display for SetAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetAtom::Singleton(x, t) => write!(f, "{} = {{{t}}}", var(x)),
            SetAtom::Contains(t, x) => write!(f, "{{{t}}} <= {}", var(x)),
            SetAtom::Subset(x, y) => write!(f, "{} <= {}", var(x), var(y)),
            SetAtom::Union(x, ys) => {
                let parts: Vec<String> = ys.iter().map(|y| var(y).to_string()).collect();
                write!(f, "{} = {}", var(x), parts.join(" | "))
            }
            SetAtom::Src(x, y) => write!(f, "{} = src({})", var(x), var(y)),
            SetAtom::Tgt(x, y) => write!(f, "{} = tgt({})", var(x), var(y)),
            SetAtom::SubsetArrow(x, e) => write!(f, "{} <= {e}", var(x)),
            SetAtom::Card1(x) => write!(f, "card {} = 1", var(x)),
            SetAtom::Empty(x) => write!(f, "{} = {{}}", var(x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetParseError {
    #[error(transparent)]
    Type(#[from] ParseError),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetConstraintSystem {
    pub atoms: Vec<SetAtom>,
}

impl SetConstraintSystem {
    pub fn new(atoms: Vec<SetAtom>) -> Self {
        SetConstraintSystem { atoms }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<SetVar> {
        self.atoms.iter().flat_map(SetAtom::vars).collect()
    }

    /// Whether `assignment` satisfies every atom; missing variables are empty.
    pub fn satisfied_by(&self, assignment: &SetAssignment) -> bool {
        let empty = BTreeSet::new();
        let get = |x: &SetVar| assignment.get(x).unwrap_or(&empty);
        self.atoms.iter().all(|a| match a {
            SetAtom::Singleton(x, t) => get(x).len() == 1 && get(x).contains(t),
            SetAtom::Contains(t, x) => get(x).contains(t),
            SetAtom::Subset(x, y) => get(x).is_subset(get(y)),
            SetAtom::Union(x, ys) => {
                let u: BTreeSet<Type> = ys.iter().flat_map(|y| get(y).iter().cloned()).collect();
                *get(x) == u
            }
            SetAtom::Src(x, y) => *get(x) == projection(get(y), true),
            SetAtom::Tgt(x, y) => *get(x) == projection(get(y), false),
            SetAtom::SubsetArrow(x, e) => get(x).iter().all(|t| {
                let mut binds = Vec::new();
                instance_of(t, e, &mut binds) && binds.iter().all(|(v, u)| get(v).contains(u))
            }),
            SetAtom::Card1(x) => get(x).len() == 1,
            SetAtom::Empty(x) => get(x).is_empty(),
        })
    }

    /// Parses one atom per line in the printed format; `#` starts a comment.
    pub fn parse(src: &str) -> Result<Self, SetParseError> {
        let mut atoms = Vec::new();
        for (idx, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                atoms.push(parse_atom(line, idx + 1)?);
            }
        }
        Ok(SetConstraintSystem { atoms })
    }
}

impl FromStr for SetConstraintSystem {
    type Err = SetParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SetConstraintSystem::parse(s)
    }
}

impl fmt::Display for SetConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.atoms {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

fn parse_atom(line: &str, line_no: usize) -> Result<SetAtom, SetParseError> {
    let syntax = |message: &str| SetParseError::Syntax {
        line: line_no,
        message: message.to_string(),
    };
    let ty = |s: &str| parse_type_lenient(s.trim()).map_err(|e| relocate(e, line_no));
    let set_var = |s: &str| match ty(s)? {
        Type::Var(v) => Ok(v),
        _ => Err(syntax("expected a set variable")),
    };
    let braced = |s: &str| {
        s.trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .map(str::to_string)
    };
    if let Some(rest) = line.strip_prefix("card ") {
        let (x, one) = rest
            .split_once('=')
            .ok_or_else(|| syntax("expected `card X = 1`"))?;
        if one.trim() != "1" {
            return Err(syntax("only `card X = 1` is supported"));
        }
        return Ok(SetAtom::Card1(set_var(x)?));
    }
    if let Some((lhs, rhs)) = line.split_once("<=") {
        if let Some(inner) = braced(lhs) {
            return Ok(SetAtom::Contains(ty(&inner)?, set_var(rhs)?));
        }
        let x = set_var(lhs)?;
        return Ok(match ty(rhs)? {
            Type::Var(y) => SetAtom::Subset(x, y),
            e => SetAtom::SubsetArrow(x, e),
        });
    }
    let (lhs, rhs) = line
        .split_once('=')
        .ok_or_else(|| syntax("expected `<=` or `=`"))?;
    let x = set_var(lhs)?;
    let rhs = rhs.trim();
    if let Some(inner) = braced(rhs) {
        if inner.trim().is_empty() {
            return Ok(SetAtom::Empty(x));
        }
        return Ok(SetAtom::Singleton(x, ty(&inner)?));
    }
    for (name, make) in [
        ("src(", SetAtom::Src as fn(SetVar, SetVar) -> SetAtom),
        ("tgt(", SetAtom::Tgt),
    ] {
        if let Some(arg) = rhs.strip_prefix(name).and_then(|r| r.strip_suffix(')')) {
            return Ok(make(x, set_var(arg)?));
        }
    }
    let ys = rhs.split('|').map(set_var).collect::<Result<Vec<_>, _>>()?;
    Ok(SetAtom::Union(x, ys))
}

fn relocate(e: ParseError, line: usize) -> ParseError {
    ParseError { line, ..e }
}

pub type SetAssignment = BTreeMap<SetVar, BTreeSet<Type>>;

/// Sources (or targets) of the arrows in `set`; other elements are ignored.
fn projection(set: &BTreeSet<Type>, source: bool) -> BTreeSet<Type> {
    set.iter()
        .filter_map(|t| match t {
            Type::Arrow(s, r) => Some(if source { (**s).clone() } else { (**r).clone() }),
            _ => None,
        })
        .collect()
}

/// Matches the simple type `t` against the arrow expression `e`, collecting
/// the parts that must belong to each variable of `e`.
fn instance_of(t: &Type, e: &Type, binds: &mut Vec<(SetVar, Type)>) -> bool {
    match (t, e) {
        (_, Type::Var(v)) => {
            binds.push((v.clone(), t.clone()));
            true
        }
        (Type::Const(a), Type::Const(b)) => a == b,
        (Type::Arrow(s, r), Type::Arrow(es, er)) => {
            instance_of(s, es, binds) && instance_of(r, er, binds)
        }
        _ => false,
    }
}

/// Bounds for the finite model search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetBudget {
    /// Largest set size.
    pub max_card: usize,
    /// Largest depth of a set element (atoms have depth 1).
    pub max_depth: usize,
    /// Largest number of transformed systems handed to the set solver by
    /// [`solve_rank1`](super::solve_rank1).
    pub max_systems: usize,
}

impl Default for SetBudget {
    fn default() -> Self {
        SetBudget {
            max_card: 3,
            max_depth: 6,
            max_systems: 20_000,
        }
    }
}

/// First finite model within the budget, trying smaller element depths
/// first.
pub fn solve_set_constraints(
    scs: &SetConstraintSystem,
    budget: SetBudget,
) -> Option<SetAssignment> {
    let mut found = None;
    for_each_set_solution(scs, budget, &mut |a| {
        found = Some(a.clone());
        true
    });
    found
}

/// Feeds distinct finite models to `accept` until it returns true; returns
/// whether some model was accepted. Element depth is deepened from 1 to the
/// budget.
pub fn for_each_set_solution(
    scs: &SetConstraintSystem,
    budget: SetBudget,
    accept: &mut dyn FnMut(&SetAssignment) -> bool,
) -> bool {
    let mut seen = BTreeSet::new();
    let mut constants = BTreeSet::new();
    for a in &scs.atoms {
        match a {
            SetAtom::Singleton(_, t) | SetAtom::Contains(t, _) | SetAtom::SubsetArrow(_, t) => {
                for c in t.constants() {
                    constants.insert(Type::Const(c));
                }
            }
            _ => {}
        }
    }
    if constants.is_empty() {
        constants.insert(Type::constant("a"));
    }
    for depth in 1..=budget.max_depth {
        let search = Search {
            atoms: &scs.atoms,
            max_card: budget.max_card,
            max_depth: depth,
            constants: &constants,
        };
        let start: SetAssignment = scs
            .vars()
            .into_iter()
            .map(|v| (v, BTreeSet::new()))
            .collect();
        let mut wrapped = |a: &SetAssignment| seen.insert(a.clone()) && accept(a);
        if search.run(start, &mut wrapped) {
            return true;
        }
    }
    false
}

struct Search<'s> {
    atoms: &'s [SetAtom],
    max_card: usize,
    max_depth: usize,
    constants: &'s BTreeSet<Type>,
}

/// An unmet existential requirement: one of the listed elements must be added.
type Choice = Vec<(SetVar, Type)>;

impl Search<'_> {
    fn run(&self, mut sets: SetAssignment, accept: &mut dyn FnMut(&SetAssignment) -> bool) -> bool {
        if !self.propagate(&mut sets) {
            return false;
        }
        match self.choice(&sets) {
            None => accept(&sets),
            Some(options) => options.into_iter().any(|(v, t)| {
                let mut next = sets.clone();
                next.get_mut(&v).expect("declared").insert(t);
                self.run(next, accept)
            }),
        }
    }

    fn add(&self, sets: &mut SetAssignment, x: &SetVar, t: Type, changed: &mut bool) -> bool {
        if t.depth() > self.max_depth {
            return false;
        }
        let set = sets.get_mut(x).expect("declared");
        if set.insert(t) {
            *changed = true;
        }
        set.len() <= self.max_card
    }

    /// Adds every forced element; false on a contradiction.
    fn propagate(&self, sets: &mut SetAssignment) -> bool {
        loop {
            let mut changed = false;
            for a in self.atoms {
                let ok = match a {
                    SetAtom::Singleton(x, t) => {
                        self.add(sets, x, t.clone(), &mut changed) && sets[x].len() == 1
                    }
                    SetAtom::Contains(t, x) => self.add(sets, x, t.clone(), &mut changed),
                    SetAtom::Subset(x, y) => {
                        let items: Vec<Type> = sets[x].iter().cloned().collect();
                        items
                            .into_iter()
                            .all(|t| self.add(sets, y, t, &mut changed))
                    }
                    SetAtom::Union(x, ys) => {
                        let items: Vec<Type> =
                            ys.iter().flat_map(|y| sets[y].iter().cloned()).collect();
                        items
                            .into_iter()
                            .all(|t| self.add(sets, x, t, &mut changed))
                    }
                    SetAtom::Src(x, y) | SetAtom::Tgt(x, y) => {
                        let items = projection(&sets[y], matches!(a, SetAtom::Src(..)));
                        items
                            .into_iter()
                            .all(|t| self.add(sets, x, t, &mut changed))
                    }
                    SetAtom::SubsetArrow(x, e) => {
                        let mut binds = Vec::new();
                        sets[x].iter().all(|t| instance_of(t, e, &mut binds))
                            && binds
                                .into_iter()
                                .all(|(v, t)| self.add(sets, &v, t, &mut changed))
                    }
                    SetAtom::Card1(x) => sets[x].len() <= 1,
                    SetAtom::Empty(x) => sets[x].is_empty(),
                };
                if !ok {
                    return false;
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Candidate elements for existential choices: constants, current
    /// elements and their subterms, smallest first.
    fn pool(&self, sets: &SetAssignment) -> Vec<Type> {
        fn subterms(t: &Type, out: &mut BTreeSet<Type>) {
            if out.insert(t.clone()) {
                if let Type::Arrow(s, r) = t {
                    subterms(s, out);
                    subterms(r, out);
                }
            }
        }
        let mut all = self.constants.clone();
        for set in sets.values() {
            for t in set {
                subterms(t, &mut all);
            }
        }
        let mut pool: Vec<Type> = all.into_iter().collect();
        pool.sort_by_key(Type::size);
        pool
    }

    /// The unmet requirement to branch on, if any. Unions come first, then
    /// targets (which extend elements already present), then cardinality,
    /// then sources; ties go to the fewest options.
    fn choice(&self, sets: &SetAssignment) -> Option<Choice> {
        let mut best: Option<((u8, usize), Choice)> = None;
        let mut pool: Option<Vec<Type>> = None;
        let consider = |rank: u8, c: Choice, best: &mut Option<((u8, usize), Choice)>| {
            let key = (rank, c.len());
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                *best = Some((key, c));
            }
        };
        for a in self.atoms {
            match a {
                SetAtom::Union(x, ys) => {
                    if let Some(t) = sets[x]
                        .iter()
                        .find(|t| ys.iter().all(|y| !sets[y].contains(*t)))
                    {
                        consider(
                            0,
                            ys.iter().map(|y| (y.clone(), t.clone())).collect(),
                            &mut best,
                        );
                    }
                }
                SetAtom::Src(x, y) | SetAtom::Tgt(x, y) => {
                    let source = matches!(a, SetAtom::Src(..));
                    let have = projection(&sets[y], source);
                    if let Some(t) = sets[x].iter().find(|t| !have.contains(*t)) {
                        let pool = pool.get_or_insert_with(|| self.pool(sets));
                        let options = pool
                            .iter()
                            .map(|u| {
                                let arrow = if source {
                                    Type::arrow(t.clone(), u.clone())
                                } else {
                                    Type::arrow(u.clone(), t.clone())
                                };
                                (y.clone(), arrow)
                            })
                            .filter(|(_, arrow)| arrow.depth() <= self.max_depth)
                            .collect();
                        consider(if source { 3 } else { 1 }, options, &mut best);
                    }
                }
                SetAtom::Card1(x) if sets[x].is_empty() => {
                    let pool = pool.get_or_insert_with(|| self.pool(sets));
                    consider(
                        2,
                        pool.iter().map(|u| (x.clone(), u.clone())).collect(),
                        &mut best,
                    );
                }
                _ => {}
            }
            if best.as_ref().is_some_and(|(_, c)| c.is_empty()) {
                break;
            }
        }
        best.map(|(_, c)| c)
    }
}
