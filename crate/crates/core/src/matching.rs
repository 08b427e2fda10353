//! Matching: constraint systems in which every constraint has a ground side.
//!
//! Contains the encoding of 3-SAT into matching over a single type variable,
//! recovery of a valuation from a solution, and a bounded solver that tries
//! intersections of atoms in order of increasing size.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::constraints::{verify, Constraint, ConstraintSet, Substitution};
use crate::subtyping::{subtype, SubtypeChecker};
use crate::types::{Symbol, Type};

/// Name of the separator constant used by the encodings.
pub const BULLET: &str = "bullet";

/// Name of the single type variable of the 3-SAT encoding.
pub const SAT_VAR: &str = "alpha";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    /// Index into [`Sat3Instance::variables`].
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn holds(&self, valuation: &[bool]) -> bool {
        valuation[self.var] == self.positive
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sat3Instance {
    pub variables: Vec<String>,
    pub clauses: Vec<[Literal; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("line {line}: {message}")]
    Dimacs { line: usize, message: String },
    #[error("variable name `{0}` is not a lowercase identifier")]
    BadVariableName(String),
    #[error("clause {clause} mentions variable index {var}, but there are {count} variables")]
    VariableOutOfRange {
        clause: usize,
        var: usize,
        count: usize,
    },
    #[error("constraint {0} has no ground side")]
    NotMatching(usize),
    #[error("substitution does not solve the encoded instance")]
    NotASolution,
    #[error("'{SAT_VAR} lies below neither {0} nor its negation")]
    Undetermined(String),
}

fn is_const_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && s != "omega"
}

impl Sat3Instance {
    pub fn new(variables: Vec<String>, clauses: Vec<[Literal; 3]>) -> Result<Self, MatchingError> {
        for v in &variables {
            if !is_const_name(v) || v.starts_with("not_") || v == BULLET {
                return Err(MatchingError::BadVariableName(v.clone()));
            }
        }
        for (i, c) in clauses.iter().enumerate() {
            for l in c {
                if l.var >= variables.len() {
                    return Err(MatchingError::VariableOutOfRange {
                        clause: i,
                        var: l.var,
                        count: variables.len(),
                    });
                }
            }
        }
        Ok(Sat3Instance { variables, clauses })
    }

    /// Variables named `x1 .. xn`.
    pub fn numbered(n: usize, clauses: Vec<[Literal; 3]>) -> Result<Self, MatchingError> {
        Sat3Instance::new((1..=n).map(|i| format!("x{i}")).collect(), clauses)
    }

    pub fn satisfied_by(&self, valuation: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.holds(valuation)))
    }

    /// Constant standing for a literal.
    pub fn literal_constant(&self, l: Literal) -> Type {
        let name = &self.variables[l.var];
        if l.positive {
            Type::constant(name)
        } else {
            Type::constant(&format!("not_{name}"))
        }
    }

    /// All literal constants: `x1, not_x1, x2, not_x2, ...`.
    pub fn literal_constants(&self) -> Vec<Symbol> {
        let mut out = Vec::with_capacity(2 * self.variables.len());
        for v in &self.variables {
            out.push(Symbol::from(v.as_str()));
            out.push(Symbol::from(format!("not_{v}").as_str()));
        }
        out
    }

    /// Parses DIMACS CNF with exactly three literals per clause.
    pub fn parse_dimacs(src: &str) -> Result<Self, MatchingError> {
        let err = |line: usize, message: &str| MatchingError::Dimacs {
            line,
            message: message.to_string(),
        };
        let mut header: Option<(usize, usize, usize)> = None;
        let mut clauses = Vec::new();
        for (idx, raw) in src.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" {
                    return Err(err(line_no, "expected `p cnf <vars> <clauses>`"));
                }
                let v = parts[2]
                    .parse()
                    .map_err(|_| err(line_no, "bad variable count"))?;
                let c = parts[3]
                    .parse()
                    .map_err(|_| err(line_no, "bad clause count"))?;
                header = Some((v, c, line_no));
                continue;
            }
            let (nvars, _, _) = header.ok_or_else(|| err(line_no, "clause before header"))?;
            let mut nums: Vec<i64> = Vec::new();
            for tok in line.split_whitespace() {
                nums.push(
                    tok.parse()
                        .map_err(|_| err(line_no, "expected an integer"))?,
                );
            }
            if nums.last() == Some(&0) {
                nums.pop();
            }
            if nums.len() != 3 || nums.contains(&0) {
                return Err(err(line_no, "expected three nonzero literals"));
            }
            let mut clause = [Literal {
                var: 0,
                positive: true,
            }; 3];
            for (slot, n) in clause.iter_mut().zip(&nums) {
                let var = n.unsigned_abs() as usize;
                if var > nvars {
                    return Err(err(line_no, "literal exceeds declared variable count"));
                }
                *slot = Literal {
                    var: var - 1,
                    positive: *n > 0,
                };
            }
            clauses.push(clause);
        }
        let (nvars, nclauses, hline) = header.ok_or_else(|| err(1, "missing `p cnf` header"))?;
        if clauses.len() != nclauses {
            return Err(err(hline, "clause count does not match header"));
        }
        Sat3Instance::numbered(nvars, clauses)
    }
}

impl fmt::Display for Sat3Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.variables.len(), self.clauses.len())?;
        for c in &self.clauses {
            for l in c {
                let n = l.var as i64 + 1;
                write!(f, "{} ", if l.positive { n } else { -n })?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// Encodes a 3-SAT instance as matching constraints over the single
/// variable `'alpha`.
///
/// For each propositional variable `x`, a consistency constraint forces
/// `'alpha` between `sx` and `x` or between `snx` and `not_x`, where `sx` is
/// the intersection of all literal constants except `not_x` and `snx` the
/// intersection of all except `x`. Each clause `L1 | L2 | L3` yields
/// `(L1 -> bullet) & (L2 -> bullet) & (L3 -> bullet) <= 'alpha -> bullet`.
pub fn sat3_to_matching(f: &Sat3Instance) -> ConstraintSet {
    let dot = Type::constant(BULLET);
    let alpha = Type::var(SAT_VAR);
    let all: Vec<Type> = f
        .literal_constants()
        .iter()
        .map(|c| Type::Const(c.clone()))
        .collect();
    let to_dot = |t: Type| Type::arrow(t, dot.clone());
    let mut out = ConstraintSet::default();
    for v in 0..f.variables.len() {
        let pos = f.literal_constant(Literal {
            var: v,
            positive: true,
        });
        let neg = f.literal_constant(Literal {
            var: v,
            positive: false,
        });
        let all_but = |skip: &Type| Type::inter(all.iter().filter(|c| *c != skip).cloned());
        let sigma_pos = all_but(&neg);
        let sigma_neg = all_but(&pos);
        let lhs = Type::inter([
            Type::arrow(to_dot(sigma_neg), to_dot(neg)),
            Type::arrow(to_dot(sigma_pos), to_dot(pos)),
        ]);
        let rhs = Type::arrow(to_dot(alpha.clone()), to_dot(alpha.clone()));
        out.push(Constraint::leq(lhs, rhs));
    }
    for clause in &f.clauses {
        let lhs = Type::inter(clause.iter().map(|l| to_dot(f.literal_constant(*l))));
        out.push(Constraint::leq(lhs, to_dot(alpha.clone())));
    }
    out
}

/// The solution built from a satisfying valuation: `'alpha` maps to the
/// intersection of the literals made true.
pub fn valuation_to_substitution(f: &Sat3Instance, valuation: &[bool]) -> Substitution {
    let alpha = Type::inter((0..f.variables.len()).map(|v| {
        f.literal_constant(Literal {
            var: v,
            positive: valuation[v],
        })
    }));
    let mut s = Substitution::new();
    s.insert(SAT_VAR, alpha);
    s
}

/// Reads off a satisfying valuation from a solution of the encoding:
/// `x` is true iff the image of `'alpha` lies below the constant `x`.
pub fn extract_valuation(s: &Substitution, f: &Sat3Instance) -> Result<Vec<bool>, MatchingError> {
    if !verify(s, &sat3_to_matching(f)) {
        return Err(MatchingError::NotASolution);
    }
    extract_valuation_unchecked(s, f)
}

fn extract_valuation_unchecked(
    s: &Substitution,
    f: &Sat3Instance,
) -> Result<Vec<bool>, MatchingError> {
    let image = s.apply(&Type::var(SAT_VAR));
    (0..f.variables.len())
        .map(|v| {
            let pos = f.literal_constant(Literal {
                var: v,
                positive: true,
            });
            let neg = f.literal_constant(Literal {
                var: v,
                positive: false,
            });
            if subtype(&image, &pos) {
                Ok(true)
            } else if subtype(&image, &neg) {
                Ok(false)
            } else {
                Err(MatchingError::Undetermined(f.variables[v].clone()))
            }
        })
        .collect()
}

/// Same as [`extract_valuation`] for the single-constant encoding, where
/// the `i`-th literal constant is replaced by its unary tower.
pub fn extract_valuation_unary(
    s: &Substitution,
    f: &Sat3Instance,
) -> Result<Vec<bool>, MatchingError> {
    let order = f.literal_constants();
    let cs = crate::constraints::encode_constants_unary(&sat3_to_matching(f), &order, BULLET);
    if !verify(s, &cs) {
        return Err(MatchingError::NotASolution);
    }
    let image = s.apply(&Type::var(SAT_VAR));
    (0..f.variables.len())
        .map(|v| {
            let pos = crate::constraints::unary_tower(2 * v + 1, BULLET);
            let neg = crate::constraints::unary_tower(2 * v + 2, BULLET);
            if subtype(&image, &pos) {
                Ok(true)
            } else if subtype(&image, &neg) {
                Ok(false)
            } else {
                Err(MatchingError::Undetermined(f.variables[v].clone()))
            }
        })
        .collect()
}

/// Search bounds for [`solve_matching_bounded`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchingBudget {
    /// Largest intersection tried per variable; `None` means all atoms.
    pub max_width: Option<usize>,
    /// Atoms also include arrow chains `c0 -> ... -> ck` of constants with
    /// `1 <= k <= tower_depth`.
    pub tower_depth: usize,
    /// Upper bound on the number of candidate substitutions verified.
    pub max_candidates: u64,
}

impl Default for MatchingBudget {
    fn default() -> Self {
        MatchingBudget {
            max_width: None,
            tower_depth: 0,
            max_candidates: 1 << 24,
        }
    }
}

/// Atoms tried by the solver, in order: constants, then chains by length.
pub fn candidate_atoms(constants: &BTreeSet<Symbol>, tower_depth: usize) -> Vec<Type> {
    let base: Vec<Type> = constants.iter().map(|c| Type::Const(c.clone())).collect();
    let mut out = base.clone();
    let mut layer = base.clone();
    for _ in 0..tower_depth {
        let mut next = Vec::new();
        for c in &base {
            for t in &layer {
                next.push(Type::arrow(c.clone(), t.clone()));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Subsets of `0..n` with at most `max` elements, by increasing size and
/// lexicographically within a size.
fn subsets_by_size(n: usize, max: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=max.min(n)).flat_map(move |k| Combinations::new(n, k))
}

struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            cur: if k <= n { Some((0..k).collect()) } else { None },
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.cur.take()?;
        let out = cur.clone();
        let k = cur.len();
        let mut next = cur;
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.cur = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Searches for a solution mapping each variable to an intersection of
/// atoms (see [`candidate_atoms`]). Candidates are tried by increasing
/// intersection size; `Ok(None)` means nothing within the budget works, which
/// does not imply the system is unsolvable.
pub fn solve_matching_bounded(
    cs: &ConstraintSet,
    budget: &MatchingBudget,
) -> Result<Option<Substitution>, MatchingError> {
    let expanded = cs.expand_equations();
    if let Some(i) = cs.iter().position(|c| !c.is_matching()) {
        return Err(MatchingError::NotMatching(i));
    }
    let vars: Vec<Symbol> = cs.vars().into_iter().collect();
    let atoms = candidate_atoms(&cs.constants(), budget.tower_depth);
    let width = budget.max_width.unwrap_or(atoms.len());
    let choices: Vec<Type> = subsets_by_size(atoms.len(), width)
        .map(|idx| Type::inter(idx.into_iter().map(|i| atoms[i].clone())))
        .collect();
    if vars.is_empty() {
        let s = Substitution::new();
        return Ok(verify(&s, &expanded).then_some(s));
    }
    let ground_lhs: Vec<Option<SubtypeChecker<'_>>> = expanded
        .iter()
        .map(|c| c.lhs.is_ground().then(|| SubtypeChecker::new(&c.lhs)))
        .collect();
    let holds = |s: &Substitution| {
        expanded.iter().zip(&ground_lhs).all(|(c, g)| match g {
            Some(g) => g.is_below(&s.apply(&c.rhs)),
            None => c.holds_under(s),
        })
    };
    let mut odometer = vec![0usize; vars.len()];
    let mut tried = 0u64;
    loop {
        if tried >= budget.max_candidates {
            return Ok(None);
        }
        tried += 1;
        let s: Substitution = vars
            .iter()
            .zip(&odometer)
            .map(|(v, &i)| (v.clone(), choices[i].clone()))
            .collect();
        if holds(&s) {
            return Ok(Some(s));
        }
        let mut pos = 0;
        loop {
            if pos == odometer.len() {
                return Ok(None);
            }
            odometer[pos] += 1;
            if odometer[pos] < choices.len() {
                break;
            }
            odometer[pos] = 0;
            pos += 1;
        }
    }
}

/// Budget that makes the solver complete on the single-constant encoding of
/// an instance with `variables` propositional variables.
pub fn unary_budget(variables: usize) -> MatchingBudget {
    MatchingBudget {
        tower_depth: 2 * variables,
        ..MatchingBudget::default()
    }
}

/// Single-constant form of the 3-SAT encoding: literal constants replaced
/// by unary towers over [`BULLET`].
pub fn sat3_to_matching_unary(f: &Sat3Instance) -> ConstraintSet {
    crate::constraints::encode_constants_unary(&sat3_to_matching(f), &f.literal_constants(), BULLET)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(var: usize, positive: bool) -> Literal {
        Literal { var, positive }
    }

    #[test]
    fn single_clause_shape() {
        let f = Sat3Instance::new(
            vec!["x".into()],
            vec![[lit(0, true), lit(0, true), lit(0, true)]],
        )
        .unwrap();
        let cs = sat3_to_matching(&f);
        assert_eq!(cs.len(), 2);
        let consts: Vec<String> = cs.constants().iter().map(|c| c.to_string()).collect();
        assert_eq!(consts, vec!["bullet", "not_x", "x"]);
        assert_eq!(cs.vars().len(), 1);
    }

    #[test]
    fn satisfying_valuation_solves() {
        let f = Sat3Instance::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![[lit(0, true), lit(1, true), lit(2, true)]],
        )
        .unwrap();
        let s = valuation_to_substitution(&f, &[true, true, true]);
        assert!(verify(&s, &sat3_to_matching(&f)));
        assert_eq!(extract_valuation(&s, &f).unwrap(), vec![true, true, true]);
        let bad = valuation_to_substitution(&f, &[false, false, false]);
        assert!(!verify(&bad, &sat3_to_matching(&f)));
    }

    #[test]
    fn unsatisfiable_pair_has_no_solution() {
        let f = Sat3Instance::new(
            vec!["x".into()],
            vec![
                [lit(0, true), lit(0, true), lit(0, true)],
                [lit(0, false), lit(0, false), lit(0, false)],
            ],
        )
        .unwrap();
        let r = solve_matching_bounded(&sat3_to_matching(&f), &MatchingBudget::default()).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn trivial_lower_bound() {
        let cs = ConstraintSet::parse("a <= 'x").unwrap();
        let s = solve_matching_bounded(&cs, &MatchingBudget::default())
            .unwrap()
            .unwrap();
        assert!(subtype(&Type::constant("a"), s.get("x").unwrap()));
    }

    #[test]
    fn rejects_non_matching() {
        let cs = ConstraintSet::parse("'x <= 'y").unwrap();
        assert!(matches!(
            solve_matching_bounded(&cs, &MatchingBudget::default()),
            Err(MatchingError::NotMatching(0))
        ));
    }

    #[test]
    fn combinations_enumerate_all() {
        let all: Vec<_> = subsets_by_size(4, 4).collect();
        assert_eq!(all.len(), 16);
        assert_eq!(all[0], Vec::<usize>::new());
        assert_eq!(all[1], vec![0]);
        assert_eq!(all[15], vec![0, 1, 2, 3]);
    }

    #[test]
    fn dimacs_roundtrip() {
        let src = "c demo\np cnf 3 2\n1 -2 3 0\n-1 -1 2 0\n";
        let f = Sat3Instance::parse_dimacs(src).unwrap();
        assert_eq!(f.clauses.len(), 2);
        assert_eq!(f.clauses[0][1], lit(1, false));
        assert_eq!(Sat3Instance::parse_dimacs(&f.to_string()).unwrap(), f);
        assert!(Sat3Instance::parse_dimacs("p cnf 1 1\n1 2 0\n").is_err());
        assert!(Sat3Instance::parse_dimacs("p cnf 1 2\n1 1 1 0\n").is_err());
    }
}
