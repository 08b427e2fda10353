//! Constraint systems over intersection types and their substitutions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::subtyping::{subtype, type_equal};
use crate::types::{parse_type_at, ParseError, Symbol, Type, FRESH_PREFIX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `lhs <= rhs` after substitution.
    Leq,
    /// `lhs = rhs` after substitution.
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub lhs: Type,
    pub rhs: Type,
    pub kind: Relation,
}

impl Constraint {
    pub fn leq(lhs: Type, rhs: Type) -> Self {
        Constraint {
            lhs,
            rhs,
            kind: Relation::Leq,
        }
    }

    pub fn eq(lhs: Type, rhs: Type) -> Self {
        Constraint {
            lhs,
            rhs,
            kind: Relation::Eq,
        }
    }

    pub fn holds_under(&self, s: &Substitution) -> bool {
        let l = s.apply(&self.lhs);
        let r = s.apply(&self.rhs);
        match self.kind {
            Relation::Leq => subtype(&l, &r),
            Relation::Eq => type_equal(&l, &r),
        }
    }

    /// A matching constraint has a ground side.
    pub fn is_matching(&self) -> bool {
        self.lhs.is_ground() || self.rhs.is_ground()
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            Relation::Leq => "<=",
            Relation::Eq => "==",
        };
        write!(f, "{} {} {}", self.lhs, op, self.rhs)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pub constraints: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn new(constraints: Vec<Constraint>) -> Self {
        ConstraintSet { constraints }
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Constraint> {
        self.constraints.iter()
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for c in &self.constraints {
            c.lhs.collect_vars(&mut out);
            c.rhs.collect_vars(&mut out);
        }
        out
    }

    pub fn constants(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for c in &self.constraints {
            c.lhs.collect_constants(&mut out);
            c.rhs.collect_constants(&mut out);
        }
        out
    }

    pub fn is_matching(&self) -> bool {
        self.constraints.iter().all(Constraint::is_matching)
    }

    /// Replaces each equation by two inequations.
    pub fn expand_equations(&self) -> ConstraintSet {
        let mut out = Vec::with_capacity(self.constraints.len());
        for c in &self.constraints {
            match c.kind {
                Relation::Leq => out.push(c.clone()),
                Relation::Eq => {
                    out.push(Constraint::leq(c.lhs.clone(), c.rhs.clone()));
                    out.push(Constraint::leq(c.rhs.clone(), c.lhs.clone()));
                }
            }
        }
        ConstraintSet::new(out)
    }

    /// Parses one constraint per line: `TYPE <= TYPE` or `TYPE == TYPE`.
    /// `#` starts a comment.
    pub fn parse(src: &str) -> Result<Self, ConstraintError> {
        parse_constraints(src, false)
    }

    /// Like [`ConstraintSet::parse`], also accepting generated fresh variables.
    pub fn parse_lenient(src: &str) -> Result<Self, ConstraintError> {
        parse_constraints(src, true)
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromIterator<Constraint> for ConstraintSet {
    fn from_iter<I: IntoIterator<Item = Constraint>>(iter: I) -> Self {
        ConstraintSet::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a ConstraintSet {
    type Item = &'a Constraint;
    type IntoIter = std::slice::Iter<'a, Constraint>;
    fn into_iter(self) -> Self::IntoIter {
        self.constraints.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: expected `<=` or `==` between two types")]
    MissingRelation { line: usize },
    #[error("line {line}: expected `'name := TYPE`")]
    MalformedBinding { line: usize },
    #[error("line {line}: variable '{name} is bound twice")]
    DuplicateBinding { line: usize, name: String },
    #[error("unknown combinator `{0}`")]
    UnknownCombinator(String),
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn column_of(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

fn parse_constraints(src: &str, allow_fresh: bool) -> Result<ConstraintSet, ConstraintError> {
    let mut out = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let (pos, kind) = match (line.find("<="), line.find("==")) {
            (Some(p), None) => (p, Relation::Leq),
            (None, Some(p)) => (p, Relation::Eq),
            _ => return Err(ConstraintError::MissingRelation { line: line_no }),
        };
        let lhs = parse_type_at(&line[..pos], line_no, 1, allow_fresh)?;
        let rhs = parse_type_at(
            &line[pos + 2..],
            line_no,
            column_of(line, pos + 2),
            allow_fresh,
        )?;
        out.push(Constraint { lhs, rhs, kind });
    }
    Ok(ConstraintSet::new(out))
}

/// Simultaneous replacement of finitely many variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Symbol, Type>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn insert(&mut self, var: &str, value: Type) -> Option<Type> {
        self.map.insert(Symbol::from(var), value)
    }

    pub fn get(&self, var: &str) -> Option<&Type> {
        self.map.get(var)
    }

    pub fn remove(&mut self, var: &str) -> Option<Type> {
        self.map.remove(var)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Type)> {
        self.map.iter()
    }

    pub fn apply(&self, t: &Type) -> Type {
        if self.map.is_empty() {
            return t.clone();
        }
        t.map_vars(&mut |v| self.map.get(v).cloned())
    }

    pub fn apply_constraint(&self, c: &Constraint) -> Constraint {
        Constraint {
            lhs: self.apply(&c.lhs),
            rhs: self.apply(&c.rhs),
            kind: c.kind,
        }
    }

    /// Parses lines `'name := TYPE`; `#` starts a comment.
    pub fn parse(src: &str) -> Result<Self, ConstraintError> {
        let mut s = Substitution::new();
        for (idx, raw) in src.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw);
            if line.trim().is_empty() {
                continue;
            }
            let pos = line
                .find(":=")
                .ok_or(ConstraintError::MalformedBinding { line: line_no })?;
            let name = line[..pos].trim();
            let var = match parse_type_at(name, line_no, 1, true) {
                Ok(Type::Var(v)) => v,
                _ => return Err(ConstraintError::MalformedBinding { line: line_no }),
            };
            let value = parse_type_at(&line[pos + 2..], line_no, column_of(line, pos + 2), true)?;
            if s.map.insert(var.clone(), value).is_some() {
                return Err(ConstraintError::DuplicateBinding {
                    line: line_no,
                    name: var.to_string(),
                });
            }
        }
        Ok(s)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, t) in &self.map {
            writeln!(f, "'{v} := {t}")?;
        }
        Ok(())
    }
}

impl FromIterator<(Symbol, Type)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Symbol, Type)>>(iter: I) -> Self {
        Substitution {
            map: iter.into_iter().collect(),
        }
    }
}

/// Checks every constraint under `s`.
pub fn verify(s: &Substitution, cs: &ConstraintSet) -> bool {
    cs.iter().all(|c| c.holds_under(s))
}

/// Index of the first constraint violated under `s`.
pub fn first_violation(s: &Substitution, cs: &ConstraintSet) -> Option<usize> {
    cs.iter().position(|c| !c.holds_under(s))
}

/// Source of variables `'_fresh0`, `'_fresh1`, ... that cannot clash with
/// parsed user input.
#[derive(Debug, Clone, Default)]
pub struct FreshVars {
    next: usize,
}

impl FreshVars {
    pub fn new() -> Self {
        FreshVars::default()
    }

    pub fn fresh(&mut self) -> Type {
        let v = Type::var(&format!("{FRESH_PREFIX}{}", self.next));
        self.next += 1;
        v
    }

    pub fn issued(&self) -> usize {
        self.next
    }
}

/// `s <= t` becomes `s & t == s`.
pub fn sat_to_unif(cs: &ConstraintSet) -> ConstraintSet {
    cs.iter()
        .map(|c| match c.kind {
            Relation::Leq => {
                Constraint::eq(Type::inter([c.lhs.clone(), c.rhs.clone()]), c.lhs.clone())
            }
            Relation::Eq => c.clone(),
        })
        .collect()
}

/// `s == t` becomes `s <= t` and `t <= s`.
pub fn unif_to_sat(cs: &ConstraintSet) -> ConstraintSet {
    cs.expand_equations()
}

/// Packs a constraint set into a single inequation over the constant `bullet`.
///
/// Each `s <= t` becomes an argument pair: `(s -> bullet, t -> bullet)` when
/// `s` is ground, `(t, s)` when only `t` is ground, and the first form
/// otherwise. The result `s1' -> ... -> bullet <= t1' -> ... -> bullet` has
/// the same solutions, and its left side is ground when the input is a
/// matching instance.
pub fn pack_single(cs: &ConstraintSet, bullet: &str) -> Constraint {
    let dot = Type::constant(bullet);
    let (mut ls, mut rs) = (Vec::new(), Vec::new());
    for c in cs.expand_equations().iter() {
        if !c.lhs.is_ground() && c.rhs.is_ground() {
            ls.push(c.rhs.clone());
            rs.push(c.lhs.clone());
        } else {
            ls.push(Type::arrow(c.lhs.clone(), dot.clone()));
            rs.push(Type::arrow(c.rhs.clone(), dot.clone()));
        }
    }
    Constraint::leq(Type::arrows(ls, dot.clone()), Type::arrows(rs, dot))
}

/// `bullet -> ... -> bullet` with `i` arrows.
pub fn unary_tower(i: usize, bullet: &str) -> Type {
    let dot = Type::constant(bullet);
    Type::arrows(std::iter::repeat_n(dot.clone(), i), dot)
}

/// Replaces the `i`-th constant of `order` (counting from one) by the tower
/// of `i` arrows over `bullet`.
pub fn encode_constants_unary(cs: &ConstraintSet, order: &[Symbol], bullet: &str) -> ConstraintSet {
    let table: BTreeMap<&str, Type> = order
        .iter()
        .enumerate()
        .map(|(i, c)| (&**c, unary_tower(i + 1, bullet)))
        .collect();
    let enc = |t: &Type| t.map_constants(&mut |c| table.get(&**c).cloned());
    cs.iter()
        .map(|c| Constraint {
            lhs: enc(&c.lhs),
            rhs: enc(&c.rhs),
            kind: c.kind,
        })
        .collect()
}

/// Applies the same unary encoding to a substitution's values.
pub fn encode_substitution_unary(s: &Substitution, order: &[Symbol], bullet: &str) -> Substitution {
    let table: BTreeMap<&str, Type> = order
        .iter()
        .enumerate()
        .map(|(i, c)| (&**c, unary_tower(i + 1, bullet)))
        .collect();
    s.iter()
        .map(|(v, t)| {
            (
                v.clone(),
                t.map_constants(&mut |c| table.get(&**c).cloned()),
            )
        })
        .collect()
}

/// Applicative combinator terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Comb(String),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn comb(name: &str) -> Term {
        Term::Comb(name.to_string())
    }

    pub fn app(f: Term, x: Term) -> Term {
        Term::App(Box::new(f), Box::new(x))
    }
}

/// Constraints whose solutions type `term` in `basis` at the goal type.
///
/// A combinator `F` yields `basis(F) <= goal`; an application `E1 E2` yields
/// the constraints of `E1` at `a -> b`, of `E2` at `a`, and `b <= goal` for
/// fresh `a`, `b`.
pub fn typability_constraints(
    term: &Term,
    basis: &BTreeMap<String, Type>,
    goal: &Type,
    fresh: &mut FreshVars,
) -> Result<ConstraintSet, ConstraintError> {
    let mut out = ConstraintSet::default();
    collect_typability(term, basis, goal.clone(), fresh, &mut out)?;
    Ok(out)
}

fn collect_typability(
    term: &Term,
    basis: &BTreeMap<String, Type>,
    goal: Type,
    fresh: &mut FreshVars,
    out: &mut ConstraintSet,
) -> Result<(), ConstraintError> {
    match term {
        Term::Comb(name) => {
            let t = basis
                .get(name)
                .ok_or_else(|| ConstraintError::UnknownCombinator(name.clone()))?;
            out.push(Constraint::leq(t.clone(), goal));
        }
        Term::App(f, x) => {
            let a = fresh.fresh();
            let b = fresh.fresh();
            collect_typability(f, basis, Type::arrow(a.clone(), b.clone()), fresh, out)?;
            collect_typability(x, basis, a, fresh, out)?;
            out.push(Constraint::leq(b, goal));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::parse_type;

    fn t(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    fn subst(pairs: &[(&str, &str)]) -> Substitution {
        let mut s = Substitution::new();
        for (v, ty) in pairs {
            s.insert(v, t(ty));
        }
        s
    }

    #[test]
    fn apply_replaces_simultaneously() {
        let s = subst(&[("a", "b & (b -> b)")]);
        assert_eq!(s.apply(&t("'a -> c")), t("(b & (b -> b)) -> c"));
        assert_eq!(Substitution::new().apply(&t("'a -> c")), t("'a -> c"));
        let s = subst(&[("x", "'y"), ("y", "'x")]);
        assert_eq!(s.apply(&t("'x -> 'y")), t("'y -> 'x"));
        let s = subst(&[("a", "omega")]);
        assert!(type_equal(&s.apply(&t("'a & b")), &t("b")));
    }

    #[test]
    fn verifies_known_solutions() {
        let cs = ConstraintSet::parse("'a <= 'a -> a").unwrap();
        for sol in ["omega -> a", "a & (a -> a)", "((a & (a -> a)) -> a) -> a"] {
            assert!(verify(&subst(&[("a", sol)]), &cs), "{sol}");
        }
        assert!(!verify(&subst(&[("a", "a")]), &cs));
    }

    #[test]
    fn sat_to_unif_shape() {
        let cs = ConstraintSet::parse("a <= 'x").unwrap();
        let u = sat_to_unif(&cs);
        assert_eq!(u.constraints, vec![Constraint::eq(t("a & 'x"), t("a"))]);
        assert!(sat_to_unif(&ConstraintSet::default()).is_empty());
    }

    #[test]
    fn pack_orients_ground_side() {
        let cs = ConstraintSet::parse("a <= 'x\n'y <= b -> b").unwrap();
        let c = pack_single(&cs, "bullet");
        assert!(c.lhs.is_ground());
        assert_eq!(c.lhs, t("(a -> bullet) -> (b -> b) -> bullet"));
        assert_eq!(c.rhs, t("('x -> bullet) -> 'y -> bullet"));
    }

    #[test]
    fn unary_encoding() {
        assert_eq!(unary_tower(1, "bullet"), t("bullet -> bullet"));
        assert_eq!(
            unary_tower(3, "bullet"),
            t("bullet -> bullet -> bullet -> bullet")
        );
        let cs = ConstraintSet::parse("a1 & a2 <= 'x").unwrap();
        let enc = encode_constants_unary(&cs, &[Symbol::from("a1"), Symbol::from("a2")], "bullet");
        assert_eq!(
            enc.constraints[0].lhs,
            t("(bullet -> bullet) & (bullet -> bullet -> bullet)")
        );
    }

    #[test]
    fn typability_counts() {
        let mut basis = BTreeMap::new();
        basis.insert("F".to_string(), t("'f -> 'f"));
        basis.insert("G".to_string(), t("g"));
        basis.insert("H".to_string(), t("h"));
        let mut fresh = FreshVars::new();
        let goal = fresh.fresh();
        let term = Term::app(Term::app(Term::comb("F"), Term::comb("G")), Term::comb("H"));
        let cs = typability_constraints(&term, &basis, &goal, &mut fresh).unwrap();
        assert_eq!(cs.len(), 5);
        assert_eq!(fresh.issued() - 1, 4);
        let single = typability_constraints(&Term::comb("G"), &basis, &goal, &mut fresh).unwrap();
        assert_eq!(
            single.constraints,
            vec![Constraint::leq(t("g"), goal.clone())]
        );
        assert!(typability_constraints(&Term::comb("K"), &basis, &goal, &mut fresh).is_err());
    }

    #[test]
    fn file_formats() {
        let cs = ConstraintSet::parse("# c\n'a <= b # tail\n\n'a -> b == c\n").unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs.constraints[1].kind, Relation::Eq);
        let reparsed = ConstraintSet::parse(&cs.to_string()).unwrap();
        assert_eq!(reparsed, cs);
        let err = ConstraintSet::parse("a <= (b").unwrap_err();
        match err {
            ConstraintError::Parse(p) => assert_eq!((p.line, p.column), (1, 8)),
            other => panic!("{other}"),
        }
        assert!(matches!(
            ConstraintSet::parse("a b"),
            Err(ConstraintError::MissingRelation { line: 1 })
        ));
        let s = Substitution::parse("'x := a -> b\n'y := omega").unwrap();
        assert_eq!(s.get("x"), Some(&t("a -> b")));
        assert_eq!(Substitution::parse(&s.to_string()).unwrap(), s);
        assert!(Substitution::parse("'x := a\n'x := b").is_err());
    }
}
