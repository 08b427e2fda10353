//! Nondeterministic rewriting of subtyping constraints into set constraints.
//!
//! Variables in a chosen set are replaced by `omega`, all types are organized
//! at every arrow level, and the rules below are applied until no constraint
//! is left, always using the lowest-numbered applicable rule on the leftmost
//! constraint it applies to. Rules 8 and 9 branch; rules 5 and 7 abandon the
//! branch.
//!
//! 1. drop `s <= t` when it already holds
//! 2. `p <= X` with `p` ground simple: `X = {p}`
//! 3. `X <= p` with `p` ground simple: `{p} <= X`
//! 4. `X <= Y`: `Y <= X` as sets
//! 5. `omega <= t` with `t` not equal to `omega`: abandon; when `t` is a
//!    variable the set must be empty instead
//! 6. split an intersection on the right
//! 7. constant against arrow or another constant: abandon
//! 8. intersection below a path ending in a constant: pick one component
//! 9. intersection below a path ending in `X`: pick a nonempty subset of
//!    components, each below the path ending in a fresh `Xi`, `X = X1 | ...`
//! 10. arrow below arrow: contravariant sources, covariant targets
//! 11. `X <= s -> t`: `s <= B`, `G <= t`, `D <= X`, `B = src(D)`, `G = tgt(D)`
//! 12. `omega -> t <= X`: `t <= B`, `X <= G -> B`
//! 13. `(s1 & ... & sk) -> t <= X`: `si -> t <= X` for each `i`
//! 14. `(s1 -> ... -> sn -> a) -> t <= X`: `si <= Bi`, `t <= G`,
//!     `X <= (B1 -> ... -> Bn -> a) -> G`
//! 15. as 14 with a variable `Y` in place of `a`, adding `card Y = 1`
//!
//! `B`, `G`, `D`, `Bi`, `Xi` are fresh.

use std::collections::BTreeSet;

use crate::constraints::{ConstraintSet, Relation};
use crate::subtyping::subtype;
use crate::types::{organize_deep, Symbol, Type, FRESH_PREFIX};

use super::sets::{SetAtom, SetConstraintSystem};

/// A set-constraint system together with the variables mapped to `omega`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank1System {
    pub omega_vars: BTreeSet<Symbol>,
    pub system: SetConstraintSystem,
}

#[derive(Debug, Clone)]
struct Branch {
    omega_vars: BTreeSet<Symbol>,
    pending: Vec<(Type, Type)>,
    atoms: Vec<SetAtom>,
    fresh: usize,
}

/// Lazily enumerates every set-constraint system reachable from a
/// constraint set, over all choices of `omega` variables and all rule
/// choices, by depth-first backtracking.
pub struct Rank1Transform {
    stack: Vec<Branch>,
    taken: BTreeSet<Symbol>,
}

/// All systems for `cs`; `==` constraints are read as two `<=` constraints.
/// Choices of `omega` variables are tried from the smallest set up.
pub fn rank1_transform(cs: &ConstraintSet) -> Rank1Transform {
    let vars: Vec<Symbol> = cs.vars().into_iter().collect();
    let mut subsets: Vec<BTreeSet<Symbol>> = (0u64..1 << vars.len())
        .map(|mask| {
            vars.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect();
    subsets.sort_by_key(BTreeSet::len);
    Rank1Transform::new(cs, subsets)
}

/// Systems for one fixed set of `omega` variables.
pub fn rank1_transform_with(cs: &ConstraintSet, omega_vars: &BTreeSet<Symbol>) -> Rank1Transform {
    Rank1Transform::new(cs, vec![omega_vars.clone()])
}

impl Rank1Transform {
    fn new(cs: &ConstraintSet, choices: Vec<BTreeSet<Symbol>>) -> Self {
        let leq = cs.expand_equations();
        let taken = cs.vars();
        let stack = choices
            .into_iter()
            .rev()
            .map(|omega_vars| {
                let mut to_omega = |v: &Symbol| omega_vars.contains(v).then_some(Type::Omega);
                let pending = leq
                    .iter()
                    .map(|c| {
                        debug_assert_eq!(c.kind, Relation::Leq);
                        (
                            organize_deep(&c.lhs.map_vars(&mut to_omega)),
                            organize_deep(&c.rhs.map_vars(&mut to_omega)),
                        )
                    })
                    .collect();
                Branch {
                    omega_vars,
                    pending,
                    atoms: Vec::new(),
                    fresh: 0,
                }
            })
            .collect();
        Rank1Transform { stack, taken }
    }
}

impl Iterator for Rank1Transform {
    type Item = Rank1System;

    fn next(&mut self) -> Option<Rank1System> {
        while let Some(mut branch) = self.stack.pop() {
            match branch.run(&self.taken) {
                Outcome::Done => {
                    return Some(Rank1System {
                        omega_vars: branch.omega_vars,
                        system: SetConstraintSystem::new(branch.atoms),
                    })
                }
                Outcome::Abort => {}
                Outcome::Split(mut alternatives) => {
                    alternatives.reverse();
                    self.stack.extend(alternatives);
                }
            }
        }
        None
    }
}

enum Outcome {
    Done,
    Abort,
    Split(Vec<Branch>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Rule {
    Holds,
    SimpleBelowVar,
    VarBelowSimple,
    VarBelowVar,
    OmegaBelow,
    OmegaBelowVar,
    SplitRight,
    Clash,
    PickComponent,
    PickComponents,
    Arrows,
    VarBelowArrow,
    OmegaSourceArrow,
    InterSourceArrow,
    ConstHeadSourceArrow,
    VarHeadSourceArrow,
}

fn head(t: &Type) -> &Type {
    match t {
        Type::Arrow(_, r) => head(r),
        other => other,
    }
}

fn split_path(t: &Type) -> (Vec<Type>, Type) {
    let mut args = Vec::new();
    let mut cur = t;
    while let Type::Arrow(s, r) = cur {
        args.push((**s).clone());
        cur = r;
    }
    (args, cur.clone())
}

fn classify(l: &Type, r: &Type) -> Option<Rule> {
    use Type::*;
    if subtype(l, r) {
        return Some(Rule::Holds);
    }
    let path_head = |t: &Type| t.is_path().then(|| head(t).clone());
    Some(match (l, r) {
        (_, Var(_)) if l.is_simple() => Rule::SimpleBelowVar,
        (Var(_), _) if r.is_simple() => Rule::VarBelowSimple,
        (Var(_), Var(_)) => Rule::VarBelowVar,
        (Omega, Var(_)) => Rule::OmegaBelowVar,
        (Omega, _)
            if r.components()
                .iter()
                .any(|c| !matches!(c, Var(_)) && !c.is_omega_equal()) =>
        {
            Rule::OmegaBelow
        }
        (_, Inter(_)) => Rule::SplitRight,
        (Const(_), Arrow(..)) | (Arrow(..), Const(_)) | (Const(_), Const(_)) => Rule::Clash,
        (Inter(_), _) => match path_head(r)? {
            Const(_) => Rule::PickComponent,
            Var(_) => Rule::PickComponents,
            _ => return None,
        },
        (Arrow(..), Arrow(..)) => Rule::Arrows,
        (Var(_), Arrow(..)) => Rule::VarBelowArrow,
        (Arrow(s, _), Var(_)) => match &**s {
            Omega => Rule::OmegaSourceArrow,
            Inter(_) => Rule::InterSourceArrow,
            src => match path_head(src)? {
                Const(_) => Rule::ConstHeadSourceArrow,
                Var(_) => Rule::VarHeadSourceArrow,
                _ => return None,
            },
        },
        _ => return None,
    })
}

impl Branch {
    fn fresh(&mut self, taken: &BTreeSet<Symbol>) -> Symbol {
        loop {
            let name: Symbol = format!("{FRESH_PREFIX}{}", self.fresh).into();
            self.fresh += 1;
            if !taken.contains(&name) {
                return name;
            }
        }
    }

    /// Applies deterministic rules until the branch finishes, aborts or
    /// reaches a choice.
    fn run(&mut self, taken: &BTreeSet<Symbol>) -> Outcome {
        use Type::*;
        loop {
            let mut best: Option<(Rule, usize)> = None;
            for (i, (l, r)) in self.pending.iter().enumerate() {
                let Some(rule) = classify(l, r) else {
                    return Outcome::Abort;
                };
                if best.is_none_or(|(b, _)| rule < b) {
                    best = Some((rule, i));
                }
            }
            let Some((rule, i)) = best else {
                return Outcome::Done;
            };
            let (l, r) = self.pending.remove(i);
            let var_name = |t: &Type| match t {
                Var(v) => v.clone(),
                _ => unreachable!("classified as a variable"),
            };
            match rule {
                Rule::Holds => {}
                Rule::SimpleBelowVar => self.atoms.push(SetAtom::Singleton(var_name(&r), l)),
                Rule::VarBelowSimple => self.atoms.push(SetAtom::Contains(r, var_name(&l))),
                Rule::VarBelowVar => self.atoms.push(SetAtom::Subset(var_name(&r), var_name(&l))),
                Rule::OmegaBelowVar => self.atoms.push(SetAtom::Empty(var_name(&r))),
                Rule::OmegaBelow | Rule::Clash => return Outcome::Abort,
                Rule::SplitRight => {
                    let parts = r.components().iter().map(|c| (l.clone(), c.clone()));
                    self.pending.splice(i..i, parts);
                }
                Rule::PickComponent => {
                    let alternatives = l
                        .components()
                        .iter()
                        .map(|c| {
                            let mut b = self.clone();
                            b.pending.insert(i, (c.clone(), r.clone()));
                            b
                        })
                        .collect();
                    return Outcome::Split(alternatives);
                }
                Rule::PickComponents => {
                    let (args, target) = split_path(&r);
                    let target = var_name(&target);
                    let comps = l.components();
                    let mut masks: Vec<u64> = (1u64..1 << comps.len()).collect();
                    masks.sort_by_key(|m| m.count_ones());
                    let alternatives = masks
                        .into_iter()
                        .map(|mask| {
                            let mut b = self.clone();
                            let mut parts = Vec::new();
                            let mut fresh = Vec::new();
                            for (k, c) in comps.iter().enumerate() {
                                if mask >> k & 1 == 1 {
                                    let x = b.fresh(taken);
                                    parts.push((
                                        c.clone(),
                                        Type::arrows(args.clone(), Var(x.clone())),
                                    ));
                                    fresh.push(x);
                                }
                            }
                            b.pending.splice(i..i, parts);
                            b.atoms.push(SetAtom::Union(target.clone(), fresh));
                            b
                        })
                        .collect();
                    return Outcome::Split(alternatives);
                }
                Rule::Arrows => {
                    let (Arrow(s1, t1), Arrow(s2, t2)) = (&l, &r) else {
                        unreachable!("classified as arrows")
                    };
                    self.pending.splice(
                        i..i,
                        [
                            ((**s2).clone(), (**s1).clone()),
                            ((**t1).clone(), (**t2).clone()),
                        ],
                    );
                }
                Rule::VarBelowArrow => {
                    let Arrow(s, t) = &r else {
                        unreachable!("classified as arrow")
                    };
                    let (b, g, d) = (self.fresh(taken), self.fresh(taken), self.fresh(taken));
                    self.pending.splice(
                        i..i,
                        [
                            ((**s).clone(), Var(b.clone())),
                            (Var(g.clone()), (**t).clone()),
                        ],
                    );
                    self.atoms.extend([
                        SetAtom::Subset(d.clone(), var_name(&l)),
                        SetAtom::Src(b, d.clone()),
                        SetAtom::Tgt(g, d),
                    ]);
                }
                Rule::OmegaSourceArrow => {
                    let Arrow(_, t) = &l else {
                        unreachable!("classified as arrow")
                    };
                    let (b, g) = (self.fresh(taken), self.fresh(taken));
                    self.pending.insert(i, ((**t).clone(), Var(b.clone())));
                    self.atoms.push(SetAtom::SubsetArrow(
                        var_name(&r),
                        Type::arrow(Var(g), Var(b)),
                    ));
                }
                Rule::InterSourceArrow => {
                    let Arrow(s, t) = &l else {
                        unreachable!("classified as arrow")
                    };
                    let parts = s
                        .components()
                        .iter()
                        .map(|c| (Type::Arrow(c.clone().into(), t.clone()), r.clone()));
                    self.pending.splice(i..i, parts);
                }
                Rule::ConstHeadSourceArrow | Rule::VarHeadSourceArrow => {
                    let Arrow(s, t) = &l else {
                        unreachable!("classified as arrow")
                    };
                    let (args, h) = split_path(s);
                    let mut parts = Vec::new();
                    let mut bs = Vec::new();
                    for a in args {
                        let b = self.fresh(taken);
                        parts.push((a, Var(b.clone())));
                        bs.push(Var(b));
                    }
                    let g = self.fresh(taken);
                    parts.push(((**t).clone(), Var(g.clone())));
                    self.pending.splice(i..i, parts);
                    let card =
                        (rule == Rule::VarHeadSourceArrow).then(|| SetAtom::Card1(var_name(&h)));
                    let shape = Type::arrow(Type::arrows(bs, h), Var(g));
                    self.atoms.push(SetAtom::SubsetArrow(var_name(&r), shape));
                    self.atoms.extend(card);
                }
            }
        }
    }
}
