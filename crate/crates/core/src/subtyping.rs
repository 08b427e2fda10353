//! Deciding subtyping and equality of intersection types.
//!
//! Both sides are first normalized: every subterm equal to `omega` disappears
//! and intersections become flat component lists. The decision then follows
//! two facts: `r <= t1 & ... & tn` iff `r <= ti` for every `i`, and an
//! intersection is below a non-trivial arrow `s -> t` iff the targets of
//! those component arrows whose sources lie above `s` together lie below `t`.
//! The left-hand side of every recursive call is kept as a list of borrowed
//! component slices, so gathering targets never copies components.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use thiserror::Error;

use crate::types::Type;

#[derive(Debug)]
enum Comp<'a> {
    Atom(&'a Type),
    Arrow(Norm<'a>, Norm<'a>),
}

type Norm<'a> = Rc<[Comp<'a>]>;

/// Normalizer with a per-call cache keyed by node address (arrows) or by
/// component storage (intersections), so types that share subtrees are
/// normalized once per shared node.
struct Normalizer<'a> {
    cache: HashMap<(usize, bool), Norm<'a>>,
}

impl<'a> Normalizer<'a> {
    fn new() -> Self {
        Normalizer {
            cache: HashMap::new(),
        }
    }

    fn norm(&mut self, t: &'a Type) -> Norm<'a> {
        let key = match t {
            Type::Inter(items) => (items.as_ptr() as usize, true),
            Type::Arrow(..) => (t as *const Type as usize, false),
            _ => {
                let mut out = Vec::new();
                self.push(t, &mut out);
                return out.into();
            }
        };
        if let Some(n) = self.cache.get(&key) {
            return n.clone();
        }
        let mut out = Vec::new();
        self.push(t, &mut out);
        let n: Norm<'a> = out.into();
        self.cache.insert(key, n.clone());
        n
    }

    fn push(&mut self, t: &'a Type, out: &mut Vec<Comp<'a>>) {
        match t {
            Type::Omega => {}
            Type::Const(_) | Type::Var(_) => out.push(Comp::Atom(t)),
            Type::Arrow(s, r) => {
                let target = self.norm(r);
                if !target.is_empty() {
                    let source = self.norm(s);
                    out.push(Comp::Arrow(source, target));
                }
            }
            Type::Inter(items) => {
                for i in items.iter() {
                    match i {
                        Type::Arrow(..) | Type::Inter(_) => {
                            let n = self.norm(i);
                            out.extend(n.iter().map(Comp::share));
                        }
                        _ => self.push(i, out),
                    }
                }
            }
        }
    }
}

impl<'a> Comp<'a> {
    fn arrow_key(&self) -> Option<(usize, usize)> {
        match self {
            Comp::Arrow(s, t) => Some((s.as_ptr() as usize, t.as_ptr() as usize)),
            Comp::Atom(_) => None,
        }
    }

    fn share(&self) -> Comp<'a> {
        match self {
            Comp::Atom(t) => Comp::Atom(t),
            Comp::Arrow(s, t) => Comp::Arrow(s.clone(), t.clone()),
        }
    }
}

fn same_atom(x: &Type, y: &Type) -> bool {
    match (x, y) {
        (Type::Const(a), Type::Const(b)) | (Type::Var(a), Type::Var(b)) => {
            std::ptr::eq(a.as_ptr(), b.as_ptr()) || a == b
        }
        _ => false,
    }
}

/// Right-hand sides at least this long first look for components that occur
/// verbatim (as shared nodes) on the left.
const SHARED_LOOKUP_MIN: usize = 8;

/// `lhs` is the intersection of all components of all slices.
fn leq(lhs: &[&[Comp<'_>]], rhs: &[Comp<'_>]) -> bool {
    if lhs
        .iter()
        .any(|l| std::ptr::eq(l.as_ptr(), rhs.as_ptr()) && l.len() == rhs.len())
    {
        return true;
    }
    if rhs.len() >= SHARED_LOOKUP_MIN {
        let shared: HashSet<(usize, usize)> = lhs
            .iter()
            .flat_map(|s| s.iter())
            .filter_map(Comp::arrow_key)
            .collect();
        return rhs
            .iter()
            .all(|r| r.arrow_key().is_some_and(|k| shared.contains(&k)) || leq_comp(lhs, r));
    }
    rhs.iter().all(|r| leq_comp(lhs, r))
}

fn leq_comp(lhs: &[&[Comp<'_>]], r: &Comp<'_>) -> bool {
    match r {
        Comp::Atom(x) => lhs
            .iter()
            .flat_map(|s| s.iter())
            .any(|c| matches!(c, Comp::Atom(y) if same_atom(x, y))),
        Comp::Arrow(src, tgt) => {
            let mut targets: Vec<&[Comp<'_>]> = Vec::new();
            for c in lhs.iter().flat_map(|s| s.iter()) {
                if let Comp::Arrow(s_i, t_i) = c {
                    if leq(&[&src[..]], s_i) {
                        targets.push(t_i);
                    }
                }
            }
            !targets.is_empty() && leq(&targets, tgt)
        }
    }
}

/// Decides `s <= t`.
pub fn subtype(s: &Type, t: &Type) -> bool {
    if t.is_omega() {
        return true;
    }
    let mut n = Normalizer::new();
    let l = n.norm(s);
    let r = n.norm(t);
    leq(&[&l[..]], &r)
}

/// Decides `s = t`, i.e. `s <= t` and `t <= s`.
pub fn type_equal(s: &Type, t: &Type) -> bool {
    let mut n = Normalizer::new();
    let l = n.norm(s);
    let r = n.norm(t);
    leq(&[&l[..]], &r) && leq(&[&r[..]], &l)
}

/// Checks `lhs <= rhs` for many right-hand sides while normalizing `lhs` once.
pub struct SubtypeChecker<'a> {
    lhs: Norm<'a>,
}

impl<'a> SubtypeChecker<'a> {
    pub fn new(lhs: &'a Type) -> Self {
        SubtypeChecker {
            lhs: Normalizer::new().norm(lhs),
        }
    }

    pub fn is_below(&self, rhs: &Type) -> bool {
        if rhs.is_omega() {
            return true;
        }
        let r = Normalizer::new().norm(rhs);
        leq(&[&self.lhs[..]], &r)
    }
}

/// Indices `i` of the components `si -> ti` of `lhs` with `source <= si`.
///
/// When `lhs <= source -> target` and `target` is not equal to `omega`, this
/// set is nonempty and the intersection of the selected `ti` lies below
/// `target`.
pub fn selected_arrow_components(lhs: &Type, source: &Type) -> Vec<usize> {
    lhs.components()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            Type::Arrow(s_i, _) if subtype(source, s_i) => Some(i),
            _ => None,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JoinError {
    #[error("`{0}` is not an arrow")]
    NotArrow(Type),
    #[error("arrow targets `{0}` and `{1}` are not equal")]
    TargetsDiffer(Type, Type),
}

/// Least upper bound of two arrows with equal targets: `(s & s') -> t`.
pub fn join_arrows(s: &Type, t: &Type) -> Result<Type, JoinError> {
    let (s_src, s_tgt) = match s {
        Type::Arrow(a, b) => (a, b),
        other => return Err(JoinError::NotArrow(other.clone())),
    };
    let (t_src, t_tgt) = match t {
        Type::Arrow(a, b) => (a, b),
        other => return Err(JoinError::NotArrow(other.clone())),
    };
    if !type_equal(s_tgt, t_tgt) {
        return Err(JoinError::TargetsDiffer(
            (**s_tgt).clone(),
            (**t_tgt).clone(),
        ));
    }
    Ok(Type::arrow(
        Type::inter([(**s_src).clone(), (**t_src).clone()]),
        (**s_tgt).clone(),
    ))
}
