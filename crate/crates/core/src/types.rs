//! Intersection types: representation, construction, organization.
//!
//! A [`Type`] is an immutable, reference-counted syntax tree. Cloning is cheap
//! and subtrees are shared freely, which matters for the large substitutions
//! produced by the game reduction.
//!
//! Intersections built through [`Type::inter`] are kept in a canonical shape:
//! nested intersections are flattened, components are kept in a fixed
//! structural order, the empty intersection is [`Type::Omega`] and a
//! singleton intersection is its only component. Literal `omega` components
//! are *not* removed, so `a & omega` stays representable.
//!
//! `==` on types is syntactic identity. Semantic equality lives in
//! [`crate::subtyping::type_equal`].

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

mod parse;
mod print;

pub use parse::{parse_type, parse_type_at, parse_type_lenient, ParseError};

/// Interned-ish name of a constant or variable.
pub type Symbol = Arc<str>;

/// Prefix reserved for variables minted by the library.
pub const FRESH_PREFIX: &str = "_fresh";

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Const(Symbol),
    Var(Symbol),
    Omega,
    Arrow(Arc<Type>, Arc<Type>),
    /// Always at least two components when built with [`Type::inter`].
    Inter(Arc<[Type]>),
}

impl Type {
    pub fn constant(name: &str) -> Type {
        Type::Const(Symbol::from(name))
    }

    pub fn var(name: &str) -> Type {
        Type::Var(Symbol::from(name))
    }

    pub fn arrow(source: Type, target: Type) -> Type {
        Type::Arrow(Arc::new(source), Arc::new(target))
    }

    /// `args[0] -> ... -> args[k-1] -> head`.
    pub fn arrows<I>(args: I, head: Type) -> Type
    where
        I: IntoIterator<Item = Type>,
        I::IntoIter: DoubleEndedIterator,
    {
        args.into_iter()
            .rev()
            .fold(head, |acc, arg| Type::arrow(arg, acc))
    }

    /// Canonicalizing intersection constructor.
    pub fn inter<I: IntoIterator<Item = Type>>(parts: I) -> Type {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Type::Inter(items) => flat.extend(items.iter().cloned()),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Type::Omega,
            1 => flat.pop().unwrap(),
            _ => {
                flat.sort();
                Type::Inter(flat.into())
            }
        }
    }

    /// Like [`Type::inter`] but drops literal `omega` parts first, so the
    /// result contains no `omega` unless every part was `omega`.
    pub fn meet<I: IntoIterator<Item = Type>>(parts: I) -> Type {
        Type::inter(parts.into_iter().filter(|p| !matches!(p, Type::Omega)))
    }

    pub fn is_omega(&self) -> bool {
        matches!(self, Type::Omega)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Type::Const(_) | Type::Var(_))
    }

    /// Top-level components: the items of an intersection, or the type itself.
    pub fn components(&self) -> &[Type] {
        match self {
            Type::Inter(items) => items,
            other => std::slice::from_ref(other),
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Type::Const(_) | Type::Var(_) | Type::Omega => 1,
            Type::Arrow(s, t) => 1 + s.size() + t.size(),
            Type::Inter(items) => 1 + items.iter().map(Type::size).sum::<usize>(),
        }
    }

    /// Height of the syntax tree; atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Type::Const(_) | Type::Var(_) | Type::Omega => 1,
            Type::Arrow(s, t) => 1 + s.depth().max(t.depth()),
            Type::Inter(items) => 1 + items.iter().map(Type::depth).max().unwrap_or(0),
        }
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Type::Var(v) => {
                out.insert(v.clone());
            }
            Type::Const(_) | Type::Omega => {}
            Type::Arrow(s, t) => {
                s.collect_vars(out);
                t.collect_vars(out);
            }
            Type::Inter(items) => items.iter().for_each(|i| i.collect_vars(out)),
        }
    }

    pub fn constants(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_constants(&mut out);
        out
    }

    pub(crate) fn collect_constants(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Type::Const(c) => {
                out.insert(c.clone());
            }
            Type::Var(_) | Type::Omega => {}
            Type::Arrow(s, t) => {
                s.collect_constants(out);
                t.collect_constants(out);
            }
            Type::Inter(items) => items.iter().for_each(|i| i.collect_constants(out)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Type::Var(_) => false,
            Type::Const(_) | Type::Omega => true,
            Type::Arrow(s, t) => s.is_ground() && t.is_ground(),
            Type::Inter(items) => items.iter().all(Type::is_ground),
        }
    }

    pub fn contains_omega(&self) -> bool {
        match self {
            Type::Omega => true,
            Type::Const(_) | Type::Var(_) => false,
            Type::Arrow(s, t) => s.contains_omega() || t.contains_omega(),
            Type::Inter(items) => items.iter().any(Type::contains_omega),
        }
    }

    /// Simple type: built from constants and arrows only.
    pub fn is_simple(&self) -> bool {
        match self {
            Type::Const(_) => true,
            Type::Arrow(s, t) => s.is_simple() && t.is_simple(),
            _ => false,
        }
    }

    /// Rank-1 shape: `omega` or an intersection of simple types.
    pub fn is_rank1(&self) -> bool {
        match self {
            Type::Omega => true,
            Type::Inter(items) => items.iter().all(Type::is_simple),
            other => other.is_simple(),
        }
    }

    /// True iff the type belongs to the syntactic class of types equal to `omega`:
    /// `omega`, `s -> t` with `t` in the class, or an intersection of members.
    pub fn is_omega_equal(&self) -> bool {
        match self {
            Type::Omega => true,
            Type::Const(_) | Type::Var(_) => false,
            Type::Arrow(_, t) => t.is_omega_equal(),
            Type::Inter(items) => items.iter().all(Type::is_omega_equal),
        }
    }

    pub fn as_path(&self) -> Option<Path> {
        Path::from_type(self)
    }

    pub fn is_path(&self) -> bool {
        match self {
            Type::Const(_) | Type::Var(_) => true,
            Type::Arrow(_, t) => t.is_path(),
            _ => false,
        }
    }

    /// True iff the type is `omega` or an intersection of paths.
    pub fn is_organized(&self) -> bool {
        match self {
            Type::Omega => true,
            Type::Inter(items) => items.iter().all(Type::is_path),
            other => other.is_path(),
        }
    }

    /// Replaces every variable via `f`; unchanged variables are kept when `f`
    /// returns `None`. Intersections are re-canonicalized.
    pub fn map_vars(&self, f: &mut impl FnMut(&Symbol) -> Option<Type>) -> Type {
        match self {
            Type::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Type::Const(_) | Type::Omega => self.clone(),
            Type::Arrow(s, t) => Type::arrow(s.map_vars(f), t.map_vars(f)),
            Type::Inter(items) => Type::inter(items.iter().map(|i| i.map_vars(f))),
        }
    }

    /// Replaces every constant via `f`.
    pub fn map_constants(&self, f: &mut impl FnMut(&Symbol) -> Option<Type>) -> Type {
        match self {
            Type::Const(c) => f(c).unwrap_or_else(|| self.clone()),
            Type::Var(_) | Type::Omega => self.clone(),
            Type::Arrow(s, t) => Type::arrow(s.map_constants(f), t.map_constants(f)),
            Type::Inter(items) => Type::inter(items.iter().map(|i| i.map_constants(f))),
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `arguments[0] -> ... -> arguments[k-1] -> head` with an atomic head.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub arguments: Vec<Type>,
    pub head: Type,
}

impl Path {
    pub fn from_type(t: &Type) -> Option<Path> {
        let mut arguments = Vec::new();
        let mut cur = t;
        loop {
            match cur {
                Type::Const(_) | Type::Var(_) => {
                    return Some(Path {
                        arguments,
                        head: cur.clone(),
                    })
                }
                Type::Arrow(s, r) => {
                    arguments.push((**s).clone());
                    cur = r;
                }
                _ => return None,
            }
        }
    }

    pub fn to_type(&self) -> Type {
        Type::arrows(self.arguments.iter().cloned(), self.head.clone())
    }

    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }
}

/// Paths of the organized form of `t`. Arrow sources are left untouched.
pub fn organized_paths(t: &Type) -> Vec<Type> {
    let mut out = Vec::new();
    push_paths(t, &mut out);
    out
}

fn push_paths(t: &Type, out: &mut Vec<Type>) {
    match t {
        Type::Omega => {}
        Type::Const(_) | Type::Var(_) => out.push(t.clone()),
        Type::Arrow(..) if t.is_path() => out.push(t.clone()),
        Type::Arrow(s, r) => {
            let mut inner = Vec::new();
            push_paths(r, &mut inner);
            out.extend(
                inner
                    .into_iter()
                    .map(|p| Type::Arrow(s.clone(), Arc::new(p))),
            );
        }
        Type::Inter(items) => items.iter().for_each(|i| push_paths(i, out)),
    }
}

/// Equivalent organized type: `omega` or an intersection of paths.
///
/// Targets of arrows are organized recursively and the arrow is distributed
/// over the resulting paths; components equal to `omega` vanish.
pub fn organize(t: &Type) -> Type {
    Type::inter(organized_paths(t))
}

/// Organizes at every arrow level, including arrow sources.
pub fn organize_deep(t: &Type) -> Type {
    Type::inter(deep_paths(t))
}

fn deep_paths(t: &Type) -> Vec<Type> {
    match t {
        Type::Omega => Vec::new(),
        Type::Const(_) | Type::Var(_) => vec![t.clone()],
        Type::Arrow(s, r) => {
            let targets = deep_paths(r);
            if targets.is_empty() {
                return Vec::new();
            }
            let source = Arc::new(organize_deep(s));
            targets
                .into_iter()
                .map(|p| Type::Arrow(source.clone(), Arc::new(p)))
                .collect()
        }
        Type::Inter(items) => items.iter().flat_map(deep_paths).collect(),
    }
}
