//! Unification restricted to rank 1 substitutions, where every variable is
//! mapped to an intersection of simple types (possibly empty, i.e. `omega`).
//!
//! On such types subtyping is inclusion of component sets, so constraints
//! can be rewritten into set constraints with projections
//! ([`rank1_transform`]) and solved over finite sets of simple types
//! ([`solve_set_constraints`]). The search is bounded and therefore only
//! complete up to its budget.

mod sets;
mod transform;

pub use sets::{
    for_each_set_solution, solve_set_constraints, SetAssignment, SetAtom, SetBudget,
    SetConstraintSystem, SetParseError, SetVar,
};
pub use transform::{rank1_transform, rank1_transform_with, Rank1System, Rank1Transform};

use crate::constraints::{verify, ConstraintSet, Substitution};
use crate::types::Type;

/// Reads a set assignment back as a substitution for the variables of `cs`:
/// variables chosen as `omega` and empty sets become `omega`, other sets the
/// intersection of their elements.
pub fn assignment_to_substitution(
    cs: &ConstraintSet,
    sys: &Rank1System,
    a: &SetAssignment,
) -> Substitution {
    cs.vars()
        .into_iter()
        .map(|v| {
            let value = if sys.omega_vars.contains(&v) {
                Type::Omega
            } else {
                a.get(&v)
                    .map(|set| Type::inter(set.iter().cloned()))
                    .unwrap_or(Type::Omega)
            };
            (v, value)
        })
        .collect()
}

/// A rank 1 solution of `cs` found within `budget`, checked with
/// [`verify`]. Candidates that fail the check are skipped and the search
/// goes on. At most `budget.max_systems` transformed systems are tried.
pub fn solve_rank1(cs: &ConstraintSet, budget: SetBudget) -> Option<Substitution> {
    for sys in rank1_transform(cs).take(budget.max_systems) {
        let mut found = None;
        for_each_set_solution(&sys.system, budget, &mut |a| {
            let s = assignment_to_substitution(cs, &sys, a);
            if verify(&s, cs) {
                found = Some(s);
                true
            } else {
                false
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}
