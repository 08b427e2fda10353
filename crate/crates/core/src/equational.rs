//! Equation schemas axiomatizing type equality, as checkable instances.
//!
//! Two presentations are covered: one with the absorption axiom `AB`, and one
//! where absorption is split into lattice absorption `ABcap` and contravariant
//! right distributivity `Dr-`, both phrased with the least upper bound `\/`.
//! The upper bound only appears on arrows sharing a target, where it is
//! eliminated by [`join_arrows`].

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::subtyping::{join_arrows, subtype, type_equal, JoinError};
use crate::types::Type;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomSchema {
    /// `s & (t & r) ~ (s & t) & r`
    Associativity,
    /// `s & t ~ t & s`
    Commutativity,
    /// `s & s ~ s`
    Idempotence,
    /// `s & omega ~ s`
    Unit,
    /// `(s -> t) & (s -> t') ~ s -> t & t'`
    LeftDistributivity,
    /// `omega ~ omega -> omega`
    Recursion,
    /// `s -> t ~ (s -> t) & (s & s' -> t)`
    Absorption,
    /// `s ~ s & (s \/ t)`
    LatticeAbsorption,
    /// `(s -> t) \/ (s' -> t) ~ (s & s') -> t`
    RightDistributivity,
}

impl AxiomSchema {
    pub const ALL: [AxiomSchema; 9] = [
        AxiomSchema::Associativity,
        AxiomSchema::Commutativity,
        AxiomSchema::Idempotence,
        AxiomSchema::Unit,
        AxiomSchema::LeftDistributivity,
        AxiomSchema::Recursion,
        AxiomSchema::Absorption,
        AxiomSchema::LatticeAbsorption,
        AxiomSchema::RightDistributivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomSchema::Associativity => "A",
            AxiomSchema::Commutativity => "C",
            AxiomSchema::Idempotence => "I",
            AxiomSchema::Unit => "U",
            AxiomSchema::LeftDistributivity => "Dl",
            AxiomSchema::Recursion => "RE",
            AxiomSchema::Absorption => "AB",
            AxiomSchema::LatticeAbsorption => "ABcap",
            AxiomSchema::RightDistributivity => "Dr-",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            AxiomSchema::Recursion => 0,
            AxiomSchema::Idempotence | AxiomSchema::Unit => 1,
            AxiomSchema::Commutativity | AxiomSchema::LatticeAbsorption => 2,
            AxiomSchema::Associativity
            | AxiomSchema::LeftDistributivity
            | AxiomSchema::Absorption
            | AxiomSchema::RightDistributivity => 3,
        }
    }

    /// Whether the schema mentions the least upper bound.
    pub fn uses_join(self) -> bool {
        matches!(
            self,
            AxiomSchema::LatticeAbsorption | AxiomSchema::RightDistributivity
        )
    }

    /// Textual form with metavariables `s t r s' t'`.
    pub fn describe(self) -> &'static str {
        match self {
            AxiomSchema::Associativity => "s & (t & r) ~ (s & t) & r",
            AxiomSchema::Commutativity => "s & t ~ t & s",
            AxiomSchema::Idempotence => "s & s ~ s",
            AxiomSchema::Unit => "s & omega ~ s",
            AxiomSchema::LeftDistributivity => "(s -> t) & (s -> t') ~ s -> t & t'",
            AxiomSchema::Recursion => "omega ~ omega -> omega",
            AxiomSchema::Absorption => "s -> t ~ (s -> t) & (s & s' -> t)",
            AxiomSchema::LatticeAbsorption => {
                "s ~ s & (s \\/ t)   (s, t arrows with equal targets)"
            }
            AxiomSchema::RightDistributivity => "(s -> t) \\/ (s' -> t) ~ (s & s') -> t",
        }
    }
}

impl fmt::Display for AxiomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("axiom {schema} takes {expected} arguments, got {got}")]
    Arity {
        schema: AxiomSchema,
        expected: usize,
        got: usize,
    },
    #[error("cannot eliminate the upper bound: {0}")]
    Join(#[from] JoinError),
    #[error("unknown axiom `{0}`")]
    Unknown(String),
}

impl FromStr for AxiomSchema {
    type Err = AxiomError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AxiomSchema::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| AxiomError::Unknown(s.to_string()))
    }
}

/// Both sides of an axiom instance.
pub fn instantiate_axiom(schema: AxiomSchema, args: &[Type]) -> Result<(Type, Type), AxiomError> {
    if args.len() != schema.arity() {
        return Err(AxiomError::Arity {
            schema,
            expected: schema.arity(),
            got: args.len(),
        });
    }
    let a = |i: usize| args[i].clone();
    let sides = match schema {
        AxiomSchema::Associativity => (
            Type::inter([a(0), Type::inter([a(1), a(2)])]),
            Type::inter([Type::inter([a(0), a(1)]), a(2)]),
        ),
        AxiomSchema::Commutativity => (Type::inter([a(0), a(1)]), Type::inter([a(1), a(0)])),
        AxiomSchema::Idempotence => (Type::inter([a(0), a(0)]), a(0)),
        AxiomSchema::Unit => (Type::inter([a(0), Type::Omega]), a(0)),
        AxiomSchema::LeftDistributivity => (
            Type::inter([Type::arrow(a(0), a(1)), Type::arrow(a(0), a(2))]),
            Type::arrow(a(0), Type::inter([a(1), a(2)])),
        ),
        AxiomSchema::Recursion => (Type::Omega, Type::arrow(Type::Omega, Type::Omega)),
        AxiomSchema::Absorption => {
            let arrow = Type::arrow(a(0), a(1));
            (
                arrow.clone(),
                Type::inter([arrow, Type::arrow(Type::inter([a(0), a(2)]), a(1))]),
            )
        }
        AxiomSchema::LatticeAbsorption => {
            let join = join_arrows(&args[0], &args[1])?;
            (a(0), Type::inter([a(0), join]))
        }
        AxiomSchema::RightDistributivity => {
            let join = join_arrows(&Type::arrow(a(0), a(2)), &Type::arrow(a(1), a(2)))?;
            (join, Type::arrow(Type::inter([a(0), a(1)]), a(2)))
        }
    };
    Ok(sides)
}

/// True iff the two sides of the instance are equal types. For schemas with
/// an upper bound, the eliminated join must also lie above both joined arrows.
pub fn check_axiom_soundness(schema: AxiomSchema, args: &[Type]) -> Result<bool, AxiomError> {
    let (lhs, rhs) = instantiate_axiom(schema, args)?;
    if !type_equal(&lhs, &rhs) {
        return Ok(false);
    }
    let joined = match schema {
        AxiomSchema::LatticeAbsorption => Some((
            args[0].clone(),
            args[1].clone(),
            join_arrows(&args[0], &args[1])?,
        )),
        AxiomSchema::RightDistributivity => {
            let s = Type::arrow(args[0].clone(), args[2].clone());
            let t = Type::arrow(args[1].clone(), args[2].clone());
            let j = join_arrows(&s, &t)?;
            Some((s, t, j))
        }
        _ => None,
    };
    Ok(match joined {
        Some((s, t, j)) => subtype(&s, &j) && subtype(&t, &j),
        None => true,
    })
}
