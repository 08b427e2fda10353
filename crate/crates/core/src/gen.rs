//! Seeded random generators for types, axiom instances, constraint
//! instances and 3-SAT formulas.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constraints::{Constraint, ConstraintSet, Substitution};
use crate::equational::{check_axiom_soundness, AxiomSchema};
use crate::matching::{Literal, Sat3Instance};
use crate::types::{Symbol, Type};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of generated types.
#[derive(Debug, Clone)]
pub struct TypeGen {
    pub constants: Vec<Symbol>,
    pub vars: Vec<Symbol>,
    pub max_depth: usize,
    pub max_width: usize,
    pub omega: bool,
}

impl Default for TypeGen {
    fn default() -> Self {
        TypeGen {
            constants: ["a", "b", "c"].map(Symbol::from).to_vec(),
            vars: ["x", "y"].map(Symbol::from).to_vec(),
            max_depth: 4,
            max_width: 3,
            omega: true,
        }
    }
}

impl TypeGen {
    pub fn ground() -> Self {
        TypeGen {
            vars: Vec::new(),
            ..TypeGen::default()
        }
    }

    pub fn ty(&self, rng: &mut impl Rng) -> Type {
        self.ty_at(rng, self.max_depth)
    }

    fn atom(&self, rng: &mut impl Rng) -> Type {
        let total = self.constants.len() + self.vars.len() + usize::from(self.omega);
        let k = rng.gen_range(0..total);
        if k < self.constants.len() {
            Type::Const(self.constants[k].clone())
        } else if k < self.constants.len() + self.vars.len() {
            Type::Var(self.vars[k - self.constants.len()].clone())
        } else {
            Type::Omega
        }
    }

    fn ty_at(&self, rng: &mut impl Rng, depth: usize) -> Type {
        if depth <= 1 || rng.gen_bool(0.3) {
            return self.atom(rng);
        }
        if rng.gen_bool(0.6) {
            Type::arrow(self.ty_at(rng, depth - 1), self.ty_at(rng, depth - 1))
        } else {
            let n = rng.gen_range(2..=self.max_width.max(2));
            Type::inter((0..n).map(|_| self.ty_at(rng, depth - 1)))
        }
    }

    /// Arrow/constant tree without intersections, `omega` or variables.
    pub fn simple(&self, rng: &mut impl Rng) -> Type {
        self.simple_at(rng, self.max_depth)
    }

    fn simple_at(&self, rng: &mut impl Rng, depth: usize) -> Type {
        if depth <= 1 || rng.gen_bool(0.35) {
            return Type::Const(self.constants.choose(rng).expect("constants").clone());
        }
        Type::arrow(
            self.simple_at(rng, depth - 1),
            self.simple_at(rng, depth - 1),
        )
    }

    /// Intersection of `1..=max_width` simple types.
    pub fn rank1(&self, rng: &mut impl Rng) -> Type {
        let n = rng.gen_range(1..=self.max_width.max(1));
        Type::inter((0..n).map(|_| self.simple(rng)))
    }
}

/// Random arguments for `schema`. Lattice absorption gets two arrows with a
/// common target so that the upper bound can be eliminated.
pub fn axiom_args(schema: AxiomSchema, gen: &TypeGen, rng: &mut impl Rng) -> Vec<Type> {
    match schema {
        AxiomSchema::LatticeAbsorption => {
            let target = gen.ty(rng);
            vec![
                Type::arrow(gen.ty(rng), target.clone()),
                Type::arrow(gen.ty(rng), target),
            ]
        }
        other => (0..other.arity()).map(|_| gen.ty(rng)).collect(),
    }
}

/// Outcome of a batch of axiom instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub schema: AxiomSchema,
    pub trials: usize,
    /// Argument lists whose instance failed.
    pub failures: Vec<Vec<Type>>,
}

/// Checks `trials` random instances of `schema`.
pub fn fuzz_axiom(schema: AxiomSchema, gen: &TypeGen, trials: usize, seed: u64) -> AxiomReport {
    let mut r = rng(seed);
    let mut failures = Vec::new();
    for _ in 0..trials {
        let args = axiom_args(schema, gen, &mut r);
        if !check_axiom_soundness(schema, &args).unwrap_or(false) {
            failures.push(args);
        }
    }
    AxiomReport {
        schema,
        trials,
        failures,
    }
}

/// A random rank 1 substitution for `vars`, sometimes mapping to `omega`.
pub fn rank1_substitution(vars: &[Symbol], gen: &TypeGen, rng: &mut impl Rng) -> Substitution {
    vars.iter()
        .map(|v| {
            let value = if rng.gen_bool(0.15) {
                Type::Omega
            } else {
                gen.rank1(rng)
            };
            (v.clone(), value)
        })
        .collect()
}

/// A constraint set solvable by construction: each constraint relates a
/// random template `t` to `s(t)` for a random rank 1 substitution `s`, in a
/// random direction. Returns the set and the witness.
pub fn solvable_rank1_instance(gen: &TypeGen, rng: &mut impl Rng) -> (ConstraintSet, Substitution) {
    let s = rank1_substitution(
        &gen.vars,
        &TypeGen {
            omega: false,
            ..gen.clone()
        },
        rng,
    );
    let template = TypeGen {
        omega: false,
        ..gen.clone()
    };
    let n = rng.gen_range(1..=2);
    let constraints = (0..n)
        .map(|_| {
            let t = template.ty(rng);
            let image = s.apply(&t);
            if rng.gen_bool(0.5) {
                Constraint::leq(t, image)
            } else {
                Constraint::leq(image, t)
            }
        })
        .collect();
    (ConstraintSet::new(constraints), s)
}

/// A random 3-SAT formula over `x1..xn`.
pub fn sat3(variables: usize, clauses: usize, rng: &mut impl Rng) -> Sat3Instance {
    let names: Vec<String> = (1..=variables).map(|i| format!("x{i}")).collect();
    let clauses = (0..clauses)
        .map(|_| {
            [(); 3].map(|_| Literal {
                var: rng.gen_range(0..variables),
                positive: rng.gen_bool(0.5),
            })
        })
        .collect();
    Sat3Instance::new(names, clauses).expect("names are valid")
}
