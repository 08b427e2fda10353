//! From spiral tiling games to intersection type satisfiability and back.
//!
//! A play position `d1 ... dk` is represented by the path `[d1 ... dk]`
//! `= dk -> ... -> d1 -> bullet`. The constraint system built from a tiling
//! system is satisfiable exactly when Constructor has a winning strategy
//! (given an H-consistent bottom word). [`compile_strategy`] turns a strategy
//! into a solution and [`extract_play`] plays the game from a solution.
//!
//! Two constraint systems are provided. [`Variant::Standard`] uses `omega` as
//! a wildcard for skipped tiles; [`Variant::OmegaFree`] replaces those
//! wildcards with auxiliary variables whose values enumerate every tile
//! explicitly, so no `omega` occurs in the constraints.

use std::fmt;

use thiserror::Error;

use crate::constraints::{verify, Constraint, ConstraintSet, Substitution};
use crate::matching::BULLET;
use crate::subtyping::SubtypeChecker;
use crate::tiling::{
    classify_constructor_node, validate_strategy, LeafCase, StrategyError, StrategyTree, Tile,
    TilingSystem,
};
use crate::types::Type;

pub const ALPHA: &str = "alpha";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Standard,
    OmegaFree,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Standard => "ct",
            Variant::OmegaFree => "ct-prime",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("the omega-free constraints need nonempty H and V")]
    EmptyRelation,
    #[error("strategy is not winning: {0}")]
    InvalidStrategy(#[from] StrategyError),
    #[error(
        "compiled solution would need all {tiles}-tile words up to length {length}; \
         limits are {max_tiles} tiles and length {max_length}"
    )]
    TooLarge {
        tiles: usize,
        length: usize,
        max_tiles: usize,
        max_length: usize,
    },
    #[error("substitution does not satisfy the constraints")]
    NotASolution,
    #[error("no case of the play rule applies at position {0:?}")]
    NoCaseApplies(Vec<Tile>),
    #[error("play exceeded the length bound {0}")]
    PlayTooLong(usize),
}

pub fn beta_name(t: &TilingSystem, d: Tile) -> String {
    format!("beta_{}", t.tile_name(d))
}

pub fn gamma_name(t: &TilingSystem, d: Tile, i: usize) -> String {
    format!("gamma_{}_{}", t.tile_name(d), i)
}

fn tile_type(t: &TilingSystem, d: Tile) -> Type {
    Type::constant(t.tile_name(d))
}

/// `[w]` over `head`: `wk -> ... -> w1 -> head`.
pub fn position_type(t: &TilingSystem, word: &[Tile], head: Type) -> Type {
    word.iter()
        .fold(head, |acc, &d| Type::arrow(tile_type(t, d), acc))
}

/// `[w] = wk -> ... -> w1 -> bullet`.
pub fn position(t: &TilingSystem, word: &[Tile]) -> Type {
    position_type(t, word, Type::constant(BULLET))
}

/// The building blocks of a constraint system, kept apart so that play
/// extraction can test them one by one.
#[derive(Debug, Clone)]
pub struct GameTypes {
    pub variant: Variant,
    /// Spoiler's last tile breaks H.
    pub bad_horizontal: Type,
    /// Spoiler's last tile breaks V.
    pub bad_vertical: Type,
    /// The top word was completed, possibly followed by one more tile.
    pub finished: Type,
    /// `'beta_d` for each tile `d`.
    pub betas: Vec<Type>,
    /// The bottom word as a position.
    pub initial: Type,
    /// Right side of the game move constraint.
    pub moves_rhs: Type,
}

impl GameTypes {
    pub fn new(t: &TilingSystem, variant: Variant) -> Self {
        let k = t.tile_count();
        let n = t.width();
        let alpha = Type::var(ALPHA);
        let tile = |d: Tile| tile_type(t, d);
        let betas: Vec<Type> = (0..k).map(|d| Type::var(&beta_name(t, d))).collect();
        let gamma_n = |d: Tile| Type::var(&gamma_name(t, d, n));
        let pairs = || (0..k).flat_map(move |a| (0..k).map(move |b| (a, b)));

        let bad_horizontal = Type::meet(
            pairs()
                .filter(|&(d, d1)| !t.h_allows(d, d1))
                .map(|(d, d1)| Type::arrows([tile(d1), tile(d)], alpha.clone())),
        );
        let bad_vertical = Type::meet(pairs().filter(|&(d, d1)| !t.v_allows(d, d1)).map(
            |(d, d1)| {
                match variant {
                    Variant::Standard => Type::arrows(
                        std::iter::once(tile(d1))
                            .chain(std::iter::repeat_n(Type::Omega, n - 1))
                            .chain(std::iter::once(tile(d))),
                        alpha.clone(),
                    ),
                    Variant::OmegaFree => Type::arrow(tile(d1), gamma_n(d)),
                }
            },
        ));
        let top = position_type(t, t.top(), alpha.clone());
        let finished = match variant {
            Variant::Standard => Type::inter([top.clone(), Type::arrow(Type::Omega, top)]),
            Variant::OmegaFree => Type::inter(
                std::iter::once(top.clone())
                    .chain((0..k).map(|d| Type::arrow(tile(d), top.clone()))),
            ),
        };
        let initial = position(t, t.bottom());
        let moves_rhs = Type::meet(
            std::iter::once(initial.clone())
                .chain(pairs().map(|(d1, d)| Type::arrows([tile(d1), tile(d)], betas[d].clone()))),
        );
        GameTypes {
            variant,
            bad_horizontal,
            bad_vertical,
            finished,
            betas,
            initial,
            moves_rhs,
        }
    }

    /// Left side of the game move constraint.
    pub fn moves_lhs(&self) -> Type {
        Type::meet(
            [
                self.bad_horizontal.clone(),
                self.bad_vertical.clone(),
                self.finished.clone(),
            ]
            .into_iter()
            .chain(self.betas.iter().cloned()),
        )
    }
}

/// Builds the constraint system for `t`.
///
/// Standard variant, with `a` = `'alpha`, `bd` = `'beta_d`, `[w]` a position:
/// 1. `badH & badV & fin & b1 & ... <= [bottom] & (d' -> d -> bd for all d', d)`
/// 2. `(d -> d' -> a for (d', d) in H) <= (d -> bd for all d)`
/// 3. `(d -> omega^(n-1) -> d' -> a for (d', d) in V) <= (d -> bd for all d)`
///
/// The omega-free variant additionally constrains `'gamma_d_1 == d -> a` and
/// `'gamma_d_i == (x -> 'gamma_d_(i-1) for all tiles x)` and uses
/// `d' -> 'gamma_d_n` wherever the standard variant skips `n - 1` tiles with
/// `omega`. It requires H and V to be nonempty.
pub fn build_constraints(
    t: &TilingSystem,
    variant: Variant,
) -> Result<ConstraintSet, ReductionError> {
    let k = t.tile_count();
    let n = t.width();
    if variant == Variant::OmegaFree && (t.horizontal().is_empty() || t.vertical().is_empty()) {
        return Err(ReductionError::EmptyRelation);
    }
    let g = GameTypes::new(t, variant);
    let alpha = Type::var(ALPHA);
    let tile = |d: Tile| tile_type(t, d);
    let moves_to_beta = Type::meet((0..k).map(|d| Type::arrow(tile(d), g.betas[d].clone())));
    let respects_h = Type::meet(
        t.horizontal()
            .iter()
            .map(|&(d1, d)| Type::arrows([tile(d), tile(d1)], alpha.clone())),
    );
    let respects_v = Type::meet(t.vertical().iter().map(|&(d1, d)| {
        match variant {
            Variant::Standard => Type::arrows(
                std::iter::once(tile(d))
                    .chain(std::iter::repeat_n(Type::Omega, n - 1))
                    .chain(std::iter::once(tile(d1))),
                alpha.clone(),
            ),
            Variant::OmegaFree => Type::arrow(tile(d), Type::var(&gamma_name(t, d1, n))),
        }
    }));
    let mut cs = ConstraintSet::new(vec![
        Constraint::leq(g.moves_lhs(), g.moves_rhs.clone()),
        Constraint::leq(respects_h, moves_to_beta.clone()),
        Constraint::leq(respects_v, moves_to_beta),
    ]);
    if variant == Variant::OmegaFree {
        for d in 0..k {
            cs.push(Constraint::eq(
                Type::var(&gamma_name(t, d, 1)),
                Type::arrow(tile(d), alpha.clone()),
            ));
        }
        for d in 0..k {
            for i in 2..=n {
                let prev = Type::var(&gamma_name(t, d, i - 1));
                cs.push(Constraint::eq(
                    Type::var(&gamma_name(t, d, i)),
                    Type::inter((0..k).map(|x| Type::arrow(tile(x), prev.clone()))),
                ));
            }
        }
    }
    Ok(cs)
}

/// The standard constraint system.
pub fn build_ct(t: &TilingSystem) -> ConstraintSet {
    build_constraints(t, Variant::Standard).expect("the standard variant always builds")
}

/// The omega-free constraint system.
pub fn build_ct_prime(t: &TilingSystem) -> Result<ConstraintSet, ReductionError> {
    build_constraints(t, Variant::OmegaFree)
}

/// Whether the bottom and top words are H-consistent, which the
/// equivalence between winning and satisfiability relies on.
pub fn reduction_precondition(t: &TilingSystem) -> bool {
    t.h_consistent(t.bottom()) && t.h_consistent(t.top())
}

/// Size limits for compiled solutions, whose `'alpha` image has one path per
/// word of length at most `depth + n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileLimits {
    pub max_tiles: usize,
    pub max_length: usize,
}

impl Default for CompileLimits {
    fn default() -> Self {
        CompileLimits {
            max_tiles: 3,
            max_length: 14,
        }
    }
}

impl CompileLimits {
    pub fn unlimited() -> Self {
        CompileLimits {
            max_tiles: usize::MAX,
            max_length: usize::MAX,
        }
    }
}

/// Number of words of length at most `length` over `tiles` letters.
pub fn word_count(tiles: usize, length: usize) -> u128 {
    (0..=length as u32)
        .map(|k| (tiles as u128).saturating_pow(k))
        .sum()
}

/// Intersection of all positions of length at most `length`.
pub fn all_positions(t: &TilingSystem, length: usize) -> Type {
    let mut layer = vec![Type::constant(BULLET)];
    let mut all = layer.clone();
    for _ in 0..length {
        let mut next = Vec::with_capacity(layer.len() * t.tile_count());
        for d in 0..t.tile_count() {
            let dt = tile_type(t, d);
            next.extend(layer.iter().map(|p| Type::arrow(dt.clone(), p.clone())));
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    Type::inter(all)
}

/// Solution of the constraint system built from a winning strategy.
///
/// `'alpha` gets every position of length at most `depth(f) + n`, and
/// `'beta_d` every position `[bottom s]` where the strategy plays `d` after
/// `s`. The omega-free variant also fixes the `'gamma` variables to the
/// values their equations force.
pub fn compile_strategy(
    t: &TilingSystem,
    f: &StrategyTree,
    variant: Variant,
    limits: &CompileLimits,
) -> Result<Substitution, ReductionError> {
    validate_strategy(t, f)?;
    compile_strategy_unchecked(t, f, variant, limits)
}

/// [`compile_strategy`] without validating the tree, for candidate trees.
pub fn compile_strategy_unchecked(
    t: &TilingSystem,
    f: &StrategyTree,
    variant: Variant,
    limits: &CompileLimits,
) -> Result<Substitution, ReductionError> {
    let k = t.tile_count();
    let n = t.width();
    let length = f.depth() + n;
    if k > limits.max_tiles || length > limits.max_length {
        return Err(ReductionError::TooLarge {
            tiles: k,
            length,
            max_tiles: limits.max_tiles,
            max_length: limits.max_length,
        });
    }
    let mut s = Substitution::new();
    let alpha = all_positions(t, length);
    let mut betas: Vec<Vec<Type>> = vec![Vec::new(); k];
    for (node, d) in f.constructor_moves() {
        let word: Vec<Tile> = t.bottom().iter().chain(node).copied().collect();
        betas[d].push(position(t, &word));
    }
    for (d, paths) in betas.into_iter().enumerate() {
        s.insert(&beta_name(t, d), Type::inter(paths));
    }
    if variant == Variant::OmegaFree {
        for d in 0..k {
            let mut prev = Type::arrow(tile_type(t, d), alpha.clone());
            s.insert(&gamma_name(t, d, 1), prev.clone());
            for i in 2..=n {
                let cur = Type::inter((0..k).map(|x| Type::arrow(tile_type(t, x), prev.clone())));
                s.insert(&gamma_name(t, d, i), cur.clone());
                prev = cur;
            }
        }
    }
    s.insert(ALPHA, alpha);
    Ok(s)
}

/// Constructor's choice at a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Win(LeafCase),
    Place(Tile),
}

/// A complete play driven by a solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayRecord {
    /// Tiles appended after the bottom word, alternating Constructor/Spoiler.
    pub moves: Vec<Tile>,
    pub outcome: LeafCase,
}

/// Constructor driven by a solution of the constraint system: at position
/// `w` it claims a violation of H, of V, or the end of the game when the
/// corresponding image lies below `[w]`, and otherwise plays the least `d`
/// with `S('beta_d) <= [w]`.
pub struct SolutionPlayer<'a> {
    t: &'a TilingSystem,
    bad_horizontal: Type,
    bad_vertical: Type,
    finished: Type,
    betas: Vec<Type>,
    bound: usize,
}

struct Checkers<'p> {
    bad_horizontal: SubtypeChecker<'p>,
    bad_vertical: SubtypeChecker<'p>,
    finished: SubtypeChecker<'p>,
    betas: Vec<SubtypeChecker<'p>>,
}

/// Longest path in the organized form of `t`, computed without organizing.
pub fn max_organized_path_len(t: &Type) -> Option<usize> {
    match t {
        Type::Omega => None,
        Type::Const(_) | Type::Var(_) => Some(0),
        Type::Arrow(_, r) => max_organized_path_len(r).map(|k| k + 1),
        Type::Inter(items) => items.iter().filter_map(max_organized_path_len).max(),
    }
}

impl<'a> SolutionPlayer<'a> {
    /// Checks that `s` solves the constraints before playing with it.
    pub fn new(
        t: &'a TilingSystem,
        s: &Substitution,
        variant: Variant,
    ) -> Result<Self, ReductionError> {
        let cs = build_constraints(t, variant)?;
        if !verify(s, &cs) {
            return Err(ReductionError::NotASolution);
        }
        Ok(Self::new_unchecked(t, s, variant))
    }

    pub fn new_unchecked(t: &'a TilingSystem, s: &Substitution, variant: Variant) -> Self {
        let g = GameTypes::new(t, variant);
        let bound = max_organized_path_len(&s.apply(&g.moves_rhs)).unwrap_or(0);
        SolutionPlayer {
            t,
            bad_horizontal: s.apply(&g.bad_horizontal),
            bad_vertical: s.apply(&g.bad_vertical),
            finished: s.apply(&g.finished),
            betas: g.betas.iter().map(|b| s.apply(b)).collect(),
            bound,
        }
    }

    /// No position longer than this can be reached.
    pub fn length_bound(&self) -> usize {
        self.bound
    }

    fn checkers(&self) -> Checkers<'_> {
        Checkers {
            bad_horizontal: SubtypeChecker::new(&self.bad_horizontal),
            bad_vertical: SubtypeChecker::new(&self.bad_vertical),
            finished: SubtypeChecker::new(&self.finished),
            betas: self.betas.iter().map(SubtypeChecker::new).collect(),
        }
    }

    /// Decision at the full sequence `seq` (bottom word included).
    pub fn decide(&self, seq: &[Tile]) -> Result<Decision, ReductionError> {
        self.decide_with(&self.checkers(), seq)
    }

    fn decide_with(&self, c: &Checkers<'_>, seq: &[Tile]) -> Result<Decision, ReductionError> {
        let pos = position(self.t, seq);
        let n = self.t.width();
        if c.bad_horizontal.is_below(&pos) {
            return Ok(Decision::Win(LeafCase::HorizontalViolation));
        }
        if c.bad_vertical.is_below(&pos) {
            return Ok(Decision::Win(LeafCase::VerticalViolation));
        }
        if c.finished.is_below(&pos) {
            let case = if seq[seq.len() - n..] == *self.t.top() {
                LeafCase::Finished
            } else {
                LeafCase::LateMove
            };
            return Ok(Decision::Win(case));
        }
        for (d, b) in c.betas.iter().enumerate() {
            if b.is_below(&pos) {
                return Ok(Decision::Place(d));
            }
        }
        Err(ReductionError::NoCaseApplies(seq.to_vec()))
    }

    /// Plays one game against `spoiler`, which sees the full sequence.
    pub fn play(
        &self,
        spoiler: &mut dyn FnMut(&[Tile]) -> Tile,
    ) -> Result<PlayRecord, ReductionError> {
        let c = self.checkers();
        let mut seq = self.t.bottom().to_vec();
        let n = self.t.width();
        loop {
            if seq.len() > self.bound.max(n) {
                return Err(ReductionError::PlayTooLong(self.bound));
            }
            match self.decide_with(&c, &seq)? {
                Decision::Win(outcome) => {
                    return Ok(PlayRecord {
                        moves: seq[n..].to_vec(),
                        outcome,
                    })
                }
                Decision::Place(d) => {
                    seq.push(d);
                    let e = spoiler(&seq);
                    seq.push(e);
                }
            }
        }
    }

    /// Plays against every Spoiler behaviour, returning one record per play.
    pub fn all_plays(&self) -> Result<Vec<PlayRecord>, ReductionError> {
        let c = self.checkers();
        let mut out = Vec::new();
        let n = self.t.width();
        let mut stack = vec![self.t.bottom().to_vec()];
        while let Some(seq) = stack.pop() {
            if seq.len() > self.bound.max(n) {
                return Err(ReductionError::PlayTooLong(self.bound));
            }
            match self.decide_with(&c, &seq)? {
                Decision::Win(outcome) => out.push(PlayRecord {
                    moves: seq[n..].to_vec(),
                    outcome,
                }),
                Decision::Place(d) => {
                    for e in (0..self.t.tile_count()).rev() {
                        let mut next = seq.clone();
                        next.extend([d, e]);
                        stack.push(next);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Plays Constructor from a solution `s` against `spoiler`.
pub fn extract_play(
    t: &TilingSystem,
    s: &Substitution,
    variant: Variant,
    spoiler: &mut dyn FnMut(&[Tile]) -> Tile,
) -> Result<PlayRecord, ReductionError> {
    SolutionPlayer::new(t, s, variant)?.play(spoiler)
}

/// Whether a recorded play is a genuine Constructor win under the game
/// rules: every Constructor move legal and the final position a win.
pub fn play_is_won(t: &TilingSystem, record: &PlayRecord) -> bool {
    let n = t.width();
    let mut seq = t.bottom().to_vec();
    for (i, &d) in record.moves.iter().enumerate() {
        if i % 2 == 0 && !t.legal_after(&seq[seq.len() - n..], d) {
            return false;
        }
        seq.push(d);
    }
    record.moves.len().is_multiple_of(2) && classify_constructor_node(t, &record.moves).is_some()
}

/// Every image is `omega` or an intersection of simple types.
pub fn is_rank1_substitution(s: &Substitution) -> bool {
    s.iter().all(|(_, t)| t.is_rank1())
}

/// Total number of `omega` nodes in a constraint set.
pub fn omega_count(cs: &ConstraintSet) -> usize {
    fn count(t: &Type) -> usize {
        match t {
            Type::Omega => 1,
            Type::Const(_) | Type::Var(_) => 0,
            Type::Arrow(s, r) => count(s) + count(r),
            Type::Inter(items) => items.iter().map(count).sum(),
        }
    }
    cs.iter().map(|c| count(&c.lhs) + count(&c.rhs)).sum()
}
