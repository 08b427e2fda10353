//! Tiling systems, corridor and spiral tilings, and two-player spiral games.
//!
//! In a spiral game the play starts from the bottom word; Constructor and
//! Spoiler alternately append one tile, Constructor first. A tile placed at
//! position `i + n` must form a vertical pair with position `i` and a
//! horizontal pair with position `i + n - 1`. Constructor must move legally.
//! Constructor wins once the sequence ends with the top word, or as soon as
//! Spoiler makes an illegal move. Only the last `n` tiles matter for the rest
//! of a play, so the solver works on windows of `n` tiles.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::matching::BULLET;

pub type Tile = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingSystem {
    tiles: Vec<String>,
    horizontal: BTreeSet<(Tile, Tile)>,
    vertical: BTreeSet<(Tile, Tile)>,
    bottom: Vec<Tile>,
    top: Vec<Tile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TilingError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("tile name `{0}` must be a lowercase identifier other than `omega` and `{BULLET}`")]
    BadTileName(String),
    #[error("tile `{0}` is declared twice")]
    DuplicateTile(String),
    #[error("unknown tile `{0}`")]
    UnknownTile(String),
    #[error("tile index {0} out of range")]
    TileOutOfRange(Tile),
    #[error("bottom and top words must both have length n = {n}, got {bottom} and {top}")]
    WidthMismatch { n: usize, bottom: usize, top: usize },
    #[error("width must be positive")]
    ZeroWidth,
    #[error("grid row {row} has {got} tiles, expected {expected}")]
    Dimension {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("missing `{0}` line")]
    Missing(&'static str),
}

fn valid_tile_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && s != "omega"
        && s != BULLET
}

impl TilingSystem {
    pub fn new(
        tiles: Vec<String>,
        horizontal: BTreeSet<(Tile, Tile)>,
        vertical: BTreeSet<(Tile, Tile)>,
        bottom: Vec<Tile>,
        top: Vec<Tile>,
    ) -> Result<Self, TilingError> {
        let mut seen = BTreeSet::new();
        for t in &tiles {
            if !valid_tile_name(t) {
                return Err(TilingError::BadTileName(t.clone()));
            }
            if !seen.insert(t.as_str()) {
                return Err(TilingError::DuplicateTile(t.clone()));
            }
        }
        let n = bottom.len();
        if n == 0 {
            return Err(TilingError::ZeroWidth);
        }
        if top.len() != n {
            return Err(TilingError::WidthMismatch {
                n,
                bottom: bottom.len(),
                top: top.len(),
            });
        }
        let k = tiles.len();
        let all = horizontal
            .iter()
            .chain(&vertical)
            .flat_map(|&(a, b)| [a, b])
            .chain(bottom.iter().copied())
            .chain(top.iter().copied());
        for t in all {
            if t >= k {
                return Err(TilingError::TileOutOfRange(t));
            }
        }
        Ok(TilingSystem {
            tiles,
            horizontal,
            vertical,
            bottom,
            top,
        })
    }

    /// Builds a system from tile names.
    pub fn from_names(
        tiles: &[&str],
        horizontal: &[(&str, &str)],
        vertical: &[(&str, &str)],
        bottom: &[&str],
        top: &[&str],
    ) -> Result<Self, TilingError> {
        let names: Vec<String> = tiles.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| {
            names
                .iter()
                .position(|t| t == s)
                .ok_or_else(|| TilingError::UnknownTile(s.to_string()))
        };
        let pairs = |ps: &[(&str, &str)]| -> Result<BTreeSet<(Tile, Tile)>, TilingError> {
            ps.iter().map(|(a, b)| Ok((idx(a)?, idx(b)?))).collect()
        };
        let word =
            |w: &[&str]| -> Result<Vec<Tile>, TilingError> { w.iter().map(|s| idx(s)).collect() };
        TilingSystem::new(
            names.clone(),
            pairs(horizontal)?,
            pairs(vertical)?,
            word(bottom)?,
            word(top)?,
        )
    }

    pub fn tiles(&self) -> &[String] {
        &self.tiles
    }

    pub fn tile_count(&self) -> usize {
        self.tiles.len()
    }

    pub fn tile_name(&self, t: Tile) -> &str {
        &self.tiles[t]
    }

    pub fn tile_index(&self, name: &str) -> Option<Tile> {
        self.tiles.iter().position(|t| t == name)
    }

    pub fn horizontal(&self) -> &BTreeSet<(Tile, Tile)> {
        &self.horizontal
    }

    pub fn vertical(&self) -> &BTreeSet<(Tile, Tile)> {
        &self.vertical
    }

    pub fn bottom(&self) -> &[Tile] {
        &self.bottom
    }

    pub fn top(&self) -> &[Tile] {
        &self.top
    }

    pub fn width(&self) -> usize {
        self.bottom.len()
    }

    pub fn h_allows(&self, left: Tile, right: Tile) -> bool {
        self.horizontal.contains(&(left, right))
    }

    pub fn v_allows(&self, below: Tile, above: Tile) -> bool {
        self.vertical.contains(&(below, above))
    }

    /// Every consecutive pair of `word` is in H.
    pub fn h_consistent(&self, word: &[Tile]) -> bool {
        word.windows(2).all(|p| self.h_allows(p[0], p[1]))
    }

    /// Whether appending `d` to a sequence whose last `n` tiles are `window`
    /// respects H and V.
    pub fn legal_after(&self, window: &[Tile], d: Tile) -> bool {
        self.h_allows(*window.last().unwrap(), d) && self.v_allows(window[0], d)
    }

    pub fn word_names(&self, w: &[Tile]) -> String {
        w.iter()
            .map(|&t| self.tile_name(t))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses the line format `tiles: a b`, `h: a b`, `v: a b`,
    /// `bottom: ...`, `top: ...`, `n: 3`. `#` starts a comment.
    pub fn parse(src: &str) -> Result<Self, TilingError> {
        let mut tiles: Option<Vec<String>> = None;
        let mut h_raw = Vec::new();
        let mut v_raw = Vec::new();
        let mut bottom_raw = None;
        let mut top_raw = None;
        let mut n: Option<(usize, usize)> = None;
        for (idx, raw) in src.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: &str| TilingError::Syntax {
                line: line_no,
                message: message.to_string(),
            };
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| syntax("expected `key: value`"))?;
            let words: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            match key.trim() {
                "tiles" => {
                    if tiles.is_some() {
                        return Err(syntax("`tiles` given twice"));
                    }
                    tiles = Some(words);
                }
                "h" | "v" => {
                    if words.len() != 2 {
                        return Err(syntax("a pair line needs exactly two tiles"));
                    }
                    let target = if key.trim() == "h" {
                        &mut h_raw
                    } else {
                        &mut v_raw
                    };
                    target.push((words[0].clone(), words[1].clone()));
                }
                "bottom" => bottom_raw = Some(words),
                "top" => top_raw = Some(words),
                "n" => {
                    let v = rest
                        .trim()
                        .parse()
                        .map_err(|_| syntax("`n` must be a number"))?;
                    n = Some((v, line_no));
                }
                other => return Err(syntax(&format!("unknown key `{other}`"))),
            }
        }
        let tiles = tiles.ok_or(TilingError::Missing("tiles"))?;
        let bottom = bottom_raw.ok_or(TilingError::Missing("bottom"))?;
        let top = top_raw.ok_or(TilingError::Missing("top"))?;
        let h: Vec<(&str, &str)> = h_raw
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        let v: Vec<(&str, &str)> = v_raw
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        let names: Vec<&str> = tiles.iter().map(String::as_str).collect();
        let b: Vec<&str> = bottom.iter().map(String::as_str).collect();
        let t: Vec<&str> = top.iter().map(String::as_str).collect();
        let sys = TilingSystem::from_names(&names, &h, &v, &b, &t)?;
        if let Some((width, line)) = n {
            if width != sys.width() {
                return Err(TilingError::Syntax {
                    line,
                    message: format!(
                        "`n: {width}` disagrees with the bottom word of length {}",
                        sys.width()
                    ),
                });
            }
        }
        Ok(sys)
    }
}

impl fmt::Display for TilingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tiles: {}", self.tiles.join(" "))?;
        for &(a, b) in &self.horizontal {
            writeln!(f, "h: {} {}", self.tile_name(a), self.tile_name(b))?;
        }
        for &(a, b) in &self.vertical {
            writeln!(f, "v: {} {}", self.tile_name(a), self.tile_name(b))?;
        }
        writeln!(f, "bottom: {}", self.word_names(&self.bottom))?;
        writeln!(f, "top: {}", self.word_names(&self.top))?;
        writeln!(f, "n: {}", self.width())
    }
}

/// Checks a corridor tiling given as rows, bottom row first.
pub fn validate_corridor(t: &TilingSystem, grid: &[Vec<Tile>]) -> Result<bool, TilingError> {
    let n = t.width();
    for (row, r) in grid.iter().enumerate() {
        if r.len() != n {
            return Err(TilingError::Dimension {
                row,
                got: r.len(),
                expected: n,
            });
        }
    }
    let (Some(first), Some(last)) = (grid.first(), grid.last()) else {
        return Ok(false);
    };
    Ok(first == t.bottom()
        && last == t.top()
        && grid.iter().all(|r| t.h_consistent(r))
        && grid
            .windows(2)
            .all(|p| p[0].iter().zip(&p[1]).all(|(&a, &b)| t.v_allows(a, b))))
}

/// Checks a spiral tiling.
pub fn validate_spiral(t: &TilingSystem, seq: &[Tile]) -> bool {
    let n = t.width();
    seq.len() >= n
        && seq[..n] == *t.bottom()
        && seq[seq.len() - n..] == *t.top()
        && t.h_consistent(seq)
        && (0..seq.len() - n).all(|i| t.v_allows(seq[i], seq[i + n]))
}

/// Spiral system equivalent to the corridor game on `t`: a fresh padding
/// tile is appended twice to every row, it may sit next to anything and
/// only on top of itself.
pub fn corridor_to_spiral(t: &TilingSystem) -> TilingSystem {
    let mut pad = String::from("pad");
    while t.tile_index(&pad).is_some() {
        pad.push('_');
    }
    let p = t.tile_count();
    let mut tiles = t.tiles.clone();
    tiles.push(pad);
    let mut horizontal = t.horizontal.clone();
    for d in 0..=p {
        horizontal.insert((d, p));
        horizontal.insert((p, d));
    }
    let mut vertical = t.vertical.clone();
    vertical.insert((p, p));
    let mut bottom = t.bottom.clone();
    bottom.extend([p, p]);
    let mut top = t.top.clone();
    top.extend([p, p]);
    TilingSystem {
        tiles,
        horizontal,
        vertical,
        bottom,
        top,
    }
}

/// Constructor's strategy as a finite prefix-closed set of move sequences
/// appended after the bottom word. Sequences of even length are
/// Constructor's turns, odd length Spoiler's.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StrategyTree {
    nodes: BTreeSet<Vec<Tile>>,
}

impl StrategyTree {
    pub fn from_nodes<I: IntoIterator<Item = Vec<Tile>>>(nodes: I) -> Self {
        StrategyTree {
            nodes: nodes.into_iter().collect(),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Vec<Tile>> {
        self.nodes.iter()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, seq: &[Tile]) -> bool {
        self.nodes.contains(seq)
    }

    /// Length of the longest sequence.
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Last tiles of the nodes one step below `seq`, in increasing order.
    pub fn children(&self, seq: &[Tile]) -> Vec<Tile> {
        use std::ops::Bound;
        let mut out = Vec::new();
        let mut lo = seq.to_vec();
        lo.push(0);
        while let Some(s) = self
            .nodes
            .range::<Vec<Tile>, _>((Bound::Included(&lo), Bound::Unbounded))
            .next()
        {
            if s.len() <= seq.len() || s[..seq.len()] != *seq {
                break;
            }
            let c = s[seq.len()];
            out.push(c);
            *lo.last_mut().unwrap() = c + 1;
        }
        out
    }

    /// Constructor's move at `seq`, if any.
    pub fn move_at(&self, seq: &[Tile]) -> Option<Tile> {
        self.children(seq).first().copied()
    }

    /// Constructor nodes `s` with a child `s d`.
    pub fn constructor_moves(&self) -> impl Iterator<Item = (&[Tile], Tile)> {
        self.nodes
            .iter()
            .filter(|s| s.len() % 2 == 1)
            .map(|s| (&s[..s.len() - 1], s[s.len() - 1]))
    }

    pub fn insert(&mut self, seq: Vec<Tile>) {
        self.nodes.insert(seq);
    }
}

impl fmt::Display for StrategyTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.nodes {
            let words: Vec<String> = s.iter().map(|t| t.to_string()).collect();
            writeln!(f, "[{}]", words.join(" "))?;
        }
        Ok(())
    }
}

/// Why a Constructor node ends the play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeafCase {
    /// The sequence is a spiral tiling.
    Finished,
    /// Constructor completed the top word on the previous move and Spoiler
    /// moved afterwards.
    LateMove,
    /// Spoiler's last tile breaks H.
    HorizontalViolation,
    /// Spoiler's last tile breaks V.
    VerticalViolation,
}

/// Classifies the Constructor node reached by the bottom word followed by
/// `moves` (even length), assuming all earlier moves kept the game going.
/// Cases are tested in the order of [`LeafCase`].
pub fn classify_constructor_node(t: &TilingSystem, moves: &[Tile]) -> Option<LeafCase> {
    let n = t.width();
    let seq: Vec<Tile> = t.bottom().iter().chain(moves).copied().collect();
    let m = seq.len();
    if seq[m - n..] == *t.top() {
        return Some(LeafCase::Finished);
    }
    if moves.is_empty() {
        return None;
    }
    if seq[m - 1 - n..m - 1] == *t.top() {
        return Some(LeafCase::LateMove);
    }
    if !t.h_allows(seq[m - 2], seq[m - 1]) {
        return Some(LeafCase::HorizontalViolation);
    }
    if !t.v_allows(seq[m - 1 - n], seq[m - 1]) {
        return Some(LeafCase::VerticalViolation);
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("the bottom word is not H-consistent, so no play yields a spiral tiling")]
    InconsistentBottom,
    #[error("the strategy has no root")]
    MissingRoot,
    #[error("node {0:?} has no parent in the strategy")]
    NotPrefixClosed(Vec<Tile>),
    #[error("node {0:?} uses an unknown tile")]
    UnknownTile(Vec<Tile>),
    #[error("Spoiler node {0:?} lacks some replies")]
    MissingSpoilerReply(Vec<Tile>),
    #[error("Constructor node {0:?} has more than one move")]
    Branching(Vec<Tile>),
    #[error("Constructor move at {0:?} is illegal")]
    IllegalMove(Vec<Tile>),
    #[error("Constructor node {0:?} ends the play but is not won")]
    UnjustifiedLeaf(Vec<Tile>),
    #[error("Constructor node {0:?} continues a play that is already over")]
    MoveAfterEnd(Vec<Tile>),
}

/// Checks that `f` is a winning strategy: prefix-closed, Spoiler nodes have
/// every reply, Constructor nodes make at most one legal move, and every
/// Constructor leaf is a win.
pub fn validate_strategy(t: &TilingSystem, f: &StrategyTree) -> Result<(), StrategyError> {
    if !t.h_consistent(t.bottom()) {
        return Err(StrategyError::InconsistentBottom);
    }
    if !f.contains(&[]) {
        return Err(StrategyError::MissingRoot);
    }
    let k = t.tile_count();
    let n = t.width();
    for s in f.nodes() {
        if s.iter().any(|&d| d >= k) {
            return Err(StrategyError::UnknownTile(s.clone()));
        }
        if !s.is_empty() && !f.contains(&s[..s.len() - 1]) {
            return Err(StrategyError::NotPrefixClosed(s.clone()));
        }
        let kids = f.children(s);
        if s.len() % 2 == 1 {
            if kids.len() != k {
                return Err(StrategyError::MissingSpoilerReply(s.clone()));
            }
            continue;
        }
        let case = classify_constructor_node(t, s);
        match (case, kids.as_slice()) {
            (Some(_), []) => {}
            (Some(_), _) => return Err(StrategyError::MoveAfterEnd(s.clone())),
            (None, []) => return Err(StrategyError::UnjustifiedLeaf(s.clone())),
            (None, [d]) => {
                let seq: Vec<Tile> = t.bottom().iter().chain(s).copied().collect();
                if !t.legal_after(&seq[seq.len() - n..], *d) {
                    return Err(StrategyError::IllegalMove(s.clone()));
                }
            }
            (None, _) => return Err(StrategyError::Branching(s.clone())),
        }
    }
    Ok(())
}

/// Result of solving a spiral game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpiralSolution {
    pub strategy: StrategyTree,
    /// Tiles added before Constructor has won, against the worst Spoiler.
    pub worst_case_added: usize,
}

const UNREACHED: usize = usize::MAX;

struct Game<'a> {
    t: &'a TilingSystem,
    index: HashMap<Vec<Tile>, usize>,
    windows: Vec<Vec<Tile>>,
}

impl<'a> Game<'a> {
    fn new(t: &'a TilingSystem) -> Self {
        Game {
            t,
            index: HashMap::new(),
            windows: Vec::new(),
        }
    }

    fn id(&mut self, w: Vec<Tile>) -> usize {
        if let Some(&i) = self.index.get(&w) {
            return i;
        }
        let i = self.windows.len();
        self.index.insert(w.clone(), i);
        self.windows.push(w);
        i
    }

    fn shift(w: &[Tile], d: Tile) -> Vec<Tile> {
        let mut out = w[1..].to_vec();
        out.push(d);
        out
    }

    /// Constructor-to-move windows reachable from the bottom word, with
    /// per window the legal Constructor moves and Spoiler's replies.
    fn explore(&mut self) -> MoveTable {
        let k = self.t.tile_count();
        let root = self.id(self.t.bottom().to_vec());
        let mut edges: MoveTable = Vec::new();
        let mut queue = vec![root];
        let mut done = BTreeSet::new();
        while let Some(w_id) = queue.pop() {
            if !done.insert(w_id) {
                continue;
            }
            let w = self.windows[w_id].clone();
            let mut moves = Vec::new();
            if w != self.t.top() {
                for d in 0..k {
                    if !self.t.legal_after(&w, d) {
                        continue;
                    }
                    let w1 = Self::shift(&w, d);
                    if w1 == self.t.top() {
                        moves.push((d, None));
                        continue;
                    }
                    let mut replies = Vec::with_capacity(k);
                    for e in 0..k {
                        if self.t.legal_after(&w1, e) {
                            let id = self.id(Self::shift(&w1, e));
                            replies.push(Some(id));
                            queue.push(id);
                        } else {
                            replies.push(None);
                        }
                    }
                    moves.push((d, Some(replies)));
                }
            }
            if edges.len() <= w_id {
                edges.resize(w_id + 1, Vec::new());
            }
            edges[w_id] = moves;
        }
        edges.resize(self.windows.len(), Vec::new());
        edges
    }
}

type MoveTable = Vec<Vec<(Tile, Option<Vec<Option<usize>>>)>>;

fn move_value(rank: &[usize], reply: &Option<Vec<Option<usize>>>) -> usize {
    match reply {
        None => 1,
        Some(replies) => {
            let mut worst = 0usize;
            for id in replies.iter().flatten() {
                if rank[*id] == UNREACHED {
                    return UNREACHED;
                }
                worst = worst.max(rank[*id]);
            }
            2 + worst
        }
    }
}

fn solve_ranks(
    t: &TilingSystem,
    game: &Game<'_>,
    edges: &MoveTable,
    max_added: usize,
) -> Vec<usize> {
    let mut rank = vec![UNREACHED; game.windows.len()];
    for (i, w) in game.windows.iter().enumerate() {
        if w == t.top() {
            rank[i] = 0;
        }
    }
    loop {
        let mut changed = false;
        for i in 0..rank.len() {
            let best = edges[i]
                .iter()
                .map(|(_, r)| move_value(&rank, r))
                .min()
                .unwrap_or(UNREACHED);
            if best < rank[i] && best <= max_added {
                rank[i] = best;
                changed = true;
            }
        }
        if !changed {
            return rank;
        }
    }
}

/// Default horizon (total sequence length) large enough to make the
/// window-based solver exact.
pub fn default_horizon(t: &TilingSystem) -> usize {
    let states = (t.tile_count().max(1) as u128).saturating_pow(t.width() as u32);
    let bound = states.saturating_mul(2).saturating_add(2) + t.width() as u128;
    usize::try_from(bound).unwrap_or(usize::MAX)
}

/// Finds a winning strategy for Constructor whose plays stay within
/// `max_len` tiles in total, preferring fastest wins and, among equally fast
/// moves, the least tile index.
pub fn solve_spiral_game(t: &TilingSystem, max_len: Option<usize>) -> Option<SpiralSolution> {
    if !t.h_consistent(t.bottom()) {
        return None;
    }
    let max_len = max_len.unwrap_or_else(|| default_horizon(t));
    let max_added = max_len.checked_sub(t.width())?;
    let mut game = Game::new(t);
    let edges = game.explore();
    let rank = solve_ranks(t, &game, &edges, max_added);
    let root = game.index[t.bottom()];
    if rank[root] == UNREACHED {
        return None;
    }
    let mut tree = StrategyTree::default();
    build_tree(t, &edges, &rank, root, Vec::new(), &mut tree);
    Some(SpiralSolution {
        strategy: tree,
        worst_case_added: rank[root],
    })
}

fn build_tree(
    t: &TilingSystem,
    edges: &MoveTable,
    rank: &[usize],
    w_id: usize,
    prefix: Vec<Tile>,
    tree: &mut StrategyTree,
) {
    tree.insert(prefix.clone());
    if rank[w_id] == 0 {
        return;
    }
    let (d, reply) = edges[w_id]
        .iter()
        .find(|(_, r)| move_value(rank, r) == rank[w_id])
        .expect("ranked window has an optimal move");
    let mut s = prefix;
    s.push(*d);
    tree.insert(s.clone());
    for e in 0..t.tile_count() {
        let mut c = s.clone();
        c.push(e);
        match reply {
            None => tree.insert(c),
            Some(replies) => match replies[e] {
                None => tree.insert(c),
                Some(next) => build_tree(t, edges, rank, next, c, tree),
            },
        }
    }
}

/// Unrolls a positional Constructor policy (a move per window) into a
/// strategy tree, cutting plays after `max_added` tiles. The result is only a
/// candidate; check it with [`validate_strategy`].
pub fn unroll_policy(
    t: &TilingSystem,
    policy: &dyn Fn(&[Tile]) -> Option<Tile>,
    max_added: usize,
) -> StrategyTree {
    let mut tree = StrategyTree::default();
    let mut stack = vec![Vec::new()];
    let n = t.width();
    while let Some(s) = stack.pop() {
        tree.insert(s.clone());
        if s.len() >= max_added || classify_constructor_node(t, &s).is_some() {
            continue;
        }
        let seq: Vec<Tile> = t.bottom().iter().chain(&s).copied().collect();
        let Some(d) = policy(&seq[seq.len() - n..]) else {
            continue;
        };
        let mut c = s.clone();
        c.push(d);
        tree.insert(c.clone());
        if c.len() > max_added {
            continue;
        }
        for e in 0..t.tile_count() {
            let mut next = c.clone();
            next.push(e);
            stack.push(next);
        }
    }
    tree
}
