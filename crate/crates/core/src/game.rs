//! The parity game data model: players, games, vertex sets, strategies,
//! and solutions.

use std::fmt;

use thiserror::Error;

/// One of the two players. `Even` wins a play iff the highest priority
/// occurring infinitely often along it is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    Even,
    Odd,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    /// The player whose parity matches `priority`.
    pub fn of_priority(priority: usize) -> Player {
        if priority % 2 == 0 {
            Player::Even
        } else {
            Player::Odd
        }
    }

    /// 0 for Even, 1 for Odd.
    pub fn parity(self) -> usize {
        match self {
            Player::Even => 0,
            Player::Odd => 1,
        }
    }

    /// True iff this player wins a play dominated by `priority`.
    pub fn wins_priority(self, priority: usize) -> bool {
        priority % 2 == self.parity()
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Even => write!(f, "Even"),
            Player::Odd => write!(f, "Odd"),
        }
    }
}

/// A set of vertices over a fixed universe `0..universe`, stored as a
/// bitmask. Iteration is always in ascending vertex order.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexSet {
    blocks: Vec<u64>,
    universe: usize,
}

impl VertexSet {
    pub fn new(universe: usize) -> Self {
        VertexSet {
            blocks: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    /// The set containing every vertex of the universe.
    pub fn full(universe: usize) -> Self {
        let mut set = VertexSet::new(universe);
        for block in &mut set.blocks {
            *block = !0;
        }
        let tail = universe % 64;
        if tail != 0 {
            *set.blocks.last_mut().unwrap() = (1u64 << tail) - 1;
        }
        set
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(universe: usize, vertices: I) -> Self {
        let mut set = VertexSet::new(universe);
        for v in vertices {
            set.insert(v);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn contains(&self, v: usize) -> bool {
        self.blocks[v / 64] & (1 << (v % 64)) != 0
    }

    /// Returns true iff `v` was not yet a member.
    pub fn insert(&mut self, v: usize) -> bool {
        let block = &mut self.blocks[v / 64];
        let bit = 1 << (v % 64);
        let fresh = *block & bit == 0;
        *block |= bit;
        fresh
    }

    /// Returns true iff `v` was a member.
    pub fn remove(&mut self, v: usize) -> bool {
        let block = &mut self.blocks[v / 64];
        let bit = 1 << (v % 64);
        let present = *block & bit != 0;
        *block &= !bit;
        present
    }

    pub fn clear(&mut self) {
        for block in &mut self.blocks {
            *block = 0;
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= !b;
        }
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> SetIter<'_> {
        SetIter {
            blocks: &self.blocks,
            block_idx: 0,
            current: self.blocks.first().copied().unwrap_or(0),
        }
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct SetIter<'a> {
    blocks: &'a [u64],
    block_idx: usize,
    current: u64,
}

impl Iterator for SetIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.block_idx += 1;
            if self.block_idx >= self.blocks.len() {
                return None;
            }
            self.current = self.blocks[self.block_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.block_idx * 64 + bit)
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = SetIter<'a>;

    fn into_iter(self) -> SetIter<'a> {
        self.iter()
    }
}

/// A positional strategy: a partial map from vertices to chosen successors.
#[derive(Clone, PartialEq, Eq)]
pub struct Strategy {
    choice: Vec<Option<usize>>,
}

impl Strategy {
    pub fn new(universe: usize) -> Self {
        Strategy {
            choice: vec![None; universe],
        }
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.choice[v]
    }

    pub fn set(&mut self, v: usize, target: usize) {
        self.choice[v] = Some(target);
    }

    pub fn unset(&mut self, v: usize) {
        self.choice[v] = None;
    }

    pub fn universe(&self) -> usize {
        self.choice.len()
    }

    /// The `(vertex, successor)` pairs of the map, ascending by vertex.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.choice
            .iter()
            .enumerate()
            .filter_map(|(v, c)| c.map(|t| (v, t)))
    }

    /// Number of vertices with a defined choice.
    pub fn domain_len(&self) -> usize {
        self.choice.iter().filter(|c| c.is_some()).count()
    }
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

/// Input for one vertex of [`build_game`].
#[derive(Debug, Clone)]
pub struct VertexSpec {
    pub priority: usize,
    pub owner: Player,
    pub successors: Vec<usize>,
    pub label: Option<String>,
}

impl VertexSpec {
    pub fn new(priority: usize, owner: Player, successors: Vec<usize>) -> Self {
        VertexSpec {
            priority,
            owner,
            successors,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("game has no vertices")]
    EmptyGame,
    #[error("vertex {0} has no successors")]
    EmptySuccessorList(usize),
    #[error("edge {0} -> {1} points outside the vertex range")]
    DanglingEdge(usize, usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
}

/// An immutable parity game. Vertices are `0..vertex_count()`; successor
/// lists keep their declaration order, which all solvers rely on for
/// deterministic tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityGame {
    owner: Vec<Player>,
    priority: Vec<usize>,
    succ_index: Vec<usize>,
    succ_edges: Vec<usize>,
    pred_index: Vec<usize>,
    pred_edges: Vec<usize>,
    labels: Vec<Option<String>>,
    by_priority: Vec<Vec<usize>>,
    max_priority: usize,
}

/// Validates `specs` and builds the game. Vertex ids are `0..n` in spec
/// order.
pub fn build_game(specs: Vec<VertexSpec>) -> Result<ParityGame, GameError> {
    if specs.is_empty() {
        return Err(GameError::EmptyGame);
    }
    let n = specs.len();
    let mut owner = Vec::with_capacity(n);
    let mut priority = Vec::with_capacity(n);
    let mut succ_index = Vec::with_capacity(n + 1);
    let mut succ_edges = Vec::new();
    let mut labels = Vec::with_capacity(n);

    succ_index.push(0);
    for (v, spec) in specs.into_iter().enumerate() {
        if spec.successors.is_empty() {
            return Err(GameError::EmptySuccessorList(v));
        }
        for (i, &w) in spec.successors.iter().enumerate() {
            if w >= n {
                return Err(GameError::DanglingEdge(v, w));
            }
            if spec.successors[..i].contains(&w) {
                return Err(GameError::DuplicateEdge(v, w));
            }
        }
        owner.push(spec.owner);
        priority.push(spec.priority);
        succ_edges.extend_from_slice(&spec.successors);
        succ_index.push(succ_edges.len());
        labels.push(spec.label);
    }

    // Predecessor lists, ascending by source vertex.
    let mut pred_count = vec![0usize; n];
    for &w in &succ_edges {
        pred_count[w] += 1;
    }
    let mut pred_index = Vec::with_capacity(n + 1);
    pred_index.push(0);
    for v in 0..n {
        pred_index.push(pred_index[v] + pred_count[v]);
    }
    let mut pred_edges = vec![0usize; succ_edges.len()];
    let mut fill = pred_index.clone();
    for v in 0..n {
        for &w in &succ_edges[succ_index[v]..succ_index[v + 1]] {
            pred_edges[fill[w]] = v;
            fill[w] += 1;
        }
    }

    let max_priority = priority.iter().copied().max().unwrap();
    let mut by_priority = vec![Vec::new(); max_priority + 1];
    for v in 0..n {
        by_priority[priority[v]].push(v);
    }

    Ok(ParityGame {
        owner,
        priority,
        succ_index,
        succ_edges,
        pred_index,
        pred_edges,
        labels,
        by_priority,
        max_priority,
    })
}

impl ParityGame {
    pub fn vertex_count(&self) -> usize {
        self.owner.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ_edges.len()
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    pub fn priority(&self, v: usize) -> usize {
        self.priority[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ_edges[self.succ_index[v]..self.succ_index[v + 1]]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred_edges[self.pred_index[v]..self.pred_index[v + 1]]
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels[v].as_deref()
    }

    /// The highest priority in the game (`d`).
    pub fn max_priority(&self) -> usize {
        self.max_priority
    }

    /// Vertices carrying priority `p`, ascending. Empty for `p > d`.
    pub fn vertices_with_priority(&self, p: usize) -> &[usize] {
        self.by_priority.get(p).map_or(&[], |b| b.as_slice())
    }

    /// The highest priority among members of `set`, if any.
    pub fn max_priority_in(&self, set: &VertexSet) -> Option<usize> {
        (0..=self.max_priority)
            .rev()
            .find(|&p| self.by_priority[p].iter().any(|&v| set.contains(v)))
    }

    /// True iff every vertex in `mask` keeps at least one successor inside
    /// `mask`, i.e. the mask induces a well-formed subgame.
    pub fn subgame_check(&self, mask: &VertexSet) -> bool {
        mask.iter()
            .all(|v| self.successors(v).iter().any(|&w| mask.contains(w)))
    }
}

/// A solved game: the winning partition and one positional witness
/// strategy per player on their own region.
#[derive(Debug, Clone)]
pub struct Solution {
    pub won_even: VertexSet,
    pub won_odd: VertexSet,
    pub strategy_even: Strategy,
    pub strategy_odd: Strategy,
}

impl Solution {
    pub fn new(universe: usize) -> Self {
        Solution {
            won_even: VertexSet::new(universe),
            won_odd: VertexSet::new(universe),
            strategy_even: Strategy::new(universe),
            strategy_odd: Strategy::new(universe),
        }
    }

    pub fn winner(&self, v: usize) -> Player {
        if self.won_even.contains(v) {
            Player::Even
        } else {
            debug_assert!(self.won_odd.contains(v));
            Player::Odd
        }
    }

    pub fn winning_set(&self, player: Player) -> &VertexSet {
        match player {
            Player::Even => &self.won_even,
            Player::Odd => &self.won_odd,
        }
    }

    pub fn strategy(&self, player: Player) -> &Strategy {
        match player {
            Player::Even => &self.strategy_even,
            Player::Odd => &self.strategy_odd,
        }
    }
}
