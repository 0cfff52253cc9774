//! Attractor fixpoints: the standard player attractor, the tangle
//! attractor, and bottom-SCC extraction for tangle discovery.
//!
//! All solvers funnel through one worklist engine. It attracts single
//! vertices backward over predecessor edges and, when a tangle store is
//! supplied, absorbs whole tangles of the attracting player's parity once
//! every escape of the tangle that still lies in the attraction domain is
//! inside the growing set. Escapes that have left the domain — peeled into
//! a higher region or solved away — no longer bind the tangle: plays
//! through them can only reach territory already decided in the tangle
//! owner's favour.

use std::collections::{HashMap, VecDeque};

use crate::game::{ParityGame, Player, Strategy, VertexSet};
use crate::scc;

/// A strongly connected substructure in which `player` wins every internal
/// cycle when playing `witness`, together with the escape edges through
/// which the opponent can leave.
#[derive(Debug, Clone)]
pub struct Tangle {
    vertices: Vec<usize>,
    witness: Vec<(usize, usize)>,
    escapes: Vec<usize>,
    top_priority: usize,
    player: Player,
}

impl Tangle {
    /// Members, ascending.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Witness strategy as `(vertex, successor)` pairs, ascending by
    /// vertex; its domain is exactly the player-owned members.
    pub fn witness(&self) -> &[(usize, usize)] {
        &self.witness
    }

    /// Successors outside the tangle of opponent-owned members, over the
    /// part of the game still unsolved when the tangle was learned;
    /// ascending, duplicate-free.
    pub fn escapes(&self) -> &[usize] {
        &self.escapes
    }

    pub fn top_priority(&self) -> usize {
        self.top_priority
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// A tangle the opponent cannot leave is a dominion.
    pub fn is_dominion(&self) -> bool {
        self.escapes.is_empty()
    }

    fn witness_choice(&self, v: usize) -> usize {
        let at = self
            .witness
            .binary_search_by_key(&v, |&(u, _)| u)
            .expect("witness covers every player-owned member");
        self.witness[at].1
    }
}

/// Builds the tangle for a bottom SCC found by [`bottom_sccs`]: top
/// priority and player from the members, witness from `strategy`, escapes
/// over `unsolved` — the game vertices not yet carved away as won. In
/// debug builds the tangle definition is verified.
pub fn make_tangle(
    game: &ParityGame,
    unsolved: &VertexSet,
    scc: &VertexSet,
    strategy: &Strategy,
) -> Tangle {
    let vertices: Vec<usize> = scc.iter().collect();
    assert!(!vertices.is_empty(), "tangle must have vertices");
    let top_priority = vertices.iter().map(|&v| game.priority(v)).max().unwrap();
    let player = Player::of_priority(top_priority);

    let mut witness = Vec::new();
    let mut escapes = Vec::new();
    for &v in &vertices {
        if game.owner(v) == player {
            let target = strategy
                .get(v)
                .expect("closed-region strategy covers player-owned members");
            debug_assert!(scc.contains(target), "witness must stay inside the tangle");
            witness.push((v, target));
        } else {
            escapes.extend(
                game.successors(v)
                    .iter()
                    .filter(|&&w| unsolved.contains(w) && !scc.contains(w)),
            );
        }
    }
    escapes.sort_unstable();
    escapes.dedup();

    let tangle = Tangle {
        vertices,
        witness,
        escapes,
        top_priority,
        player,
    };
    #[cfg(debug_assertions)]
    if let Err(msg) = tangle_shape(game, &tangle) {
        panic!("InvalidTangle: {msg}");
    }
    tangle
}

/// Debug-mode check of the tangle definition: the witness-restricted
/// subgraph is strongly connected and every cycle in it is won by the
/// tangle's player.
#[cfg(debug_assertions)]
fn tangle_shape(game: &ParityGame, tangle: &Tangle) -> Result<(), String> {
    let mut restricted = |v: usize, out: &mut Vec<usize>| {
        if game.owner(v) == tangle.player {
            out.push(tangle.witness_choice(v));
        } else {
            out.extend(game.successors(v).iter().filter(|w| tangle.contains(**w)));
        }
    };
    let components = scc::strongly_connected_components(
        game.vertex_count(),
        &tangle.vertices,
        &mut restricted,
    );
    if components.len() != 1 {
        return Err(format!(
            "not strongly connected: splits into {} components",
            components.len()
        ));
    }
    let priority = |v: usize| game.priority(v);
    if let Err(component) = scc::check_cycle_parity(
        game.vertex_count(),
        tangle.vertices.clone(),
        &mut restricted,
        &priority,
        tangle.player,
    ) {
        return Err(format!(
            "cycle through {component:?} is won by the opponent"
        ));
    }
    Ok(())
}

/// The learned tangles of one solver run: append-only, deduplicated by
/// vertex set, with per-vertex and per-escape indexes.
pub struct TangleStore {
    universe: usize,
    tangles: Vec<Tangle>,
    alive: Vec<bool>,
    dedup: HashMap<Vec<usize>, u32>,
    by_vertex: Vec<Vec<u32>>,
    watchers: [Vec<Vec<u32>>; 2],
    by_parity: [Vec<u32>; 2],
    escape_spans: Vec<(u32, u32)>,
    escapes_flat: Vec<u32>,
}

impl TangleStore {
    pub fn new(universe: usize) -> Self {
        TangleStore {
            universe,
            tangles: Vec::new(),
            alive: Vec::new(),
            dedup: HashMap::new(),
            by_vertex: vec![Vec::new(); universe],
            watchers: [vec![Vec::new(); universe], vec![Vec::new(); universe]],
            by_parity: [Vec::new(), Vec::new()],
            escape_spans: Vec::new(),
            escapes_flat: Vec::new(),
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Total tangles ever stored, dead ones included.
    pub fn len(&self) -> usize {
        self.tangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tangles.is_empty()
    }

    pub fn get(&self, id: usize) -> &Tangle {
        &self.tangles[id]
    }

    pub fn is_alive(&self, id: usize) -> bool {
        self.alive[id]
    }

    /// Stores a tangle; `None` if the same vertex set was seen before
    /// (the first witness is kept).
    pub fn insert(&mut self, tangle: Tangle) -> Option<usize> {
        if self.dedup.contains_key(tangle.vertices()) {
            return None;
        }
        let id = self.tangles.len() as u32;
        self.dedup.insert(tangle.vertices.clone(), id);
        self.by_parity[tangle.player.parity()].push(id);
        let start = self.escapes_flat.len() as u32;
        self.escapes_flat.extend(tangle.escapes.iter().map(|&e| e as u32));
        self.escape_spans.push((start, self.escapes_flat.len() as u32));
        for &e in &tangle.escapes {
            self.watchers[tangle.player.parity()][e].push(id);
        }
        for &v in &tangle.vertices {
            self.by_vertex[v].push(id);
        }
        self.alive.push(true);
        self.tangles.push(tangle);
        Some(id as usize)
    }

    /// Marks every tangle intersecting `removed` as dead; returns how many
    /// died. Dead tangles are skipped by all lookups but keep their slot.
    pub fn remove_intersecting(&mut self, removed: &VertexSet) -> usize {
        let mut killed = 0;
        for v in removed.iter() {
            for &id in &self.by_vertex[v] {
                if std::mem::replace(&mut self.alive[id as usize], false) {
                    killed += 1;
                }
            }
        }
        killed
    }

    pub fn iter_alive(&self) -> impl Iterator<Item = (usize, &Tangle)> {
        self.tangles
            .iter()
            .enumerate()
            .filter(|&(id, _)| self.alive[id])
    }
}

/// Reusable worklist state for the attractor engine. Epoch stamps avoid
/// clearing the per-vertex and per-tangle counters between calls.
pub(crate) struct AttractorScratch {
    queue: VecDeque<usize>,
    ready: VecDeque<u32>,
    succ_left: Vec<u32>,
    succ_epoch: Vec<u32>,
    tangle_left: Vec<u32>,
    tangle_epoch: Vec<u32>,
    epoch: u32,
    absorb_buf: Vec<(usize, Option<usize>)>,
}

impl AttractorScratch {
    pub(crate) fn new(universe: usize) -> Self {
        AttractorScratch {
            queue: VecDeque::new(),
            ready: VecDeque::new(),
            succ_left: vec![0; universe],
            succ_epoch: vec![0; universe],
            tangle_left: Vec::new(),
            tangle_epoch: Vec::new(),
            epoch: 0,
            absorb_buf: Vec::new(),
        }
    }

    fn begin(&mut self, tangle_count: usize) {
        if self.epoch == u32::MAX {
            self.succ_epoch.fill(0);
            self.tangle_epoch.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        if self.tangle_left.len() < tangle_count {
            self.tangle_left.resize(tangle_count, 0);
            self.tangle_epoch.resize(tangle_count, 0);
        }
        self.queue.clear();
        self.ready.clear();
    }
}

struct Engine<'a> {
    game: &'a ParityGame,
    domain: &'a VertexSet,
    player: Player,
    z: &'a mut VertexSet,
    strategy: &'a mut Strategy,
    store: Option<&'a TangleStore>,
    scratch: &'a mut AttractorScratch,
}

impl<'a> Engine<'a> {
    fn run(&mut self) {
        self.scratch.begin(self.store.map_or(0, |s| s.len()));
        debug_assert!(self.z.is_subset(self.domain));

        for v in self.z.iter() {
            self.scratch.queue.push_back(v);
        }
        if let Some(store) = self.store {
            // Tangles with no escape left inside the domain can never be
            // triggered through a watcher; they are absorbable outright.
            for &id in &store.by_parity[self.player.parity()] {
                if !store.alive[id as usize] {
                    continue;
                }
                let (s, e) = store.escape_spans[id as usize];
                if store.escapes_flat[s as usize..e as usize]
                    .iter()
                    .any(|&x| self.domain.contains(x as usize))
                {
                    continue;
                }
                if self.absorbable(store.get(id as usize)) {
                    self.scratch.ready.push_back(id);
                }
            }
            // Seed members are already all in Z, so their watcher scans may
            // only initialize counters, never decrement them.
            let mut seeds = Vec::new();
            seeds.extend(self.z.iter());
            for v in seeds {
                self.scan_watchers(v, true);
            }
        }

        loop {
            while let Some(v) = self.scratch.queue.pop_front() {
                self.pull_predecessors(v);
            }
            match self.scratch.ready.pop_front() {
                Some(id) => self.absorb(id as usize),
                None => break,
            }
        }

        self.fix_target_strategies();
    }

    fn pull_predecessors(&mut self, v: usize) {
        for i in 0..self.game.predecessors(v).len() {
            let u = self.game.predecessors(v)[i];
            if !self.domain.contains(u) || self.z.contains(u) {
                continue;
            }
            if self.game.owner(u) == self.player {
                self.insert(u, Some(v));
            } else {
                let scratch = &mut *self.scratch;
                if scratch.succ_epoch[u] != scratch.epoch {
                    scratch.succ_epoch[u] = scratch.epoch;
                    scratch.succ_left[u] = self
                        .game
                        .successors(u)
                        .iter()
                        .filter(|&&w| self.domain.contains(w))
                        .count() as u32;
                }
                scratch.succ_left[u] -= 1;
                if scratch.succ_left[u] == 0 {
                    self.insert(u, None);
                }
            }
        }
    }

    fn insert(&mut self, u: usize, choice: Option<usize>) {
        self.z.insert(u);
        if let Some(c) = choice {
            self.strategy.set(u, c);
        }
        self.scratch.queue.push_back(u);
        if self.store.is_some() {
            self.scan_watchers(u, false);
        }
    }

    /// Updates escape counters of tangles watching `v`. A counter is
    /// created on first touch with the count of in-domain escapes still
    /// outside Z (which already contains `v`); later touches decrement —
    /// except during seeding, when every seed is already accounted for.
    /// Escapes outside the domain never enter Z and never count.
    fn scan_watchers(&mut self, v: usize, seeding: bool) {
        let store = self.store.unwrap();
        for &id in &store.watchers[self.player.parity()][v] {
            if !store.alive[id as usize] {
                continue;
            }
            let scratch = &mut *self.scratch;
            let slot = id as usize;
            if scratch.tangle_epoch[slot] != scratch.epoch {
                scratch.tangle_epoch[slot] = scratch.epoch;
                scratch.tangle_left[slot] = store
                    .get(slot)
                    .escapes()
                    .iter()
                    .filter(|&&e| self.domain.contains(e) && !self.z.contains(e))
                    .count() as u32;
            } else if seeding {
                continue;
            } else {
                scratch.tangle_left[slot] -= 1;
            }
            if scratch.tangle_left[slot] == 0 {
                scratch.ready.push_back(id);
            }
        }
    }

    fn absorbable(&self, tangle: &Tangle) -> bool {
        tangle.player == self.player
            && tangle.vertices.iter().all(|&m| self.domain.contains(m))
            && !tangle.vertices.iter().all(|&m| self.z.contains(m))
    }

    fn absorb(&mut self, id: usize) {
        let store = self.store.unwrap();
        let tangle = store.get(id);
        debug_assert_eq!(tangle.player, self.player);
        if !tangle.vertices.iter().all(|&m| self.domain.contains(m)) {
            return;
        }
        // Choices are decided against Z as it was before the absorption:
        // members that can already step into Z do so, the rest follow the
        // tangle's witness.
        self.scratch.absorb_buf.clear();
        for &m in &tangle.vertices {
            if self.z.contains(m) {
                continue;
            }
            let choice = if self.game.owner(m) == self.player {
                let direct = self
                    .game
                    .successors(m)
                    .iter()
                    .copied()
                    .find(|&w| self.z.contains(w));
                Some(direct.unwrap_or_else(|| tangle.witness_choice(m)))
            } else {
                None
            };
            self.scratch.absorb_buf.push((m, choice));
        }
        for i in 0..self.scratch.absorb_buf.len() {
            let (m, choice) = self.scratch.absorb_buf[i];
            self.insert(m, choice);
        }
    }

    /// Post-pass: every player-owned member of Z must end with a choice
    /// into Z. Vertices attracted this call already have one; targets keep
    /// a pre-existing choice into Z or get their first successor in Z.
    fn fix_target_strategies(&mut self) {
        for v in self.z.iter() {
            if self.game.owner(v) != self.player {
                continue;
            }
            if let Some(t) = self.strategy.get(v) {
                if self.z.contains(t) {
                    continue;
                }
            }
            let into = self
                .game
                .successors(v)
                .iter()
                .copied()
                .find(|&w| self.z.contains(w));
            match into {
                Some(w) => self.strategy.set(v, w),
                None => self.strategy.unset(v),
            }
        }
    }
}

/// Internal entry point: attracts to the seed already placed in `z`,
/// within `domain`, writing choices into the caller's strategy buffer.
pub(crate) fn attract_engine(
    game: &ParityGame,
    domain: &VertexSet,
    player: Player,
    z: &mut VertexSet,
    strategy: &mut Strategy,
    store: Option<&TangleStore>,
    scratch: &mut AttractorScratch,
) {
    Engine {
        game,
        domain,
        player,
        z,
        strategy,
        store,
        scratch,
    }
    .run()
}

/// The α-attractor of `targets` within `domain`: the least set containing
/// the targets that `player` can force plays into. Also returns the
/// attractor strategy.
pub fn attract(
    game: &ParityGame,
    domain: &VertexSet,
    player: Player,
    targets: &VertexSet,
) -> (VertexSet, Strategy) {
    let mut z = targets.clone();
    let mut strategy = Strategy::new(game.vertex_count());
    let mut scratch = AttractorScratch::new(game.vertex_count());
    attract_engine(game, domain, player, &mut z, &mut strategy, None, &mut scratch);
    (z, strategy)
}

/// Like [`attract`], additionally absorbing whole tangles of `player`'s
/// parity from `store` whenever every in-domain escape of the tangle is
/// in the set.
pub fn tangle_attract(
    game: &ParityGame,
    domain: &VertexSet,
    player: Player,
    targets: &VertexSet,
    store: &TangleStore,
) -> (VertexSet, Strategy) {
    let mut z = targets.clone();
    let mut strategy = Strategy::new(game.vertex_count());
    let mut scratch = AttractorScratch::new(game.vertex_count());
    attract_engine(
        game,
        domain,
        player,
        &mut z,
        &mut strategy,
        Some(store),
        &mut scratch,
    );
    (z, strategy)
}

/// Bottom SCCs of `region` under the restricted edge relation: vertices in
/// the strategy's domain keep only their strategy edge, all others keep
/// every region-internal edge. Components with edges into other components
/// are dropped, as are trivial singletons; the rest come out ascending by
/// smallest member.
pub fn bottom_sccs(game: &ParityGame, region: &VertexSet, strategy: &Strategy) -> Vec<VertexSet> {
    let vertices: Vec<usize> = region.iter().collect();
    let mut restricted = |v: usize, out: &mut Vec<usize>| match strategy.get(v) {
        Some(t) => {
            debug_assert!(region.contains(t), "strategy must stay inside the region");
            out.push(t);
        }
        None => out.extend(game.successors(v).iter().filter(|w| region.contains(**w))),
    };
    let components = scc::strongly_connected_components(
        game.vertex_count(),
        &vertices,
        &mut restricted,
    );

    let mut comp_of = vec![usize::MAX; game.vertex_count()];
    for (i, component) in components.iter().enumerate() {
        for &v in component {
            comp_of[v] = i;
        }
    }
    let mut bottoms = Vec::new();
    let mut buf = Vec::new();
    for (i, component) in components.iter().enumerate() {
        let mut self_edge = false;
        let mut leaves = false;
        for &v in component {
            buf.clear();
            restricted(v, &mut buf);
            for &w in &buf {
                if comp_of[w] != i {
                    leaves = true;
                } else if w == v {
                    self_edge = true;
                }
            }
            if leaves {
                break;
            }
        }
        if leaves || (component.len() == 1 && !self_edge) {
            continue;
        }
        bottoms.push(VertexSet::from_vertices(
            game.vertex_count(),
            component.iter().copied(),
        ));
    }
    bottoms.sort_by_key(|set| set.first());
    bottoms
}
