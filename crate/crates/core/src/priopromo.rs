//! Priority promotion: build a region decomposition top-down, promote each
//! locally closed region onto the lowest region it escapes to, and reset
//! regions below the target according to the chosen policy.

use crate::attractor::{attract_engine, AttractorScratch};
use crate::game::{ParityGame, Player, Solution, Strategy, VertexSet};
use crate::scc;

/// Reset discipline applied after each promotion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PromotionPolicy {
    /// Reset every region below the promotion target.
    Pp,
    /// Reset only the opponent's regions below the target.
    PpPlus,
    /// Like [`PromotionPolicy::PpPlus`], but a lower region whose recorded
    /// strategy still holds is restored instead of reset.
    Rr,
    /// Delay promotions onto regions that were already merged into, and
    /// commit the delayed promotions of one player at a time.
    Dp,
    /// Region recovery combined with delayed promotions.
    Rrdp,
}

impl PromotionPolicy {
    fn resets_own_regions(self) -> bool {
        matches!(self, PromotionPolicy::Pp)
    }

    fn recovers(self) -> bool {
        matches!(self, PromotionPolicy::Rr | PromotionPolicy::Rrdp)
    }

    fn delays(self) -> bool {
        matches!(self, PromotionPolicy::Dp | PromotionPolicy::Rrdp)
    }

    /// The base policy rebuilds its region map for every dominion search;
    /// the refined policies carry it over to the next search.
    fn retains_regions(self) -> bool {
        !matches!(self, PromotionPolicy::Pp)
    }
}

#[derive(Debug, Default, Clone)]
pub struct PpStats {
    pub promotions: u64,
    pub delayed: u64,
    /// Every counted promotion in order: (from, to, was delayed).
    pub promotion_log: Vec<(usize, usize, bool)>,
    /// Regions kept alive by the recovery policies, as (number of log
    /// entries preceding the event, from, to) where (from, to) is the
    /// promotion that formed the restored region.
    pub recoveries: Vec<(usize, usize, usize)>,
}

/// A delayed promotion parked until the next commit.
#[derive(Debug, Clone)]
struct Pending {
    from: usize,
    to: usize,
    vertices: Vec<usize>,
    log_index: usize,
}

/// Per-vertex region assignment plus the policy bookkeeping carried
/// through one dominion search.
pub struct RegionMap {
    region: Vec<Option<usize>>,
    strategy: Strategy,
    /// Per priority: the region was the target of a promotion since the
    /// last commit. Drives the delay rule.
    merged: Vec<bool>,
    /// Per priority: the region is the target of a pending promotion.
    shadow_merged: Vec<bool>,
    /// Per priority: the region was built by a promotion and still stands.
    /// Drives recovery eligibility.
    formed: Vec<bool>,
    /// Per priority: the promotion that formed the region there.
    origin: Vec<(usize, usize)>,
    pending: Vec<Pending>,
}

impl RegionMap {
    pub fn new(game: &ParityGame) -> Self {
        let n = game.vertex_count();
        let levels = game.max_priority() + 2;
        RegionMap {
            region: vec![None; n],
            strategy: Strategy::new(n),
            merged: vec![false; levels],
            shadow_merged: vec![false; levels],
            formed: vec![false; levels],
            origin: vec![(0, 0); levels],
            pending: Vec::new(),
        }
    }

    /// Regions survive from one dominion search to the next; the merge
    /// record does not.
    fn begin_search(&mut self) {
        self.merged.fill(false);
        self.shadow_merged.fill(false);
        self.pending.clear();
    }

    /// Drop every region that loses a vertex to a removed dominion. A
    /// truncated region no longer guarantees that plays inside it reach its
    /// head, so reusing it in the next search could smuggle a losing cycle
    /// into the winning strategy; a fully surviving region is untouched and
    /// stays valid.
    fn retire(&mut self, removed: &VertexSet) {
        let mut cut = vec![false; self.merged.len()];
        for v in removed.iter() {
            if let Some(q) = self.region[v] {
                cut[q] = true;
            }
        }
        for r in self.region.iter_mut() {
            if r.map_or(false, |q| cut[q]) {
                *r = None;
            }
        }
        for (q, &c) in cut.iter().enumerate() {
            if c {
                self.merged[q] = false;
                self.shadow_merged[q] = false;
                self.formed[q] = false;
            }
        }
    }

    pub fn region(&self, v: usize) -> Option<usize> {
        self.region[v]
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }
}

/// One dominion search over `domain`: decompose, promote until some region
/// is globally closed, and return its owner, the maximized region, and the
/// statistics accumulated on the way.
pub fn search_dominion(
    game: &ParityGame,
    domain: &VertexSet,
    policy: PromotionPolicy,
    state: &mut RegionMap,
) -> (Player, VertexSet, PpStats) {
    state.begin_search();
    Search {
        game,
        domain,
        policy,
        state,
        stats: PpStats::default(),
        scratch: AttractorScratch::new(game.vertex_count()),
        sub: VertexSet::new(game.vertex_count()),
    }
    .run()
}

/// True when the winner's recorded choices stay inside the dominion and no
/// opponent-won cycle survives under them. Region state carried over from
/// earlier searches is a heuristic, so each returned dominion has to earn
/// its witness before it is believed.
fn witness_holds(
    game: &ParityGame,
    winner: Player,
    dominion: &VertexSet,
    strategy: &Strategy,
) -> bool {
    for v in dominion.iter() {
        if game.owner(v) == winner {
            match strategy.get(v) {
                Some(t) if dominion.contains(t) => {}
                _ => return false,
            }
        }
    }
    let vertices: Vec<usize> = dominion.iter().collect();
    let mut restricted = |v: usize, out: &mut Vec<usize>| {
        if game.owner(v) == winner {
            out.push(strategy.get(v).expect("winner-owned members were checked"));
        } else {
            out.extend(game.successors(v).iter().filter(|w| dominion.contains(**w)));
        }
    };
    let priority = |v: usize| game.priority(v);
    scc::check_cycle_parity(game.vertex_count(), vertices, &mut restricted, &priority, winner)
        .is_ok()
}

pub fn solve_pp(game: &ParityGame, policy: PromotionPolicy) -> (Solution, PpStats) {
    let n = game.vertex_count();
    let mut domain = VertexSet::full(n);
    let mut solution = Solution::new(n);
    let mut stats = PpStats::default();
    let mut state = RegionMap::new(game);
    let merge = |stats: &mut PpStats, delta: PpStats| {
        let base = stats.promotion_log.len();
        stats.promotions += delta.promotions;
        stats.delayed += delta.delayed;
        stats.promotion_log.extend(delta.promotion_log);
        stats
            .recoveries
            .extend(delta.recoveries.iter().map(|&(i, f, t)| (i + base, f, t)));
    };
    while !domain.is_empty() {
        if !policy.retains_regions() {
            state = RegionMap::new(game);
        }
        let (mut winner, mut dominion, delta) = search_dominion(game, &domain, policy, &mut state);
        merge(&mut stats, delta);
        if !witness_holds(game, winner, &dominion, &state.strategy) {
            // The carried regions misled this search. Redo it from scratch:
            // a search from a blank slate stands on its own.
            state = RegionMap::new(game);
            let (w, d, delta) = search_dominion(game, &domain, policy, &mut state);
            merge(&mut stats, delta);
            winner = w;
            dominion = d;
            assert!(
                witness_holds(game, winner, &dominion, &state.strategy),
                "Unsound: dominion search from a blank slate lost its own witness"
            );
        }
        for v in dominion.iter() {
            match winner {
                Player::Even => solution.won_even.insert(v),
                Player::Odd => solution.won_odd.insert(v),
            };
            if game.owner(v) == winner {
                let t = state
                    .strategy
                    .get(v)
                    .expect("winner-owned dominion vertex has a choice");
                match winner {
                    Player::Even => solution.strategy_even.set(v, t),
                    Player::Odd => solution.strategy_odd.set(v, t),
                }
            }
        }
        if policy.retains_regions() {
            state.retire(&dominion);
        }
        domain.difference_with(&dominion);
    }
    (solution, stats)
}

struct Search<'a> {
    game: &'a ParityGame,
    domain: &'a VertexSet,
    policy: PromotionPolicy,
    state: &'a mut RegionMap,
    stats: PpStats,
    scratch: AttractorScratch,
    sub: VertexSet,
}

impl<'a> Search<'a> {
    fn run(mut self) -> (Player, VertexSet, PpStats) {
        let n = self.game.vertex_count();
        debug_assert!(!self.domain.is_empty());
        let mut p = self
            .cursor_from(self.domain, None)
            .expect("search domain is nonempty");
        let mut idle = 0usize;

        loop {
            idle += 1;
            assert!(
                idle <= 8 * n + 64,
                "NonTermination: no promotion over {} region sweeps",
                idle
            );

            let alpha = Player::of_priority(p);
            self.sub.clear();
            for v in self.domain.iter() {
                if self.state.region[v].map_or(true, |q| q <= p) {
                    self.sub.insert(v);
                }
            }
            let mut z = VertexSet::new(n);
            for v in self.sub.iter() {
                if self.state.region[v] == Some(p)
                    || (self.state.region[v].is_none() && self.game.priority(v) == p)
                {
                    z.insert(v);
                }
            }
            debug_assert!(!z.is_empty(), "the cursor always points at a live level");
            attract_engine(
                self.game,
                &self.sub,
                alpha,
                &mut z,
                &mut self.state.strategy,
                None,
                &mut self.scratch,
            );

            // Classify the region: open vertices of the attracting player
            // were left without a choice by the attractor; escapes of the
            // opponent either leak into the subgame (region stays open) or
            // lead to higher regions (promotion candidates).
            let mut open = false;
            let mut esc_min: Option<usize> = None;
            for v in z.iter() {
                if self.game.owner(v) == alpha {
                    if self.state.strategy.get(v).is_none() {
                        open = true;
                    }
                    continue;
                }
                for &w in self.game.successors(v) {
                    if !self.domain.contains(w) || z.contains(w) {
                        continue;
                    }
                    match self.state.region[w] {
                        Some(q) if q > p => esc_min = Some(esc_min.map_or(q, |m| m.min(q))),
                        _ => open = true,
                    }
                }
            }

            if open {
                for v in z.iter() {
                    self.state.region[v] = Some(p);
                }
                match self.cursor_from(&self.sub, Some(&z)) {
                    Some(next) => p = next,
                    None => {
                        // Every vertex sits in an open region: only the
                        // shadow can still make progress.
                        p = self.commit();
                        idle = 0;
                    }
                }
                continue;
            }

            if let Some(to) = esc_min {
                debug_assert_eq!(
                    Player::of_priority(to),
                    alpha,
                    "escapes lead to regions of the promoting player"
                );
                if self.policy.delays() && self.delay_wanted(to) {
                    self.stats.promotion_log.push((p, to, true));
                    self.state.pending.push(Pending {
                        from: p,
                        to,
                        vertices: z.iter().collect(),
                        log_index: self.stats.promotion_log.len() - 1,
                    });
                    self.state.shadow_merged[to] = true;
                    for v in z.iter() {
                        self.state.region[v] = Some(p);
                    }
                    match self.cursor_from(&self.sub, Some(&z)) {
                        Some(next) => p = next,
                        None => {
                            p = self.commit();
                            idle = 0;
                        }
                    }
                } else {
                    let members: Vec<usize> = z.iter().collect();
                    self.promote(&members, p, to, false);
                    p = to;
                    idle = 0;
                }
                continue;
            }

            // Globally closed: maximize over the whole search domain.
            attract_engine(
                self.game,
                self.domain,
                alpha,
                &mut z,
                &mut self.state.strategy,
                None,
                &mut self.scratch,
            );
            self.discard_pending();
            return (alpha, z, self.stats);
        }
    }

    /// The next cursor: highest region or, for unassigned vertices,
    /// priority among `within`, skipping `except`.
    fn cursor_from(&self, within: &VertexSet, except: Option<&VertexSet>) -> Option<usize> {
        let mut best = None;
        for v in within.iter() {
            if except.is_some_and(|e| e.contains(v)) {
                continue;
            }
            let eff = self.state.region[v].unwrap_or_else(|| self.game.priority(v));
            if best.map_or(true, |b| eff > b) {
                best = Some(eff);
            }
        }
        best
    }

    /// The delay rule: a promotion is parked when its reset sweep would
    /// destroy a region that was itself the target of a promotion.
    fn delay_wanted(&self, to: usize) -> bool {
        let tp = Player::of_priority(to);
        (0..to).any(|q| self.state.merged[q] && Player::of_priority(q) != tp)
    }

    /// Perform one promotion: move the members onto the target region and
    /// run the policy's reset sweep below it.
    fn promote(&mut self, members: &[usize], from: usize, to: usize, was_delayed: bool) {
        for &v in members {
            self.state.region[v] = Some(to);
        }
        self.stats.promotions += 1;
        if was_delayed {
            self.stats.delayed += 1;
        } else {
            self.stats.promotion_log.push((from, to, false));
        }
        self.state.merged[to] = true;
        self.state.formed[to] = true;
        self.state.origin[to] = (from, to);

        let tp = Player::of_priority(to);
        if self.policy.recovers() {
            // Only a region that was itself the target of an earlier
            // promotion is a candidate for recovery, and only while none of
            // its vertices has become trapped by the opponent. Everything
            // else of the opponent below the target is reset as usual.
            for q in (0..to).rev() {
                if Player::of_priority(q) == tp {
                    continue;
                }
                let alive = self.domain.iter().any(|v| self.state.region[v] == Some(q));
                if alive && self.state.formed[q] && !self.region_broken(q) {
                    let (f, t) = self.state.origin[q];
                    self.stats
                        .recoveries
                        .push((self.stats.promotion_log.len(), f, t));
                } else {
                    self.reset_level(q);
                }
            }
        } else {
            let reset_own = self.policy.resets_own_regions();
            for v in self.domain.iter() {
                if let Some(q) = self.state.region[v] {
                    if q < to && (reset_own || Player::of_priority(q) != tp) {
                        self.state.region[v] = None;
                    }
                }
            }
        }
    }

    /// A region is broken when a vertex of its player can no longer act on
    /// it: a recorded choice that now leaves the remaining vertices for
    /// anything other than a same-parity region, or an open vertex whose
    /// every move leads into an opponent region above this one.
    fn region_broken(&self, q: usize) -> bool {
        let qp = Player::of_priority(q);
        for v in self.domain.iter() {
            if self.state.region[v] != Some(q) || self.game.owner(v) != qp {
                continue;
            }
            match self.state.strategy.get(v) {
                Some(t) => {
                    if !self.domain.contains(t) {
                        return true;
                    }
                    match self.state.region[t] {
                        Some(qt) if Player::of_priority(qt) == qp => {}
                        _ => return true,
                    }
                }
                None => {
                    let trapped = self.game.successors(v).iter().all(|&t| {
                        !self.domain.contains(t)
                            || matches!(self.state.region[t],
                                Some(qt) if qt > q && Player::of_priority(qt) != qp)
                    });
                    if trapped {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn reset_level(&mut self, q: usize) {
        for v in self.domain.iter() {
            if self.state.region[v] == Some(q) {
                self.state.region[v] = None;
            }
        }
        self.state.merged[q] = false;
        self.state.shadow_merged[q] = false;
        self.state.formed[q] = false;
    }

    /// No undelayed promotion is available: apply the pending promotions of
    /// the player owning the highest merged region in the shadow, discard
    /// the rest, and continue with an empty merge record.
    fn commit(&mut self) -> usize {
        assert!(
            !self.state.pending.is_empty(),
            "NonTermination: decomposition exhausted with every region open"
        );
        let top = (0..self.state.shadow_merged.len())
            .rev()
            .find(|&q| self.state.shadow_merged[q])
            .expect("a pending promotion has a merged target");
        let beta = Player::of_priority(top);
        let pending = std::mem::take(&mut self.state.pending);
        let mut cursor = None;
        let mut dropped = Vec::new();
        for pnd in pending {
            if Player::of_priority(pnd.to) == beta {
                self.promote(&pnd.vertices, pnd.from, pnd.to, true);
                cursor = Some(cursor.map_or(pnd.to, |c: usize| c.max(pnd.to)));
            } else {
                dropped.push(pnd.log_index);
            }
        }
        self.drop_log_entries(&dropped);
        self.state.merged.fill(false);
        self.state.shadow_merged.fill(false);
        cursor.expect("the commit applied at least one promotion")
    }

    /// A dominion ends the search; whatever was still parked is discarded
    /// without being counted.
    fn discard_pending(&mut self) {
        let pending = std::mem::take(&mut self.state.pending);
        let dropped: Vec<usize> = pending.into_iter().map(|p| p.log_index).collect();
        self.drop_log_entries(&dropped);
    }

    fn drop_log_entries(&mut self, dropped: &[usize]) {
        if dropped.is_empty() {
            return;
        }
        let mut keep = vec![true; self.stats.promotion_log.len()];
        for &i in dropped {
            keep[i] = false;
        }
        let mut idx = 0;
        self.stats.promotion_log.retain(|_| {
            idx += 1;
            keep[idx - 1]
        });
        for r in &mut self.stats.recoveries {
            r.0 -= dropped.iter().filter(|&&i| i < r.0).count();
        }
        for p in &mut self.state.pending {
            p.log_index -= dropped.iter().filter(|&&i| i < p.log_index).count();
        }
    }
}
