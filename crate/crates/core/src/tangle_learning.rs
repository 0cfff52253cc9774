//! Tangle learning: decompose the game with the tangle attractor, harvest
//! the bottom SCCs of every region the opponent cannot leave, and feed them
//! back into the next decomposition. Tangles without escapes are dominions;
//! they are maximized and removed until the game is gone.
//!
//! The alternating mode banks only one player's finds per round and hands
//! the turn over once that player's searches run dry.

use crate::attractor::{
    attract_engine, bottom_sccs, make_tangle, AttractorScratch, Tangle, TangleStore,
};
use crate::game::{ParityGame, Player, Solution, Strategy, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlMode {
    /// Keep every tangle any search turns up.
    Tl,
    /// Alternate: keep one player's tangles until their searches stop
    /// producing new ones, then switch to the other player.
    Atl,
}

#[derive(Debug, Default)]
pub struct TlStats {
    /// Tangles learned with at least one escape.
    pub open_tangles: u64,
    /// Closed tangles, i.e. dominions.
    pub dominions: u64,
    /// One `(player, top priority, size, is_dominion)` row per retained
    /// tangle, in discovery order.
    pub tangle_log: Vec<(Player, usize, usize, bool)>,
}

/// One decomposition pass: peel `domain` top-down by tangle-attracting to
/// the highest remaining priority, and collect the bottom SCCs of every
/// closed region as tangles. Open regions yield nothing but are peeled off
/// all the same.
pub fn tl_search(game: &ParityGame, domain: &VertexSet, store: &TangleStore) -> Vec<Tangle> {
    let mut scratch = AttractorScratch::new(game.vertex_count());
    search(game, domain, store, &mut scratch)
}

fn search(
    game: &ParityGame,
    domain: &VertexSet,
    store: &TangleStore,
    scratch: &mut AttractorScratch,
) -> Vec<Tangle> {
    let mut remaining = domain.clone();
    let mut found = Vec::new();
    while let Some(p) = remaining.iter().map(|v| game.priority(v)).max() {
        let alpha = Player::of_priority(p);
        let mut z = VertexSet::new(game.vertex_count());
        for v in remaining.iter() {
            if game.priority(v) == p {
                z.insert(v);
            }
        }
        let mut sigma = Strategy::new(game.vertex_count());
        attract_engine(
            game,
            &remaining,
            alpha,
            &mut z,
            &mut sigma,
            Some(store),
            scratch,
        );
        if region_is_closed(game, &remaining, alpha, &z, &sigma) {
            for scc in bottom_sccs(game, &z, &sigma) {
                found.push(make_tangle(game, domain, &scc, &sigma));
            }
        }
        remaining.difference_with(&z);
    }
    found
}

/// A region is closed when nobody inside can reach the rest of the domain:
/// every region-owner vertex has a choice inside, and every opponent edge
/// that stays in the domain stays in the region.
fn region_is_closed(
    game: &ParityGame,
    domain: &VertexSet,
    alpha: Player,
    z: &VertexSet,
    sigma: &Strategy,
) -> bool {
    for v in z.iter() {
        if game.owner(v) == alpha {
            if sigma.get(v).is_none() {
                return false;
            }
        } else if game
            .successors(v)
            .iter()
            .any(|&w| domain.contains(w) && !z.contains(w))
        {
            return false;
        }
    }
    true
}

pub fn solve_tl(game: &ParityGame, mode: TlMode) -> (Solution, TlStats) {
    let mut store = TangleStore::new(game.vertex_count());
    solve_tl_with_store(game, mode, &mut store)
}

/// Like [`solve_tl`], but the caller owns the store, which afterwards holds
/// every open tangle the run learned, in learning order (tangles whose
/// vertices were solved along the way are still present, marked dead).
pub fn solve_tl_with_store(
    game: &ParityGame,
    mode: TlMode,
    store: &mut TangleStore,
) -> (Solution, TlStats) {
    let n = game.vertex_count();
    let mut domain = VertexSet::full(n);
    let mut solution = Solution::new(n);
    let mut stats = TlStats::default();
    let mut scratch = AttractorScratch::new(n);
    let mut current = (0..n)
        .map(|v| game.priority(v))
        .max()
        .map_or(Player::Even, Player::of_priority);
    let mut fruitless = 0;
    while !domain.is_empty() {
        let found = search(game, &domain, store, &mut scratch);
        let mut dominions: Vec<Tangle> = Vec::new();
        let mut banked = false;
        let mut current_learned = false;
        for tangle in found {
            let row = (
                tangle.player(),
                tangle.top_priority(),
                tangle.len(),
                tangle.is_dominion(),
            );
            if tangle.is_dominion() {
                stats.dominions += 1;
                stats.tangle_log.push(row);
                banked = true;
                current_learned |= row.0 == current;
                dominions.push(tangle);
            } else {
                if mode == TlMode::Atl && tangle.player() != current {
                    continue;
                }
                if store.insert(tangle).is_some() {
                    stats.open_tangles += 1;
                    stats.tangle_log.push(row);
                    banked = true;
                    current_learned |= row.0 == current;
                }
            }
        }
        if banked {
            fruitless = 0;
        } else {
            fruitless += 1;
            // A fruitless round only ever happens in alternating mode, when
            // the search found tangles solely for the benched player; the
            // switch below lets the next round bank them.
            assert!(
                fruitless < 2,
                "a search banked neither a new tangle nor a dominion"
            );
        }
        if !dominions.is_empty() {
            let mut removed = VertexSet::new(n);
            for player in [Player::Even, Player::Odd] {
                let mut z = VertexSet::new(n);
                for d in dominions.iter().filter(|d| d.player() == player) {
                    for &v in d.vertices() {
                        z.insert(v);
                    }
                }
                if z.is_empty() {
                    continue;
                }
                let mut sigma = Strategy::new(n);
                attract_engine(game, &domain, player, &mut z, &mut sigma, Some(store), &mut scratch);
                // The attractor gave the seed vertices fresh choices; put the
                // dominions' own witnesses back so the win survives.
                for d in dominions.iter().filter(|d| d.player() == player) {
                    for &(v, t) in d.witness() {
                        sigma.set(v, t);
                    }
                }
                debug_assert!(removed.is_disjoint(&z));
                for v in z.iter() {
                    match player {
                        Player::Even => solution.won_even.insert(v),
                        Player::Odd => solution.won_odd.insert(v),
                    };
                    if game.owner(v) == player {
                        let t = sigma.get(v).expect("winner-owned vertex has a choice");
                        match player {
                            Player::Even => solution.strategy_even.set(v, t),
                            Player::Odd => solution.strategy_odd.set(v, t),
                        }
                    }
                }
                removed.union_with(&z);
            }
            domain.difference_with(&removed);
            store.remove_intersecting(&removed);
        }
        if mode == TlMode::Atl && !current_learned {
            current = current.opponent();
        }
    }
    (solution, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, VertexSpec};
    use crate::oracle::oracle_solve;
    use crate::random::{random_games, RandomGameParams};
    use crate::twocounters::{generate_two_counters, RoleKind};
    use crate::verify::verify_solution;
    use Player::{Even, Odd};

    fn v(priority: usize, owner: Player, successors: Vec<usize>) -> VertexSpec {
        VertexSpec::new(priority, owner, successors)
    }

    /// A 5-vertex game whose whole vertex set is an Odd dominion containing
    /// a 3-tangle nested inside a 5-tangle.
    fn nested_tangle_game() -> ParityGame {
        build_game(vec![
            v(6, Even, vec![1]),
            v(5, Even, vec![3]),
            v(2, Even, vec![4, 1]),
            v(1, Odd, vec![4, 0]),
            v(3, Even, vec![2]),
        ])
        .unwrap()
    }

    #[test]
    fn self_loop_is_a_dominion_immediately() {
        let game = build_game(vec![v(2, Even, vec![0])]).unwrap();
        let (solution, stats) = solve_tl(&game, TlMode::Tl);
        assert_eq!(stats.open_tangles, 0);
        assert_eq!(stats.dominions, 1);
        assert_eq!(stats.tangle_log, vec![(Even, 2, 1, true)]);
        assert!(solution.won_even.contains(0));
        assert_eq!(solution.strategy_even.get(0), Some(0));
    }

    #[test]
    fn first_search_on_one_bit_finds_evens_pair() {
        let tc = generate_two_counters(1).unwrap();
        let store = TangleStore::new(tc.game.vertex_count());
        let found = tl_search(&tc.game, &VertexSet::full(tc.game.vertex_count()), &store);
        // Odd's t/z pair is swept into the open region of Even's lane vertex
        // and survives only Even's counter does not: one tangle comes out.
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].vertices(), &[1, 2]);
        assert_eq!(found[0].player(), Even);
        assert_eq!(found[0].top_priority(), 2);
        assert_eq!(found[0].escapes(), &[3]);
    }

    #[test]
    fn one_bit_counter_is_learned_in_three_searches() {
        let tc = generate_two_counters(1).unwrap();
        let mut store = TangleStore::new(tc.game.vertex_count());
        let (solution, stats) = solve_tl_with_store(&tc.game, TlMode::Tl, &mut store);
        assert_eq!(stats.open_tangles, 2);
        assert_eq!(stats.dominions, 2);
        assert_eq!(
            stats.tangle_log,
            vec![
                (Even, 2, 2, false),
                (Even, 6, 4, true),
                (Odd, 1, 2, false),
                (Odd, 7, 4, true),
            ]
        );
        // Each player wins their own counter, and both learned pairs are in
        // the store, dead now that their vertices are solved.
        assert_eq!(solution.won_even.iter().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(solution.won_odd.iter().collect::<Vec<_>>(), vec![4, 5, 6, 7]);
        assert!(verify_solution(&tc.game, &solution).unwrap().ok);
        assert_eq!(store.len(), 2);
        assert!(!store.is_alive(0));
        assert!(!store.is_alive(1));
    }

    #[test]
    fn nested_tangles_are_learned_inside_out() {
        let game = nested_tangle_game();
        let universe = VertexSet::full(game.vertex_count());
        let mut store = TangleStore::new(game.vertex_count());

        let first = tl_search(&game, &universe, &store);
        assert_eq!(first.len(), 1);
        assert_eq!(first[0].vertices(), &[2, 4]);
        assert_eq!(first[0].top_priority(), 3);
        assert_eq!(first[0].escapes(), &[1]);
        store.insert(first[0].clone());

        // With the 3-tangle absorbed, the 5-tangle closes around it and has
        // no escapes left: the whole dominion in one region.
        let second = tl_search(&game, &universe, &store);
        assert_eq!(second.len(), 1);
        assert_eq!(second[0].vertices(), &[1, 2, 3, 4]);
        assert_eq!(second[0].top_priority(), 5);
        assert!(second[0].is_dominion());

        let (solution, stats) = solve_tl(&game, TlMode::Tl);
        assert_eq!(stats.open_tangles, 1);
        assert_eq!(stats.dominions, 1);
        assert_eq!(solution.won_odd.len(), 5);
        assert_eq!(solution.strategy_odd.get(3), Some(4));
        assert!(verify_solution(&game, &solution).unwrap().ok);
    }

    #[test]
    fn counter_games_learn_each_increment_once() {
        for n in 1..=8 {
            let tc = generate_two_counters(n).unwrap();
            let expected = 2 * ((1 << n) - 1) as u64;
            for mode in [TlMode::Tl, TlMode::Atl] {
                let (solution, stats) = solve_tl(&tc.game, mode);
                assert_eq!(stats.open_tangles, expected, "n={n} mode={mode:?}");
                assert_eq!(stats.dominions, 2, "n={n} mode={mode:?}");
                assert!(verify_solution(&tc.game, &solution).unwrap().ok);
            }
        }
    }

    #[test]
    fn learning_order_walks_the_counters_bit_by_bit() {
        let tc = generate_two_counters(5).unwrap();
        let mut store = TangleStore::new(tc.game.vertex_count());
        let (_, stats) = solve_tl_with_store(&tc.game, TlMode::Tl, &mut store);
        assert_eq!(stats.open_tangles, 62);
        // Decode each learned tangle back to (player, bit) through its top
        // vertex: the low bits only become learnable after a fresh pass over
        // the high bits, so the prefix ticks like the counters themselves.
        let decoded: Vec<(Player, usize)> = (0..store.len())
            .map(|id| {
                let tangle = store.get(id);
                let top = tangle
                    .vertices()
                    .iter()
                    .copied()
                    .max_by_key(|&v| tc.game.priority(v))
                    .unwrap();
                let role = &tc.roles[top];
                assert_eq!(role.kind, RoleKind::Tangle);
                (tangle.player(), role.bit)
            })
            .collect();
        let prefix = [
            (Even, 4),
            (Odd, 4),
            (Even, 3),
            (Odd, 3),
            (Even, 4),
            (Odd, 4),
            (Even, 2),
            (Odd, 2),
            (Even, 4),
            (Odd, 4),
            (Even, 3),
            (Odd, 3),
            (Even, 4),
            (Odd, 4),
            (Even, 1),
            (Odd, 1),
        ];
        assert_eq!(&decoded[..16], &prefix);
    }

    #[test]
    fn alternating_mode_matches_plain_counts() {
        for n in 1..=6 {
            let tc = generate_two_counters(n).unwrap();
            let (_, plain) = solve_tl(&tc.game, TlMode::Tl);
            let (solution, alternating) = solve_tl(&tc.game, TlMode::Atl);
            assert_eq!(alternating.open_tangles, plain.open_tangles, "n={n}");
            assert_eq!(alternating.dominions, plain.dominions, "n={n}");
            assert!(verify_solution(&tc.game, &solution).unwrap().ok);
        }
    }

    #[test]
    fn agrees_with_oracle_on_random_games() {
        let games = random_games(61, 200, &RandomGameParams::default());
        for (i, game) in games.iter().enumerate() {
            let expected = oracle_solve(game).unwrap();
            for mode in [TlMode::Tl, TlMode::Atl] {
                let (solution, stats) = solve_tl(game, mode);
                assert_eq!(
                    solution.won_even, expected.won_even,
                    "game {i} mode {mode:?}"
                );
                let report = verify_solution(game, &solution).unwrap();
                assert!(report.ok, "game {i} mode {mode:?}: {:?}", report.violations);
                let opens = stats.tangle_log.iter().filter(|r| !r.3).count() as u64;
                let doms = stats.tangle_log.iter().filter(|r| r.3).count() as u64;
                assert_eq!(stats.open_tangles, opens);
                assert_eq!(stats.dominions, doms);
            }
        }
    }
}
