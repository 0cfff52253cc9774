//! The recursive solver: attract to the top priority, solve the remainder,
//! and re-solve when the opponent steals part of the attractor.
//!
//! Counts invocations on nonempty subgames and logs a "distraction" event
//! whenever the opponent's sub-result grows under attraction — the moment
//! the top-priority vertices turn out to be lost.

use crate::attractor::{attract_engine, AttractorScratch};
use crate::game::{ParityGame, Player, Solution, Strategy, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistractionEvent {
    pub priority: usize,
    pub player: Player,
    /// The top-priority vertices that were attracted away by the opponent.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Default)]
pub struct ZlkStats {
    pub recursive_calls: u64,
    pub distraction_events: Vec<DistractionEvent>,
}

pub fn solve_zielonka(game: &ParityGame) -> (Solution, ZlkStats) {
    let n = game.vertex_count();
    let mut stats = ZlkStats::default();
    let mut strategy = Strategy::new(n);
    let mut scratch = AttractorScratch::new(n);
    let (won_even, won_odd) = recurse(
        game,
        VertexSet::full(n),
        &mut strategy,
        &mut stats,
        &mut scratch,
    );

    let mut solution = Solution::new(n);
    for v in won_even.iter() {
        if game.owner(v) == Player::Even {
            let t = strategy.get(v).expect("winner-owned vertex has a choice");
            solution.strategy_even.set(v, t);
        }
    }
    for v in won_odd.iter() {
        if game.owner(v) == Player::Odd {
            let t = strategy.get(v).expect("winner-owned vertex has a choice");
            solution.strategy_odd.set(v, t);
        }
    }
    solution.won_even = won_even;
    solution.won_odd = won_odd;
    (solution, stats)
}

fn recurse(
    game: &ParityGame,
    domain: VertexSet,
    strategy: &mut Strategy,
    stats: &mut ZlkStats,
    scratch: &mut AttractorScratch,
) -> (VertexSet, VertexSet) {
    let n = game.vertex_count();
    if domain.is_empty() {
        return (VertexSet::new(n), VertexSet::new(n));
    }
    stats.recursive_calls += 1;

    let p = game.max_priority_in(&domain).expect("domain is nonempty");
    let alpha = Player::of_priority(p);

    let mut a = VertexSet::new(n);
    for &v in game.vertices_with_priority(p) {
        if domain.contains(v) {
            a.insert(v);
        }
    }
    attract_engine(game, &domain, alpha, &mut a, strategy, None, scratch);

    let mut rest = domain.clone();
    rest.difference_with(&a);
    let (won_even, won_odd) = recurse(game, rest, strategy, stats, scratch);
    let (mut w_alpha, w_opp) = match alpha {
        Player::Even => (won_even, won_odd),
        Player::Odd => (won_odd, won_even),
    };

    let mut b = w_opp.clone();
    attract_engine(game, &domain, alpha.opponent(), &mut b, strategy, None, scratch);

    if b == w_opp {
        w_alpha.union_with(&a);
        // Top-priority vertices of the winner may choose any successor that
        // stays in the won region; take the lowest id.
        for &v in game.vertices_with_priority(p) {
            if domain.contains(v) && game.owner(v) == alpha {
                let choice = game
                    .successors(v)
                    .iter()
                    .copied()
                    .filter(|&w| w_alpha.contains(w))
                    .min()
                    .expect("an unattracted top vertex keeps a successor in its region");
                strategy.set(v, choice);
            }
        }
        match alpha {
            Player::Even => (w_alpha, w_opp),
            Player::Odd => (w_opp, w_alpha),
        }
    } else {
        let lost: Vec<usize> = game
            .vertices_with_priority(p)
            .iter()
            .copied()
            .filter(|&v| b.contains(v))
            .collect();
        stats.distraction_events.push(DistractionEvent {
            priority: p,
            player: alpha,
            vertices: lost,
        });

        let mut rest = domain;
        rest.difference_with(&b);
        let (won_even, won_odd) = recurse(game, rest, strategy, stats, scratch);
        let (w_alpha, mut w_opp) = match alpha {
            Player::Even => (won_even, won_odd),
            Player::Odd => (won_odd, won_even),
        };
        w_opp.union_with(&b);
        match alpha {
            Player::Even => (w_alpha, w_opp),
            Player::Odd => (w_opp, w_alpha),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, VertexSpec};
    use crate::oracle::oracle_solve;
    use crate::random::{random_games, RandomGameParams};
    use crate::twocounters::generate_two_counters;
    use crate::verify::verify_solution;
    use Player::{Even, Odd};

    fn v(priority: usize, owner: Player, successors: Vec<usize>) -> VertexSpec {
        VertexSpec::new(priority, owner, successors)
    }

    #[test]
    fn single_even_self_loop() {
        let g = build_game(vec![v(0, Even, vec![0])]).unwrap();
        let (sol, stats) = solve_zielonka(&g);
        assert!(sol.won_even.contains(0));
        assert_eq!(sol.strategy_even.get(0), Some(0));
        assert_eq!(stats.recursive_calls, 1);
        assert!(verify_solution(&g, &sol).unwrap().ok);
    }

    #[test]
    fn counter_games_call_counts() {
        let expected = [8u64, 21, 45, 91, 181, 359];
        for (i, &calls) in expected.iter().enumerate() {
            let n = i + 1;
            let tc = generate_two_counters(n).unwrap();
            let (sol, stats) = solve_zielonka(&tc.game);
            assert_eq!(stats.recursive_calls, calls, "calls at N={n}");
            let report = verify_solution(&tc.game, &sol).unwrap();
            assert!(report.ok, "N={n}: {:?}", report.violations);
            for (w, role) in tc.roles.iter().enumerate() {
                assert_eq!(
                    sol.winner(w),
                    role.counter_player,
                    "vertex {w} belongs to the wrong counter at N={n}"
                );
            }
        }
    }

    #[test]
    fn distraction_ruler_on_three_bits() {
        let tc = generate_two_counters(3).unwrap();
        let (_, stats) = solve_zielonka(&tc.game);
        let odd_bits: Vec<usize> = stats
            .distraction_events
            .iter()
            .filter_map(|e| match tc.decode_low_priority(e.priority) {
                Some((Odd, bit)) => Some(bit),
                _ => None,
            })
            .collect();
        // Odd's counter steps through 1..2^3-1; each event marks the bit
        // that flips, i.e. the binary ruler sequence.
        assert_eq!(odd_bits, vec![2, 1, 2, 0, 2, 1, 2]);
    }

    #[test]
    fn agrees_with_oracle_on_random_games() {
        let params = RandomGameParams::default();
        for (i, game) in random_games(41, 200, &params).iter().enumerate() {
            let (sol, _) = solve_zielonka(game);
            let reference = oracle_solve(game).unwrap_or_else(|_| panic!("game {i} too big"));
            assert_eq!(sol.won_even, reference.won_even, "game {i}");
            let report = verify_solution(game, &sol).unwrap();
            assert!(report.ok, "game {i}: {:?}", report.violations);
        }
    }

    #[test]
    fn distraction_events_carry_the_lost_vertices() {
        let tc = generate_two_counters(1).unwrap();
        let (_, stats) = solve_zielonka(&tc.game);
        for event in &stats.distraction_events {
            assert!(!event.vertices.is_empty());
            for &w in &event.vertices {
                assert_eq!(tc.game.priority(w), event.priority);
            }
            assert_eq!(event.player, Player::of_priority(event.priority));
        }
    }
}
