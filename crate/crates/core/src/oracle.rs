//! Exhaustive ground truth for small games.
//!
//! Fixing one player's positional strategy leaves a one-player game in which
//! the opponent wins exactly the vertices from which they can reach a cycle
//! whose maximum priority has the opponent's parity. Enumerating every
//! positional strategy therefore yields each player's full winning set, and
//! by memoryless determinacy a single best strategy already wins all of it.

use std::collections::VecDeque;

use thiserror::Error;

use crate::game::{ParityGame, Player, Solution, Strategy, VertexSet};
use crate::scc::strongly_connected_components;

const MAX_COMBINATIONS: u64 = 1_000_000;

/// The number of positional strategies to enumerate exceeds the brute-force
/// budget of one million per player.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("too many positional strategies to enumerate")]
pub struct TooLarge;

pub fn oracle_solve(game: &ParityGame) -> Result<Solution, TooLarge> {
    let (won_even, strategy_even) = best_for(game, Player::Even)?;
    let (won_odd, strategy_odd) = best_for(game, Player::Odd)?;
    assert!(
        won_even.is_disjoint(&won_odd)
            && won_even.len() + won_odd.len() == game.vertex_count(),
        "winning sets must partition the game"
    );
    Ok(Solution { won_even, won_odd, strategy_even, strategy_odd })
}

/// Enumerates all of `player`'s positional strategies and returns the union
/// of the vertex sets they win, with the best single strategy as witness.
fn best_for(game: &ParityGame, player: Player) -> Result<(VertexSet, Strategy), TooLarge> {
    let n = game.vertex_count();
    let owned: Vec<usize> = (0..n).filter(|&v| game.owner(v) == player).collect();
    let mut combinations: u64 = 1;
    for &v in &owned {
        combinations = combinations.saturating_mul(game.successors(v).len() as u64);
        if combinations > MAX_COMBINATIONS {
            return Err(TooLarge);
        }
    }

    let mut choice = vec![0usize; owned.len()];
    let mut sigma = Strategy::new(n);
    let mut union = VertexSet::new(n);
    let mut best: Option<(VertexSet, Strategy)> = None;
    'all: loop {
        for (i, &v) in owned.iter().enumerate() {
            sigma.set(v, game.successors(v)[choice[i]]);
        }
        let mut winning = VertexSet::full(n);
        winning.difference_with(&opponent_wins(game, player, &sigma));
        union.union_with(&winning);
        if best.as_ref().map_or(true, |(w, _)| winning.len() > w.len()) {
            best = Some((winning, sigma.clone()));
        }

        let mut i = 0;
        loop {
            if i == owned.len() {
                break 'all;
            }
            choice[i] += 1;
            if choice[i] < game.successors(owned[i]).len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }

    let (winning, sigma) = best.expect("at least one strategy was tried");
    assert!(winning == union, "one positional strategy must win the whole set");
    let mut strategy = Strategy::new(n);
    for v in winning.iter() {
        if game.owner(v) == player {
            strategy.set(v, sigma.get(v).expect("owned vertices always have a choice"));
        }
    }
    Ok((winning, strategy))
}

/// In the one-player game left by fixing `sigma` for `player`, the vertices
/// from which the opponent can reach a cycle with their parity on top.
fn opponent_wins(game: &ParityGame, player: Player, sigma: &Strategy) -> VertexSet {
    let n = game.vertex_count();
    let opponent = player.opponent();
    let induced = |v: usize, out: &mut Vec<usize>| {
        if game.owner(v) == player {
            out.push(sigma.get(v).expect("fixed strategy covers all owned vertices"));
        } else {
            out.extend(game.successors(v));
        }
    };

    let mut won = VertexSet::new(n);
    for u in 0..n {
        let cap = game.priority(u);
        if !opponent.wins_priority(cap) {
            continue;
        }
        // A cycle through u with maximum priority exactly pr(u) exists iff
        // u's component in the subgraph capped at pr(u) is nontrivial.
        let vertices: Vec<usize> = (0..n).filter(|&v| game.priority(v) <= cap).collect();
        let mut capped = |v: usize, out: &mut Vec<usize>| {
            let mut raw = Vec::new();
            induced(v, &mut raw);
            out.extend(raw.into_iter().filter(|&w| game.priority(w) <= cap));
        };
        for comp in strongly_connected_components(n, &vertices, &mut capped) {
            if comp.binary_search(&u).is_err() {
                continue;
            }
            let mut out = Vec::new();
            capped(u, &mut out);
            if comp.len() > 1 || out.contains(&u) {
                for &w in &comp {
                    won.insert(w);
                }
            }
        }
    }

    // Everything that can steer into those cycles is also won.
    let mut queue: VecDeque<usize> = won.iter().collect();
    while let Some(v) = queue.pop_front() {
        for &u in game.predecessors(v) {
            if won.contains(u) {
                continue;
            }
            let steps_in = if game.owner(u) == player { sigma.get(u) == Some(v) } else { true };
            if steps_in {
                won.insert(u);
                queue.push_back(u);
            }
        }
    }
    won
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, VertexSpec};
    use crate::random::{random_games, RandomGameParams};
    use crate::twocounters::generate_two_counters;
    use crate::verify::verify_solution;
    use Player::{Even, Odd};

    fn v(priority: usize, owner: Player, successors: Vec<usize>) -> VertexSpec {
        VertexSpec::new(priority, owner, successors)
    }

    #[test]
    fn single_odd_self_loop() {
        let g = build_game(vec![v(1, Odd, vec![0])]).unwrap();
        let sol = oracle_solve(&g).unwrap();
        assert!(sol.won_odd.contains(0) && sol.won_even.is_empty());
        assert_eq!(sol.strategy_odd.get(0), Some(0));
    }

    #[test]
    fn even_avoids_the_distraction() {
        // b can chase the high even priority behind a — and lose the d-e
        // cycle — or settle for the small even cycle through c and win.
        let g = build_game(vec![
            v(4, Odd, vec![3]),    // a
            v(0, Even, vec![0, 2]), // b
            v(2, Odd, vec![1, 2]), // c
            v(1, Even, vec![4, 3]), // d
            v(0, Odd, vec![3, 5]), // e
            v(5, Even, vec![2]),   // f
        ])
        .unwrap();
        let sol = oracle_solve(&g).unwrap();
        assert_eq!(sol.won_even.iter().collect::<Vec<_>>(), vec![1, 2, 5]);
        assert_eq!(sol.won_odd.iter().collect::<Vec<_>>(), vec![0, 3, 4]);
        assert!(verify_solution(&g, &sol).unwrap().ok);
    }

    #[test]
    fn one_bit_counters_split_evenly() {
        let tc = generate_two_counters(1).unwrap();
        let sol = oracle_solve(&tc.game).unwrap();
        assert_eq!(sol.won_even.iter().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(sol.won_odd.iter().collect::<Vec<_>>(), vec![4, 5, 6, 7]);
        assert!(verify_solution(&tc.game, &sol).unwrap().ok);
    }

    #[test]
    fn two_bit_counters_split_evenly() {
        let tc = generate_two_counters(2).unwrap();
        let sol = oracle_solve(&tc.game).unwrap();
        let even_counter: Vec<usize> = (0..tc.game.vertex_count())
            .filter(|&v| tc.roles[v].counter_player == Even)
            .collect();
        assert_eq!(sol.won_even.iter().collect::<Vec<_>>(), even_counter);
        assert!(verify_solution(&tc.game, &sol).unwrap().ok);
    }

    #[test]
    fn oversized_games_are_rejected() {
        // Twenty Even vertices with two choices each: 2^20 strategies.
        let specs = (0..20)
            .map(|i| v(0, Even, vec![i, (i + 1) % 20]))
            .collect();
        let g = build_game(specs).unwrap();
        assert_eq!(oracle_solve(&g).unwrap_err(), TooLarge);
    }

    #[test]
    fn random_solutions_always_verify() {
        let params = RandomGameParams::default();
        for (i, game) in random_games(23, 60, &params).iter().enumerate() {
            let sol = oracle_solve(game).unwrap_or_else(|_| panic!("game {i} too large"));
            let report = verify_solution(game, &sol).unwrap();
            assert!(report.ok, "game {i}: {:?}", report.violations);
        }
    }
}
