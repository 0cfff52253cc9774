//! Independent checking of claimed solutions.
//!
//! A solution is accepted when the winning sets partition the vertices, the
//! strategies have exactly the right domains and use real edges that stay in
//! their region, each region is closed for its winner, and no cycle inside a
//! strategy-restricted region has a maximum priority of the losing parity.

use thiserror::Error;

use crate::game::{ParityGame, Player, Solution};
use crate::scc::check_cycle_parity;

/// The solution's sets or strategies are sized for a different game, or a
/// strategy points at a vertex the game does not have.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("solution does not match the game's vertices")]
pub struct ShapeMismatch;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Some vertex is in both winning sets or in neither.
    NotPartition,
    /// A strategy's domain is not exactly the winner's own vertices in its region.
    StrategyDomain,
    /// A strategy choice is not an edge of the game or leaves the region.
    StrategyEdge,
    /// The losing player can step out of the region.
    RegionNotClosed,
    /// A region contains a cycle whose maximum priority favours the loser.
    LosingCycle,
}

#[derive(Debug)]
pub struct VerificationReport {
    pub ok: bool,
    pub violations: Vec<(ViolationKind, Vec<usize>)>,
}

impl VerificationReport {
    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|(k, _)| *k == kind)
    }
}

pub fn verify_solution(
    game: &ParityGame,
    solution: &Solution,
) -> Result<VerificationReport, ShapeMismatch> {
    let n = game.vertex_count();
    if solution.won_even.universe() != n
        || solution.won_odd.universe() != n
        || solution.strategy_even.universe() != n
        || solution.strategy_odd.universe() != n
        || solution.strategy_even.iter().any(|(_, t)| t >= n)
        || solution.strategy_odd.iter().any(|(_, t)| t >= n)
    {
        return Err(ShapeMismatch);
    }

    let mut violations = Vec::new();

    let misplaced: Vec<usize> = (0..n)
        .filter(|&v| solution.won_even.contains(v) == solution.won_odd.contains(v))
        .collect();
    if !misplaced.is_empty() {
        violations.push((ViolationKind::NotPartition, misplaced));
    }

    for player in [Player::Even, Player::Odd] {
        let region = solution.winning_set(player);
        let strategy = solution.strategy(player);

        let mut wrong_domain: Vec<usize> = strategy
            .iter()
            .map(|(v, _)| v)
            .filter(|&v| !(region.contains(v) && game.owner(v) == player))
            .collect();
        wrong_domain.extend(
            region
                .iter()
                .filter(|&v| game.owner(v) == player && strategy.get(v).is_none()),
        );
        wrong_domain.sort_unstable();
        if !wrong_domain.is_empty() {
            violations.push((ViolationKind::StrategyDomain, wrong_domain));
        }

        let bad_edges: Vec<usize> = strategy
            .iter()
            .filter(|&(v, t)| !game.successors(v).contains(&t) || !region.contains(t))
            .map(|(v, _)| v)
            .collect();
        if !bad_edges.is_empty() {
            violations.push((ViolationKind::StrategyEdge, bad_edges));
        }

        let open: Vec<usize> = region
            .iter()
            .filter(|&v| {
                if game.owner(v) == player {
                    false
                } else {
                    game.successors(v).iter().any(|&w| !region.contains(w))
                }
            })
            .collect();
        if !open.is_empty() {
            violations.push((ViolationKind::RegionNotClosed, open));
        }

        let members: Vec<usize> = region.iter().collect();
        let mut restricted = |v: usize, out: &mut Vec<usize>| {
            if game.owner(v) == player {
                if let Some(t) = strategy.get(v) {
                    if region.contains(t) {
                        out.push(t);
                    }
                }
            } else {
                out.extend(game.successors(v).iter().filter(|&&w| region.contains(w)));
            }
        };
        if let Err(cycle) = check_cycle_parity(
            n,
            members,
            &mut restricted,
            &|v| game.priority(v),
            player,
        ) {
            violations.push((ViolationKind::LosingCycle, cycle));
        }
    }

    Ok(VerificationReport { ok: violations.is_empty(), violations })
}
