//! Generator for the N-bit Two Counters family: two interlocked binary
//! counters of N bits each, on which attractor-based solvers take an
//! exponential number of steps. Bit 0 is the highest (most significant)
//! bit; Even is the starting player.

use std::fmt;

use thiserror::Error;

use crate::game::{build_game, ParityGame, Player, VertexSpec};

/// What a vertex does inside its bit gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoleKind {
    /// `l`, the gadget input; its priority identifies the bit in traces.
    Low,
    /// `t`, the head of the bit's tangle.
    Tangle,
    /// `h`, the high-priority reward vertex.
    High,
    /// `s(j)`, selector on the reset chain.
    Selector(usize),
    /// `a(j)`, chain exit toward the own counter's bit `j`.
    PathOwn(usize),
    /// `b(j)`, chain exit toward the opponent counter's bit `j`.
    PathOpp(usize),
    /// `z`, the tail of the bit's tangle.
    Z,
}

impl fmt::Display for RoleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleKind::Low => write!(f, "l"),
            RoleKind::Tangle => write!(f, "t"),
            RoleKind::High => write!(f, "h"),
            RoleKind::Selector(j) => write!(f, "s{j}"),
            RoleKind::PathOwn(j) => write!(f, "a{j}"),
            RoleKind::PathOpp(j) => write!(f, "b{j}"),
            RoleKind::Z => write!(f, "z"),
        }
    }
}

/// Per-vertex metadata: which counter, which bit, which gadget role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitRole {
    pub counter_player: Player,
    pub bit: usize,
    pub kind: RoleKind,
}

/// A generated Two Counters game with its role metadata.
#[derive(Debug, Clone)]
pub struct TcGame {
    pub game: ParityGame,
    pub roles: Vec<BitRole>,
    pub n_bits: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("bit count must be at least 1")]
pub struct InvalidParameter;

impl TcGame {
    /// Maps a priority back to the `l` vertex carrying it, as
    /// `(counter player, bit)`. `None` for priorities of other roles.
    pub fn decode_low_priority(&self, priority: usize) -> Option<(Player, usize)> {
        decode_low_priority(self.n_bits, priority)
    }
}

/// See [`TcGame::decode_low_priority`]. The `l` priorities of an N-bit game
/// are globally unique: even ones `4..=2N+2` belong to Odd's counter, odd
/// ones `3..=2N+1` to Even's.
pub fn decode_low_priority(n_bits: usize, priority: usize) -> Option<(Player, usize)> {
    let n = n_bits;
    if priority % 2 == 0 {
        if (4..=2 * n + 2).contains(&priority) {
            return Some((Player::Odd, n - (priority - 2) / 2));
        }
    } else if (3..=2 * n + 1).contains(&priority) {
        return Some((Player::Even, n - (priority - 1) / 2));
    }
    None
}

pub fn generate_two_counters(n_bits: usize) -> Result<TcGame, InvalidParameter> {
    if n_bits == 0 {
        return Err(InvalidParameter);
    }
    let n = n_bits;

    // Bit b's block holds both gadgets of 4+3b vertices each; Even's first.
    let gadget_size = |b: usize| 4 + 3 * b;
    let bit_base = |b: usize| 3 * b * b + 5 * b;
    let gadget_base = |p: Player, b: usize| match p {
        Player::Even => bit_base(b),
        Player::Odd => bit_base(b) + gadget_size(b),
    };
    // Within a gadget: l, t, s(0), a(0), b(0), ..., z, h.
    let low = |p: Player, b: usize| gadget_base(p, b);
    let tangle = |p: Player, b: usize| gadget_base(p, b) + 1;
    let selector = |p: Player, b: usize, j: usize| gadget_base(p, b) + 2 + 3 * j;
    let z_of = |p: Player, b: usize| gadget_base(p, b) + 2 + 3 * b;
    let high = |p: Player, b: usize| gadget_base(p, b) + 3 + 3 * b;

    let mut specs = Vec::with_capacity(3 * n * n + 5 * n);
    let mut roles = Vec::with_capacity(3 * n * n + 5 * n);

    for b in 0..n {
        for p in [Player::Even, Player::Odd] {
            let opp = p.opponent();
            let prefix = match p {
                Player::Even => 'E',
                Player::Odd => 'O',
            };
            let name = |kind: RoleKind| format!("{prefix}{b}_{kind}");
            let mut push = |priority: usize, owner: Player, succs: Vec<usize>, kind: RoleKind| {
                specs.push(VertexSpec::new(priority, owner, succs).with_label(name(kind)));
                // The b(j) vertices belong to the other player's counter:
                // they are owned by the opponent and their exit edge leads
                // into the opponent's own bit, so the opponent wins them.
                let counter_player = match kind {
                    RoleKind::PathOpp(_) => opp,
                    _ => p,
                };
                roles.push(BitRole {
                    counter_player,
                    bit: b,
                    kind,
                });
            };

            let (l_pr, h_pr, t_pr) = match p {
                Player::Even => (2 * (n - b) + 1, 4 * n + 2 - 2 * b, 2),
                Player::Odd => (2 * (n - b) + 2, 4 * n + 3 - 2 * b, 1),
            };
            let chain_pr = t_pr - 1;

            push(l_pr, opp, vec![tangle(p, b)], RoleKind::Low);
            let t_exit = if b == 0 { z_of(p, b) } else { selector(p, b, 0) };
            push(t_pr, opp, vec![high(p, b), t_exit], RoleKind::Tangle);
            for j in 0..b {
                let next = if j + 1 == b {
                    z_of(p, b)
                } else {
                    selector(p, b, j + 1)
                };
                push(
                    chain_pr,
                    p,
                    vec![selector(p, b, j) + 1, selector(p, b, j) + 2],
                    RoleKind::Selector(j),
                );
                push(chain_pr, opp, vec![next, low(p, j)], RoleKind::PathOwn(j));
                push(chain_pr, opp, vec![next, low(opp, j)], RoleKind::PathOpp(j));
            }
            let mut z_succs = vec![tangle(p, b)];
            z_succs.extend((b + 1..n).map(|b2| low(opp, b2)));
            if p == Player::Odd {
                z_succs.push(low(opp, b));
            }
            push(chain_pr, p, z_succs, RoleKind::Z);
            let h_target = if b == 0 { low(p, n - 1) } else { low(p, b - 1) };
            push(h_pr, opp, vec![h_target], RoleKind::High);
        }
    }

    let game = build_game(specs).expect("generated game is always well formed");
    Ok(TcGame {
        game,
        roles,
        n_bits: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_bit_game_exactly() {
        let tc = generate_two_counters(1).unwrap();
        let g = &tc.game;
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edge_count(), 11);
        let expect: [(&str, Player, usize, &[usize]); 8] = [
            ("E0_l", Player::Odd, 3, &[1]),
            ("E0_t", Player::Odd, 2, &[3, 2]),
            ("E0_z", Player::Even, 1, &[1]),
            ("E0_h", Player::Odd, 6, &[0]),
            ("O0_l", Player::Even, 4, &[5]),
            ("O0_t", Player::Even, 1, &[7, 6]),
            ("O0_z", Player::Odd, 0, &[5, 0]),
            ("O0_h", Player::Even, 7, &[4]),
        ];
        for (v, (label, owner, priority, succs)) in expect.iter().enumerate() {
            assert_eq!(g.label(v), Some(*label), "label of {v}");
            assert_eq!(g.owner(v), *owner, "owner of {v}");
            assert_eq!(g.priority(v), *priority, "priority of {v}");
            assert_eq!(g.successors(v), *succs, "successors of {v}");
        }
    }

    #[test]
    fn size_formulas() {
        for n in 1..=8 {
            let tc = generate_two_counters(n).unwrap();
            assert_eq!(tc.game.vertex_count(), 3 * n * n + 5 * n, "vertices at N={n}");
            assert_eq!(tc.game.edge_count(), 7 * n * n + 4 * n, "edges at N={n}");
            for player in [Player::Even, Player::Odd] {
                let count = tc
                    .roles
                    .iter()
                    .filter(|r| r.counter_player == player)
                    .count();
                assert_eq!(count, (3 * n * n + 5 * n) / 2);
            }
        }
        assert_eq!(generate_two_counters(3).unwrap().game.vertex_count(), 42);
        assert_eq!(generate_two_counters(3).unwrap().game.edge_count(), 75);
        assert_eq!(generate_two_counters(10).unwrap().game.vertex_count(), 350);
    }

    #[test]
    fn zero_bits_rejected() {
        assert!(matches!(generate_two_counters(0), Err(InvalidParameter)));
    }

    #[test]
    fn three_bit_priorities() {
        let tc = generate_two_counters(3).unwrap();
        let g = &tc.game;
        let mut pairs = Vec::new();
        for (v, role) in tc.roles.iter().enumerate() {
            if role.kind == RoleKind::Low {
                let h = (0..g.vertex_count())
                    .find(|&w| {
                        tc.roles[w].kind == RoleKind::High
                            && tc.roles[w].counter_player == role.counter_player
                            && tc.roles[w].bit == role.bit
                    })
                    .unwrap();
                pairs.push((g.priority(v), g.priority(h)));
            }
        }
        pairs.sort_by(|a, b| b.cmp(a));
        assert_eq!(
            pairs,
            vec![(8, 15), (7, 14), (6, 13), (5, 12), (4, 11), (3, 10)]
        );
    }

    #[test]
    fn same_bit_z_edges_only_for_odd() {
        let tc = generate_two_counters(3).unwrap();
        let g = &tc.game;
        for (v, role) in tc.roles.iter().enumerate() {
            if role.kind != RoleKind::Z {
                continue;
            }
            let same_bit_exit = g.successors(v).iter().any(|&w| {
                tc.roles[w].kind == RoleKind::Low
                    && tc.roles[w].bit == role.bit
                    && tc.roles[w].counter_player != role.counter_player
            });
            assert_eq!(
                same_bit_exit,
                role.counter_player == Player::Odd,
                "z of {:?} bit {}",
                role.counter_player,
                role.bit
            );
        }
    }

    #[test]
    fn odd_has_n_extra_z_edges() {
        for n in [1, 4, 7] {
            let tc = generate_two_counters(n).unwrap();
            let z_out = |player| {
                tc.roles
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.kind == RoleKind::Z && r.counter_player == player)
                    .map(|(v, _)| tc.game.successors(v).len())
                    .sum::<usize>()
            };
            assert_eq!(z_out(Player::Odd), z_out(Player::Even) + n);
        }
    }

    #[test]
    fn chain_roles_and_ownership() {
        let tc = generate_two_counters(4).unwrap();
        let g = &tc.game;
        for (v, role) in tc.roles.iter().enumerate() {
            // b(j) vertices are counted with the opponent of the gadget
            // they sit in; everything else belongs to its own gadget.
            let gadget = match role.kind {
                RoleKind::PathOpp(_) => role.counter_player.opponent(),
                _ => role.counter_player,
            };
            match role.kind {
                RoleKind::Selector(j) | RoleKind::PathOwn(j) | RoleKind::PathOpp(j) => {
                    assert!(j < role.bit)
                }
                _ => {}
            }
            match role.kind {
                RoleKind::Selector(_) | RoleKind::Z => assert_eq!(g.owner(v), gadget),
                _ => assert_eq!(g.owner(v), gadget.opponent()),
            }
            let expected_label = format!(
                "{}{}_{}",
                if gadget == Player::Even { 'E' } else { 'O' },
                role.bit,
                role.kind
            );
            assert_eq!(g.label(v), Some(expected_label.as_str()));
        }
    }

    #[test]
    fn decode_low_priorities() {
        for n in 1..=6 {
            let tc = generate_two_counters(n).unwrap();
            for (v, role) in tc.roles.iter().enumerate() {
                let decoded = tc.decode_low_priority(tc.game.priority(v));
                if role.kind == RoleKind::Low {
                    assert_eq!(decoded, Some((role.counter_player, role.bit)));
                } else {
                    // h priorities sit above every l priority, the
                    // chain priorities (0..=2) below.
                    assert_eq!(decoded, None);
                }
            }
        }
    }
}
