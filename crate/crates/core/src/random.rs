//! Seeded random games for cross-validating solvers against the oracle.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::game::{build_game, ParityGame, Player, VertexSpec};

pub struct RandomGameParams {
    pub max_vertices: usize,
    pub max_priority: usize,
    pub max_out_degree: usize,
}

impl Default for RandomGameParams {
    fn default() -> Self {
        RandomGameParams { max_vertices: 8, max_priority: 6, max_out_degree: 3 }
    }
}

/// Draws a game with uniform owners and priorities and 1..=max_out_degree
/// distinct successors per vertex, so every game builds cleanly.
pub fn random_game(rng: &mut impl Rng, params: &RandomGameParams) -> ParityGame {
    let n = rng.gen_range(1..=params.max_vertices);
    let specs = (0..n)
        .map(|_| {
            let owner = if rng.gen() { Player::Even } else { Player::Odd };
            let priority = rng.gen_range(0..=params.max_priority);
            let degree = rng.gen_range(1..=params.max_out_degree.min(n));
            let successors = rand::seq::index::sample(rng, n, degree).into_vec();
            VertexSpec::new(priority, owner, successors)
        })
        .collect();
    build_game(specs).expect("random games are well formed by construction")
}

/// A reproducible corpus: the same seed always yields the same games.
pub fn random_games(seed: u64, count: usize, params: &RandomGameParams) -> Vec<ParityGame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_game(&mut rng, params)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_corpus() {
        let params = RandomGameParams::default();
        let a = random_games(11, 40, &params);
        let b = random_games(11, 40, &params);
        assert_eq!(a, b);
        let c = random_games(12, 40, &params);
        assert_ne!(a, c);
    }

    #[test]
    fn drawn_games_respect_the_bounds() {
        let params = RandomGameParams::default();
        for game in random_games(7, 200, &params) {
            assert!(game.vertex_count() >= 1 && game.vertex_count() <= 8);
            for v in 0..game.vertex_count() {
                assert!(game.priority(v) <= 6);
                let d = game.successors(v).len();
                assert!((1..=3).contains(&d));
            }
        }
    }
}
