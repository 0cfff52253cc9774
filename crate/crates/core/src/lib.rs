//! A toolkit for solving parity games with attractor-based algorithms.
//!
//! The crate provides the game model and PGSolver-format I/O, three solver
//! families (recursive, priority promotion with five reset policies, tangle
//! learning), a generator for the Two Counters worst-case family, a solution
//! verifier, a brute-force oracle for small games, and a benchmark harness
//! that records each solver's characteristic step count.

pub mod attractor;
pub mod bench;
pub mod game;
pub mod oracle;
pub mod pgsolver;
pub mod priopromo;
pub mod random;
mod scc;
pub mod tangle_learning;
pub mod twocounters;
pub mod verify;
pub mod zielonka;

pub use attractor::{attract, bottom_sccs, make_tangle, tangle_attract, Tangle, TangleStore};
pub use bench::{render_csv, render_table, run_bench, BenchError, BenchRow, SolverId};
pub use game::{
    build_game, GameError, ParityGame, Player, Solution, Strategy, VertexSet, VertexSpec,
};
pub use oracle::{oracle_solve, TooLarge};
pub use pgsolver::{parse_pgsolver, serialize_pgsolver, ParseError};
pub use priopromo::{search_dominion, solve_pp, PpStats, PromotionPolicy, RegionMap};
pub use random::{random_game, random_games, RandomGameParams};
pub use tangle_learning::{solve_tl, solve_tl_with_store, tl_search, TlMode, TlStats};
pub use twocounters::{generate_two_counters, BitRole, RoleKind, TcGame};
pub use verify::{verify_solution, ShapeMismatch, VerificationReport, ViolationKind};
pub use zielonka::{solve_zielonka, DistractionEvent, ZlkStats};
