//! Step-count measurements on the counter games.
//!
//! Each solver family exposes one statistic that tracks its running time:
//! recursive calls, promotions, or learned tangles. The bench grid solves
//! `tc(N)` for every requested solver and bit width, verifies each solution,
//! and compares the statistic against the known measurements where one is
//! recorded.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use thiserror::Error;

use crate::game::{ParityGame, Solution};
use crate::priopromo::{solve_pp, PromotionPolicy};
use crate::tangle_learning::{solve_tl, TlMode};
use crate::twocounters::generate_two_counters;
use crate::verify::verify_solution;
use crate::zielonka::solve_zielonka;

/// Every solver variant the toolkit ships.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverId {
    Zlk,
    Pp,
    PpPlus,
    Rr,
    Dp,
    Rrdp,
    Tl,
    Atl,
}

impl SolverId {
    pub const ALL: [SolverId; 8] = [
        SolverId::Zlk,
        SolverId::Pp,
        SolverId::PpPlus,
        SolverId::Rr,
        SolverId::Dp,
        SolverId::Rrdp,
        SolverId::Tl,
        SolverId::Atl,
    ];

    /// The seven variants with recorded counter-game measurements, in the
    /// order the measurements are reported.
    pub const MEASURED: [SolverId; 7] = [
        SolverId::Zlk,
        SolverId::Pp,
        SolverId::Dp,
        SolverId::Rr,
        SolverId::Rrdp,
        SolverId::Tl,
        SolverId::Atl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverId::Zlk => "zlk",
            SolverId::Pp => "pp",
            SolverId::PpPlus => "pp+",
            SolverId::Rr => "rr",
            SolverId::Dp => "dp",
            SolverId::Rrdp => "rrdp",
            SolverId::Tl => "tl",
            SolverId::Atl => "atl",
        }
    }

    pub fn parse(name: &str) -> Option<SolverId> {
        SolverId::ALL.iter().copied().find(|s| s.name() == name)
    }

    /// The statistic this solver counts.
    pub fn statistic(self) -> &'static str {
        match self {
            SolverId::Zlk => "calls",
            SolverId::Pp | SolverId::PpPlus | SolverId::Rr | SolverId::Dp | SolverId::Rrdp => {
                "promotions"
            }
            SolverId::Tl | SolverId::Atl => "tangles",
        }
    }

    /// Solve the game and report the solution together with the statistic.
    pub fn solve(self, game: &ParityGame) -> (Solution, u64) {
        match self {
            SolverId::Zlk => {
                let (solution, stats) = solve_zielonka(game);
                (solution, stats.recursive_calls)
            }
            SolverId::Pp => pp_value(game, PromotionPolicy::Pp),
            SolverId::PpPlus => pp_value(game, PromotionPolicy::PpPlus),
            SolverId::Rr => pp_value(game, PromotionPolicy::Rr),
            SolverId::Dp => pp_value(game, PromotionPolicy::Dp),
            SolverId::Rrdp => pp_value(game, PromotionPolicy::Rrdp),
            SolverId::Tl => tl_value(game, TlMode::Tl),
            SolverId::Atl => tl_value(game, TlMode::Atl),
        }
    }

    /// The recorded statistic on the `bits`-wide counter game, where a
    /// measurement exists. The plain promotion policy with its own-region
    /// resets has no published column.
    pub fn expected(self, bits: usize) -> Option<u64> {
        let row = EXPECTED.iter().find(|row| row.0 == bits)?;
        match self {
            SolverId::Zlk => Some(row.1),
            SolverId::Pp => Some(row.2),
            SolverId::Dp => Some(row.3),
            SolverId::Rr | SolverId::Rrdp => Some(row.4),
            SolverId::Tl | SolverId::Atl => Some(row.5),
            SolverId::PpPlus => None,
        }
    }
}

fn pp_value(game: &ParityGame, policy: PromotionPolicy) -> (Solution, u64) {
    let (solution, stats) = solve_pp(game, policy);
    (solution, stats.promotions)
}

fn tl_value(game: &ParityGame, mode: TlMode) -> (Solution, u64) {
    let (solution, stats) = solve_tl(game, mode);
    (solution, stats.open_tangles)
}

/// Known step counts per bit width: (bits, zlk calls, pp promotions,
/// dp promotions, rr/rrdp promotions, tl/atl tangles).
const EXPECTED: [(usize, u64, u64, u64, u64, u64); 12] = [
    (1, 8, 2, 2, 2, 2),
    (2, 21, 9, 7, 6, 6),
    (3, 45, 23, 18, 14, 14),
    (4, 91, 52, 43, 30, 30),
    (5, 181, 112, 97, 62, 62),
    (6, 359, 235, 210, 126, 126),
    (7, 713, 485, 442, 254, 254),
    (8, 1419, 990, 913, 510, 510),
    (9, 2829, 2006, 1863, 1022, 1022),
    (10, 5647, 4045, 3772, 2046, 2046),
    (15, 180_249, 130_961, 122_742, 65_534, 65_534),
    (20, 5_767_203, 4_194_108, 3_931_927, 2_097_150, 2_097_150),
];

/// One measured grid cell.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub solver: SolverId,
    pub bits: usize,
    pub statistic: &'static str,
    pub value: u64,
    pub seconds: f64,
    pub expected: Option<u64>,
}

impl BenchRow {
    /// Whether the measured value contradicts a recorded one.
    pub fn mismatch(&self) -> bool {
        self.expected.is_some_and(|e| e != self.value)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("cannot generate a {0}-bit counter game")]
    Generate(usize),
    #[error("{solver} solved tc({bits}) but the solution fails verification")]
    Verification { solver: &'static str, bits: usize },
}

/// Solve every (solver, bits) pair of the grid, timing each solve and
/// verifying each solution. Cells are independent and run on all available
/// cores; the returned rows are nevertheless in grid order, solvers outer
/// and bit widths inner. A verification failure aborts the run.
pub fn run_bench(solvers: &[SolverId], bits: &[usize]) -> Result<Vec<BenchRow>, BenchError> {
    let tasks: Vec<(SolverId, usize)> = solvers
        .iter()
        .flat_map(|&s| bits.iter().map(move |&n| (s, n)))
        .collect();
    let slots: Vec<Mutex<Option<Result<BenchRow, BenchError>>>> =
        tasks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(tasks.len().max(1));

    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(solver, bits)) = tasks.get(i) else {
                    break;
                };
                *slots[i].lock().unwrap() = Some(bench_cell(solver, bits));
            });
        }
    });

    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every cell was measured"))
        .collect()
}

fn bench_cell(solver: SolverId, bits: usize) -> Result<BenchRow, BenchError> {
    let tc = generate_two_counters(bits).map_err(|_| BenchError::Generate(bits))?;
    let start = Instant::now();
    let (solution, value) = solver.solve(&tc.game);
    let seconds = start.elapsed().as_secs_f64();
    let report = verify_solution(&tc.game, &solution).map_err(|_| BenchError::Verification {
        solver: solver.name(),
        bits,
    })?;
    if !report.ok {
        return Err(BenchError::Verification {
            solver: solver.name(),
            bits,
        });
    }
    Ok(BenchRow {
        solver,
        bits,
        statistic: solver.statistic(),
        value,
        seconds,
        expected: solver.expected(bits),
    })
}

/// The rows as CSV with a header line; the expected column is empty where
/// no measurement is recorded.
pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("solver,bits,statistic,value,seconds,expected\n");
    for row in rows {
        let expected = row.expected.map(|e| e.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{:.6},{}\n",
            row.solver.name(),
            row.bits,
            row.statistic,
            row.value,
            row.seconds,
            expected
        ));
    }
    out
}

/// The rows as an aligned text table. The last column says `ok` when the
/// measurement matches the recorded value, `MISMATCH` when it contradicts
/// it, and `-` when none is recorded.
pub fn render_table(rows: &[BenchRow]) -> String {
    let mut cells: Vec<[String; 6]> = vec![[
        "solver".into(),
        "bits".into(),
        "statistic".into(),
        "value".into(),
        "time".into(),
        "expected".into(),
    ]];
    for row in rows {
        let expected = match row.expected {
            Some(e) if e == row.value => format!("{e} ok"),
            Some(e) => format!("{e} MISMATCH"),
            None => "-".into(),
        };
        cells.push([
            row.solver.name().into(),
            row.bits.to_string(),
            row.statistic.into(),
            row.value.to_string(),
            format!("{:.3}s", row.seconds),
            expected,
        ]);
    }

    let mut widths = [0usize; 6];
    for row in &cells {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for row in &cells {
        let mut line = String::new();
        for (i, (cell, width)) in row.iter().zip(widths).enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            // Right-align the numeric columns.
            if matches!(i, 1 | 3) {
                line.push_str(&format!("{cell:>width$}"));
            } else {
                line.push_str(&format!("{cell:<width$}"));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_names_round_trip() {
        for s in SolverId::ALL {
            assert_eq!(SolverId::parse(s.name()), Some(s));
        }
        assert_eq!(SolverId::parse("spm"), None);
    }

    #[test]
    fn grid_statistics_match_the_recorded_values() {
        let bits: Vec<usize> = (1..=6).collect();
        let rows = run_bench(&SolverId::MEASURED, &bits).unwrap();
        assert_eq!(rows.len(), 7 * 6);
        for row in &rows {
            assert_eq!(
                row.expected,
                Some(row.value),
                "{} on tc({}) counted {} {}",
                row.solver.name(),
                row.bits,
                row.value,
                row.statistic
            );
        }
        // Grid order: solvers outer, bits inner.
        assert_eq!(rows[0].solver, SolverId::Zlk);
        assert_eq!(rows[5].bits, 6);
        assert_eq!(rows[6].solver, SolverId::Pp);
    }

    #[test]
    fn reruns_agree_on_everything_but_time() {
        let bits = [1, 2, 3];
        let key = |rows: &[BenchRow]| {
            rows.iter()
                .map(|r| (r.solver, r.bits, r.statistic, r.value, r.expected))
                .collect::<Vec<_>>()
        };
        let first = run_bench(&SolverId::ALL, &bits).unwrap();
        let second = run_bench(&SolverId::ALL, &bits).unwrap();
        assert_eq!(key(&first), key(&second));
    }

    #[test]
    fn unrecorded_cells_have_no_expectation() {
        assert_eq!(SolverId::PpPlus.expected(3), None);
        assert_eq!(SolverId::Zlk.expected(11), None);
        assert_eq!(SolverId::Tl.expected(15), Some(65_534));
        assert_eq!(SolverId::Zlk.expected(20), Some(5_767_203));
    }

    #[test]
    fn renderings_cover_every_row() {
        let rows = run_bench(&[SolverId::Rr, SolverId::PpPlus], &[1, 2]).unwrap();
        let csv = render_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "solver,bits,statistic,value,seconds,expected");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("rr,1,promotions,2,"));
        assert!(lines[1].ends_with(",2"));
        assert!(lines[3].ends_with(","), "pp+ has no expected value");

        let table = render_table(&rows);
        assert_eq!(table.lines().count(), 5);
        assert!(table.contains("2 ok"));
        assert!(table.contains('-'));
        assert!(!table.contains("MISMATCH"));
    }

    #[test]
    fn a_wrong_solution_is_fatal() {
        // A solver that cheats by swapping the winners would fail
        // verification; simulate by checking the error shape directly.
        let err = BenchError::Verification {
            solver: "zlk",
            bits: 3,
        };
        assert_eq!(
            err.to_string(),
            "zlk solved tc(3) but the solution fails verification"
        );
    }
}
