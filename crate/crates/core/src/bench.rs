//! Read and workspace counts over grids of workspace sizes and orders.

use std::fmt::Write;
use std::time::Instant;

use crate::error::Result;
use crate::geometry::PointSet;
use crate::memory::{budget_constant, OutputSink, ReadOnlyArena, WorkLedger};
use crate::orderk::{pipeline_run, PipelineConfig};
use crate::run::RunMode;
use crate::scan::{enumerate_diagram, Mode};
use crate::tradeoff::run_tradeoff;

/// One measured run. `s = 0` stands for the constant-workspace scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub n: usize,
    pub s: usize,
    pub k: usize,
    pub reads: u64,
    pub peak_words: usize,
    pub wall_ns: u128,
}

/// Runs one configuration with an observing ledger and discarded output.
pub fn measure(points: &PointSet, mode: RunMode, s: usize, k: usize, seed: u64) -> Result<BenchRow> {
    let arena = ReadOnlyArena::new(points.clone());
    let ledger = WorkLedger::for_workspace(s, false);
    let mut sink = OutputSink::discard();
    let start = Instant::now();
    let k = match mode {
        RunMode::Nvd | RunMode::Fvd => {
            let m = if mode == RunMode::Nvd { Mode::Nearest } else { Mode::Farthest };
            if s == 0 {
                enumerate_diagram(&arena, &ledger, m, &mut sink)?;
            } else {
                run_tradeoff(&arena, &ledger, m, s, &mut sink)?;
            }
            m.order(points.len())
        }
        RunMode::Order => {
            pipeline_run(&arena, &ledger, &PipelineConfig::new(k, s, seed)?, &mut sink)?;
            k
        }
    };
    let wall_ns = start.elapsed().as_nanos();
    Ok(BenchRow { n: points.len(), s, k, reads: arena.read_count(), peak_words: ledger.peak(), wall_ns })
}

/// Every combination of `s_list` and `k_list` (orders matter only in
/// order mode), `repeats` times each.
pub fn bench_grid(points: &PointSet, mode: RunMode, s_list: &[usize], k_list: &[usize], repeats: usize, seed: u64) -> Result<Vec<BenchRow>> {
    let ks: Vec<usize> = if mode == RunMode::Order { k_list.to_vec() } else { vec![0] };
    let mut rows = Vec::new();
    for &s in s_list {
        for &k in &ks {
            for _ in 0..repeats.max(1) {
                rows.push(measure(points, mode, s, k, seed)?);
            }
        }
    }
    Ok(rows)
}

/// CSV with a comment line stating the cost model.
pub fn format_csv(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# reads = site accesses (one per predicate argument); budget = {}·s words", budget_constant());
    out.push_str("n,s,K,reads,peak_words,wall_ns\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{},{}", r.n, r.s, r.k, r.reads, r.peak_words, r.wall_ns);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_general_position;

    #[test]
    fn repeats_agree_on_counts() {
        let p = random_general_position(40, 2);
        let rows = bench_grid(&p, RunMode::Nvd, &[0, 4], &[1], 3, 0).unwrap();
        assert_eq!(rows.len(), 6);
        for w in rows.chunks(3) {
            assert!(w.iter().all(|r| (r.reads, r.peak_words) == (w[0].reads, w[0].peak_words)));
        }
        let csv = format_csv(&rows);
        assert_eq!(csv.lines().count(), 8);
        assert!(csv.lines().nth(1).unwrap().starts_with("n,s,K"));
    }

    #[test]
    fn order_rows_carry_their_order() {
        let p = random_general_position(10, 2);
        let rows = bench_grid(&p, RunMode::Order, &[16], &[1, 2], 1, 0).unwrap();
        assert_eq!(rows.iter().map(|r| r.k).collect::<Vec<_>>(), vec![1, 2]);
    }
}
