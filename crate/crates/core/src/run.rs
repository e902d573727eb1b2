//! One run of a diagram algorithm with its counters.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{validate_general_position, PointSet};
use crate::memory::{OutputSink, ReadOnlyArena, WorkLedger};
use crate::orderk::{pipeline_run, PipelineConfig};
use crate::scan::{enumerate_diagram, Mode};
use crate::tradeoff::run_tradeoff;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    Nvd,
    Fvd,
    Order,
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<RunMode> {
        match s {
            "nvd" => Ok(RunMode::Nvd),
            "fvd" => Ok(RunMode::Fvd),
            "order" => Ok(RunMode::Order),
            _ => Err(Error::Config(format!("unknown mode `{s}`"))),
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunMode::Nvd => "nvd",
            RunMode::Fvd => "fvd",
            RunMode::Order => "order",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub mode: RunMode,
    /// Highest order, for [`RunMode::Order`].
    pub max_k: Option<usize>,
    /// Workspace parameter; `None` selects the constant-workspace scan.
    pub s: Option<usize>,
    pub enforce: bool,
    pub seed: u64,
}

impl RunOptions {
    pub fn new(mode: RunMode) -> RunOptions {
        RunOptions { mode, max_k: None, s: None, enforce: false, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub n: usize,
    pub mode: RunMode,
    pub s: Option<usize>,
    pub max_k: Option<usize>,
    pub reads: u64,
    pub peak_words: usize,
    pub budget_words: usize,
    pub emitted: BTreeMap<usize, u64>,
    pub wall_ns: u128,
}

impl RunReport {
    /// One line of `key=value` fields; wall time only when asked for, so
    /// that reports of identical runs compare equal byte for byte.
    pub fn render(&self, timing: bool) -> String {
        let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
        let emitted: Vec<String> = self.emitted.iter().map(|(k, c)| format!("{k}:{c}")).collect();
        let mut line = format!(
            "n={} mode={} s={} K={} reads={} peak_words={} budget_words={} emitted={}",
            self.n,
            self.mode,
            opt(self.s),
            opt(self.max_k),
            self.reads,
            self.peak_words,
            self.budget_words,
            emitted.join(",")
        );
        if timing {
            line.push_str(&format!(" wall_ns={}", self.wall_ns));
        }
        line
    }
}

/// Runs the algorithm selected by `opts` over `points`, writing records to
/// `sink`. The input is checked for general position first.
pub fn execute(points: PointSet, opts: &RunOptions, sink: &mut OutputSink) -> Result<RunReport> {
    validate_general_position(points.sites())?;
    let n = points.len();
    let arena = ReadOnlyArena::new(points);
    let ledger = WorkLedger::for_workspace(opts.s.unwrap_or(1), opts.enforce);
    let start = Instant::now();
    match (opts.mode, opts.s) {
        (RunMode::Nvd | RunMode::Fvd, s) => {
            let mode = if opts.mode == RunMode::Nvd { Mode::Nearest } else { Mode::Farthest };
            match s {
                None => enumerate_diagram(&arena, &ledger, mode, sink)?,
                Some(s) => {
                    run_tradeoff(&arena, &ledger, mode, s, sink)?;
                }
            }
        }
        (RunMode::Order, None) => return Err(Error::Config("order mode needs a workspace size".into())),
        (RunMode::Order, Some(s)) => {
            let config = PipelineConfig::new(opts.max_k.unwrap_or(1), s, opts.seed)?;
            pipeline_run(&arena, &ledger, &config, sink)?;
        }
    }
    sink.close()?;
    Ok(RunReport {
        n,
        mode: opts.mode,
        s: opts.s,
        max_k: (opts.mode == RunMode::Order).then(|| opts.max_k.unwrap_or(1)),
        reads: arena.read_count(),
        peak_words: ledger.peak(),
        budget_words: ledger.budget(),
        emitted: sink.emitted_per_order().clone(),
        wall_ns: start.elapsed().as_nanos(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::GeometryError;
    use crate::gen::random_general_position;

    #[test]
    fn triangle_nvd_has_three_records() {
        let p = PointSet::from_ints(&[(0, 0), (8, 0), (0, 6)]);
        let mut opts = RunOptions::new(RunMode::Nvd);
        opts.s = Some(8);
        opts.enforce = true;
        let mut sink = OutputSink::memory();
        let r = execute(p, &opts, &mut sink).unwrap();
        assert_eq!(sink.into_records().len(), 3);
        assert_eq!(r.emitted.get(&1), Some(&3));
        assert!(!r.render(false).contains("wall_ns"));
        assert!(r.render(true).contains("wall_ns="));
    }

    #[test]
    fn reports_repeat() {
        let mut opts = RunOptions::new(RunMode::Order);
        opts.s = Some(36);
        opts.max_k = Some(3);
        let a = execute(random_general_position(12, 1), &opts, &mut OutputSink::discard()).unwrap();
        let b = execute(random_general_position(12, 1), &opts, &mut OutputSink::discard()).unwrap();
        assert_eq!(a.render(false), b.render(false));
    }

    #[test]
    fn errors_by_kind() {
        let square = PointSet::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let err = execute(square, &RunOptions::new(RunMode::Nvd), &mut OutputSink::discard()).unwrap_err();
        assert!(matches!(err, Error::Geometry(GeometryError::CocircularQuadruple(0, 1, 2, 3))));
        let mut opts = RunOptions::new(RunMode::Order);
        opts.s = Some(9);
        opts.max_k = Some(10);
        let err = execute(random_general_position(12, 1), &opts, &mut OutputSink::discard()).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert_eq!("fvd".parse::<RunMode>().unwrap(), RunMode::Fvd);
        assert!("x".parse::<RunMode>().is_err());
    }
}
