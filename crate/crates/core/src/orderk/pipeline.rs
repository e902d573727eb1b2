//! Orders 1..K in one run. Each order has a producer that pulls half-edges
//! of the order below through a bounded buffer; in stage k only order k
//! writes, and the big cells of order k + 1 are found along the way.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::memory::{halfedge_words, Charge, OutputSink, ReadOnlyArena, WorkLedger};
use crate::scan::Mode;
use crate::tradeoff::{bigbig_edges, phase1_find_big, reports_small, BigCellTable1, CellRounds};

use super::halfedge::HalfEdge;
use super::lemma6::{bigbig_halfedges, find_big_k, phase2_reports, BigCellTableK, OrderRounds};

/// Parameters of a pipelined run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub max_k: usize,
    pub s: usize,
    /// Seeds randomized sub-builders; the current builders are deterministic.
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(max_k: usize, s: usize, seed: u64) -> Result<PipelineConfig> {
        if max_k == 0 {
            return Err(Error::Config("max order must be at least 1".into()));
        }
        if max_k.saturating_mul(max_k) > s {
            return Err(Error::Config(format!("max order {max_k} needs a workspace of at least {}", max_k * max_k)));
        }
        Ok(PipelineConfig { max_k, s, seed })
    }

    /// The per-order window `max(1, ⌊s / K²⌋)`.
    pub fn s_prime(&self) -> usize {
        (self.s / (self.max_k * self.max_k)).max(1)
    }

    fn check_sites(&self, n: usize) -> Result<()> {
        if self.max_k >= n {
            return Err(Error::Config(format!("max order {} needs more than {} sites", self.max_k, n)));
        }
        Ok(())
    }
}

/// Pending half-edges of one order: refilled below `low`, never above `cap`.
pub struct EdgeBuffer<'l> {
    queue: VecDeque<HalfEdge>,
    low: usize,
    cap: usize,
    _charge: Charge<'l>,
}

impl<'l> EdgeBuffer<'l> {
    pub fn new(ledger: &'l WorkLedger, k: usize, s_prime: usize) -> Result<EdgeBuffer<'l>> {
        let low = s_prime.max(1);
        let cap = 3 * low;
        let charge = ledger.charge(cap * halfedge_words(k))?;
        Ok(EdgeBuffer { queue: VecDeque::with_capacity(cap), low, cap, _charge: charge })
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn needs_refill(&self) -> bool {
        self.queue.len() < self.low
    }

    pub fn push(&mut self, e: HalfEdge) -> Result<()> {
        if self.queue.len() >= self.cap {
            return Err(Error::Inconsistent(format!("edge buffer over its capacity {}", self.cap)));
        }
        self.queue.push_back(e);
        Ok(())
    }

    pub fn pop(&mut self) -> Option<HalfEdge> {
        self.queue.pop_front()
    }
}

/// Where one order currently gets its half-edges from.
enum Producer<'a> {
    /// Phase 2 of the nearest-site diagram.
    First { rounds: CellRounds<'a>, table: &'a BigCellTable1 },
    /// Phase 2 of a higher order, fed by the level below.
    Higher { rounds: OrderRounds<'a>, table: &'a BigCellTableK<'a> },
    /// Phase 3, handed out a chunk at a time.
    Pairs { edges: VecDeque<HalfEdge>, _charge: Charge<'a> },
    Done,
}

struct Level<'a> {
    k: usize,
    s: usize,
    arena: &'a ReadOnlyArena,
    ledger: &'a WorkLedger,
    producer: Producer<'a>,
    buffer: EdgeBuffer<'a>,
}

impl<'a> Level<'a> {
    fn first(arena: &'a ReadOnlyArena, ledger: &'a WorkLedger, s: usize, table: &'a BigCellTable1) -> Result<Level<'a>> {
        let rounds = CellRounds::new(arena, ledger, Mode::Nearest, s)?;
        let buffer = EdgeBuffer::new(ledger, 1, s)?;
        Ok(Level { k: 1, s, arena, ledger, producer: Producer::First { rounds, table }, buffer })
    }

    fn higher(arena: &'a ReadOnlyArena, ledger: &'a WorkLedger, s: usize, table: &'a BigCellTableK<'a>) -> Result<Level<'a>> {
        let k = table.order();
        let rounds = OrderRounds::new(arena, ledger, k, s)?;
        let buffer = EdgeBuffer::new(ledger, k, s)?;
        Ok(Level { k, s, arena, ledger, producer: Producer::Higher { rounds, table }, buffer })
    }

    fn pairs(&self, edges: Vec<HalfEdge>) -> Result<Producer<'a>> {
        let charge = self.ledger.charge(edges.len() * halfedge_words(self.k))?;
        Ok(Producer::Pairs { edges: edges.into(), _charge: charge })
    }

    /// The next batch of at most `2s` half-edges, or `None` at the end.
    fn produce(&mut self, lower: &mut [Level<'a>]) -> Result<Option<Vec<HalfEdge>>> {
        loop {
            match &mut self.producer {
                Producer::First { rounds, table } => {
                    if let Some(r) = rounds.round(Some(table))? {
                        let mut out = Vec::new();
                        for (p, piece, rival) in &r.edges {
                            if reports_small(table, *p, *rival) {
                                let e = HalfEdge::from_piece(1, Vec::new(), piece);
                                out.push(e.twin());
                                out.push(e);
                            }
                        }
                        return Ok(Some(out));
                    }
                    let found = bigbig_edges(self.arena, self.ledger, Mode::Nearest, self.s, table)?;
                    let edges = found
                        .edges
                        .iter()
                        .flat_map(|(_, _, piece)| {
                            let e = HalfEdge::from_piece(1, Vec::new(), piece);
                            [e.twin(), e]
                        })
                        .collect();
                    drop(found);
                    self.producer = self.pairs(edges)?;
                }
                Producer::Higher { rounds, table } => {
                    let mut input = || pull(lower, None);
                    if let Some(r) = rounds.round(Some(table), &mut input)? {
                        let mut out = Vec::new();
                        for f in r.found {
                            out.extend(phase2_reports(self.arena, table, f)?);
                        }
                        return Ok(Some(out));
                    }
                    let edges = std::mem::take(&mut bigbig_halfedges(self.arena, self.ledger, table)?.edges);
                    self.producer = self.pairs(edges)?;
                }
                Producer::Pairs { edges, .. } => {
                    if edges.is_empty() {
                        self.producer = Producer::Done;
                        continue;
                    }
                    let take = edges.len().min(2 * self.s);
                    return Ok(Some(edges.drain(..take).collect()));
                }
                Producer::Done => return Ok(None),
            }
        }
    }

    /// Tops the buffer up to the low-water mark, writing each half-edge to
    /// `sink` as it goes in.
    fn fill(&mut self, lower: &mut [Level<'a>], mut sink: Option<&mut OutputSink>) -> Result<()> {
        while self.buffer.needs_refill() {
            let Some(batch) = self.produce(lower)? else { break };
            for e in batch {
                if let Some(sink) = sink.as_deref_mut() {
                    sink.emit(e.record(self.arena)?)?;
                }
                self.buffer.push(e)?;
            }
        }
        Ok(())
    }
}

/// The next half-edge of the top level, pulling through the levels below.
fn pull<'a>(levels: &mut [Level<'a>], sink: Option<&mut OutputSink>) -> Result<Option<HalfEdge>> {
    let Some((top, lower)) = levels.split_last_mut() else { return Ok(None) };
    top.fill(lower, sink)?;
    Ok(top.buffer.pop())
}

/// Counts from a pipelined run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineReport {
    pub s_prime: usize,
    /// Number of big cells found at orders 1..=K.
    pub big: Vec<usize>,
}

/// Writes every half-edge of the diagrams of orders 1..=K to `sink`,
/// order by order, each exactly once.
pub fn pipeline_run(arena: &ReadOnlyArena, ledger: &WorkLedger, config: &PipelineConfig, sink: &mut OutputSink) -> Result<PipelineReport> {
    config.check_sites(arena.len())?;
    let s = config.s_prime();
    let first = phase1_find_big(arena, ledger, Mode::Nearest, s)?;
    let _first = ledger.charge(first.len())?;
    let mut tables: Vec<BigCellTableK<'_>> = Vec::new();
    for stage in 1..=config.max_k {
        let next = {
            let mut levels = vec![Level::first(arena, ledger, s, &first)?];
            for t in &tables {
                levels.push(Level::higher(arena, ledger, s, t)?);
            }
            let next = if stage < config.max_k {
                let mut input = || pull(&mut levels, Some(&mut *sink));
                Some(find_big_k(arena, ledger, stage + 1, s, &mut input)?)
            } else {
                None
            };
            while pull(&mut levels, Some(&mut *sink))?.is_some() {}
            next
        };
        tables.extend(next);
    }
    let big = std::iter::once(first.len()).chain(tables.iter().map(BigCellTableK::len)).collect();
    Ok(PipelineReport { s_prime: s, big })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_general_position;
    use crate::oracle::{oracle_records, oracle_vdk};
    use crate::record::Record;
    use crate::tradeoff::run_tradeoff;
    use std::collections::{BTreeMap, BTreeSet};

    fn run(a: &ReadOnlyArena, k: usize, s: usize) -> (Vec<Record>, usize) {
        let l = WorkLedger::enforcing(64 * s);
        let mut sink = OutputSink::memory();
        pipeline_run(a, &l, &PipelineConfig::new(k, s, 0).unwrap(), &mut sink).unwrap();
        assert_eq!(l.live(), 0);
        (sink.into_records(), l.peak())
    }

    fn check(a: &ReadOnlyArena, k: usize, s: usize) {
        let (out, _) = run(a, k, s);
        assert!(out.windows(2).all(|w| w[0].k <= w[1].k));
        let mut per: BTreeMap<usize, BTreeSet<Record>> = BTreeMap::new();
        for r in out {
            let k = r.k;
            assert!(per.entry(k).or_default().insert(r), "duplicate at order {k}");
        }
        for j in 1..=k {
            assert_eq!(per.remove(&j).unwrap_or_default(), oracle_vdk(a.points(), j).half_edge_records(a.points()), "order {j}");
        }
        assert!(per.is_empty());
    }

    #[test]
    fn window_per_order() {
        assert_eq!(PipelineConfig::new(5, 100, 0).unwrap().s_prime(), 4);
        assert_eq!(PipelineConfig::new(3, 36, 0).unwrap().s_prime(), 4);
        assert_eq!(PipelineConfig::new(1, 1, 0).unwrap().s_prime(), 1);
        assert!(matches!(PipelineConfig::new(10, 9, 0), Err(Error::Config(_))));
        assert!(matches!(PipelineConfig::new(0, 9, 0), Err(Error::Config(_))));
    }

    #[test]
    fn twelve_sites_three_orders() {
        check(&ReadOnlyArena::new(random_general_position(12, 7)), 3, 36);
    }

    #[test]
    fn order_one_matches_the_tradeoff_run() {
        for (n, s) in [(10, 1), (14, 4), (20, 9)] {
            let a = ReadOnlyArena::new(random_general_position(n, n as u64));
            let (out, _) = run(&a, 1, s);
            let undirected: BTreeSet<Record> = out.into_iter().filter(|r| r.pair.0 < r.pair.1).collect();
            let l = WorkLedger::observing(1);
            let mut sink = OutputSink::memory();
            run_tradeoff(&a, &l, Mode::Nearest, s, &mut sink).unwrap();
            let expected: BTreeSet<Record> = sink.into_records().into_iter().collect();
            assert_eq!(undirected, expected);
            assert_eq!(expected, oracle_records(a.points(), 1, false));
        }
    }

    #[test]
    fn random_sets_and_windows() {
        for seed in 0..4 {
            let a = ReadOnlyArena::new(random_general_position(8 + 3 * seed as usize, 900 + seed));
            for (k, s) in [(2, 4), (2, 64), (3, 9), (3, 64), (4, 64)] {
                check(&a, k, s);
            }
        }
    }

    #[test]
    fn too_few_sites_is_a_config_error() {
        let a = ReadOnlyArena::new(random_general_position(4, 1));
        let l = WorkLedger::observing(1);
        let err = pipeline_run(&a, &l, &PipelineConfig::new(4, 16, 0).unwrap(), &mut OutputSink::memory());
        assert!(matches!(err, Err(Error::Config(_))));
    }
}
