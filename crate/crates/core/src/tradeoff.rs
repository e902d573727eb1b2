//! The s-workspace construction: cells are walked `s` at a time, each
//! step finding one edge per tracked cell with two batched passes.
//!
//! Phase 1 walks cells until fewer than `s` remain unfinished and records
//! those as big. Phase 2 walks every small cell again and reports its
//! edges. Phase 3 reports the edges between two big cells from the
//! diagram of the big sites, trimmed against the whole input.

use crate::delaunay::{batch_diagram, BatchDiagram};
use crate::error::{Error, Result};
use crate::geometry::{bisector, circumcenter, EdgePiece, Ray, Site};
use crate::hull::HullStream;
use crate::memory::{Charge, OutputSink, ReadOnlyArena, WorkLedger, EDGE_WORDS, SITE_WORDS};
use crate::scan::{edge_record, start_ray, CellWalk, Hit, Mode, WALK_WORDS};

/// A contiguous run of input positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Batch {
    pub start: usize,
    pub len: usize,
}

/// Splits `0..n` into input-order batches of `s` (the last may be shorter).
pub fn batches(n: usize, s: usize) -> impl Iterator<Item = Batch> {
    let s = s.max(1);
    (0..n).step_by(s).map(move |start| Batch { start, len: s.min(n - start) })
}

/// Sites whose cells were left unfinished in phase 1, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigCellTable1 {
    sites: Vec<usize>,
}

impl BigCellTable1 {
    pub fn new(mut sites: Vec<usize>) -> BigCellTable1 {
        sites.sort_unstable();
        BigCellTable1 { sites }
    }

    pub fn contains(&self, site: usize) -> bool {
        self.sites.binary_search(&site).is_ok()
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Builds the diagram of `tracked ∪ batch`, reading the batch.
fn diagram_with<'l>(
    arena: &ReadOnlyArena,
    ledger: &'l WorkLedger,
    tracked: &[&Site],
    batch: Batch,
    mode: Mode,
) -> Result<BatchDiagram<'l>> {
    let mut sites: Vec<Site> = tracked.iter().map(|s| (*s).clone()).collect();
    for i in batch.start..batch.start + batch.len {
        let x = arena.get(i);
        if !tracked.iter().any(|t| t.index == i) {
            sites.push(x.clone());
        }
    }
    batch_diagram(ledger, sites, mode)
}

/// One query of the batched edge finder: the site, the ray, and the
/// bisector to ignore.
pub struct EdgeQuery<'a> {
    pub site: &'a Site,
    pub ray: Ray,
    pub exclude: Option<usize>,
}

/// For every query, the edge of the site's cell hit by its ray and the
/// rival across it, using one pass over the input to choose bisectors and
/// one to trim them.
pub fn find_edges_batched(
    arena: &ReadOnlyArena,
    ledger: &WorkLedger,
    queries: &[EdgeQuery<'_>],
    s: usize,
    mode: Mode,
) -> Result<Vec<(EdgePiece, usize)>> {
    let m = queries.len();
    let _w = ledger.charge(m * (SITE_WORDS + 5 + EDGE_WORDS))?;
    let tracked: Vec<&Site> = queries.iter().map(|q| q.site).collect();
    let mut best: Vec<Option<(Hit, Site)>> = vec![None; m];
    for batch in batches(arena.len(), s) {
        let diagram = diagram_with(arena, ledger, &tracked, batch, mode)?;
        for (q, b) in queries.iter().zip(best.iter_mut()) {
            for x in diagram.neighbors(q.site.index) {
                if Some(x.index) == q.exclude {
                    continue;
                }
                if let Some(h) = Hit::of(q.site, &q.ray.dx, &q.ray.dy, x) {
                    if b.as_ref().map_or(true, |(bh, _)| h.beats(bh, mode)) {
                        *b = Some((h, x.clone()));
                    }
                }
            }
        }
    }
    let mut pieces: Vec<(Option<EdgePiece>, usize)> = Vec::with_capacity(m);
    for (q, b) in queries.iter().zip(&best) {
        let (_, rival) = b.as_ref().ok_or(Error::NoIntersection(q.site.index))?;
        pieces.push((Some(EdgePiece::line(bisector(q.site, rival)?)), rival.index));
    }
    for batch in batches(arena.len(), s) {
        let diagram = diagram_with(arena, ledger, &tracked, batch, mode)?;
        for (q, (piece, rival)) in queries.iter().zip(pieces.iter_mut()) {
            for y in diagram.neighbors(q.site.index) {
                if y.index == *rival {
                    continue;
                }
                *piece = match piece.take() {
                    Some(e) => e.clip(q.site, y, mode.keep()),
                    None => None,
                };
            }
        }
    }
    queries
        .iter()
        .zip(pieces)
        .map(|(q, (piece, rival))| piece.map(|e| (e, rival)).ok_or(Error::NoIntersection(q.site.index)))
        .collect()
}

/// Supplies sites with nonempty cells and their start rays, in input
/// order (Nearest) or clockwise hull order (Farthest).
enum SiteSource<'a> {
    Sequential { next: usize },
    Hull(HullStream<'a>),
}

impl<'a> SiteSource<'a> {
    fn new(arena: &'a ReadOnlyArena, ledger: &'a WorkLedger, mode: Mode, s: usize) -> Result<SiteSource<'a>> {
        Ok(match mode {
            Mode::Nearest => SiteSource::Sequential { next: 0 },
            Mode::Farthest => SiteSource::Hull(HullStream::new(arena, ledger, s)?),
        })
    }

    fn next(&mut self, arena: &ReadOnlyArena, ledger: &WorkLedger, skip: Option<&BigCellTable1>) -> Result<Option<CellWalk>> {
        loop {
            match self {
                SiteSource::Sequential { next } => {
                    if *next >= arena.len() {
                        return Ok(None);
                    }
                    let p = *next;
                    *next += 1;
                    if skip.map_or(false, |t| t.contains(p)) {
                        continue;
                    }
                    let ray = start_ray(arena, ledger, p, Mode::Nearest)?;
                    return Ok(Some(CellWalk::new(arena.get(p).clone(), ray)));
                }
                SiteSource::Hull(stream) => {
                    let Some(v) = stream.next_vertex()? else {
                        return Ok(None);
                    };
                    if skip.map_or(false, |t| t.contains(v.site)) {
                        continue;
                    }
                    let p = arena.get(v.site).clone();
                    let c = circumcenter(&p, arena.get(v.prev), arena.get(v.next))?;
                    let ray = Ray::toward(&p, &c);
                    return Ok(Some(CellWalk::new(p, ray)));
                }
            }
        }
    }
}

/// Cells walked `s` at a time, one edge per tracked cell per round.
pub struct CellRounds<'a> {
    arena: &'a ReadOnlyArena,
    ledger: &'a WorkLedger,
    mode: Mode,
    s: usize,
    source: SiteSource<'a>,
    active: Vec<CellWalk>,
    exhausted: bool,
    _charge: Charge<'a>,
}

/// The outcome of one round: every edge found, as `(site, piece, rival)`,
/// and how many walks finished.
pub struct Round {
    pub edges: Vec<(usize, EdgePiece, usize)>,
    pub finished: usize,
}

impl<'a> CellRounds<'a> {
    pub fn new(arena: &'a ReadOnlyArena, ledger: &'a WorkLedger, mode: Mode, s: usize) -> Result<CellRounds<'a>> {
        let s = s.max(1);
        let source = SiteSource::new(arena, ledger, mode, s)?;
        let charge = ledger.charge(s * WALK_WORDS)?;
        Ok(CellRounds { arena, ledger, mode, s, source, active: Vec::with_capacity(s), exhausted: false, _charge: charge })
    }

    /// Loads fresh sites into free slots, skipping those in `skip`.
    fn refill(&mut self, skip: Option<&BigCellTable1>) -> Result<()> {
        while !self.exhausted && self.active.len() < self.s {
            match self.source.next(self.arena, self.ledger, skip)? {
                Some(w) => self.active.push(w),
                None => self.exhausted = true,
            }
        }
        Ok(())
    }

    /// Whether every site has been loaded.
    pub fn exhausted(&self) -> bool {
        self.exhausted
    }

    /// Sites whose walks are still running.
    pub fn active_sites(&self) -> Vec<usize> {
        self.active.iter().map(|w| w.site().index).collect()
    }

    /// Runs one round, or returns `None` when nothing is left to walk.
    /// Finished walks are dropped but not replaced until the next call.
    pub fn round(&mut self, skip: Option<&BigCellTable1>) -> Result<Option<Round>> {
        self.refill(skip)?;
        if self.active.is_empty() {
            return Ok(None);
        }
        let found = {
            let queries: Vec<EdgeQuery<'_>> = self
                .active
                .iter()
                .map(|w| {
                    let (ray, exclude) = w.query().expect("active walks have a query");
                    EdgeQuery { site: w.site(), ray, exclude }
                })
                .collect();
            find_edges_batched(self.arena, self.ledger, &queries, self.s, self.mode)?
        };
        let mut edges = Vec::with_capacity(found.len());
        for (w, (piece, rival)) in self.active.iter_mut().zip(found) {
            w.accept(&piece, rival);
            edges.push((w.site().index, piece, rival));
        }
        let before = self.active.len();
        self.active.retain(|w| !w.is_done());
        let finished = before - self.active.len();
        if finished > 0 && !self.exhausted {
            self.refill(skip)?;
        }
        Ok(Some(Round { edges, finished }))
    }
}

/// Phase 1: finds the big cells. Emits nothing.
///
/// Stops after the first round in which a walk finishes while no unloaded
/// site remains; the walks still running belong to the big cells.
pub fn phase1_find_big(arena: &ReadOnlyArena, ledger: &WorkLedger, mode: Mode, s: usize) -> Result<BigCellTable1> {
    let mut rounds = CellRounds::new(arena, ledger, mode, s)?;
    while let Some(r) = rounds.round(None)? {
        if r.finished > 0 && rounds.exhausted() {
            return Ok(BigCellTable1::new(rounds.active_sites()));
        }
    }
    Ok(BigCellTable1::default())
}

/// Whether phase 2 reports the edge of `p`'s cell shared with `rival`.
pub fn reports_small(table: &BigCellTable1, p: usize, rival: usize) -> bool {
    table.contains(rival) || p < rival
}

/// Phase 2: walks every small cell and reports each edge once, from the
/// smaller small site or from the small side of a small–big edge.
pub fn phase2_report_small(
    arena: &ReadOnlyArena,
    ledger: &WorkLedger,
    mode: Mode,
    s: usize,
    table: &BigCellTable1,
    sink: &mut OutputSink,
) -> Result<()> {
    let mut rounds = CellRounds::new(arena, ledger, mode, s)?;
    while let Some(r) = rounds.round(Some(table))? {
        for (p, piece, rival) in &r.edges {
            if reports_small(table, *p, *rival) {
                sink.emit(edge_record(arena, mode, piece, *p, *rival))?;
            }
        }
    }
    Ok(())
}

/// Surviving edges between two big cells, held in the workspace until
/// dropped.
pub struct BigBigEdges<'a> {
    pub edges: Vec<(usize, usize, EdgePiece)>,
    _charge: Charge<'a>,
}

/// Edges of the diagram of the big sites, trimmed against every batch;
/// the survivors are exactly the edges between two big cells.
pub fn bigbig_edges<'a>(
    arena: &ReadOnlyArena,
    ledger: &'a WorkLedger,
    mode: Mode,
    s: usize,
    table: &BigCellTable1,
) -> Result<BigBigEdges<'a>> {
    let mut charge = ledger.charge(0)?;
    if table.len() < 2 {
        return Ok(BigBigEdges { edges: Vec::new(), _charge: charge });
    }
    let big: Vec<Site> = table.sites().iter().map(|&i| arena.get(i).clone()).collect();
    let _sites = ledger.charge(big.len() * SITE_WORDS)?;
    let site = |i: usize| &big[table.sites().binary_search(&i).expect("big site")];
    let mut edges: Vec<(usize, usize, Option<EdgePiece>)> = Vec::new();
    {
        let diagram = batch_diagram(ledger, big.clone(), mode)?;
        let pairs = diagram.adjacent_pairs();
        charge.resize(pairs.len() * EDGE_WORDS)?;
        for (a, b) in pairs {
            let sa = site(a);
            let mut piece = Some(EdgePiece::line(bisector(sa, site(b))?));
            for y in diagram.neighbors(a) {
                if y.index != b {
                    piece = piece.and_then(|e| e.clip(sa, y, mode.keep()));
                }
            }
            edges.push((a, b, piece));
        }
    }
    let refs: Vec<&Site> = big.iter().collect();
    for batch in batches(arena.len(), s) {
        let diagram = diagram_with(arena, ledger, &refs, batch, mode)?;
        for (a, b, piece) in edges.iter_mut() {
            let sa = site(*a);
            for y in diagram.neighbors(*a) {
                if y.index != *b {
                    *piece = piece.take().and_then(|e| e.clip(sa, y, mode.keep()));
                }
            }
        }
    }
    let edges: Vec<(usize, usize, EdgePiece)> = edges.into_iter().filter_map(|(a, b, e)| e.map(|e| (a, b, e))).collect();
    charge.resize(edges.len() * EDGE_WORDS)?;
    Ok(BigBigEdges { edges, _charge: charge })
}

/// Phase 3: edges between two big cells.
pub fn phase3_report_bigbig(
    arena: &ReadOnlyArena,
    ledger: &WorkLedger,
    mode: Mode,
    s: usize,
    table: &BigCellTable1,
    sink: &mut OutputSink,
) -> Result<()> {
    for (a, b, e) in &bigbig_edges(arena, ledger, mode, s, table)?.edges {
        sink.emit(edge_record(arena, mode, e, *a, *b))?;
    }
    Ok(())
}

/// All three phases: every edge of the diagram, once.
pub fn run_tradeoff(arena: &ReadOnlyArena, ledger: &WorkLedger, mode: Mode, s: usize, sink: &mut OutputSink) -> Result<BigCellTable1> {
    let s = s.max(1);
    let table = phase1_find_big(arena, ledger, mode, s)?;
    let _t = ledger.charge(table.len())?;
    phase2_report_small(arena, ledger, mode, s, &table, sink)?;
    phase3_report_bigbig(arena, ledger, mode, s, &table, sink)?;
    Ok(table)
}
