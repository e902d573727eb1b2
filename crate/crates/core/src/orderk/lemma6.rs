//! All (k+1)-half-edges from a stream of k-half-edges, in three phases.
//!
//! Phase 1 walks intervals `s` at a time until the stream runs dry and
//! records the cells still being walked as big. Phase 2 walks every
//! interval of a small cell and reports its half-edges, plus the twin of
//! each whose right cell is big. Phase 3 reports the half-edges between
//! two big cells from the diagram of their sites, trimmed against the
//! whole input.

use crate::error::Result;
use crate::geometry::{Keep, Site, VertexClass};
use crate::memory::{halfedge_words, Charge, ReadOnlyArena, WorkLedger, EDGE_WORDS, SITE_WORDS};

use super::halfedge::{cog_key, CogKey, HalfEdge};
use super::lift::batch_order_diagram;
use super::successor::successor_step;

/// A pull source of half-edges.
pub type Input<'i> = dyn FnMut() -> Result<Option<HalfEdge>> + 'i;

/// Big cells of one order, sorted by center-of-gravity key.
pub struct BigCellTableK<'l> {
    order: usize,
    cells: Vec<(CogKey, Vec<usize>)>,
    _charge: Charge<'l>,
}

impl<'l> BigCellTableK<'l> {
    pub fn new(arena: &ReadOnlyArena, ledger: &'l WorkLedger, order: usize, cells: Vec<Vec<usize>>) -> Result<BigCellTableK<'l>> {
        let charge = ledger.charge(cells.len() * (order + 2))?;
        let mut keyed = cells.into_iter().map(|c| Ok((cog_key(arena, &c)?, c))).collect::<Result<Vec<_>>>()?;
        keyed.sort();
        keyed.dedup_by(|a, b| a.0 == b.0);
        Ok(BigCellTableK { order, cells: keyed, _charge: charge })
    }

    pub fn empty(ledger: &'l WorkLedger, order: usize) -> BigCellTableK<'l> {
        BigCellTableK { order, cells: Vec::new(), _charge: ledger.charge(0).expect("empty charge") }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains_key(&self, key: &CogKey) -> bool {
        self.cells.binary_search_by(|(k, _)| k.cmp(key)).is_ok()
    }

    /// Whether the cell with these sites is big.
    pub fn contains(&self, arena: &ReadOnlyArena, cell: &[usize]) -> Result<bool> {
        if self.cells.is_empty() {
            return Ok(false);
        }
        Ok(self.contains_key(&cog_key(arena, cell)?))
    }

    pub fn cells(&self) -> impl Iterator<Item = &[usize]> {
        self.cells.iter().map(|(_, c)| c.as_slice())
    }

    /// Every site defining a big cell, sorted.
    pub fn sites(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.cells.iter().flat_map(|(_, c)| c.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Interval walks of order `k`, `s` at a time, fed by (k−1)-half-edges.
pub struct OrderRounds<'a> {
    arena: &'a ReadOnlyArena,
    ledger: &'a WorkLedger,
    k: usize,
    s: usize,
    tracked: Vec<HalfEdge>,
    exhausted: bool,
    _charge: Charge<'a>,
}

/// The half-edges found in one round and how many walks ended.
pub struct OrderRound {
    pub found: Vec<HalfEdge>,
    pub finished: usize,
}

impl<'a> OrderRounds<'a> {
    pub fn new(arena: &'a ReadOnlyArena, ledger: &'a WorkLedger, k: usize, s: usize) -> Result<OrderRounds<'a>> {
        let s = s.max(1);
        let charge = ledger.charge(s * halfedge_words(k))?;
        Ok(OrderRounds { arena, ledger, k, s, tracked: Vec::with_capacity(s), exhausted: false, _charge: charge })
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted
    }

    /// Cells of order `k` whose intervals are being walked.
    pub fn active_cells(&self) -> Vec<Vec<usize>> {
        self.tracked.iter().map(|e| if e.k == self.k { e.cell() } else { e.enclosing() }).collect()
    }

    /// Loads relevant (k−1)-half-edges whose enclosing cell is not in
    /// `skip`; the others would yield nothing.
    fn refill(&mut self, skip: Option<&BigCellTableK<'_>>, input: &mut Input<'_>) -> Result<()> {
        while !self.exhausted && self.tracked.len() < self.s {
            match input()? {
                None => self.exhausted = true,
                Some(e) => {
                    if !e.is_relevant() {
                        continue;
                    }
                    if let Some(t) = skip {
                        if t.contains(self.arena, &e.enclosing())? {
                            continue;
                        }
                    }
                    self.tracked.push(e);
                }
            }
        }
        Ok(())
    }

    /// One step for every tracked walk, or `None` when nothing is left.
    pub fn round(&mut self, skip: Option<&BigCellTableK<'_>>, input: &mut Input<'_>) -> Result<Option<OrderRound>> {
        self.refill(skip, input)?;
        if self.tracked.is_empty() {
            return Ok(None);
        }
        let next = successor_step(self.arena, self.ledger, self.k - 1, &self.tracked)?;
        let mut found = Vec::with_capacity(next.len());
        let mut keep = Vec::with_capacity(next.len());
        for f in next {
            let f = f.expect("tracked half-edges are relevant or walking");
            found.push(f.clone());
            if f.classify_head().ok() != Some(VertexClass::Old) {
                keep.push(f);
            }
        }
        let finished = self.tracked.len() - keep.len();
        self.tracked = keep;
        if finished > 0 {
            self.refill(skip, input)?;
        }
        Ok(Some(OrderRound { found, finished }))
    }
}

/// Phase 1: the big cells of order `k`. Reports nothing.
pub fn find_big_k<'l>(
    arena: &'l ReadOnlyArena,
    ledger: &'l WorkLedger,
    k: usize,
    s: usize,
    input: &mut Input<'_>,
) -> Result<BigCellTableK<'l>> {
    let mut rounds = OrderRounds::new(arena, ledger, k, s)?;
    while let Some(r) = rounds.round(None, input)? {
        if r.finished > 0 && rounds.exhausted() {
            return BigCellTableK::new(arena, ledger, k, rounds.active_cells());
        }
    }
    Ok(BigCellTableK::empty(ledger, k))
}

/// The half-edges phase 2 reports for `f`, found on a small cell's
/// boundary: `f` itself, and its twin when the right cell is big.
pub fn phase2_reports(arena: &ReadOnlyArena, table: &BigCellTableK<'_>, f: HalfEdge) -> Result<Vec<HalfEdge>> {
    let twin = table.contains(arena, &f.right_cell())?.then(|| f.twin());
    Ok(std::iter::once(f).chain(twin).collect())
}

/// Half-edges between two big cells, held in the workspace.
pub struct BigBigHalfEdges<'l> {
    pub edges: Vec<HalfEdge>,
    _charge: Charge<'l>,
}

/// Phase 3: both half-edges of every edge between two big cells.
pub fn bigbig_halfedges<'l>(
    arena: &ReadOnlyArena,
    ledger: &'l WorkLedger,
    table: &BigCellTableK<'_>,
) -> Result<BigBigHalfEdges<'l>> {
    let k = table.order();
    let mut charge = ledger.charge(0)?;
    if table.len() < 2 {
        return Ok(BigBigHalfEdges { edges: Vec::new(), _charge: charge });
    }
    let ids = table.sites();
    let _sites = ledger.charge(ids.len() * SITE_WORDS)?;
    let sites: Vec<Site> = ids.iter().map(|&i| arena.read(i).cloned()).collect::<Result<_>>()?;
    let key = |cell: &[usize]| {
        let mut x = crate::num::Int::zero();
        let mut y = crate::num::Int::zero();
        for i in cell {
            let s = &sites[ids.binary_search(i).expect("big site")];
            x = &x + &s.x;
            y = &y + &s.y;
        }
        (x, y)
    };
    let mut kept = Vec::new();
    {
        let diagram = batch_order_diagram(ledger, &sites, k)?;
        for e in &diagram.edges {
            let [c1, c2] = e.cells();
            if table.contains_key(&key(&c1)) && table.contains_key(&key(&c2)) {
                kept.push((e.closest.clone(), Some(e.piece.clone())));
            }
        }
        charge.resize(kept.len() * (EDGE_WORDS + k + 1))?;
    }
    for j in 0..arena.len() {
        let c = arena.get(j);
        for (closest, piece) in kept.iter_mut() {
            let Some(p) = piece.take() else { continue };
            let (a, b) = (p.carrier.p, p.carrier.q);
            if j == a || j == b {
                *piece = Some(p);
                continue;
            }
            let sa = &sites[ids.binary_search(&a).expect("big site")];
            let keep = if closest.binary_search(&j).is_ok() { Keep::Farther } else { Keep::Nearer };
            *piece = p.clip(sa, c, keep);
        }
    }
    let mut edges = Vec::new();
    for (closest, piece) in kept {
        if let Some(p) = piece {
            let e = HalfEdge::from_piece(k, closest, &p);
            edges.push(e.twin());
            edges.push(e);
        }
    }
    charge.resize(edges.len() * halfedge_words(k))?;
    Ok(BigBigHalfEdges { edges, _charge: charge })
}

/// All three phases for order `k` over a replayable list of
/// (k−1)-half-edges, handing every k-half-edge to `emit` once.
pub fn lemma6_order_step<'l>(
    arena: &'l ReadOnlyArena,
    ledger: &'l WorkLedger,
    k: usize,
    s: usize,
    lower: &[HalfEdge],
    mut emit: impl FnMut(HalfEdge) -> Result<()>,
) -> Result<BigCellTableK<'l>> {
    let stream = |v: &[HalfEdge]| {
        let mut it = v.to_vec().into_iter();
        move || Ok(it.next())
    };
    let table = find_big_k(arena, ledger, k, s, &mut stream(lower))?;
    report_small_k(arena, ledger, k, s, &table, &mut stream(lower), &mut emit)?;
    for e in bigbig_halfedges(arena, ledger, &table)?.edges {
        emit(e)?;
    }
    Ok(table)
}

/// Phase 2 on its own: walks every interval of every small cell.
pub fn report_small_k(
    arena: &ReadOnlyArena,
    ledger: &WorkLedger,
    k: usize,
    s: usize,
    table: &BigCellTableK<'_>,
    input: &mut Input<'_>,
    emit: &mut dyn FnMut(HalfEdge) -> Result<()>,
) -> Result<()> {
    let mut rounds = OrderRounds::new(arena, ledger, k, s)?;
    while let Some(r) = rounds.round(Some(table), input)? {
        for f in r.found {
            for e in phase2_reports(arena, table, f)? {
                emit(e)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_general_position;
    use crate::oracle::oracle_vdk;
    use crate::record::Record;
    use std::collections::BTreeSet;

    fn lower(a: &ReadOnlyArena, k: usize) -> Vec<HalfEdge> {
        oracle_vdk(a.points(), k).half_edge_records(a.points()).iter().map(HalfEdge::from_record).collect()
    }

    fn run(a: &ReadOnlyArena, k: usize, s: usize) -> (Vec<Record>, usize) {
        let l = WorkLedger::observing(1);
        let mut out = Vec::new();
        let t = lemma6_order_step(a, &l, k, s, &lower(a, k - 1), |e| {
            out.push(e.record(a)?);
            Ok(())
        })
        .unwrap();
        (out, t.len())
    }

    fn check(a: &ReadOnlyArena, k: usize, s: usize) -> usize {
        let (out, big) = run(a, k, s);
        let set: BTreeSet<Record> = out.iter().cloned().collect();
        assert_eq!(set.len(), out.len(), "duplicates at k {k} s {s}");
        assert_eq!(set, oracle_vdk(a.points(), k).half_edge_records(a.points()), "k {k} s {s}");
        big
    }

    #[test]
    fn phase_two_alone_covers_everything_without_big_cells() {
        let a = ReadOnlyArena::new(random_general_position(8, 11));
        let l = WorkLedger::observing(1);
        let table = BigCellTableK::empty(&l, 2);
        let lower = lower(&a, 1);
        let mut it = lower.into_iter();
        let mut out = BTreeSet::new();
        report_small_k(&a, &l, 2, 8, &table, &mut || Ok(it.next()), &mut |e| {
            assert!(out.insert(e.record(&a)?), "duplicate");
            Ok(())
        })
        .unwrap();
        assert_eq!(out, oracle_vdk(a.points(), 2).half_edge_records(a.points()));
    }

    #[test]
    fn big_tables_stay_below_the_window() {
        let a = ReadOnlyArena::new(random_general_position(8, 11));
        for s in 1..=8 {
            assert!(check(&a, 2, s) < s.max(2));
        }
    }

    #[test]
    fn small_window_splits_across_phases() {
        let a = ReadOnlyArena::new(random_general_position(16, 12));
        assert!(check(&a, 2, 2) > 0);
    }

    #[test]
    fn random_sets_every_order_and_window() {
        for seed in 0..5 {
            let a = ReadOnlyArena::new(random_general_position(9 + 2 * seed as usize, 500 + seed));
            for k in 2..=4 {
                for s in [1, 2, 3, 5, 40] {
                    check(&a, k, s);
                }
            }
        }
    }
}
