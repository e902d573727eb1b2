//! Constant-workspace construction: hull membership with a start ray,
//! two-scan edge finding, and cell-by-cell enumeration of the nearest- or
//! farthest-site diagram.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::{bisector, circumcenter, cross, dot, orient, EdgePiece, End, HPoint, Keep, Ray, Site};
use crate::memory::{OutputSink, ReadOnlyArena, WorkLedger, EDGE_WORDS, PREDICATE_WORDS, RAY_WORDS, SITE_WORDS};
use crate::num::{Frac, Int};
use crate::record::Record;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Nearest,
    Farthest,
}

impl Mode {
    pub fn keep(self) -> Keep {
        match self {
            Mode::Nearest => Keep::Nearer,
            Mode::Farthest => Keep::Farther,
        }
    }

    /// Diagram order for `n` sites.
    pub fn order(self, n: usize) -> usize {
        match self {
            Mode::Nearest => 1,
            Mode::Farthest => n - 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HullStatus {
    Inside,
    OnHull { cw: usize, ccw: usize },
}

/// Lowest index other than `p`.
pub fn reference_site(p: usize) -> usize {
    if p == 0 {
        1
    } else {
        0
    }
}

/// Decides whether `p` is a hull vertex and, if so, finds its neighbors.
///
/// Among the sites on each side of the ray from `p` through a reference
/// site, keeps the one at the largest angle; `p` is interior iff the cone
/// between the two extremes that holds the reference is wider than π.
pub fn locate_on_hull(arena: &ReadOnlyArena, ledger: &WorkLedger, p: usize) -> Result<HullStatus> {
    let _w = ledger.charge(4 * SITE_WORDS + PREDICATE_WORDS)?;
    let ps = arena.get(p).clone();
    let q = reference_site(p);
    let qs = arena.get(q).clone();
    let mut ccw = qs.clone();
    let mut cw = qs.clone();
    for i in 0..arena.len() {
        if i == p || i == q {
            continue;
        }
        let x = arena.get(i);
        if orient(&ps, &qs, x) > 0 {
            if orient(&ps, &ccw, x) > 0 {
                ccw = x.clone();
            }
        } else if orient(&ps, &cw, x) < 0 {
            cw = x.clone();
        }
    }
    if orient(&ps, &cw, &ccw) < 0 {
        Ok(HullStatus::Inside)
    } else {
        Ok(HullStatus::OnHull { cw: cw.index, ccw: ccw.index })
    }
}

/// A ray from `p` that crosses the boundary of its cell.
pub fn start_ray(arena: &ReadOnlyArena, ledger: &WorkLedger, p: usize, mode: Mode) -> Result<Ray> {
    match mode {
        Mode::Nearest => {
            let ps = arena.get(p);
            let q = arena.get(reference_site(p));
            Ok(Ray::new(ps.x.clone(), ps.y.clone(), &q.x - &ps.x, &q.y - &ps.y))
        }
        Mode::Farthest => match locate_on_hull(arena, ledger, p)? {
            HullStatus::Inside => Err(Error::FarthestCellEmpty(p)),
            HullStatus::OnHull { cw, ccw } => {
                let ps = arena.get(p);
                let c = circumcenter(ps, arena.get(cw), arena.get(ccw))?;
                Ok(Ray::toward(ps, &c))
            }
        },
    }
}

/// Where a ray from site `p` meets `B(p, x)`, with the tie-break key used
/// when the ray passes through a vertex.
#[derive(Clone, Debug)]
pub struct Hit {
    pub site: usize,
    pub t: Frac,
    /// `(u · rot90(d), u · d)` for `u = x − p`; ordering by this ratio says
    /// how the hit moves when the ray is turned slightly counterclockwise.
    key: (Int, Int),
}

impl Hit {
    /// The hit of the ray from `p` in direction `(dx, dy)` on `B(p, x)`.
    pub fn of(p: &Site, dx: &Int, dy: &Int, x: &Site) -> Option<Hit> {
        let ux = &x.x - &p.x;
        let uy = &x.y - &p.y;
        let ud = dot(&ux, &uy, dx, dy);
        if ud.signum() <= 0 {
            return None;
        }
        let u2 = dot(&ux, &uy, &ux, &uy);
        let ur = cross(dx, dy, &ux, &uy);
        Some(Hit { site: x.index, t: Frac::new(u2, &Int::from(2) * &ud), key: (ur, ud) })
    }

    /// Whether `self` should replace `best` as the first bisector met
    /// (Nearest) or the last (Farthest), ties broken toward the edge
    /// counterclockwise of the ray.
    pub fn beats(&self, best: &Hit, mode: Mode) -> bool {
        let by_t = self.t.cmp(&best.t);
        let by_key = (&self.key.0 * &best.key.1).cmp(&(&best.key.0 * &self.key.1));
        match mode {
            Mode::Nearest => by_t == Ordering::Less || (by_t == Ordering::Equal && by_key == Ordering::Greater),
            Mode::Farthest => by_t == Ordering::Greater || (by_t == Ordering::Equal && by_key == Ordering::Less),
        }
    }
}

/// Scan 1: the bisector `B(p, x)` met first (Nearest) or last (Farthest)
/// along the ray, skipping `exclude`.
pub fn best_bisector(
    arena: &ReadOnlyArena,
    ledger: &WorkLedger,
    p: usize,
    ray: &Ray,
    mode: Mode,
    exclude: Option<usize>,
) -> Result<usize> {
    let _w = ledger.charge(SITE_WORDS + RAY_WORDS + 5 + PREDICATE_WORDS)?;
    let ps = arena.get(p).clone();
    let mut best: Option<Hit> = None;
    for i in 0..arena.len() {
        if i == p || Some(i) == exclude {
            continue;
        }
        if let Some(h) = Hit::of(&ps, &ray.dx, &ray.dy, arena.get(i)) {
            if best.as_ref().map_or(true, |b| h.beats(b, mode)) {
                best = Some(h);
            }
        }
    }
    best.map(|b| b.site).ok_or(Error::NoIntersection(p))
}

/// Scan 2: the part of `B(p, q)` on the boundary of `p`'s cell.
pub fn trim_bisector(arena: &ReadOnlyArena, ledger: &WorkLedger, p: usize, q: usize, mode: Mode) -> Result<Option<EdgePiece>> {
    let _w = ledger.charge(2 * SITE_WORDS + EDGE_WORDS + PREDICATE_WORDS)?;
    let ps = arena.get(p).clone();
    let qs = arena.get(q).clone();
    let mut piece = EdgePiece::line(bisector(&ps, &qs)?);
    for i in 0..arena.len() {
        if i == p || i == q {
            continue;
        }
        match piece.clip(&ps, arena.get(i), mode.keep()) {
            Some(e) => piece = e,
            None => return Ok(None),
        }
    }
    Ok(Some(piece))
}

/// The edge of `p`'s cell crossed by `ray`, and the rival site across it.
pub fn find_edge(arena: &ReadOnlyArena, ledger: &WorkLedger, p: usize, ray: &Ray, mode: Mode) -> Result<(EdgePiece, usize)> {
    find_edge_excluding(arena, ledger, p, ray, mode, None)
}

/// [`find_edge`] ignoring the bisector with `exclude`, used when the ray
/// passes through the vertex where the previous edge ends.
pub fn find_edge_excluding(
    arena: &ReadOnlyArena,
    ledger: &WorkLedger,
    p: usize,
    ray: &Ray,
    mode: Mode,
    exclude: Option<usize>,
) -> Result<(EdgePiece, usize)> {
    let q = best_bisector(arena, ledger, p, ray, mode, exclude)?;
    let piece = trim_bisector(arena, ledger, p, q, mode)?.ok_or(Error::NoIntersection(p))?;
    Ok((piece, q))
}

#[derive(Clone, Debug)]
enum WalkState {
    /// Waiting for the edge crossed by the start ray.
    Start(Ray),
    /// Heading for the vertex `target`, leaving the edge with `rival`.
    Forward { target: HPoint, rival: usize },
    /// The first direction ended at infinity; walking the other way.
    Backward { target: HPoint, rival: usize },
    Done,
}

/// A resumable walk around one cell. Each step asks for the edge hit by a
/// ray, excluding the bisector just left, and is fed the answer.
#[derive(Clone, Debug)]
pub struct CellWalk {
    site: Site,
    state: WalkState,
    first_rival: usize,
    /// The end of the first edge to resume from after reaching infinity.
    other_end: Option<HPoint>,
    pub edges_found: usize,
}

/// Workspace words held by one [`CellWalk`].
pub const WALK_WORDS: usize = SITE_WORDS + 2 * RAY_WORDS + 4;

impl CellWalk {
    pub fn new(site: Site, start: Ray) -> CellWalk {
        CellWalk { site, state: WalkState::Start(start), first_rival: usize::MAX, other_end: None, edges_found: 0 }
    }

    pub fn site(&self) -> &Site {
        &self.site
    }

    pub fn is_done(&self) -> bool {
        matches!(self.state, WalkState::Done)
    }

    /// The next ray to shoot and the site to exclude, or `None` when the
    /// whole cell has been seen.
    pub fn query(&self) -> Option<(Ray, Option<usize>)> {
        match &self.state {
            WalkState::Start(r) => Some((r.clone(), None)),
            WalkState::Forward { target, rival } | WalkState::Backward { target, rival } => {
                Some((Ray::toward(&self.site, target), Some(*rival)))
            }
            WalkState::Done => None,
        }
    }

    /// Feeds the edge answering the last query.
    pub fn accept(&mut self, piece: &EdgePiece, rival: usize) {
        self.edges_found += 1;
        let point = |e: &End| piece.carrier.point_at(&e.t);
        match std::mem::replace(&mut self.state, WalkState::Done) {
            WalkState::Start(ray) => {
                self.first_rival = rival;
                let left_is_hi = cross(&ray.dx, &ray.dy, &piece.carrier.dx, &piece.carrier.dy).signum() > 0;
                let (first, other) = if left_is_hi { (&piece.hi, &piece.lo) } else { (&piece.lo, &piece.hi) };
                self.other_end = other.as_ref().map(point);
                self.state = match first {
                    Some(e) => self.forward_from(e, point(e), rival),
                    None => self.turn_back(),
                };
            }
            WalkState::Forward { rival: prev, .. } => {
                let exit = self.exit_end(piece, prev);
                self.state = match exit {
                    Some(e) => self.forward_from(e, point(e), rival),
                    None => self.turn_back(),
                };
            }
            WalkState::Backward { rival: prev, .. } => {
                self.state = match self.exit_end(piece, prev) {
                    Some(e) => WalkState::Backward { target: point(e), rival },
                    None => WalkState::Done,
                };
            }
            WalkState::Done => panic!("edge fed to a finished walk"),
        }
    }

    /// The end of `piece` away from the vertex shared with the bisector of
    /// `prev`.
    fn exit_end<'a>(&self, piece: &'a EdgePiece, prev: usize) -> Option<&'a End> {
        match (&piece.lo, &piece.hi) {
            (Some(l), h) if l.site == prev => h.as_ref(),
            (l, Some(h)) if h.site == prev => l.as_ref(),
            _ => panic!("walk lost track of the shared vertex"),
        }
    }

    fn forward_from(&self, end: &End, target: HPoint, rival: usize) -> WalkState {
        if end.site == self.first_rival {
            WalkState::Done
        } else {
            WalkState::Forward { target, rival }
        }
    }

    fn turn_back(&mut self) -> WalkState {
        match self.other_end.take() {
            Some(target) => WalkState::Backward { target, rival: self.first_rival },
            None => WalkState::Done,
        }
    }
}

/// Visits every edge of `p`'s cell with its rival site.
pub fn enumerate_cell(
    arena: &ReadOnlyArena,
    ledger: &WorkLedger,
    p: usize,
    mode: Mode,
    mut visit: impl FnMut(&EdgePiece, usize) -> Result<()>,
) -> Result<()> {
    let _w = ledger.charge(WALK_WORDS)?;
    let ray = start_ray(arena, ledger, p, mode)?;
    let mut walk = CellWalk::new(arena.get(p).clone(), ray);
    while let Some((ray, exclude)) = walk.query() {
        let (piece, rival) = find_edge_excluding(arena, ledger, p, &ray, mode, exclude)?;
        visit(&piece, rival)?;
        walk.accept(&piece, rival);
    }
    Ok(())
}

/// The undirected record of an edge of `p`'s cell at order 1 or `n − 1`.
pub fn edge_record(arena: &ReadOnlyArena, mode: Mode, piece: &EdgePiece, p: usize, rival: usize) -> Record {
    let n = arena.len();
    let closest = match mode {
        Mode::Nearest => Vec::new(),
        Mode::Farthest => (0..n).filter(|&i| i != p && i != rival).collect(),
    };
    Record::from_piece(mode.order(n), closest, piece, arena.get(p), arena.get(rival), arena.scale(), false)
}

/// Emits every edge of the diagram once, cell by cell, reporting an edge
/// from the cell of its smaller site.
pub fn enumerate_diagram(arena: &ReadOnlyArena, ledger: &WorkLedger, mode: Mode, sink: &mut OutputSink) -> Result<()> {
    for p in 0..arena.len() {
        if mode == Mode::Farthest && locate_on_hull(arena, ledger, p)? == HullStatus::Inside {
            continue;
        }
        enumerate_cell(arena, ledger, p, mode, |piece, rival| {
            if p < rival {
                sink.emit(edge_record(arena, mode, piece, p, rival))?;
            }
            Ok(())
        })?;
    }
    Ok(())
}
