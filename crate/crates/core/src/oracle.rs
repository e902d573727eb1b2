//! Brute-force reference constructions and verifiers. Nothing here is
//! charged to a ledger or counted as arena reads.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::geometry::{circumcenter, orient, EdgePiece, End, HPoint, PointSet, Site};
use crate::num::{Frac, Int};
use crate::record::{Endpoint, Record};

/// An edge of an order-k diagram: the `k − 1` closest sites and the
/// piece of `B(p, q)`, `p < q`, along which `p` and `q` tie next.
#[derive(Clone, Debug)]
pub struct OracleEdge {
    pub closest: Vec<usize>,
    pub p: usize,
    pub q: usize,
    pub piece: EdgePiece,
}

pub use crate::geometry::VertexClass;

#[derive(Clone, Debug)]
pub struct OracleVertex {
    pub center: HPoint,
    pub triple: [usize; 3],
    pub class: VertexClass,
}

#[derive(Clone, Debug)]
pub struct OracleDiagram {
    pub k: usize,
    pub edges: Vec<OracleEdge>,
    pub vertices: Vec<OracleVertex>,
}

impl OracleDiagram {
    /// Undirected records (pair sorted).
    pub fn records(&self, points: &PointSet) -> BTreeSet<Record> {
        let s = points.sites();
        self.edges
            .iter()
            .map(|e| Record::from_piece(self.k, e.closest.clone(), &e.piece, &s[e.p], &s[e.q], points.scale(), false))
            .collect()
    }

    /// Both directed half-edges of every edge.
    pub fn half_edge_records(&self, points: &PointSet) -> BTreeSet<Record> {
        let s = points.sites();
        let mut out = BTreeSet::new();
        for e in &self.edges {
            let (p, q) = (&s[e.p], &s[e.q]);
            out.insert(Record::from_piece(self.k, e.closest.clone(), &e.piece, p, q, points.scale(), true));
            out.insert(Record::from_piece(self.k, e.closest.clone(), &e.piece.reversed(p, q), q, p, points.scale(), true));
        }
        out
    }
}

/// The order-k diagram by sweeping every bisector.
///
/// Along `B(p, q)` each other site `r` switches between closer and farther
/// than `p` exactly once; an interval is a k-edge iff `k − 1` sites are
/// closer there.
pub fn oracle_vdk(points: &PointSet, k: usize) -> OracleDiagram {
    let s = points.sites();
    let n = s.len();
    assert!(k >= 1 && k < n, "order {k} out of range for {n} sites");
    let mut edges = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            let carrier = crate::geometry::bisector(&s[p], &s[q]).expect("distinct sites");
            let mut inside = vec![false; n];
            let mut count = 0usize;
            let mut events: Vec<(Frac, usize)> = Vec::with_capacity(n);
            for r in 0..n {
                if r == p || r == q {
                    continue;
                }
                let (slope, constant) = carrier.difference(&s[r], &s[p]);
                assert!(!slope.is_zero(), "collinear sites {p}, {q}, {r}");
                if slope.signum() > 0 {
                    inside[r] = true;
                    count += 1;
                }
                events.push((Frac::new(-constant, slope), r));
            }
            events.sort();
            let mut lo: Option<End> = None;
            for i in 0..=events.len() {
                let hi = events.get(i).map(|(t, r)| End { site: *r, t: t.clone() });
                if count == k - 1 {
                    let closest = (0..n).filter(|&r| inside[r]).collect();
                    edges.push(OracleEdge {
                        closest,
                        p,
                        q,
                        piece: EdgePiece { carrier: carrier.clone(), lo: lo.clone(), hi: hi.clone() },
                    });
                }
                if let Some((_, r)) = events.get(i) {
                    if inside[*r] {
                        count -= 1;
                    } else {
                        count += 1;
                    }
                    inside[*r] = !inside[*r];
                }
                lo = hi;
            }
        }
    }
    let mut vertices = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let center = circumcenter(&s[a], &s[b], &s[c]).expect("general position");
                let r2 = center.dist2(&s[a]);
                let m = (0..n).filter(|&x| center.dist2(&s[x]) < r2).count();
                let class = if m + 1 == k {
                    VertexClass::New
                } else if m + 2 == k {
                    VertexClass::Old
                } else {
                    continue;
                };
                vertices.push(OracleVertex { center, triple: [a, b, c], class });
            }
        }
    }
    OracleDiagram { k, edges, vertices }
}

/// Oracle edge records at order `k`: undirected when `directed` is false.
pub fn oracle_records(points: &PointSet, k: usize, directed: bool) -> BTreeSet<Record> {
    let d = oracle_vdk(points, k);
    if directed {
        d.half_edge_records(points)
    } else {
        d.records(points)
    }
}

/// Convex hull vertices in clockwise order from the lexicographically
/// smallest site, by testing every directed pair.
pub fn oracle_hull(points: &PointSet) -> Vec<usize> {
    let s = points.sites();
    let n = s.len();
    let mut next = vec![usize::MAX; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && (0..n).all(|x| x == i || x == j || orient(&s[i], &s[j], &s[x]) < 0) {
                next[i] = j;
            }
        }
    }
    let start = (0..n).min_by(|&a, &b| (&s[a].x, &s[a].y).cmp(&(&s[b].x, &s[b].y))).unwrap();
    let mut hull = vec![start];
    let mut c = next[start];
    while c != start {
        hull.push(c);
        c = next[c];
    }
    hull
}

/// Defects found by [`verify_run`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DefectReport {
    pub missing: Vec<Record>,
    pub spurious: Vec<Record>,
    pub duplicated: Vec<Record>,
    pub invalid: Vec<Record>,
}

impl DefectReport {
    pub fn is_clean(&self) -> bool {
        self.missing.is_empty() && self.spurious.is_empty() && self.duplicated.is_empty() && self.invalid.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "missing={} spurious={} duplicated={} invalid={}",
            self.missing.len(),
            self.spurious.len(),
            self.duplicated.len(),
            self.invalid.len()
        )
    }
}

/// Converts an input-unit point to lattice coordinates.
pub fn lattice_point(x: &BigRational, y: &BigRational, scale: &BigInt) -> HPoint {
    let l = num_integer::Integer::lcm(x.denom(), y.denom());
    let sx = x.numer() * (&l / x.denom()) * scale;
    let sy = y.numer() * (&l / y.denom()) * scale;
    HPoint::new(Int::from_big(sx), Int::from_big(sy), Int::from_big(l))
}

/// Whether `rec` passes the distance profile test at an interior point:
/// exactly `closest` strictly nearer than the tied `pair`.
pub fn record_is_valid(rec: &Record, points: &PointSet) -> bool {
    let s = points.sites();
    let n = s.len();
    let (a, b) = rec.pair;
    if a >= n || b >= n || a == b || rec.closest.iter().any(|&c| c >= n || c == a || c == b) {
        return false;
    }
    if rec.closest.len() + 1 != rec.k {
        return false;
    }
    let to_rat = |st: &Site| {
        (
            BigRational::new(st.x.to_big(), points.scale().clone()),
            BigRational::new(st.y.to_big(), points.scale().clone()),
        )
    };
    let (ra, rb) = (to_rat(&s[a]), to_rat(&s[b]));
    let (x, y) = rec.interior_point((&ra.0, &ra.1), (&rb.0, &rb.1));
    let pt = lattice_point(&x, &y, points.scale());
    let da = pt.dist2(&s[a]);
    if da != pt.dist2(&s[b]) {
        return false;
    }
    let closer: Vec<usize> = (0..n).filter(|&r| pt.dist2(&s[r]) < da).collect();
    if closer != rec.closest {
        return false;
    }
    let finite_ok = |e: &Endpoint| match e {
        Endpoint::At(x, y) => {
            let v = lattice_point(x, y, points.scale());
            v.dist2(&s[a]) == v.dist2(&s[b])
        }
        Endpoint::Inf(..) => true,
    };
    finite_ok(&rec.tail) && finite_ok(&rec.head)
}

/// Compares emitted records of one order with the oracle's.
pub fn verify_run(emitted: &[Record], expected: &BTreeSet<Record>, points: &PointSet) -> DefectReport {
    let mut report = DefectReport::default();
    let mut seen: BTreeMap<&Record, usize> = BTreeMap::new();
    for r in emitted {
        *seen.entry(r).or_insert(0) += 1;
    }
    for (r, c) in &seen {
        if *c > 1 {
            report.duplicated.push((*r).clone());
        }
        if !expected.contains(*r) {
            report.spurious.push((*r).clone());
        }
        if !record_is_valid(r, points) {
            report.invalid.push((*r).clone());
        }
    }
    for r in expected {
        if !seen.contains_key(r) {
            report.missing.push(r.clone());
        }
    }
    report
}

/// Sorted site set as a key.
fn cell_key(closest: &[usize], extra: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = closest.iter().chain(extra).copied().collect();
    v.sort_unstable();
    v
}

/// The boundary of each (k+1)-cell split into intervals owned by relevant
/// k-half-edges.
#[derive(Clone, Debug)]
pub struct CellIntervals {
    /// Sites of the (k+1)-cell.
    pub cell: Vec<usize>,
    /// Boundary (k+1)-half-edges in counterclockwise order. For an
    /// unbounded cell the order starts at the edge with unbounded tail.
    pub boundary: Vec<Record>,
    /// Relevant k-half-edges whose head lies on this boundary.
    pub relevant: Vec<Record>,
    /// For each boundary edge, the index into `relevant` of its owner.
    pub owner: Vec<usize>,
}

/// Whether a half-edge record at order `k` is relevant: bounded head whose
/// extra site is not among the closest.
pub fn record_is_relevant(rec: &Record) -> bool {
    match rec.extra_h {
        Some(x) => !rec.closest.contains(&x),
        None => false,
    }
}

/// Interval ownership at order `k + 1` derived from both oracle diagrams.
pub fn oracle_intervals(points: &PointSet, k: usize) -> Vec<CellIntervals> {
    let lower = oracle_vdk(points, k).half_edge_records(points);
    let upper = oracle_vdk(points, k + 1).half_edge_records(points);
    let mut cells: BTreeMap<Vec<usize>, Vec<Record>> = BTreeMap::new();
    for r in upper {
        cells.entry(cell_key(&r.closest, &[r.pair.0])).or_default().push(r);
    }
    let mut relevant: HashMap<Vec<usize>, Vec<Record>> = HashMap::new();
    for r in lower.into_iter().filter(record_is_relevant) {
        relevant.entry(cell_key(&r.closest, &[r.pair.0, r.pair.1])).or_default().push(r);
    }
    let mut out = Vec::new();
    for (cell, edges) in cells {
        let boundary = chain_boundary(edges);
        let rel = relevant.remove(&cell).unwrap_or_default();
        // Index of the relevant half-edge whose head is the tail of each
        // boundary edge, if any.
        let marks: Vec<Option<usize>> = boundary
            .iter()
            .map(|f| rel.iter().position(|e| matches!(f.tail, Endpoint::At(..)) && e.head == f.tail))
            .collect();
        let mut owner = vec![usize::MAX; boundary.len()];
        if let Some(last) = marks.iter().rposition(|m| m.is_some()) {
            let mut cur = marks[last].unwrap();
            for (i, m) in marks.iter().enumerate() {
                if let Some(m) = m {
                    cur = *m;
                }
                owner[i] = cur;
            }
        }
        out.push(CellIntervals { cell, boundary, relevant: rel, owner });
    }
    out
}

/// Orders the half-edges of one cell counterclockwise by matching heads to
/// tails.
fn chain_boundary(mut edges: Vec<Record>) -> Vec<Record> {
    let start = edges.iter().position(|e| matches!(e.tail, Endpoint::Inf(..))).unwrap_or(0);
    let mut out = vec![edges.swap_remove(start)];
    while !edges.is_empty() {
        let head = &out.last().unwrap().head;
        let i = edges
            .iter()
            .position(|e| matches!(head, Endpoint::At(..)) && &e.tail == head)
            .expect("cell boundary is connected");
        out.push(edges.swap_remove(i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> PointSet {
        PointSet::from_ints(&[(0, 0), (8, 0), (0, 6)])
    }

    #[test]
    fn triangle_nearest() {
        let recs = oracle_records(&triangle(), 1, false);
        let lines: Vec<String> = recs.iter().map(|r| r.to_string()).collect();
        assert_eq!(
            lines,
            [
                "k=1 closest= pair=0,1 tail=INF:0,-1 head=4/1,3/1 extraT=- extraH=2",
                "k=1 closest= pair=0,2 tail=4/1,3/1 head=INF:-1,0 extraT=1 extraH=-",
                "k=1 closest= pair=1,2 tail=INF:3,4 head=4/1,3/1 extraT=- extraH=0",
            ]
        );
    }

    #[test]
    fn triangle_farthest() {
        let recs = oracle_records(&triangle(), 2, false);
        let lines: Vec<String> = recs.iter().map(|r| r.to_string()).collect();
        assert_eq!(
            lines,
            [
                "k=2 closest=0 pair=1,2 tail=4/1,3/1 head=INF:-3,-4 extraT=0 extraH=-",
                "k=2 closest=1 pair=0,2 tail=INF:1,0 head=4/1,3/1 extraT=- extraH=1",
                "k=2 closest=2 pair=0,1 tail=4/1,3/1 head=INF:0,1 extraT=2 extraH=-",
            ]
        );
    }

    #[test]
    fn vertex_classes() {
        let d1 = oracle_vdk(&triangle(), 1);
        assert_eq!(d1.vertices.len(), 1);
        assert_eq!(d1.vertices[0].class, VertexClass::New);
        let d2 = oracle_vdk(&triangle(), 2);
        assert_eq!(d2.vertices[0].class, VertexClass::Old);
    }

    #[test]
    fn hull_of_square_with_center() {
        let p = PointSet::from_ints(&[(0, 0), (10, 1), (9, 11), (-1, 10), (5, 5)]);
        assert_eq!(oracle_hull(&p), vec![3, 2, 1, 0]);
    }

    #[test]
    fn verify_flags_defects() {
        let p = triangle();
        let expected = oracle_records(&p, 1, false);
        let mut run: Vec<Record> = expected.iter().cloned().collect();
        assert!(verify_run(&run, &expected, &p).is_clean());
        run.push(run[0].clone());
        let rep = verify_run(&run, &expected, &p);
        assert_eq!(rep.duplicated.len(), 1);
        run.truncate(2);
        let rep = verify_run(&run, &expected, &p);
        assert_eq!(rep.missing.len(), 1);
        let mut bogus = run[0].clone();
        bogus.closest = vec![2];
        let rep = verify_run(&[bogus], &expected, &p);
        assert_eq!((rep.spurious.len(), rep.invalid.len()), (1, 1));
    }

    #[test]
    fn distance_of_lattice_points() {
        let p = lattice_point(&BigRational::new(1.into(), 2.into()), &BigRational::new(1.into(), 3.into()), &BigInt::from(6));
        assert_eq!(p, HPoint::new(Int::from(3), Int::from(2), Int::one()));
        assert_eq!(crate::geometry::dist2(&Site::new(0, 0, 0), &Site::new(1, 3, 4)), Int::from(25));
    }
}
