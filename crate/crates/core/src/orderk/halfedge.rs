//! Directed half-edges of an order-k diagram, named by `k + 3` sites.

use crate::error::{Error, Result};
use crate::geometry::{bisector, EdgePiece, End, VertexClass};
use crate::memory::{halfedge_words, ReadOnlyArena};
use crate::num::Int;
use crate::record::Record;

/// A k-half-edge: the `k − 1` closest sites, the pair tied next (the cell
/// `closest ∪ {left}` lies to the left), and the third site of each
/// endpoint (`None` at infinity).
///
/// The carrier is `B(left, right)` directed along `rot90(right − left)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub k: usize,
    pub closest: Vec<usize>,
    pub left: usize,
    pub right: usize,
    pub tail: Option<usize>,
    pub head: Option<usize>,
}

fn with(set: &[usize], x: usize) -> Vec<usize> {
    let mut v = set.to_vec();
    let pos = v.binary_search(&x).unwrap_err();
    v.insert(pos, x);
    v
}

impl HalfEdge {
    /// The half-edge along `piece`, whose carrier must be `B(left, right)`.
    pub fn from_piece(k: usize, mut closest: Vec<usize>, piece: &EdgePiece) -> HalfEdge {
        closest.sort_unstable();
        HalfEdge {
            k,
            closest,
            left: piece.carrier.p,
            right: piece.carrier.q,
            tail: piece.lo.as_ref().map(|e| e.site),
            head: piece.hi.as_ref().map(|e| e.site),
        }
    }

    pub fn words(&self) -> usize {
        halfedge_words(self.k)
    }

    pub fn is_closest(&self, site: usize) -> bool {
        self.closest.binary_search(&site).is_ok()
    }

    /// The k-cell to the left.
    pub fn cell(&self) -> Vec<usize> {
        with(&self.closest, self.left)
    }

    /// The k-cell to the right.
    pub fn right_cell(&self) -> Vec<usize> {
        with(&self.closest, self.right)
    }

    /// The (k+1)-cell containing the edge.
    pub fn enclosing(&self) -> Vec<usize> {
        with(&self.cell(), self.right)
    }

    /// The same edge in the opposite direction.
    pub fn twin(&self) -> HalfEdge {
        HalfEdge {
            k: self.k,
            closest: self.closest.clone(),
            left: self.right,
            right: self.left,
            tail: self.head,
            head: self.tail,
        }
    }

    /// Old iff the head's third site is among the closest.
    pub fn classify_head(&self) -> Result<VertexClass> {
        match self.head {
            None => Err(Error::UnboundedHead),
            Some(x) if self.is_closest(x) => Ok(VertexClass::Old),
            Some(_) => Ok(VertexClass::New),
        }
    }

    /// Whether the head lies on the boundary of the enclosing (k+1)-cell,
    /// which holds exactly when it is a new vertex.
    pub fn is_relevant(&self) -> bool {
        matches!(self.classify_head(), Ok(VertexClass::New))
    }

    /// Rebuilds the geometry from the site names.
    pub fn piece(&self, arena: &ReadOnlyArena) -> Result<EdgePiece> {
        let (l, r) = (arena.read(self.left)?, arena.read(self.right)?);
        let carrier = bisector(l, r)?;
        let end = |x: Option<usize>| -> Result<Option<End>> {
            match x {
                None => Ok(None),
                Some(x) => {
                    let t = carrier.crossing(l, arena.read(x)?).ok_or_else(|| {
                        Error::Inconsistent(format!("site {x} does not cut B({}, {})", self.left, self.right))
                    })?;
                    Ok(Some(End { site: x, t }))
                }
            }
        };
        let lo = end(self.tail)?;
        let hi = end(self.head)?;
        Ok(EdgePiece { carrier, lo, hi })
    }

    /// The directed output record.
    pub fn record(&self, arena: &ReadOnlyArena) -> Result<Record> {
        let piece = self.piece(arena)?;
        let (l, r) = (arena.get(self.left), arena.get(self.right));
        Ok(Record::from_piece(self.k, self.closest.clone(), &piece, l, r, arena.scale(), true))
    }

    /// Reads the site names back from a directed record.
    pub fn from_record(rec: &Record) -> HalfEdge {
        let mut closest = rec.closest.clone();
        closest.sort_unstable();
        HalfEdge { k: rec.k, closest, left: rec.pair.0, right: rec.pair.1, tail: rec.extra_t, head: rec.extra_h }
    }
}

/// The sum of a cell's site coordinates: the center of gravity with the
/// common denominator cleared. Distinct cells of one order have distinct
/// keys.
pub type CogKey = (Int, Int);

pub fn cog_key(arena: &ReadOnlyArena, cell: &[usize]) -> Result<CogKey> {
    let mut x = Int::zero();
    let mut y = Int::zero();
    for &i in cell {
        let s = arena.read(i)?;
        x = &x + &s.x;
        y = &y + &s.y;
    }
    Ok((x, y))
}
