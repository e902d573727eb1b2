//! Order-m diagrams of small in-memory site sets by lifting one order at
//! a time: inside the j-cell of `R`, the (j+1)-edges are the edges of the
//! nearest-site diagram of the remaining sites.

use std::collections::BTreeSet;

use crate::delaunay::batch_diagram;
use crate::error::Result;
use crate::geometry::{bisector, EdgePiece, Keep, Site};
use crate::memory::{Charge, WorkLedger, EDGE_WORDS};
use crate::scan::Mode;

/// An edge of an order-m diagram: closest `m − 1` sites and the piece of
/// `B(a, b)`, `a < b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderEdge {
    pub closest: Vec<usize>,
    pub a: usize,
    pub b: usize,
    pub piece: EdgePiece,
}

impl OrderEdge {
    pub fn cells(&self) -> [Vec<usize>; 2] {
        let add = |x: usize| {
            let mut v = self.closest.clone();
            let pos = v.binary_search(&x).unwrap_err();
            v.insert(pos, x);
            v
        };
        [add(self.a), add(self.b)]
    }
}

/// An order-m diagram held in the workspace.
pub struct OrderDiagram<'l> {
    pub order: usize,
    pub edges: Vec<OrderEdge>,
    _charge: Charge<'l>,
}

/// The edges of the order-`order` diagram of `sites`.
pub fn batch_order_diagram<'l>(ledger: &'l WorkLedger, sites: &[Site], order: usize) -> Result<OrderDiagram<'l>> {
    let mut charge = ledger.charge(0)?;
    let mut cells: Vec<Vec<usize>> = vec![Vec::new()];
    let mut edges = Vec::new();
    for j in 0..order {
        edges = Vec::new();
        for r in &cells {
            let rest: Vec<Site> = sites.iter().filter(|s| r.binary_search(&s.index).is_err()).cloned().collect();
            if rest.len() < 2 {
                continue;
            }
            let inside: Vec<&Site> = sites.iter().filter(|s| r.binary_search(&s.index).is_ok()).collect();
            let nvd = batch_diagram(ledger, rest.clone(), Mode::Nearest)?;
            for (a, b) in nvd.adjacent_pairs() {
                let sa = rest.iter().find(|s| s.index == a).expect("pair site");
                let sb = rest.iter().find(|s| s.index == b).expect("pair site");
                let mut piece = Some(EdgePiece::line(bisector(sa, sb)?));
                for y in nvd.neighbors(a).filter(|y| y.index != b) {
                    piece = piece.and_then(|e| e.clip(sa, y, Keep::Nearer));
                }
                for x in &inside {
                    piece = piece.and_then(|e| e.clip(sa, x, Keep::Farther));
                }
                if let Some(piece) = piece {
                    edges.push(OrderEdge { closest: r.clone(), a, b, piece });
                }
            }
        }
        charge.resize(edges.len() * (EDGE_WORDS + j + 2) + cells.len() * j)?;
        if j + 1 < order {
            let next: BTreeSet<Vec<usize>> = edges.iter().flat_map(|e| e.cells()).collect();
            cells = next.into_iter().collect();
        }
    }
    charge.resize(edges.len() * (EDGE_WORDS + order + 1))?;
    Ok(OrderDiagram { order, edges, _charge: charge })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_general_position;
    use crate::geometry::PointSet;
    use crate::oracle::oracle_vdk;
    use crate::record::Record;

    fn records(points: &PointSet, d: &OrderDiagram<'_>) -> BTreeSet<Record> {
        let s = points.sites();
        d.edges
            .iter()
            .map(|e| Record::from_piece(d.order, e.closest.clone(), &e.piece, &s[e.a], &s[e.b], points.scale(), false))
            .collect()
    }

    #[test]
    fn matches_oracle_at_every_order() {
        for seed in 0..6 {
            let p = random_general_position(6 + seed as usize, 300 + seed);
            let l = WorkLedger::observing(1);
            for m in 1..p.len() {
                let d = batch_order_diagram(&l, p.sites(), m).unwrap();
                assert_eq!(records(&p, &d), oracle_vdk(&p, m).records(&p), "seed {seed} order {m}");
            }
            assert_eq!(l.live(), 0);
        }
    }

    #[test]
    fn order_one_is_the_nearest_diagram() {
        let p = random_general_position(15, 4);
        let l = WorkLedger::observing(1);
        let d = batch_order_diagram(&l, p.sites(), 1).unwrap();
        let nvd = batch_diagram(&l, p.sites().to_vec(), Mode::Nearest).unwrap();
        let pairs: Vec<(usize, usize)> = d.edges.iter().map(|e| (e.a, e.b)).collect();
        assert_eq!(pairs, nvd.adjacent_pairs());
    }

    #[test]
    fn a_single_cell_has_no_edges() {
        let p = random_general_position(4, 2);
        let l = WorkLedger::observing(1);
        assert!(batch_order_diagram(&l, p.sites(), 4).unwrap().edges.is_empty());
    }
}
