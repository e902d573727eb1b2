//! One batched step along (k+1)-cell boundaries.
//!
//! For a relevant k-half-edge the step yields the first (k+1)-half-edge
//! of its interval; for a (k+1)-half-edge it yields the counterclockwise
//! successor around the cell on its left. At a bounded head the next
//! edge's sites follow from the head vertex alone; past an unbounded head
//! one pass over the input finds the edge coming back from infinity. A
//! second pass trims every chosen carrier to its endpoints.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::{bisector, cmp_ccw_from, cross, dot, EdgePiece, Keep, Site};
use crate::memory::{halfedge_words, ReadOnlyArena, WorkLedger, EDGE_WORDS, SITE_WORDS};
use crate::num::Int;

use super::halfedge::HalfEdge;

/// The sites of the next half-edge before its endpoints are known.
#[derive(Clone, Debug)]
struct Named {
    closest: Vec<usize>,
    left: usize,
    right: usize,
    /// The third site of the tail vertex, when it is already known.
    tail: Option<usize>,
}

/// Search state for the edge returning from infinity after the cell
/// `cell` was left along direction `(dx, dy)`.
struct Wrap {
    cell: Vec<Site>,
    dx: Int,
    dy: Int,
    best: Option<(Site, Site)>,
}

fn add(set: &[usize], x: usize) -> Vec<usize> {
    let mut v = set.to_vec();
    let pos = v.binary_search(&x).unwrap_err();
    v.insert(pos, x);
    v
}

fn remove(set: &[usize], x: usize) -> Vec<usize> {
    set.iter().copied().filter(|&y| y != x).collect()
}

/// Far along direction `u = rot90(t − w)` the site `t` drops below `w`
/// in the ranking. Returns whether the event `(t, w)` comes before
/// `(bt, bw)` counterclockwise from `(dx, dy)`; among parallel events the
/// one whose line leaves the cell first wins.
fn event_before(dx: &Int, dy: &Int, t: &Site, w: &Site, bt: &Site, bw: &Site) -> bool {
    let u = (&w.y - &t.y, &t.x - &w.x);
    let v = (&bw.y - &bt.y, &bt.x - &bw.x);
    match cmp_ccw_from((dx, dy), (&u.0, &u.1), (&v.0, &v.1)) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => {
            // The cell lies on the same side of all these parallel
            // bisectors; the one at the smallest offset
            // (|w|² − |t|²) / |t − w| bounds it.
            let (e1x, e1y) = (&t.x - &w.x, &t.y - &w.y);
            let (e2x, e2y) = (&bt.x - &bw.x, &bt.y - &bw.y);
            let c1 = &(&(&w.x * &w.x) + &(&w.y * &w.y)) - &(&(&t.x * &t.x) + &(&t.y * &t.y));
            let c2 = &(&(&bw.x * &bw.x) + &(&bw.y * &bw.y)) - &(&(&bt.x * &bt.x) + &(&bt.y * &bt.y));
            let lhs = &c1 * &dot(&e1x, &e1y, &e2x, &e2y);
            let rhs = &c2 * &dot(&e1x, &e1y, &e1x, &e1y);
            lhs < rhs
        }
    }
}

/// For each input, `None` if it is a k-half-edge that is not relevant,
/// otherwise the (k+1)-half-edge that follows it. Inputs must be relevant
/// or non-relevant k-half-edges, or (k+1)-half-edges whose head is new or
/// unbounded. Reads the input twice (once more if some head is unbounded).
pub fn successor_step(arena: &ReadOnlyArena, ledger: &WorkLedger, k: usize, inputs: &[HalfEdge]) -> Result<Vec<Option<HalfEdge>>> {
    let m = inputs.len();
    let _w = ledger.charge(m * (halfedge_words(k + 1) + EDGE_WORDS + SITE_WORDS))?;
    let mut named: Vec<Option<Named>> = vec![None; m];
    let mut wraps: Vec<(usize, Wrap)> = Vec::new();
    let mut wrap_charge = ledger.charge(0)?;
    for (i, e) in inputs.iter().enumerate() {
        if e.k == k {
            let Some(x) = e.head.filter(|_| e.is_relevant()) else { continue };
            let (a, b) = (arena.read(e.left)?, arena.read(e.right)?);
            let sx = arena.read(x)?;
            // Leaving the head vertex with the enclosing cell on the left:
            // along B(b, x) with a among the closest, or along B(a, x)
            // with b among the closest.
            let along_bx = bisector(b, sx)?.difference(b, a).0.signum() > 0;
            named[i] = Some(if along_bx {
                Named { closest: add(&e.closest, e.left), left: e.right, right: x, tail: Some(e.left) }
            } else {
                Named { closest: add(&e.closest, e.right), left: e.left, right: x, tail: Some(e.right) }
            });
        } else if e.k == k + 1 {
            match e.head {
                Some(h) if e.is_closest(h) => {
                    return Err(Error::Inconsistent(format!("walk continued past an old head at site {h}")));
                }
                Some(h) => {
                    named[i] = Some(Named { closest: e.closest.clone(), left: e.left, right: h, tail: Some(e.right) });
                }
                None => {
                    let cell = e.cell();
                    wrap_charge.resize(wrap_charge.words() + (cell.len() + 2) * SITE_WORDS)?;
                    let sites = cell.iter().map(|&c| arena.read(c).cloned()).collect::<Result<Vec<Site>>>()?;
                    let (a, b) = (arena.read(e.left)?, arena.read(e.right)?);
                    wraps.push((i, Wrap { cell: sites, dx: &a.y - &b.y, dy: &b.x - &a.x, best: None }));
                }
            }
        } else {
            return Err(Error::Inconsistent(format!("order {} fed to the step for order {}", e.k, k + 1)));
        }
    }
    if !wraps.is_empty() {
        for j in 0..arena.len() {
            let w = arena.get(j);
            for (_, wr) in wraps.iter_mut() {
                if wr.cell.iter().any(|c| c.index == j) {
                    continue;
                }
                for t in &wr.cell {
                    let u = (&w.y - &t.y, &t.x - &w.x);
                    if cross(&wr.dx, &wr.dy, &u.0, &u.1).is_zero() && dot(&wr.dx, &wr.dy, &u.0, &u.1).signum() > 0 {
                        continue;
                    }
                    let better = match &wr.best {
                        None => true,
                        Some((bt, bw)) => event_before(&wr.dx, &wr.dy, t, w, bt, bw),
                    };
                    if better {
                        wr.best = Some((t.clone(), w.clone()));
                    }
                }
            }
        }
        for (i, wr) in wraps {
            let (t, w) = wr.best.ok_or_else(|| Error::Inconsistent("no edge returns from infinity".into()))?;
            let cell: Vec<usize> = wr.cell.iter().map(|c| c.index).collect();
            named[i] = Some(Named { closest: remove(&cell, t.index), left: t.index, right: w.index, tail: None });
        }
    }
    drop(wrap_charge);

    let mut pieces: Vec<Option<(Site, EdgePiece)>> = Vec::with_capacity(m);
    for n in &named {
        pieces.push(match n {
            None => None,
            Some(n) => {
                let l = arena.read(n.left)?.clone();
                let r = arena.read(n.right)?;
                let line = EdgePiece::line(bisector(&l, r)?);
                Some((l, line))
            }
        });
    }
    let mut alive: Vec<bool> = pieces.iter().map(Option::is_some).collect();
    for j in 0..arena.len() {
        let c = arena.get(j);
        for ((slot, n), ok) in pieces.iter_mut().zip(&named).zip(alive.iter_mut()) {
            let (Some((l, piece)), Some(n)) = (slot.as_mut(), n) else { continue };
            if !*ok || j == n.left || j == n.right {
                continue;
            }
            let keep = if n.closest.binary_search(&j).is_ok() { Keep::Farther } else { Keep::Nearer };
            match piece.clone().clip(l, c, keep) {
                Some(p) => *piece = p,
                None => *ok = false,
            }
        }
    }

    let mut out = Vec::with_capacity(m);
    for ((slot, n), ok) in pieces.into_iter().zip(named).zip(alive) {
        let (Some((_, piece)), Some(n)) = (slot, n) else {
            out.push(None);
            continue;
        };
        if !ok {
            return Err(Error::Inconsistent(format!("B({}, {}) vanished when trimmed", n.left, n.right)));
        }
        let f = HalfEdge::from_piece(k + 1, n.closest, &piece);
        if f.tail != n.tail {
            return Err(Error::Inconsistent(format!("half-edge on B({}, {}) starts at the wrong vertex", n.left, n.right)));
        }
        out.push(Some(f));
    }
    Ok(out)
}
