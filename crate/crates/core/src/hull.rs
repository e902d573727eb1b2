//! Convex hull streaming in clockwise order with a window of `s` sites.
//!
//! Each pass over the input collects the `s` sites that come first
//! clockwise around the current hull vertex and wraps them in memory. A
//! wrapped edge is kept only if every site outside the window is
//! guaranteed to lie on its right, so each pass confirms at least one
//! vertex and usually many.

use std::cmp::Ordering;
use std::collections::VecDeque;

use crate::error::Result;
use crate::geometry::{cross, orient, Site};
use crate::memory::{Charge, ReadOnlyArena, WorkLedger, SITE_WORDS};

/// A hull vertex with its clockwise predecessor and successor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullVertex {
    pub prev: usize,
    pub site: usize,
    pub next: usize,
}

/// Pull-based clockwise hull stream.
pub struct HullStream<'a> {
    arena: &'a ReadOnlyArena,
    ledger: &'a WorkLedger,
    s: usize,
    first: Option<Site>,
    /// `chain[0]` was emitted last (or precedes the first vertex),
    /// `chain[1]` is emitted next; later entries are confirmed vertices.
    chain: VecDeque<Site>,
    closed: bool,
    finished: bool,
    _charge: Charge<'a>,
}

/// `Less` iff `x` comes before `y` clockwise around the hull vertex `c`.
fn cw_order(c: &Site, x: &Site, y: &Site) -> Ordering {
    match orient(c, x, y) {
        o if o < 0 => Ordering::Less,
        o if o > 0 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

impl<'a> HullStream<'a> {
    pub fn new(arena: &'a ReadOnlyArena, ledger: &'a WorkLedger, s: usize) -> Result<HullStream<'a>> {
        let s = s.max(1);
        // The chain never exceeds s + 2 sites, plus the first vertex.
        let charge = ledger.charge((s + 3) * SITE_WORDS)?;
        Ok(HullStream { arena, ledger, s, first: None, chain: VecDeque::new(), closed: false, finished: false, _charge: charge })
    }

    /// The next hull vertex clockwise, starting from the lexicographically
    /// smallest site.
    pub fn next_vertex(&mut self) -> Result<Option<HullVertex>> {
        if self.finished {
            return Ok(None);
        }
        if self.first.is_none() {
            self.start();
        }
        while self.chain.len() < 3 && !self.closed {
            self.pass()?;
        }
        let v = HullVertex { prev: self.chain[0].index, site: self.chain[1].index, next: self.chain[2].index };
        self.chain.pop_front();
        if self.closed && self.chain.len() == 2 {
            self.finished = true;
        }
        Ok(Some(v))
    }

    fn start(&mut self) {
        let mut best = self.arena.get(0).clone();
        for i in 1..self.arena.len() {
            let x = self.arena.get(i);
            if (&x.x, &x.y) < (&best.x, &best.y) {
                best = x.clone();
            }
        }
        self.first = Some(best.clone());
        self.chain.push_back(best);
    }

    /// One pass around the last confirmed vertex.
    fn pass(&mut self) -> Result<()> {
        // Window, center, `last` and `before`.
        let _w = self.ledger.charge((self.s + 3) * SITE_WORDS)?;
        let c = self.chain.back().unwrap().clone();
        let mut window: Vec<Site> = Vec::with_capacity(self.s + 1);
        let mut last: Option<Site> = None;
        let mut seen = 0usize;
        for i in 0..self.arena.len() {
            if i == c.index {
                continue;
            }
            let x = self.arena.get(i);
            seen += 1;
            if last.as_ref().map_or(true, |l| cw_order(&c, l, x) == Ordering::Less) {
                last = Some(x.clone());
            }
            if window.len() == self.s && cw_order(&c, x, &window[self.s - 1]) != Ordering::Less {
                continue;
            }
            let pos = window.partition_point(|w| cw_order(&c, w, x) == Ordering::Less);
            window.insert(pos, x.clone());
            window.truncate(self.s);
        }
        let complete = seen <= self.s;
        let before = if self.chain.len() >= 2 { self.chain[self.chain.len() - 2].clone() } else { last.unwrap() };
        if self.chain.len() == 1 {
            self.chain.push_front(before.clone());
        }
        let first = self.first.clone().unwrap();
        let edge_ok = |v: &Site, u: &Site| -> bool {
            if complete {
                return true;
            }
            let (ex, ey) = (&u.x - &v.x, &u.y - &v.y);
            let ws = &window[window.len() - 1];
            orient(v, u, &c) <= 0
                && cross(&ex, &ey, &(&ws.x - &c.x), &(&ws.y - &c.y)).signum() <= 0
                && cross(&ex, &ey, &(&before.x - &c.x), &(&before.y - &c.y)).signum() <= 0
        };
        let mut cur = window[0].clone();
        self.chain.push_back(cur.clone());
        if cur.index == first.index {
            self.closed = true;
            return Ok(());
        }
        loop {
            let mut best: Option<&Site> = None;
            for x in window.iter().chain(std::iter::once(&c)) {
                if x.index == cur.index {
                    continue;
                }
                if best.map_or(true, |b| orient(&cur, b, x) > 0) {
                    best = Some(x);
                }
            }
            let best = best.unwrap().clone();
            if best.index == c.index || !edge_ok(&cur, &best) {
                return Ok(());
            }
            self.chain.push_back(best.clone());
            if best.index == first.index {
                self.closed = true;
                return Ok(());
            }
            cur = best;
        }
    }
}

/// Streams every hull vertex clockwise to `visit`.
pub fn hull_chunked(
    arena: &ReadOnlyArena,
    ledger: &WorkLedger,
    s: usize,
    mut visit: impl FnMut(&HullVertex) -> Result<()>,
) -> Result<()> {
    let mut stream = HullStream::new(arena, ledger, s)?;
    while let Some(v) = stream.next_vertex()? {
        visit(&v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{convex_position, random_general_position};
    use crate::geometry::PointSet;
    use crate::oracle::oracle_hull;

    fn run(points: PointSet, s: usize) -> (Vec<HullVertex>, u64) {
        let a = ReadOnlyArena::new(points);
        let l = WorkLedger::enforcing(64 * s.max(1));
        let mut out = Vec::new();
        hull_chunked(&a, &l, s, |v| {
            out.push(v.clone());
            Ok(())
        })
        .unwrap();
        (out, a.read_count())
    }

    fn check(points: PointSet, s: usize) {
        let expected = oracle_hull(&points);
        let (got, _) = run(points, s);
        let sites: Vec<usize> = got.iter().map(|v| v.site).collect();
        assert_eq!(sites, expected, "s = {s}");
        let h = got.len();
        for i in 0..h {
            assert_eq!(got[i].next, got[(i + 1) % h].site);
            assert_eq!(got[(i + 1) % h].prev, got[i].site);
        }
    }

    #[test]
    fn triangle_is_clockwise() {
        let p = PointSet::from_ints(&[(0, 0), (8, 0), (0, 6)]);
        let (got, _) = run(p, 1);
        let sites: Vec<usize> = got.iter().map(|v| v.site).collect();
        assert_eq!(sites, vec![0, 2, 1]);
    }

    #[test]
    fn random_sets_match_oracle() {
        for seed in 0..20 {
            for s in [1, 2, 3, 5, 8, 64] {
                check(random_general_position(12 + seed as usize, seed), s);
            }
        }
    }

    #[test]
    fn convex_position_visits_each_once() {
        for s in [1, 4, 16, 100] {
            check(convex_position(40, 3), s);
        }
    }

    #[test]
    fn larger_window_reads_less() {
        let p = convex_position(200, 9);
        let (_, r1) = run(p.clone(), 2);
        let (_, r2) = run(p, 50);
        assert!(r2 * 5 < r1, "{r2} vs {r1}");
    }
}
