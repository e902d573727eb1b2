//! In-workspace diagrams of a small site set, stored as their dual
//! adjacency: Delaunay neighbors for the nearest-site diagram and
//! farthest-point Delaunay neighbors for the farthest-site diagram.
//!
//! A site's cell in the diagram is the intersection of the halfplanes
//! toward (or away from) its neighbors, which is all that point location
//! and clipping against the set need.

use std::collections::HashMap;

use crate::error::Result;
use crate::geometry::{in_disk, incircle_raw, orient, Site};
use crate::memory::{Charge, WorkLedger, DIAGRAM_WORDS_PER_SITE};
use crate::scan::Mode;

const GHOST: usize = usize::MAX;

/// Delaunay neighbors by Bowyer–Watson insertion with ghost triangles for
/// the hull edges. Quadratic; meant for sets of a few hundred sites.
pub fn delaunay_neighbors(sites: &[Site]) -> Vec<Vec<usize>> {
    let m = sites.len();
    let mut adj = vec![Vec::new(); m];
    if m < 2 {
        return adj;
    }
    if m == 2 {
        adj[0].push(1);
        adj[1].push(0);
        return adj;
    }
    let (a, b, c) = if orient(&sites[0], &sites[1], &sites[2]) > 0 { (0, 1, 2) } else { (0, 2, 1) };
    // Real triangles are counterclockwise; a ghost [v, u, GHOST] sits
    // outside the hull edge u → v.
    let mut tris: Vec<[usize; 3]> = vec![[a, b, c], [b, a, GHOST], [c, b, GHOST], [a, c, GHOST]];
    let mut cavity: Vec<[usize; 3]> = Vec::new();
    let mut rim: Vec<(usize, usize)> = Vec::new();
    for x in 3..m {
        cavity.clear();
        let mut i = 0;
        while i < tris.len() {
            let t = tris[i];
            let conflict = if t[2] == GHOST {
                orient(&sites[t[0]], &sites[t[1]], &sites[x]) > 0
            } else {
                incircle_raw(&sites[t[0]], &sites[t[1]], &sites[t[2]], &sites[x]) > 0
            };
            if conflict {
                cavity.push(tris.swap_remove(i));
            } else {
                i += 1;
            }
        }
        rim.clear();
        for t in &cavity {
            for j in 0..3 {
                let e = (t[j], t[(j + 1) % 3]);
                let shared = cavity.iter().any(|u| (0..3).any(|k| (u[k], u[(k + 1) % 3]) == (e.1, e.0)));
                if !shared {
                    rim.push(e);
                }
            }
        }
        for &(p, q) in &rim {
            tris.push(if p == GHOST {
                [q, x, GHOST]
            } else if q == GHOST {
                [x, p, GHOST]
            } else {
                [p, q, x]
            });
        }
    }
    for t in &tris {
        for j in 0..3 {
            let (p, q) = (t[j], t[(j + 1) % 3]);
            if p != GHOST && q != GHOST && !adj[p].contains(&q) {
                adj[p].push(q);
                adj[q].push(p);
            }
        }
    }
    adj
}

/// Hull vertices of an in-memory set in counterclockwise order
/// (monotone chain).
pub fn hull_ccw(sites: &[Site]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..sites.len()).collect();
    idx.sort_by(|&a, &b| (&sites[a].x, &sites[a].y).cmp(&(&sites[b].x, &sites[b].y)));
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && orient(&sites[lower[lower.len() - 2]], &sites[lower[lower.len() - 1]], &sites[i]) <= 0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && orient(&sites[upper[upper.len() - 2]], &sites[upper[upper.len() - 1]], &sites[i]) <= 0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Farthest-point Delaunay neighbors. Only hull vertices have any.
///
/// Triangulates the hull polygon from a hull edge: the apex over a chord
/// is the vertex on the open side whose circle with the chord encloses
/// all the others there.
pub fn farthest_neighbors(sites: &[Site]) -> Vec<Vec<usize>> {
    let m = sites.len();
    let mut adj = vec![Vec::new(); m];
    if m < 2 {
        return adj;
    }
    let hull = hull_ccw(sites);
    let h = hull.len();
    let link = |a: usize, b: usize, adj: &mut Vec<Vec<usize>>| {
        if !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    };
    if h == 2 {
        link(hull[0], hull[1], &mut adj);
        return adj;
    }
    // Chords are hull position pairs (i, j), i < j, with candidates i+1..j.
    let mut stack = vec![(0usize, h - 1)];
    link(hull[0], hull[h - 1], &mut adj);
    while let Some((i, j)) = stack.pop() {
        if j - i < 2 {
            continue;
        }
        let (a, b) = (&sites[hull[i]], &sites[hull[j]]);
        let mut best = i + 1;
        for c in i + 2..j {
            if !in_disk(a, b, &sites[hull[best]], &sites[hull[c]]) {
                best = c;
            }
        }
        link(hull[i], hull[best], &mut adj);
        link(hull[best], hull[j], &mut adj);
        stack.push((i, best));
        stack.push((best, j));
    }
    adj
}

/// A nearest- or farthest-site diagram of an in-memory set, charged to
/// the ledger while it lives.
pub struct BatchDiagram<'a> {
    pub mode: Mode,
    pub sites: Vec<Site>,
    neighbors: Vec<Vec<usize>>,
    local: HashMap<usize, usize>,
    _charge: Charge<'a>,
}

impl<'a> BatchDiagram<'a> {
    /// Whether `site` (a global index) belongs to the set.
    pub fn contains(&self, site: usize) -> bool {
        self.local.contains_key(&site)
    }

    /// Sites whose bisector with `site` bounds its cell.
    pub fn neighbors(&self, site: usize) -> impl Iterator<Item = &Site> {
        let list: &[usize] = match self.local.get(&site) {
            Some(&i) => &self.neighbors[i],
            None => &[],
        };
        list.iter().map(move |&j| &self.sites[j])
    }

    /// Number of diagram edges.
    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Neighbor pairs `(a, b)` with `a < b` in global indices.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb {
                let (a, b) = (self.sites[i].index, self.sites[j].index);
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Builds the diagram of `sites`, charging [`DIAGRAM_WORDS_PER_SITE`] words
/// per site.
pub fn batch_diagram(ledger: &WorkLedger, sites: Vec<Site>, mode: Mode) -> Result<BatchDiagram<'_>> {
    let charge = ledger.charge(sites.len() * DIAGRAM_WORDS_PER_SITE)?;
    let neighbors = match mode {
        Mode::Nearest => delaunay_neighbors(&sites),
        Mode::Farthest => farthest_neighbors(&sites),
    };
    let local = sites.iter().enumerate().map(|(i, s)| (s.index, i)).collect();
    Ok(BatchDiagram { mode, sites, neighbors, local, _charge: charge })
}
