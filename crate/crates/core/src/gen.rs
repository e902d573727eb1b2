//! Seeded generators of point sets in general position.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{incircle_raw, PointSet, Site};
use crate::num::{primitive, Int};

/// Coordinates are drawn from `0..=COORD_RANGE`. Differences stay below
/// 2^15, so every predicate on generated input fits in `i128`.
pub const COORD_RANGE: i64 = 30_000;

/// Up to this size, candidates are also checked against every cocircular
/// quadruple; beyond it the odds are negligible on this lattice.
pub const COCIRCULAR_CHECK_LIMIT: usize = 64;

fn direction_key(dx: i64, dy: i64) -> (i64, i64) {
    let (x, y) = primitive(&Int::from(dx), &Int::from(dy));
    let (x, y) = match (x, y) {
        (Int::Small(x), Int::Small(y)) => (x as i64, y as i64),
        _ => unreachable!("small coordinates"),
    };
    if x < 0 || (x == 0 && y < 0) {
        (-x, -y)
    } else {
        (x, y)
    }
}

/// `n` random integer sites with no duplicates and no three collinear
/// (and, for `n ≤ 64`, no four cocircular).
pub fn random_general_position(n: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<(i64, i64)> = Vec::with_capacity(n);
    let mut dirs: Vec<HashSet<(i64, i64)>> = Vec::with_capacity(n);
    let mut occupied: HashSet<(i64, i64)> = HashSet::new();
    while pts.len() < n {
        let c = (rng.gen_range(0..=COORD_RANGE), rng.gen_range(0..=COORD_RANGE));
        if occupied.contains(&c) {
            continue;
        }
        let keys: Vec<(i64, i64)> = pts.iter().map(|p| direction_key(c.0 - p.0, c.1 - p.1)).collect();
        if keys.iter().zip(&dirs).any(|(k, d)| d.contains(k)) {
            continue;
        }
        if n <= COCIRCULAR_CHECK_LIMIT && closes_circle(&pts, c) {
            continue;
        }
        for (d, k) in dirs.iter_mut().zip(&keys) {
            d.insert(*k);
        }
        let mut own = HashSet::new();
        own.extend(keys.iter().copied());
        dirs.push(own);
        occupied.insert(c);
        pts.push(c);
    }
    PointSet::from_ints(&pts)
}

fn closes_circle(pts: &[(i64, i64)], c: (i64, i64)) -> bool {
    let s: Vec<Site> = pts.iter().enumerate().map(|(i, &(x, y))| Site::new(i, x, y)).collect();
    let d = Site::new(pts.len(), c.0, c.1);
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            for k in j + 1..s.len() {
                if incircle_raw(&s[i], &s[j], &s[k], &d) == 0 {
                    return true;
                }
            }
        }
    }
    false
}

/// `n` sites on the parabola `y = x²` at `x = 1..=n`, shuffled. All are
/// hull vertices; no three are collinear and no four concyclic because
/// the abscissae are positive.
pub fn convex_position(n: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs: Vec<i64> = (1..=n as i64).collect();
    for i in (1..xs.len()).rev() {
        let j = rng.gen_range(0..=i);
        xs.swap(i, j);
    }
    let pts: Vec<(i64, i64)> = xs.iter().map(|&x| (x, x * x)).collect();
    PointSet::from_ints(&pts)
}
