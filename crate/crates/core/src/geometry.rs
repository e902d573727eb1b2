//! Exact primitives: orientation, in-circle, bisectors, ray hits,
//! circumcenters, one-dimensional clipping along a bisector, and the
//! general-position check.
//!
//! Coordinates live on an integer lattice. A [`PointSet`] parsed from
//! decimal or rational input records the common denominator as `scale`;
//! all predicates are invariant under that scaling and output converts
//! back to the caller's units.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::GeometryError;
use crate::num::{primitive, Frac, Int};

/// An input point. `x` and `y` are lattice coordinates; divide by the
/// owning set's scale to get the input value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Site {
    pub index: usize,
    pub x: Int,
    pub y: Int,
}

impl Site {
    pub fn new(index: usize, x: impl Into<Int>, y: impl Into<Int>) -> Site {
        Site { index, x: x.into(), y: y.into() }
    }
}

/// A point with rational coordinates `(x / w, y / w)`, `w > 0`.
#[derive(Clone, Debug)]
pub struct HPoint {
    pub x: Int,
    pub y: Int,
    pub w: Int,
}

impl HPoint {
    pub fn new(x: Int, y: Int, w: Int) -> HPoint {
        if w.signum() < 0 {
            HPoint { x: -x, y: -y, w: -w }
        } else {
            HPoint { x, y, w }
        }
    }

    pub fn from_site(s: &Site) -> HPoint {
        HPoint { x: s.x.clone(), y: s.y.clone(), w: Int::one() }
    }

    /// Squared distance to a site, as a fraction.
    pub fn dist2(&self, s: &Site) -> Frac {
        let dx = &self.x - &(&s.x * &self.w);
        let dy = &self.y - &(&s.y * &self.w);
        Frac::new(&(&dx * &dx) + &(&dy * &dy), &self.w * &self.w)
    }

    /// Exact coordinates in input units.
    pub fn to_rational(&self, scale: &BigInt) -> (BigRational, BigRational) {
        let den = self.w.to_big() * scale;
        (
            BigRational::new(self.x.to_big(), den.clone()),
            BigRational::new(self.y.to_big(), den),
        )
    }
}

impl PartialEq for HPoint {
    fn eq(&self, o: &HPoint) -> bool {
        &self.x * &o.w == &o.x * &self.w && &self.y * &o.w == &o.y * &self.w
    }
}

/// An immutable, validated-on-demand collection of sites.
#[derive(Clone, Debug)]
pub struct PointSet {
    sites: Vec<Site>,
    scale: BigInt,
}

impl PointSet {
    /// Integer coordinates, scale 1.
    pub fn from_ints(coords: &[(i64, i64)]) -> PointSet {
        let sites = coords.iter().enumerate().map(|(i, &(x, y))| Site::new(i, x, y)).collect();
        PointSet { sites, scale: BigInt::one() }
    }

    /// Exact rational coordinates; the lattice scale is the lcm of all
    /// denominators.
    pub fn from_rationals(coords: &[(BigRational, BigRational)]) -> PointSet {
        let mut scale = BigInt::one();
        for (x, y) in coords {
            scale = num_integer::Integer::lcm(&scale, x.denom());
            scale = num_integer::Integer::lcm(&scale, y.denom());
        }
        let sites = coords
            .iter()
            .enumerate()
            .map(|(i, (x, y))| {
                let sx = (x * BigRational::from_integer(scale.clone())).to_integer();
                let sy = (y * BigRational::from_integer(scale.clone())).to_integer();
                Site { index: i, x: Int::from_big(sx), y: Int::from_big(sy) }
            })
            .collect();
        PointSet { sites, scale }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    pub fn site(&self, i: usize) -> &Site {
        &self.sites[i]
    }
}

/// Sign of the signed area of `(a, b, c)`: +1 counterclockwise, -1 clockwise,
/// 0 collinear.
pub fn orient(a: &Site, b: &Site, c: &Site) -> i32 {
    orient_xy(&a.x, &a.y, &b.x, &b.y, &c.x, &c.y)
}

pub fn orient_xy(ax: &Int, ay: &Int, bx: &Int, by: &Int, cx: &Int, cy: &Int) -> i32 {
    let ux = bx - ax;
    let uy = by - ay;
    let vx = cx - ax;
    let vy = cy - ay;
    (&(&ux * &vy) - &(&uy * &vx)).signum()
}

/// 2D cross product `u × v`.
pub fn cross(ux: &Int, uy: &Int, vx: &Int, vy: &Int) -> Int {
    &(ux * vy) - &(uy * vx)
}

pub fn dot(ux: &Int, uy: &Int, vx: &Int, vy: &Int) -> Int {
    &(ux * vx) + &(uy * vy)
}

/// In-circle determinant sign without the collinearity check. Positive iff
/// `d` is strictly inside the circle through `a, b, c` when `(a, b, c)` is
/// counterclockwise; the sign flips under odd permutations.
pub fn incircle_raw(a: &Site, b: &Site, c: &Site, d: &Site) -> i32 {
    let adx = &a.x - &d.x;
    let ady = &a.y - &d.y;
    let bdx = &b.x - &d.x;
    let bdy = &b.y - &d.y;
    let cdx = &c.x - &d.x;
    let cdy = &c.y - &d.y;
    let ad = &(&adx * &adx) + &(&ady * &ady);
    let bd = &(&bdx * &bdx) + &(&bdy * &bdy);
    let cd = &(&cdx * &cdx) + &(&cdy * &cdy);
    let det = &(&ad * &cross(&bdx, &bdy, &cdx, &cdy)) - &(&bd * &cross(&adx, &ady, &cdx, &cdy));
    (&det + &(&cd * &cross(&adx, &ady, &bdx, &bdy))).signum()
}

/// In-circle test; `(a, b, c)` must not be collinear.
pub fn incircle(a: &Site, b: &Site, c: &Site, d: &Site) -> Result<i32, GeometryError> {
    if orient(a, b, c) == 0 {
        return Err(GeometryError::Collinear(a.index, b.index, c.index));
    }
    Ok(incircle_raw(a, b, c, d))
}

/// Whether `d` lies strictly inside the circle through `a, b, c`,
/// independent of the orientation of the triple.
pub fn in_disk(a: &Site, b: &Site, c: &Site, d: &Site) -> bool {
    incircle_raw(a, b, c, d) * orient(a, b, c) > 0
}

/// Circumcenter of three non-collinear sites.
pub fn circumcenter(a: &Site, b: &Site, c: &Site) -> Result<HPoint, GeometryError> {
    let bx = &b.x - &a.x;
    let by = &b.y - &a.y;
    let cx = &c.x - &a.x;
    let cy = &c.y - &a.y;
    let d = &Int::from(2) * &cross(&bx, &by, &cx, &cy);
    if d.is_zero() {
        return Err(GeometryError::Collinear(a.index, b.index, c.index));
    }
    let b2 = &(&bx * &bx) + &(&by * &by);
    let c2 = &(&cx * &cx) + &(&cy * &cy);
    let ux = &(&b2 * &cy) - &(&c2 * &by);
    let uy = &(&c2 * &bx) - &(&b2 * &cx);
    Ok(HPoint::new(&(&a.x * &d) + &ux, &(&a.y * &d) + &uy, d))
}

/// The bisector `B(p, q)` with its canonical parametrization
/// `x(t) = (p + q) / 2 + t · rot90(q − p)`.
///
/// `p` lies to the left of the direction `rot90(q − p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisectorLine {
    pub p: usize,
    pub q: usize,
    /// `p + q`, twice the midpoint.
    pub sx: Int,
    pub sy: Int,
    /// Direction `rot90(q − p)`.
    pub dx: Int,
    pub dy: Int,
}

impl BisectorLine {
    /// Line coefficients `(a, b, c)` with `a·x + b·y = c`.
    pub fn coefficients(&self) -> (Int, Int, Int) {
        let two = Int::from(2);
        let a = &two * &self.dy;
        let b = -(&two * &self.dx);
        let c = &(&self.dy * &self.sx) - &(&self.dx * &self.sy);
        (a, b, c)
    }

    /// Coefficients divided by their gcd with a positive leading entry.
    pub fn normalized(&self) -> (Int, Int, Int) {
        let (a, b, c) = self.coefficients();
        let g = a.gcd(&b).gcd(&c);
        let (mut a, mut b, mut c) = (a.div_exact(&g), b.div_exact(&g), c.div_exact(&g));
        if a.signum() < 0 || (a.is_zero() && b.signum() < 0) {
            a = -a;
            b = -b;
            c = -c;
        }
        (a, b, c)
    }

    /// The point at parameter `t`.
    pub fn point_at(&self, t: &Frac) -> HPoint {
        let two = Int::from(2);
        let x = &(&self.sx * &t.den) + &(&two * &(&t.num * &self.dx));
        let y = &(&self.sy * &t.den) + &(&two * &(&t.num * &self.dy));
        HPoint::new(x, y, &two * &t.den)
    }

    /// `g(t) = d²(x(t), u) − d²(x(t), w)` as `(slope, constant)`.
    pub fn difference(&self, u: &Site, w: &Site) -> (Int, Int) {
        let ex = &w.x - &u.x;
        let ey = &w.y - &u.y;
        let slope = &Int::from(2) * &dot(&self.dx, &self.dy, &ex, &ey);
        let u2 = &(&u.x * &u.x) + &(&u.y * &u.y);
        let w2 = &(&w.x * &w.x) + &(&w.y * &w.y);
        let constant = &(&dot(&self.sx, &self.sy, &ex, &ey) + &u2) - &w2;
        (slope, constant)
    }

    /// Parameter where `u` and `w` are equidistant, if the line crosses
    /// their bisector.
    pub fn crossing(&self, u: &Site, w: &Site) -> Option<Frac> {
        let (slope, constant) = self.difference(u, w);
        if slope.is_zero() {
            None
        } else {
            Some(Frac::new(-constant, slope))
        }
    }
}

/// Exact bisector of two distinct sites.
pub fn bisector(p: &Site, q: &Site) -> Result<BisectorLine, GeometryError> {
    if p.x == q.x && p.y == q.y {
        return Err(GeometryError::IdenticalSites(p.index, q.index));
    }
    Ok(BisectorLine {
        p: p.index,
        q: q.index,
        sx: &p.x + &q.x,
        sy: &p.y + &q.y,
        dx: &p.y - &q.y,
        dy: &q.x - &p.x,
    })
}

/// A ray from a lattice point in an integer direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ray {
    pub ox: Int,
    pub oy: Int,
    pub dx: Int,
    pub dy: Int,
}

impl Ray {
    pub fn new(ox: Int, oy: Int, dx: Int, dy: Int) -> Ray {
        assert!(!(dx.is_zero() && dy.is_zero()), "ray with zero direction");
        Ray { ox, oy, dx, dy }
    }

    /// The ray from `origin` through the rational point `target`.
    pub fn toward(origin: &Site, target: &HPoint) -> Ray {
        let dx = &target.x - &(&origin.x * &target.w);
        let dy = &target.y - &(&origin.y * &target.w);
        Ray::new(origin.x.clone(), origin.y.clone(), dx, dy)
    }
}

/// Smallest `t ≥ 0` with `origin + t · direction` on `line`.
pub fn ray_hit(r: &Ray, line: &BisectorLine) -> Result<Option<Frac>, GeometryError> {
    let (a, b, c) = line.coefficients();
    let den = &(&a * &r.dx) + &(&b * &r.dy);
    let num = &c - &(&(&a * &r.ox) + &(&b * &r.oy));
    if den.is_zero() {
        if num.is_zero() {
            return Err(GeometryError::RayInLine);
        }
        return Ok(None);
    }
    let t = Frac::new(num, den);
    if t.signum() < 0 {
        Ok(None)
    } else {
        Ok(Some(t))
    }
}

/// Whether the disk of a k-vertex holds `k − 2` (old) or `k − 1` (new)
/// sites strictly inside.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexClass {
    Old,
    New,
}

/// An endpoint of an [`EdgePiece`]: its carrier parameter and the site that
/// cut the carrier there (the third site of the vertex).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct End {
    pub site: usize,
    pub t: Frac,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceKind {
    Segment,
    Ray,
    Line,
}

/// A connected piece of a bisector: parameters strictly between `lo` and
/// `hi` (absent = unbounded in that direction). Endpoints are excluded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePiece {
    pub carrier: BisectorLine,
    pub lo: Option<End>,
    pub hi: Option<End>,
}

/// Which side of a comparison a clip keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    /// Keep points strictly closer to the anchor than to the rival.
    Nearer,
    /// Keep points strictly farther from the anchor than from the rival.
    Farther,
}

impl EdgePiece {
    pub fn line(carrier: BisectorLine) -> EdgePiece {
        EdgePiece { carrier, lo: None, hi: None }
    }

    pub fn kind(&self) -> PieceKind {
        match (&self.lo, &self.hi) {
            (Some(_), Some(_)) => PieceKind::Segment,
            (None, None) => PieceKind::Line,
            _ => PieceKind::Ray,
        }
    }

    /// Restricts to points where `anchor` is nearer (or farther) than
    /// `rival`. `None` when nothing remains.
    pub fn clip(mut self, anchor: &Site, rival: &Site, keep: Keep) -> Option<EdgePiece> {
        let (mut slope, mut constant) = self.carrier.difference(anchor, rival);
        if keep == Keep::Farther {
            slope = -slope;
            constant = -constant;
        }
        // Keep where slope·t + constant < 0.
        let extra = if anchor.index == self.carrier.p || anchor.index == self.carrier.q {
            rival.index
        } else {
            anchor.index
        };
        match slope.signum() {
            0 => {
                if constant.signum() < 0 {
                    Some(self)
                } else {
                    None
                }
            }
            s => {
                let t = Frac::new(-constant, slope);
                if s > 0 {
                    let tighter = match &self.hi {
                        Some(h) => t < h.t,
                        None => true,
                    };
                    if tighter {
                        self.hi = Some(End { site: extra, t });
                    }
                } else {
                    let tighter = match &self.lo {
                        Some(l) => t > l.t,
                        None => true,
                    };
                    if tighter {
                        self.lo = Some(End { site: extra, t });
                    }
                }
                match (&self.lo, &self.hi) {
                    (Some(l), Some(h)) if l.t >= h.t => None,
                    _ => Some(self),
                }
            }
        }
    }

    /// A parameter strictly inside the piece.
    pub fn interior_param(&self) -> Frac {
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => Frac::new(
                &(&l.t.num * &h.t.den) + &(&h.t.num * &l.t.den),
                &Int::from(2) * &(&l.t.den * &h.t.den),
            ),
            (Some(l), None) => Frac::new(&l.t.num + &l.t.den, l.t.den.clone()),
            (None, Some(h)) => Frac::new(&h.t.num - &h.t.den, h.t.den.clone()),
            (None, None) => Frac::from_int(Int::zero()),
        }
    }

    pub fn interior_point(&self) -> HPoint {
        self.carrier.point_at(&self.interior_param())
    }

    /// Whether parameter `t` lies strictly inside.
    pub fn contains_param(&self, t: &Frac) -> bool {
        self.lo.as_ref().map_or(true, |l| &l.t < t) && self.hi.as_ref().map_or(true, |h| t < &h.t)
    }

    /// The same piece described on the reversed carrier `B(q, p)`.
    pub fn reversed(&self, p: &Site, q: &Site) -> EdgePiece {
        debug_assert!(p.index == self.carrier.p && q.index == self.carrier.q);
        let flip = |e: &Option<End>| {
            e.as_ref().map(|e| End { site: e.site, t: Frac::new(-e.t.num.clone(), e.t.den.clone()) })
        };
        EdgePiece { carrier: bisector(q, p).expect("distinct sites"), lo: flip(&self.hi), hi: flip(&self.lo) }
    }
}

/// Keeps the part of `e` strictly nearer to `anchor` than to `rival`
/// (`Keep::Nearer`) or strictly farther (`Keep::Farther`).
pub fn clip_to_nearer(e: &EdgePiece, anchor: &Site, rival: &Site, keep: Keep) -> Option<EdgePiece> {
    e.clone().clip(anchor, rival, keep)
}

/// Squared distance between two sites.
pub fn dist2(a: &Site, b: &Site) -> Int {
    let dx = &a.x - &b.x;
    let dy = &a.y - &b.y;
    &(&dx * &dx) + &(&dy * &dy)
}

/// Compares the ccw angle of `u` and `v` measured from `base`, both taken
/// in `[0, 2π)`.
pub fn cmp_ccw_from(base: (&Int, &Int), u: (&Int, &Int), v: (&Int, &Int)) -> Ordering {
    let half = |w: (&Int, &Int)| -> u8 {
        let c = cross(base.0, base.1, w.0, w.1).signum();
        let d = dot(base.0, base.1, w.0, w.1).signum();
        if c > 0 || (c == 0 && d > 0) {
            0
        } else {
            1
        }
    };
    let (hu, hv) = (half(u), half(v));
    if hu != hv {
        return hu.cmp(&hv);
    }
    match cross(u.0, u.1, v.0, v.1).signum() {
        1 => Ordering::Less,
        -1 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

/// How thoroughly [`validate_general_position`] checked the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GpStatus {
    /// Every triple and quadruple was tested.
    Exhaustive,
    /// Collinearity was tested exhaustively; cocircularity on a seeded
    /// sample of this many quadruples.
    Sampled(usize),
}

/// Largest input checked exhaustively for cocircular quadruples.
pub const EXHAUSTIVE_LIMIT: usize = 64;
/// Number of sampled quadruples beyond [`EXHAUSTIVE_LIMIT`].
pub const SAMPLE_TUPLES: usize = 1_000_000;
const SAMPLE_SEED: u64 = 0x5eed_0f_71e5;

/// Checks for duplicate sites, collinear triples and cocircular
/// quadruples, reporting the first violation in lexicographic index order.
pub fn validate_general_position(sites: &[Site]) -> Result<GpStatus, GeometryError> {
    let n = sites.len();
    if n < 3 {
        return Err(GeometryError::TooFewSites(n));
    }
    let mut seen: HashMap<(&Int, &Int), usize> = HashMap::new();
    let mut dup: Option<(usize, usize)> = None;
    for s in sites {
        if let Some(&i) = seen.get(&(&s.x, &s.y)) {
            if dup.map_or(true, |d| (i, s.index) < d) {
                dup = Some((i, s.index));
            }
        } else {
            seen.insert((&s.x, &s.y), s.index);
        }
    }
    if let Some((i, j)) = dup {
        return Err(GeometryError::DuplicateSite(i, j));
    }
    if n <= EXHAUSTIVE_LIMIT {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if orient(&sites[i], &sites[j], &sites[k]) == 0 {
                        return Err(GeometryError::CollinearTriple(i, j, k));
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        if incircle_raw(&sites[i], &sites[j], &sites[k], &sites[l]) == 0 {
                            return Err(GeometryError::CocircularQuadruple(i, j, k, l));
                        }
                    }
                }
            }
        }
        return Ok(GpStatus::Exhaustive);
    }
    if let Some((i, j, k)) = first_collinear_triple(sites) {
        return Err(GeometryError::CollinearTriple(i, j, k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut worst: Option<[usize; 4]> = None;
    for _ in 0..SAMPLE_TUPLES {
        let mut q: Vec<usize> = sample(&mut rng, n, 4).into_vec();
        q.sort_unstable();
        let [a, b, c, d] = [q[0], q[1], q[2], q[3]];
        if incircle_raw(&sites[a], &sites[b], &sites[c], &sites[d]) == 0 {
            let t = [a, b, c, d];
            if worst.map_or(true, |w| t < w) {
                worst = Some(t);
            }
        }
    }
    if let Some([a, b, c, d]) = worst {
        return Err(GeometryError::CocircularQuadruple(a, b, c, d));
    }
    Ok(GpStatus::Sampled(SAMPLE_TUPLES))
}

/// Lexicographically first collinear triple, found by grouping the
/// primitive directions from each site.
pub fn first_collinear_triple(sites: &[Site]) -> Option<(usize, usize, usize)> {
    let n = sites.len();
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..n {
        let mut dirs: HashMap<(Int, Int), usize> = HashMap::new();
        for j in i + 1..n {
            let (mut dx, mut dy) = primitive(&(&sites[j].x - &sites[i].x), &(&sites[j].y - &sites[i].y));
            if dx.signum() < 0 || (dx.is_zero() && dy.signum() < 0) {
                dx = -dx;
                dy = -dy;
            }
            if let Some(&j0) = dirs.get(&(dx.clone(), dy.clone())) {
                let t = (i, j0, j);
                if best.map_or(true, |b| t < b) {
                    best = Some(t);
                }
            } else {
                dirs.insert((dx, dy), j);
            }
        }
        if best.is_some() {
            return best;
        }
    }
    best
}

/// Converts a fraction of lattice units to input units.
pub fn unscale(v: &Frac, scale: &BigInt) -> BigRational {
    BigRational::new(v.num.to_big(), v.den.to_big() * scale)
}
