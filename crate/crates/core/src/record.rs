//! The edge record line format shared by every diagram order.
//!
//! ```text
//! k=<int> closest=<i1,...> pair=<a,b> tail=<x,y|INF:dx,dy> head=<x,y|INF:dx,dy> extraT=<i|-> extraH=<i|->
//! ```
//!
//! Finite points are exact rationals printed as `num/den` in lowest terms.
//! An unbounded end is printed as the primitive integer direction in which
//! the edge escapes.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{EdgePiece, Site};
use crate::num::{primitive, Int};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    At(BigRational, BigRational),
    Inf(BigInt, BigInt),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Record {
    pub k: usize,
    pub closest: Vec<usize>,
    pub pair: (usize, usize),
    pub tail: Endpoint,
    pub head: Endpoint,
    pub extra_t: Option<usize>,
    pub extra_h: Option<usize>,
}

impl Record {
    /// Builds a record from a piece lying on `B(a, b)` with `a = piece.carrier.p`.
    ///
    /// With `directed = false` the pair is sorted, reversing the piece if
    /// needed, so both sides of an edge produce the same record.
    pub fn from_piece(
        k: usize,
        mut closest: Vec<usize>,
        piece: &EdgePiece,
        a: &Site,
        b: &Site,
        scale: &BigInt,
        directed: bool,
    ) -> Record {
        debug_assert_eq!((a.index, b.index), (piece.carrier.p, piece.carrier.q));
        closest.sort_unstable();
        if !directed && a.index > b.index {
            let rev = piece.reversed(a, b);
            return Record::from_piece(k, closest, &rev, b, a, scale, true);
        }
        let c = &piece.carrier;
        let end = |e: &Option<crate::geometry::End>, sign: i32| match e {
            Some(e) => {
                let (x, y) = c.point_at(&e.t).to_rational(scale);
                Endpoint::At(x, y)
            }
            None => {
                let (dx, dy) = primitive(&c.dx, &c.dy);
                if sign > 0 {
                    Endpoint::Inf(dx.to_big(), dy.to_big())
                } else {
                    Endpoint::Inf(-dx.to_big(), -dy.to_big())
                }
            }
        };
        Record {
            k,
            closest,
            pair: (a.index, b.index),
            tail: end(&piece.lo, -1),
            head: end(&piece.hi, 1),
            extra_t: piece.lo.as_ref().map(|e| e.site),
            extra_h: piece.hi.as_ref().map(|e| e.site),
        }
    }

    /// A point strictly inside the edge, in input units.
    pub fn interior_point(&self, a: (&BigRational, &BigRational), b: (&BigRational, &BigRational)) -> (BigRational, BigRational) {
        let two = BigRational::from_integer(BigInt::from(2));
        match (&self.tail, &self.head) {
            (Endpoint::At(x0, y0), Endpoint::At(x1, y1)) => ((x0 + x1) / &two, (y0 + y1) / &two),
            (Endpoint::At(x, y), Endpoint::Inf(dx, dy)) | (Endpoint::Inf(dx, dy), Endpoint::At(x, y)) => {
                (x + BigRational::from_integer(dx.clone()), y + BigRational::from_integer(dy.clone()))
            }
            (Endpoint::Inf(..), Endpoint::Inf(..)) => ((a.0 + b.0) / &two, (a.1 + b.1) / &two),
        }
    }
}

fn fmt_rat(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::At(x, y) => write!(f, "{},{}", fmt_rat(x), fmt_rat(y)),
            Endpoint::Inf(dx, dy) => write!(f, "INF:{dx},{dy}"),
        }
    }
}

fn fmt_opt(v: &Option<usize>) -> String {
    v.map_or_else(|| "-".to_string(), |i| i.to_string())
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let closest: Vec<String> = self.closest.iter().map(|i| i.to_string()).collect();
        write!(
            f,
            "k={} closest={} pair={},{} tail={} head={} extraT={} extraH={}",
            self.k,
            closest.join(","),
            self.pair.0,
            self.pair.1,
            self.tail,
            self.head,
            fmt_opt(&self.extra_t),
            fmt_opt(&self.extra_h)
        )
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse { line: 0, msg: msg.into() }
}

/// Parses `num/den`, an integer, or a decimal literal.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().map_err(|_| bad(format!("bad numerator `{n}`")))?;
        let d: BigInt = d.parse().map_err(|_| bad(format!("bad denominator `{d}`")))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    parse_decimal(s)
}

/// Parses a decimal literal such as `-12.375`, `3`, `.5` or `1e-3` exactly.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let err = || bad(format!("bad number `{s}`"));
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, body) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| err())?;
    if neg {
        num = -num;
    }
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if shift >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-shift) as usize))
    };
    Ok(r)
}

fn parse_endpoint(s: &str) -> Result<Endpoint> {
    if let Some(rest) = s.strip_prefix("INF:") {
        let (x, y) = rest.split_once(',').ok_or_else(|| bad("direction needs two components"))?;
        let (x, y) = (parse_rational(x)?, parse_rational(y)?);
        // Clear denominators, then reduce to the primitive vector.
        let l = num_integer::Integer::lcm(x.denom(), y.denom());
        let xi = (x * BigRational::from_integer(l.clone())).to_integer();
        let yi = (y * BigRational::from_integer(l)).to_integer();
        if xi.is_zero() && yi.is_zero() {
            return Err(bad("zero direction"));
        }
        let (px, py) = primitive(&Int::from_big(xi), &Int::from_big(yi));
        return Ok(Endpoint::Inf(px.to_big(), py.to_big()));
    }
    let (x, y) = s.split_once(',').ok_or_else(|| bad("point needs two coordinates"))?;
    Ok(Endpoint::At(parse_rational(x)?, parse_rational(y)?))
}

fn parse_index(s: &str) -> Result<usize> {
    s.parse().map_err(|_| bad(format!("bad site index `{s}`")))
}

fn parse_extra(s: &str) -> Result<Option<usize>> {
    if s == "-" {
        Ok(None)
    } else {
        parse_index(s).map(Some)
    }
}

impl FromStr for Record {
    type Err = Error;

    fn from_str(line: &str) -> Result<Record> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let keys = ["k=", "closest=", "pair=", "tail=", "head=", "extraT=", "extraH="];
        if fields.len() != keys.len() {
            return Err(bad(format!("expected {} fields, found {}", keys.len(), fields.len())));
        }
        let mut vals = Vec::with_capacity(keys.len());
        for (f, key) in fields.iter().zip(keys) {
            vals.push(f.strip_prefix(key).ok_or_else(|| bad(format!("expected `{key}`")))?);
        }
        let k = parse_index(vals[0])?;
        if k == 0 {
            return Err(bad("order must be at least 1"));
        }
        let closest = if vals[1].is_empty() {
            Vec::new()
        } else {
            vals[1].split(',').map(parse_index).collect::<Result<Vec<_>>>()?
        };
        if closest.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("closest must be strictly ascending"));
        }
        let (a, b) = vals[2].split_once(',').ok_or_else(|| bad("pair needs two sites"))?;
        let pair = (parse_index(a)?, parse_index(b)?);
        let tail = parse_endpoint(vals[3])?;
        let head = parse_endpoint(vals[4])?;
        let extra_t = parse_extra(vals[5])?;
        let extra_h = parse_extra(vals[6])?;
        if matches!(tail, Endpoint::Inf(..)) != extra_t.is_none() || matches!(head, Endpoint::Inf(..)) != extra_h.is_none() {
            return Err(bad("extra site present exactly for finite endpoints"));
        }
        Ok(Record { k, closest, pair, tail, head, extra_t, extra_h })
    }
}

/// Parses a record stream, skipping blank lines and `#` comments.
pub fn parse_records(text: &str) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let rec = t.parse::<Record>().map_err(|e| match e {
            Error::Parse { msg, .. } => Error::Parse { line: i + 1, msg },
            other => other,
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Writes records one per line.
pub fn format_records(records: &[Record]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&r.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{bisector, clip_to_nearer, EdgePiece, Keep};

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal("0.1").unwrap(), BigRational::new(1.into(), 10.into()));
        assert_eq!(parse_decimal("-2.50").unwrap(), BigRational::new((-5).into(), 2.into()));
        assert_eq!(parse_decimal("1e3").unwrap(), BigRational::from_integer(1000.into()));
        assert_eq!(parse_decimal(".5e-1").unwrap(), BigRational::new(1.into(), 20.into()));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("abc").is_err());
        assert!(parse_decimal("").is_err());
    }

    #[test]
    fn triangle_edge_record() {
        let s = [Site::new(0, 0, 0), Site::new(1, 8, 0), Site::new(2, 0, 6)];
        let e = clip_to_nearer(&EdgePiece::line(bisector(&s[1], &s[0]).unwrap()), &s[0], &s[2], Keep::Nearer).unwrap();
        let r = Record::from_piece(1, vec![], &e, &s[1], &s[0], &BigInt::from(1), false);
        assert_eq!(r.to_string(), "k=1 closest= pair=0,1 tail=INF:0,-1 head=4/1,3/1 extraT=- extraH=2");
        assert_eq!(r.to_string().parse::<Record>().unwrap(), r);
    }

    #[test]
    fn direction_parsing_normalizes() {
        let r: Record = "k=2 closest=3 pair=0,1 tail=INF:2/3,-4/3 head=1/2,7 extraT=- extraH=5".parse().unwrap();
        assert_eq!(r.tail, Endpoint::Inf(1.into(), (-2).into()));
        assert_eq!(r.to_string(), "k=2 closest=3 pair=0,1 tail=INF:1,-2 head=1/2,7/1 extraT=- extraH=5");
    }

    #[test]
    fn malformed_records() {
        for bad in [
            "",
            "k=1 closest= pair=0,1 tail=INF:0,-1 head=4/1,3/1 extraT=- extraH=-",
            "k=0 closest= pair=0,1 tail=INF:0,-1 head=4/1,3/1 extraT=- extraH=2",
            "k=1 closest=2,1 pair=0,1 tail=INF:0,-1 head=4/1,3/1 extraT=- extraH=2",
            "k=1 closest= pair=0 tail=INF:0,-1 head=4/1,3/1 extraT=- extraH=2",
            "k=1 closest= pair=0,1 tail=INF:0,0 head=4/1,3/1 extraT=- extraH=2",
        ] {
            assert!(bad.parse::<Record>().is_err(), "{bad}");
        }
        let e = parse_records("# c\n\nk=x\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
    }
}
