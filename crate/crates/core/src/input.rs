//! Site files: one `x y` pair of decimal literals per line, `#` comments.

use std::collections::HashMap;

use num_rational::BigRational;

use crate::error::{Error, GeometryError, Result};
use crate::geometry::PointSet;
use crate::record::parse_decimal;

/// Parses a site file. Duplicate sites are rejected here, before any
/// lattice scaling.
pub fn parse_sites(text: &str) -> Result<PointSet> {
    let mut coords: Vec<(BigRational, BigRational)> = Vec::new();
    let mut seen: HashMap<(BigRational, BigRational), usize> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let at = |msg: String| Error::Parse { line: i + 1, msg };
        let fields: Vec<&str> = body.split_whitespace().collect();
        let [x, y] = fields[..] else {
            return Err(at(format!("expected `x y`, found {} fields", fields.len())));
        };
        let num = |s: &str| {
            parse_decimal(s).map_err(|e| match e {
                Error::Parse { msg, .. } => at(msg),
                other => other,
            })
        };
        let p = (num(x)?, num(y)?);
        if let Some(&j) = seen.get(&p) {
            return Err(GeometryError::DuplicateSite(j, coords.len()).into());
        }
        seen.insert(p.clone(), coords.len());
        coords.push(p);
    }
    Ok(PointSet::from_rationals(&coords))
}

/// Writes sites in the input format, exactly.
pub fn format_sites(points: &PointSet) -> String {
    let mut out = String::new();
    for s in points.sites() {
        let x = BigRational::new(s.x.to_big(), points.scale().clone());
        let y = BigRational::new(s.y.to_big(), points.scale().clone());
        out.push_str(&format!("{} {}\n", decimal(&x), decimal(&y)));
    }
    out
}

/// A rational as a finite decimal when it has one, else as `num/den`.
fn decimal(r: &BigRational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    use num_bigint::BigInt;
    use num_traits::{One, Zero};
    let mut den = r.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives) as usize;
    let scaled = r * BigRational::from_integer(BigInt::from(10).pow(digits as u32));
    let v = scaled.to_integer();
    let neg = v < BigInt::zero();
    let mut s = (if neg { -v } else { v }).to_string();
    if s.len() <= digits {
        s = "0".repeat(digits + 1 - s.len()) + &s;
    }
    let (int, frac) = s.split_at(s.len() - digits);
    format!("{}{}.{}", if neg { "-" } else { "" }, int, frac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_general_position;

    #[test]
    fn comments_and_blank_lines() {
        let p = parse_sites("# triangle\n0 0\n\n8 0  # corner\n0 6\n").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.site(1).x, crate::num::Int::from(8));
    }

    #[test]
    fn decimals_share_one_lattice() {
        let p = parse_sites("0.5 0\n1 0.25\n-3 2\n").unwrap();
        assert_eq!(p.scale(), &num_bigint::BigInt::from(4));
        assert_eq!(p.site(0).x, crate::num::Int::from(2));
        assert_eq!(format_sites(&p), "0.5 0\n1 0.25\n-3 2\n");
    }

    #[test]
    fn malformed_lines_carry_their_number() {
        assert!(matches!(parse_sites("0 0\n1 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_sites("0 0\n1 2 3\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn duplicates_are_rejected() {
        let err = parse_sites("0 0\n1 1\n1.0 1\n").unwrap_err();
        assert!(matches!(err, Error::Geometry(GeometryError::DuplicateSite(1, 2))));
    }

    #[test]
    fn generated_sets_round_trip() {
        let p = random_general_position(30, 4);
        let q = parse_sites(&format_sites(&p)).unwrap();
        assert_eq!(p.sites(), q.sites());
    }
}
