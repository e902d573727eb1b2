//! Deterministic SVG drawings of record streams.

use std::fmt::Write;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::record::{parse_rational, Endpoint, Record};

const WIDTH: f64 = 800.0;
const PALETTE: [&str; 6] = ["#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#117a65"];

/// The drawn region `[xmin, xmax] × [ymin, ymax]` in input units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Viewport {
    /// Parses `xmin,ymin,xmax,ymax`.
    pub fn parse(s: &str) -> Result<Viewport> {
        let v: Vec<f64> = s.split(',').map(|p| Ok(f(&parse_rational(p)?))).collect::<Result<_>>()?;
        let [xmin, ymin, xmax, ymax] = v[..] else {
            return Err(Error::Parse { line: 0, msg: format!("viewport needs four numbers, got `{s}`") });
        };
        if !(xmin < xmax && ymin < ymax) {
            return Err(Error::Parse { line: 0, msg: format!("empty viewport `{s}`") });
        }
        Ok(Viewport { xmin, ymin, xmax, ymax })
    }

    /// The box around every finite endpoint and site, padded by a tenth.
    pub fn fit(records: &[Record], sites: Option<&PointSet>) -> Viewport {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for r in records {
            for e in [&r.tail, &r.head] {
                if let Endpoint::At(x, y) = e {
                    pts.push((f(x), f(y)));
                }
            }
        }
        if let Some(p) = sites {
            pts.extend((0..p.len()).map(|i| site_xy(p, i)));
        }
        if pts.is_empty() {
            return Viewport { xmin: -1.0, ymin: -1.0, xmax: 1.0, ymax: 1.0 };
        }
        let mut v = Viewport { xmin: f64::INFINITY, ymin: f64::INFINITY, xmax: f64::NEG_INFINITY, ymax: f64::NEG_INFINITY };
        for (x, y) in pts {
            v.xmin = v.xmin.min(x);
            v.xmax = v.xmax.max(x);
            v.ymin = v.ymin.min(y);
            v.ymax = v.ymax.max(y);
        }
        let pad = 0.1 * (v.xmax - v.xmin).max(v.ymax - v.ymin).max(1.0);
        Viewport { xmin: v.xmin - pad, ymin: v.ymin - pad, xmax: v.xmax + pad, ymax: v.ymax + pad }
    }
}

fn f(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

fn site_xy(p: &PointSet, i: usize) -> (f64, f64) {
    let s = p.site(i);
    let scale = BigRational::from_integer(p.scale().clone());
    (f(&(BigRational::from_integer(s.x.to_big()) / &scale)), f(&(BigRational::from_integer(s.y.to_big()) / &scale)))
}

/// Clips the segment `a → b` to the viewport (Liang–Barsky).
fn clip(v: &Viewport, a: (f64, f64), b: (f64, f64)) -> Option<((f64, f64), (f64, f64))> {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-dx, a.0 - v.xmin), (dx, v.xmax - a.0), (-dy, a.1 - v.ymin), (dy, v.ymax - a.1)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 <= t1).then(|| ((a.0 + t0 * dx, a.1 + t0 * dy), (a.0 + t1 * dx, a.1 + t1 * dy)))
}

/// The part of a record's edge inside the viewport, in input units. An
/// edge unbounded at both ends needs the sites to be placed.
fn segment(v: &Viewport, r: &Record, sites: Option<&PointSet>) -> Option<((f64, f64), (f64, f64))> {
    let reach = 4.0 * ((v.xmax - v.xmin).abs() + (v.ymax - v.ymin).abs()
        + v.xmin.abs().max(v.xmax.abs())
        + v.ymin.abs().max(v.ymax.abs()));
    let out = |p: (f64, f64), dx: f64, dy: f64| {
        let len = dx.hypot(dy);
        (p.0 + dx / len * reach, p.1 + dy / len * reach)
    };
    let dir = |e: &Endpoint| match e {
        Endpoint::Inf(dx, dy) => (dx.to_f64().unwrap_or(0.0), dy.to_f64().unwrap_or(0.0)),
        Endpoint::At(..) => (0.0, 0.0),
    };
    let (a, b) = match (&r.tail, &r.head) {
        (Endpoint::At(x0, y0), Endpoint::At(x1, y1)) => ((f(x0), f(y0)), (f(x1), f(y1))),
        (Endpoint::At(x, y), h @ Endpoint::Inf(..)) => {
            let (dx, dy) = dir(h);
            let p = (f(x), f(y));
            (p, out(p, dx, dy))
        }
        (t @ Endpoint::Inf(..), Endpoint::At(x, y)) => {
            let (dx, dy) = dir(t);
            let p = (f(x), f(y));
            (out(p, dx, dy), p)
        }
        (Endpoint::Inf(..), h @ Endpoint::Inf(..)) => {
            let p = sites?;
            if r.pair.0 >= p.len() || r.pair.1 >= p.len() {
                return None;
            }
            let (pa, pb) = (site_xy(p, r.pair.0), site_xy(p, r.pair.1));
            let m = ((pa.0 + pb.0) / 2.0, (pa.1 + pb.1) / 2.0);
            let (dx, dy) = dir(h);
            (out(m, -dx, -dy), out(m, dx, dy))
        }
    };
    clip(v, a, b)
}

/// Renders records, and optionally their sites, into an SVG document.
pub fn render_svg(records: &[Record], sites: Option<&PointSet>, viewport: Option<Viewport>) -> String {
    let v = viewport.unwrap_or_else(|| Viewport::fit(records, sites));
    let scale = WIDTH / (v.xmax - v.xmin);
    let height = (v.ymax - v.ymin) * scale;
    let px = |p: (f64, f64)| ((p.0 - v.xmin) * scale, (v.ymax - p.1) * scale);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{:.0}" viewBox="0 0 {WIDTH:.0} {height:.3}">"#,
        height.ceil()
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for r in records {
        let Some((a, b)) = segment(&v, r, sites) else { continue };
        let (a, b) = (px(a), px(b));
        let color = PALETTE[(r.k.max(1) - 1) % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{color}" stroke-width="1.5"/>"#,
            a.0, a.1, b.0, b.1
        );
    }
    if let Some(p) = sites {
        for i in 0..p.len() {
            let (x, y) = px(site_xy(p, i));
            if (0.0..=WIDTH).contains(&x) && (0.0..=height).contains(&y) {
                let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="black"/>"#);
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
