//! Domain specification files.
//!
//! One `key = value` pair per line; blank lines and lines starting with `#`
//! are ignored. Keys are case-sensitive and may appear once.
//!
//! ```text
//! kind = disc              # disc | half_plane | disc_complement | polygon
//! cx = 0.0                 # disc, disc_complement (optional, default 0)
//! cy = 0.0                 # disc, disc_complement (optional, default 0)
//! r = 1.0                  # disc, disc_complement (required)
//! vertices = 0,0; 4,0; 4,4; 0,4   # polygon (required), counter-clockwise
//! ```
//!
//! Any key not listed for the chosen `kind` is rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::domain::DomainSpec;
use crate::error::{Error, Result};

pub fn parse_domain(text: &str) -> Result<DomainSpec> {
    let mut fields: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim().to_string();
        if fields.contains_key(&key) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate key `{key}`"),
            });
        }
        fields.insert(key, (line_no, value.trim().to_string()));
    }

    let (_, kind) = fields.remove("kind").ok_or_else(|| Error::Parse {
        line: 0,
        message: "missing key `kind`".into(),
    })?;
    let allowed: &[&str] = match kind.as_str() {
        "disc" | "disc_complement" => &["cx", "cy", "r"],
        "half_plane" => &[],
        "polygon" => &["vertices"],
        other => {
            return Err(Error::Parse {
                line: 0,
                message: format!("unknown kind `{other}`"),
            })
        }
    };
    if let Some((key, (line, _))) = fields.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(Error::Parse {
            line: *line,
            message: format!("unknown key `{key}` for kind `{kind}`"),
        });
    }

    let number = |key: &str, default: Option<f64>| -> Result<f64> {
        match fields.get(key) {
            Some((line, v)) => parse_f64(v).ok_or_else(|| Error::Parse {
                line: *line,
                message: format!("`{key}` is not a finite number: `{v}`"),
            }),
            None => default.ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("missing key `{key}`"),
            }),
        }
    };

    match kind.as_str() {
        "disc" | "disc_complement" => {
            let center = Complex64::new(number("cx", Some(0.0))?, number("cy", Some(0.0))?);
            let r = number("r", None)?;
            if kind == "disc" {
                DomainSpec::disc(center, r)
            } else {
                DomainSpec::disc_complement(center, r)
            }
        }
        "half_plane" => Ok(DomainSpec::UpperHalfPlane),
        _ => {
            let (line, v) = fields.get("vertices").ok_or_else(|| Error::Parse {
                line: 0,
                message: "missing key `vertices`".into(),
            })?;
            let vertices = parse_point_list(v).map_err(|message| Error::Parse {
                line: *line,
                message,
            })?;
            DomainSpec::polygon(vertices)
        }
    }
}

pub fn write_domain(d: &DomainSpec) -> String {
    let mut out = String::new();
    match d {
        DomainSpec::Disc { center, radius } | DomainSpec::DiscComplement { center, radius } => {
            let kind = if matches!(d, DomainSpec::Disc { .. }) {
                "disc"
            } else {
                "disc_complement"
            };
            let _ = writeln!(out, "kind = {kind}");
            let _ = writeln!(out, "cx = {}", center.re);
            let _ = writeln!(out, "cy = {}", center.im);
            let _ = writeln!(out, "r = {radius}");
        }
        DomainSpec::UpperHalfPlane => out.push_str("kind = half_plane\n"),
        DomainSpec::Polygon(p) => {
            out.push_str("kind = polygon\n");
            let verts: Vec<String> = p
                .vertices()
                .iter()
                .map(|v| format!("{},{}", v.re, v.im))
                .collect();
            let _ = writeln!(out, "vertices = {}", verts.join("; "));
        }
    }
    out
}

pub(crate) fn parse_f64(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses `re,im`.
pub fn parse_point(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `re,im`, got `{s}`"))?;
    match (parse_f64(re), parse_f64(im)) {
        (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
        _ => Err(format!("expected two finite numbers in `{s}`")),
    }
}

/// Parses `x,y; x,y; ...`.
pub fn parse_point_list(s: &str) -> std::result::Result<Vec<Complex64>, String> {
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_point)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::c64;

    #[test]
    fn parses_each_kind() {
        let d = parse_domain("kind = disc\ncx = 1\ncy = -2\nr = 0.5\n").unwrap();
        assert_eq!(d, DomainSpec::disc(c64(1.0, -2.0), 0.5).unwrap());
        let d = parse_domain("# comment\nkind = half_plane\n\n").unwrap();
        assert_eq!(d, DomainSpec::UpperHalfPlane);
        let d = parse_domain("kind = disc_complement\nr = 2").unwrap();
        assert_eq!(d, DomainSpec::disc_complement(c64(0.0, 0.0), 2.0).unwrap());
        let d = parse_domain("kind = polygon\nvertices = 0,0; 4,0; 4,4; 0,4").unwrap();
        assert!(d.contains(c64(1.0, 2.0)));
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(parse_domain("kind = disc\nr = 1\nradius = 2").is_err());
        assert!(parse_domain("kind = half_plane\nr = 1").is_err());
        assert!(parse_domain("kind = disc").is_err());
        assert!(parse_domain("kind = disc\nr = -1").is_err());
        assert!(parse_domain("kind = disc\nr = 1\nr = 2").is_err());
        assert!(parse_domain("kind = annulus").is_err());
        assert!(parse_domain("r = 1").is_err());
        assert!(parse_domain("kind = disc\nr = nan").is_err());
        assert!(parse_domain("kind = polygon\nvertices = 0,0; 1").is_err());
    }

    #[test]
    fn write_then_parse_is_identity() {
        for d in [
            DomainSpec::disc(c64(0.1, 0.2), 3.0).unwrap(),
            DomainSpec::UpperHalfPlane,
            DomainSpec::disc_complement(c64(-1.0, 0.0), 0.25).unwrap(),
            DomainSpec::polygon(vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0)]).unwrap(),
        ] {
            assert_eq!(parse_domain(&write_domain(&d)).unwrap(), d);
        }
    }
}
