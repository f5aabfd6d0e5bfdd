//! Measure files: a header line with the node count, then one
//! `x,y,weight,element_length` record per node in input order.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::geom::io::parse_f64;

pub fn write_measure(mu: &DiscreteMeasure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", mu.len());
    for ((z, w), l) in mu
        .nodes()
        .iter()
        .zip(mu.weights())
        .zip(mu.element_lengths())
    {
        let _ = writeln!(out, "{:.17e},{:.17e},{:.17e},{:.17e}", z.re, z.im, w, l);
    }
    out
}

pub fn parse_measure(text: &str) -> Result<DiscreteMeasure> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty measure file".into(),
    })?;
    let count: usize = header.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected node count, got `{header}`"),
    })?;
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    let mut lengths = Vec::with_capacity(count);
    for (line, record) in lines {
        let fields: Vec<f64> = record
            .split(',')
            .map(parse_f64)
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Parse {
                line,
                message: format!("non-numeric field in `{record}`"),
            })?;
        if fields.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        nodes.push(Complex64::new(fields[0], fields[1]));
        weights.push(fields[2]);
        lengths.push(fields[3]);
    }
    if nodes.len() != count {
        return Err(Error::Parse {
            line: 1,
            message: format!("header declares {count} nodes, found {}", nodes.len()),
        });
    }
    DiscreteMeasure::new(nodes, weights, lengths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::c64;

    #[test]
    fn roundtrip_preserves_order_and_bits() {
        let m = DiscreteMeasure::new(
            vec![c64(0.1, -0.2), c64(1.0 / 3.0, 2.0), c64(-5.5, 1e-9)],
            vec![0.2, 0.3, 0.5],
            vec![0.01, std::f64::consts::PI, 1.0],
        )
        .unwrap();
        let text = write_measure(&m);
        assert!(text.starts_with("3\n"));
        assert_eq!(parse_measure(&text).unwrap(), m);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(parse_measure("").is_err());
        assert!(parse_measure("2\n0,0,1,1\n").is_err());
        assert!(parse_measure("1\n0,0,1\n").is_err());
        assert!(parse_measure("1\n0,0,x,1\n").is_err());
        assert!(parse_measure("1\n0,0,-1,1\n").is_err());
    }
}
