//! Molecule catalog for the ζ–γ diagram.
//!
//! One molecule per line: a name followed by `key=value` pairs.
//!
//! ```text
//! # name  required        optional
//! ozone   x_f=0.1 x_g=-0.2 omega=1100 kappa=60 nu1=1103 nu3=1042
//! ```
//!
//! `x_f` and `x_g` are required; `omega`, `kappa`, `nu1`, `nu3` are
//! optional (`nu1` and `nu3` must come together). `#` starts a comment.

use std::path::Path;

use crate::error::{Error, Result};

/// One catalog entry.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub x_f: f64,
    pub x_g: f64,
    pub omega: Option<f64>,
    pub kappa: Option<f64>,
    /// Measured fundamentals `(ν₁, ν₃)` in cm⁻¹.
    pub fundamentals: Option<(f64, f64)>,
}

pub fn parse_catalog(text: &str, path: &Path) -> Result<Vec<CatalogEntry>> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut entries: Vec<CatalogEntry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let name = tokens.next().unwrap_or_default();
        if name.contains('=') {
            return Err(err(line_no, format!("expected a molecule name, found '{name}'")));
        }
        if name.contains([',', '"']) {
            return Err(err(line_no, format!("name '{name}' may not contain commas or quotes")));
        }
        if entries.iter().any(|e| e.name == name) {
            return Err(err(line_no, format!("duplicate molecule '{name}'")));
        }
        let mut vals: [Option<f64>; 6] = [None; 6];
        const KEYS: [&str; 6] = ["x_f", "x_g", "omega", "kappa", "nu1", "nu3"];
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| err(line_no, format!("expected key=value, found '{tok}'")))?;
            let slot = KEYS
                .iter()
                .position(|&key| key == k)
                .ok_or_else(|| err(line_no, format!("unknown key '{k}'")))?;
            if vals[slot].is_some() {
                return Err(err(line_no, format!("key '{k}' given twice")));
            }
            let x: f64 = v
                .parse()
                .map_err(|_| err(line_no, format!("'{v}' is not a number (key '{k}')")))?;
            if !x.is_finite() {
                return Err(err(line_no, format!("key '{k}' must be finite")));
            }
            vals[slot] = Some(x);
        }
        let [x_f, x_g, omega, kappa, nu1, nu3] = vals;
        let (x_f, x_g) = match (x_f, x_g) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(err(line_no, "x_f and x_g are required".into())),
        };
        if x_f.abs() >= 1.0 || x_g.abs() >= 1.0 {
            return Err(err(line_no, "|x_f| and |x_g| must be below 1".into()));
        }
        if omega.is_some_and(|w| w <= 0.0) {
            return Err(err(line_no, "omega must be positive".into()));
        }
        if kappa.is_some_and(|k| k <= 2.0) {
            return Err(err(line_no, "kappa must exceed 2".into()));
        }
        let fundamentals = match (nu1, nu3) {
            (Some(a), Some(b)) if a + b > 0.0 => Some((a, b)),
            (Some(_), Some(_)) => return Err(err(line_no, "fundamentals must have a positive mean".into())),
            (None, None) => None,
            _ => return Err(err(line_no, "nu1 and nu3 must be given together".into())),
        };
        entries.push(CatalogEntry {
            name: name.to_string(),
            x_f,
            x_g,
            omega,
            kappa,
            fundamentals,
        });
    }
    Ok(entries)
}

pub fn read_catalog(path: &Path) -> Result<Vec<CatalogEntry>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_catalog(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Vec<CatalogEntry>> {
        parse_catalog(s, Path::new("cat.txt"))
    }

    #[test]
    fn parses_entries_and_comments() {
        let c = parse("# header\n\nso2 x_f=0.02 x_g=-0.3 nu1=1151 nu3=1362 # trailing\nh2s x_g=-0.01 x_f=-0.02\n")
            .unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].fundamentals, Some((1151.0, 1362.0)));
        assert_eq!((c[1].x_f, c[1].x_g, c[1].omega), (-0.02, -0.01, None));
    }

    #[test]
    fn empty_catalog() {
        assert!(parse("").unwrap().is_empty());
        assert!(parse("# nothing\n").unwrap().is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let line_of = |s: &str| match parse(s) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line_of("a x_f=0 x_g=0\nb x_f=0 x_g=0 colour=red\n"), 2);
        assert_eq!(line_of("\n\nb x_f=zero x_g=0\n"), 3);
        assert_eq!(line_of("b x_f=0\n"), 1);
        assert_eq!(line_of("b x_f=0 x_g=0 nu1=3\n"), 1);
        assert_eq!(line_of("b x_f=0 x_g=0 x_f=1\n"), 1);
        assert_eq!(line_of("b x_f=0 x_g=1.5\n"), 1);
        assert_eq!(line_of("a x_f=0 x_g=0\na x_f=0 x_g=0\n"), 2);
        assert_eq!(line_of("x_f=0 x_g=0\n"), 1);
    }
}
