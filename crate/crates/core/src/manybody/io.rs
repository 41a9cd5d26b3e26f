//! Text forms of states and complex matrices.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::fock::FockSpace;
use crate::error::{Error, Result};

/// `index,re,im` lines for nonzero amplitudes under a `#` manifest header.
pub fn write_state(space: &FockSpace, state: &[Complex64]) -> String {
    let mut s = format!("# {}\nindex,re,im\n", space.manifest());
    for (i, z) in state.iter().enumerate() {
        if z.re != 0.0 || z.im != 0.0 {
            let _ = writeln!(s, "{i},{:?},{:?}", z.re, z.im);
        }
    }
    s
}

/// Parses [`write_state`] output; the manifest must match `space`.
pub fn read_state(text: &str, space: &FockSpace) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); space.dim()];
    let mut seen_manifest = false;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        let parse_err = |reason: String| Error::Parse { line: n + 1, reason };
        if let Some(m) = line.strip_prefix('#') {
            if m.trim() != space.manifest() {
                return Err(parse_err(format!("basis manifest `{}` does not match `{}`", m.trim(), space.manifest())));
            }
            seen_manifest = true;
            continue;
        }
        if line.is_empty() || line == "index,re,im" {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(parse_err(format!("expected 3 fields, got {}", f.len())));
        }
        let i: usize = f[0].trim().parse().map_err(|e| parse_err(format!("index: {e}")))?;
        let re: f64 = f[1].trim().parse().map_err(|e| parse_err(format!("re: {e}")))?;
        let im: f64 = f[2].trim().parse().map_err(|e| parse_err(format!("im: {e}")))?;
        if i >= out.len() {
            return Err(parse_err(format!("index {i} outside dimension {}", out.len())));
        }
        out[i] = Complex64::new(re, im);
    }
    if !seen_manifest {
        return Err(Error::Parse { line: 1, reason: "missing basis manifest header".into() });
    }
    Ok(out)
}

/// `row,col,re,im` for every entry.
pub fn write_matrix(m: &DMatrix<Complex64>) -> String {
    let mut s = String::from("row,col,re,im\n");
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            let _ = writeln!(s, "{r},{c},{:?},{:?}", z.re, z.im);
        }
    }
    s
}
