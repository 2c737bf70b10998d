//! Sparse triplet text format for operators and states.
//!
//! ```text
//! # dilute-fermi sparse-triplet v1
//! # basis <sha256 of the basis descriptor>
//! # shape <rows> <cols> <nnz>
//! <row> <col> <re> <im>
//! ```
//!
//! Rows are sorted by `(row, col)`; numbers carry 17 significant digits. A state is a
//! single column.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::operator::SparseOperator;

const MAGIC: &str = "# dilute-fermi sparse-triplet v1";

pub fn write_operator(op: &SparseOperator, basis_hash: &str) -> String {
    let trip = op.triplets();
    let mut s = format!(
        "{MAGIC}\n# basis {basis_hash}\n# shape {} {} {}\n",
        op.rows(),
        op.cols(),
        trip.len()
    );
    for (r, c, v) in trip {
        s.push_str(&format!("{r} {c} {:.16e} {:.16e}\n", v.re, v.im));
    }
    s
}

pub fn write_state(psi: &[Complex64], basis_hash: &str) -> String {
    let trip = psi
        .iter()
        .enumerate()
        .filter(|(_, z)| **z != Complex64::new(0.0, 0.0))
        .map(|(i, &z)| (i, 0, z))
        .collect();
    write_operator(&SparseOperator::from_triplets(psi.len(), 1, trip), basis_hash)
}

/// Parses the format back into `(basis hash, operator)`.
pub fn read_operator(text: &str) -> Result<(String, SparseOperator)> {
    let bad = |line: usize, what: &str| Error::InvalidInput(format!("triplet line {line}: {what}"));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == MAGIC => {}
        _ => return Err(bad(1, "missing header")),
    }
    let hash = match lines.next() {
        Some((_, l)) => l
            .strip_prefix("# basis ")
            .ok_or_else(|| bad(2, "missing basis hash"))?
            .trim()
            .to_string(),
        None => return Err(bad(2, "missing basis hash")),
    };
    let shape: Vec<usize> = match lines.next() {
        Some((_, l)) => l
            .strip_prefix("# shape ")
            .ok_or_else(|| bad(3, "missing shape"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(3, "bad shape")))
            .collect::<Result<_>>()?,
        None => return Err(bad(3, "missing shape")),
    };
    if shape.len() != 3 {
        return Err(bad(3, "shape needs rows, cols, nnz"));
    }
    let mut trip = Vec::with_capacity(shape[2]);
    for (i, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 4 {
            return Err(bad(i + 1, "expected four fields"));
        }
        let r: usize = f[0].parse().map_err(|_| bad(i + 1, "bad row"))?;
        let c: usize = f[1].parse().map_err(|_| bad(i + 1, "bad column"))?;
        let re: f64 = f[2].parse().map_err(|_| bad(i + 1, "bad real part"))?;
        let im: f64 = f[3].parse().map_err(|_| bad(i + 1, "bad imaginary part"))?;
        if r >= shape[0] || c >= shape[1] {
            return Err(bad(i + 1, "index outside shape"));
        }
        trip.push((r, c, Complex64::new(re, im)));
    }
    if trip.len() != shape[2] {
        return Err(bad(3, "entry count does not match nnz"));
    }
    Ok((hash, SparseOperator::from_triplets(shape[0], shape[1], trip)))
}
