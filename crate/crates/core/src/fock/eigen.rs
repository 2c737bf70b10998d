//! Lowest eigenvalue of a Hermitian operator: dense below [`DENSE_LIMIT`], Lanczos with
//! full reorthogonalization above.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::operator::{inner, min_eigenvalue, norm, SparseOperator};

pub const DENSE_LIMIT: usize = 1 << 12;

pub fn lowest_eigenvalue(op: &SparseOperator, tol: f64) -> Result<f64> {
    if op.rows() != op.cols() {
        return Err(Error::InvalidInput("lowest_eigenvalue needs a square operator".into()));
    }
    if op.rows() <= DENSE_LIMIT {
        min_eigenvalue(op.to_dense())
    } else {
        lanczos(op, tol, 300)
    }
}

/// Lowest eigenpair by dense diagonalization. The phase is fixed by making the
/// largest component real and positive.
pub fn ground_state(op: &SparseOperator) -> Result<(f64, Vec<Complex64>)> {
    let n = op.rows();
    if n != op.cols() || n == 0 {
        return Err(Error::InvalidInput(
            "ground_state needs a nonempty square operator".into(),
        ));
    }
    if n > DENSE_LIMIT {
        return Err(Error::Capacity {
            what: "dense ground state",
            requested: n,
            limit: DENSE_LIMIT,
        });
    }
    let eig = nalgebra::SymmetricEigen::new(op.to_dense());
    let k = eig.eigenvalues.imin();
    let mut v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
    let big = v
        .iter()
        .enumerate()
        .fold(
            (0, 0.0),
            |acc, (i, z)| if z.norm() > acc.1 + 1e-12 { (i, z.norm()) } else { acc },
        )
        .0;
    let phase = v[big].conj() / v[big].norm();
    let s = norm(&v);
    for z in &mut v {
        *z *= phase / s;
    }
    Ok((eig.eigenvalues[k], v))
}

/// Deterministic start vector with no special symmetry.
fn start(n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = i as f64 + 1.0;
            Complex64::new((t * 0.754_877_666_2).fract() - 0.5, (t * 0.569_840_290_9).fract() - 0.5)
        })
        .collect();
    let s = norm(&v);
    v.into_iter().map(|z| z / s).collect()
}

pub fn lanczos(op: &SparseOperator, tol: f64, max_iter: usize) -> Result<f64> {
    let n = op.rows();
    let mut basis: Vec<Vec<Complex64>> = vec![start(n)];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for j in 0..max_iter.min(n) {
        let mut w = op.matvec(&basis[j]);
        for _ in 0..2 {
            for v in &basis {
                let c = inner(v, &w);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            }
        }
        alpha.push(inner(&basis[j], &op.matvec(&basis[j])).re);
        let b = norm(&w);
        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = nalgebra::SymmetricEigen::new(t);
        let (idx, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let residual = (b * eig.eigenvectors[(k - 1, idx)]).abs();
        if residual < tol || b < 1e-14 {
            return Ok(theta);
        }
        beta.push(b);
        basis.push(w.into_iter().map(|z| z / b).collect());
    }
    Err(Error::Integrator(format!(
        "Lanczos did not converge in {max_iter} steps"
    )))
}
