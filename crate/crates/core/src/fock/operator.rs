use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;

type Triplet = (usize, usize, Complex64);

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A single creation (`dagger`) or annihilation operator on mode `mode`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FermiOp {
    pub mode: u8,
    pub dagger: bool,
}

impl FermiOp {
    pub fn create(mode: usize) -> Self {
        FermiOp {
            mode: mode as u8,
            dagger: true,
        }
    }

    pub fn annihilate(mode: usize) -> Self {
        FermiOp {
            mode: mode as u8,
            dagger: false,
        }
    }

    pub fn adjoint(self) -> Self {
        FermiOp {
            mode: self.mode,
            dagger: !self.dagger,
        }
    }

    /// Acts on a bitstring; `None` if the result vanishes.
    #[inline]
    pub fn apply(self, s: u32) -> Option<(u32, f64)> {
        let bit = 1u32 << self.mode;
        let occupied = s & bit != 0;
        if occupied == self.dagger {
            return None;
        }
        let sign = if (s & (bit - 1)).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        Some((s ^ bit, sign))
    }
}

/// `coeff · ops[0] ops[1] ⋯`, written left to right (the rightmost operator acts first).
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub ops: Vec<FermiOp>,
}

impl Term {
    pub fn new(coeff: impl Into<Complex64>, ops: Vec<FermiOp>) -> Self {
        Term {
            coeff: coeff.into(),
            ops,
        }
    }

    pub fn apply(&self, s: u32) -> Option<(u32, f64)> {
        let mut state = s;
        let mut sign = 1.0;
        for op in self.ops.iter().rev() {
            let (t, sg) = op.apply(state)?;
            state = t;
            sign *= sg;
        }
        Some((state, sign))
    }

    pub fn adjoint(&self) -> Term {
        Term {
            coeff: self.coeff.conj(),
            ops: self.ops.iter().rev().map(|o| o.adjoint()).collect(),
        }
    }
}

/// Compressed-sparse-row complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOperator {
    /// Duplicates are summed; exact zeros are dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut trip: Vec<(usize, usize, Complex64)>) -> Self {
        trip.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(trip.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}x{cols}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseOperator {
            rows,
            cols,
            row_ptr,
            col_idx,
            vals,
        }
        .pruned()
    }

    fn pruned(self) -> Self {
        if self.vals.iter().all(|v| *v != ZERO) {
            return self;
        }
        let trip = self.triplets().into_iter().filter(|t| t.2 != ZERO).collect();
        SparseOperator::from_triplets(self.rows, self.cols, trip)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseOperator {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseOperator::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let trip = d
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, i, Complex64::new(v, 0.0)))
            .collect();
        SparseOperator::from_triplets(d.len(), d.len(), trip)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.row(r).find(|(cc, _)| *cc == c).map_or(ZERO, |(_, v)| v)
    }

    pub fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        (0..self.rows)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .collect()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "dimension mismatch in matvec");
        (0..self.rows)
            .into_par_iter()
            .map(|r| self.row(r).fold(ZERO, |acc, (c, v)| acc + v * x[c]))
            .collect()
    }

    /// `⟨x, A x⟩`.
    pub fn expectation(&self, x: &[Complex64]) -> Complex64 {
        inner(x, &self.matvec(x))
    }

    pub fn adjoint(&self) -> SparseOperator {
        let trip = self.triplets().into_iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        SparseOperator::from_triplets(self.cols, self.rows, trip)
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> SparseOperator {
        let s = s.into();
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        out.pruned()
    }

    pub fn add(&self, other: &SparseOperator) -> SparseOperator {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &SparseOperator) -> SparseOperator {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// `self + s · other`.
    pub fn axpy(&self, s: Complex64, other: &SparseOperator) -> SparseOperator {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut trip = self.triplets();
        trip.extend(other.triplets().into_iter().map(|(r, c, v)| (r, c, s * v)));
        SparseOperator::from_triplets(self.rows, self.cols, trip)
    }

    /// Adds `s` on the diagonal.
    pub fn shift(&self, s: f64) -> SparseOperator {
        assert_eq!(self.rows, self.cols);
        self.add(&SparseOperator::identity(self.rows).scale(s))
    }

    pub fn mul(&self, other: &SparseOperator) -> SparseOperator {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let rows: Vec<Vec<Triplet>> = (0..self.rows)
            .into_par_iter()
            .map(|r| {
                let mut acc: std::collections::BTreeMap<usize, Complex64> = Default::default();
                for (k, a) in self.row(r) {
                    for (c, b) in other.row(k) {
                        *acc.entry(c).or_insert(ZERO) += a * b;
                    }
                }
                acc.into_iter().map(|(c, v)| (r, c, v)).collect()
            })
            .collect();
        SparseOperator::from_triplets(self.rows, other.cols, rows.into_iter().flatten().collect())
    }

    pub fn commutator(&self, other: &SparseOperator) -> SparseOperator {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn anticommutator(&self, other: &SparseOperator) -> SparseOperator {
        self.mul(other).add(&other.mul(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Max absolute row sum; bounds the operator norm of Hermitian matrices.
    pub fn row_sum_norm(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.rows, self.cols, ZERO);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<Complex64>, drop_below: f64) -> SparseOperator {
        let mut trip = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)].norm() > drop_below {
                    trip.push((r, c, m[(r, c)]));
                }
            }
        }
        SparseOperator::from_triplets(m.nrows(), m.ncols(), trip)
    }

    /// Dense principal block on the given row/column indices.
    pub fn block(&self, idx: &[usize]) -> DMatrix<Complex64> {
        let mut pos = vec![usize::MAX; self.cols];
        for (i, &k) in idx.iter().enumerate() {
            pos[k] = i;
        }
        let mut m = DMatrix::from_element(idx.len(), idx.len(), ZERO);
        for (i, &r) in idx.iter().enumerate() {
            for (c, v) in self.row(r) {
                if pos[c] != usize::MAX {
                    m[(i, pos[c])] += v;
                }
            }
        }
        m
    }

    /// Smallest eigenvalue of a Hermitian operator (dense).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(self.to_dense())
    }
}

pub fn min_eigenvalue(m: DMatrix<Complex64>) -> Result<f64> {
    if m.nrows() == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let norm = m.norm();
    let eig = nalgebra::SymmetricEigen::try_new(m, 1e-14, 10_000).ok_or(Error::Exponential { norm })?;
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

pub fn norm(x: &[Complex64]) -> f64 {
    inner(x, x).re.sqrt()
}

/// Assembles `Σ terms` as a map `from → to`. Returns the operator and the number of
/// nonzero images that fell outside `to`.
pub fn build(from: &FockBasis, to: &FockBasis, terms: &[Term]) -> (SparseOperator, usize) {
    let cols: Vec<(Vec<Triplet>, usize)> = (0..from.dim())
        .into_par_iter()
        .map(|c| {
            let s = from.state(c);
            let mut out = Vec::new();
            let mut lost = 0;
            for t in terms {
                if let Some((s2, sg)) = t.apply(s) {
                    match to.index_of(s2) {
                        Some(r) => out.push((r, c, t.coeff * sg)),
                        None => lost += 1,
                    }
                }
            }
            (out, lost)
        })
        .collect();
    let lost = cols.iter().map(|c| c.1).sum();
    let trip = cols.into_iter().flat_map(|c| c.0).collect();
    (SparseOperator::from_triplets(to.dim(), from.dim(), trip), lost)
}

/// Square operator on one basis; images leaving the basis are an error.
pub fn build_on(basis: &FockBasis, terms: &[Term]) -> Result<SparseOperator> {
    let (op, lost) = build(basis, basis, terms);
    if lost > 0 {
        return Err(Error::InvalidInput(format!(
            "operator does not preserve the {:?} sector ({lost} images leave it)",
            basis.sector
        )));
    }
    Ok(op)
}

/// `a*_i` or `a_i` as a matrix on the full Fock space of `m` modes.
pub fn single(basis: &FockBasis, op: FermiOp) -> SparseOperator {
    build(basis, basis, &[Term::new(1.0, vec![op])]).0
}
