//! Compressed-row complex sparse matrices.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default cap on stored nonzeros.
pub const DEFAULT_NNZ_CAP: usize = 1 << 22;

/// Rows above this count use the parallel matrix-vector product.
const PAR_ROWS: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square complex matrix in CSR form with sorted, duplicate-free columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

/// Accumulates `(row, col, value)` triplets; duplicates are summed.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    dim: usize,
    rows: Vec<BTreeMap<usize, Complex64>>,
}

impl TripletBuilder {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: vec![BTreeMap::new(); dim] }
    }

    pub fn push(&mut self, row: usize, col: usize, v: Complex64) {
        if v != ZERO {
            *self.rows[row].entry(col).or_insert(ZERO) += v;
        }
    }

    pub fn build(self) -> Result<SparseOperator> {
        self.build_capped(DEFAULT_NNZ_CAP)
    }

    pub fn build_capped(self, cap: usize) -> Result<SparseOperator> {
        let nnz: usize = self.rows.iter().map(|r| r.len()).sum();
        if nnz > cap {
            return Err(Error::DimensionCap { what: "nonzeros", value: nnz, cap });
        }
        let mut row_ptr = Vec::with_capacity(self.dim + 1);
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for r in self.rows {
            for (c, v) in r {
                if v != ZERO {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(SparseOperator { dim: self.dim, row_ptr, cols, vals })
    }
}

impl SparseOperator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let mut b = TripletBuilder::new(d.len());
        for (i, v) in d.iter().enumerate() {
            b.push(i, i, *v);
        }
        b.build_capped(usize::MAX).expect("no cap")
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let mut b = TripletBuilder::new(m.nrows());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                b.push(r, c, m[(r, c)]);
            }
        }
        b.build_capped(usize::MAX).expect("no cap")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(col, value)` pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let s = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[s.clone()].iter().copied().zip(self.vals[s].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let s = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[s.clone()].binary_search(&c) {
            Ok(k) => self.vals[s.start + k],
            Err(_) => ZERO,
        }
    }

    /// `y = A x`. Each row is summed in a fixed order, so the result does
    /// not depend on the number of threads.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let row = |r: usize| self.row(r).fold(ZERO, |acc, (c, v)| acc + v * x[c]);
        if self.dim > PAR_ROWS {
            (0..self.dim).into_par_iter().map(row).collect()
        } else {
            (0..self.dim).map(row).collect()
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut b = TripletBuilder::new(self.dim);
        for (r, c, v) in self.triplets() {
            b.push(c, r, v.conj());
        }
        b.build_capped(usize::MAX).expect("no cap")
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { vals: self.vals.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// `a A + b B`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.check_dim(other)?;
        let mut t = TripletBuilder::new(self.dim);
        for (r, c, v) in self.triplets() {
            t.push(r, c, a * v);
        }
        for (r, c, v) in other.triplets() {
            t.push(r, c, b * v);
        }
        t.build()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn add_scaled_identity(&self, s: Complex64) -> Self {
        self.combine(Complex64::new(1.0, 0.0), &Self::identity(self.dim), s).expect("same dim")
    }

    /// Matrix product `A B`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut t = TripletBuilder::new(self.dim);
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    t.push(r, c, a * b);
                }
            }
        }
        t.build()
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0_f64, |m, v| m.max(v.norm()))
    }

    /// `max |A - A^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)
    }

    /// Upper bound on the spectral norm: the largest absolute row sum.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim).map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// `<x|A|x>`.
    pub fn expectation(&self, x: &[Complex64]) -> Complex64 {
        let y = self.apply(x);
        x.iter().zip(&y).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
    }

    /// Restriction to the listed basis states, as a dense matrix.
    pub fn restrict(&self, keep: &[usize]) -> DMatrix<Complex64> {
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &i) in keep.iter().enumerate() {
            pos[i] = k;
        }
        let mut m = DMatrix::zeros(keep.len(), keep.len());
        for (k, &r) in keep.iter().enumerate() {
            for (c, v) in self.row(r) {
                if pos[c] != usize::MAX {
                    m[(k, pos[c])] = v;
                }
            }
        }
        m
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!("operator dimensions {} and {}", self.dim, other.dim)))
        }
    }
}
