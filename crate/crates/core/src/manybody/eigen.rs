//! Extremal and full eigensolvers for Hermitian sparse operators.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::SparseOperator;
use crate::error::{Error, Result};

pub const DEFAULT_DENSE_CAP: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Dimensions up to this use dense diagonalization.
    pub dense_cap: usize,
    /// Krylov space size per Lanczos restart.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Residual target relative to the operator norm bound.
    pub tol: f64,
    /// Levels within this (absolute) of the lowest are one multiplet.
    pub degeneracy_tol: f64,
    pub max_multiplet: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            dense_cap: DEFAULT_DENSE_CAP,
            krylov_dim: 120,
            max_restarts: 200,
            tol: 1e-10,
            degeneracy_tol: 1e-9,
            max_multiplet: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    /// Orthonormal basis of the lowest multiplet; the first entry is the reported state.
    pub multiplet: Vec<Vec<Complex64>>,
    pub multiplet_energies: Vec<f64>,
    /// `max ||H v - E v||` over the multiplet.
    pub residual: f64,
    pub iterations: usize,
    pub method: Method,
}

impl GroundState {
    pub fn state(&self) -> &[Complex64] {
        &self.multiplet[0]
    }

    pub fn degeneracy(&self) -> usize {
        self.multiplet.len()
    }
}

/// All eigenpairs, ascending; columns of the matrix are eigenvectors.
pub fn full_spectrum(h: &SparseOperator, dense_cap: usize) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    if h.dim() > dense_cap {
        return Err(Error::DimensionCap { what: "dense diagonalization dimension", value: h.dim(), cap: dense_cap });
    }
    let eig = SymmetricEigen::new(h.to_dense());
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(h.dim(), h.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (u, v) in y.iter_mut().zip(x) {
        *u += a * v;
    }
}

fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for b in basis {
        let c = dot(b, v);
        axpy(v, -c, b);
    }
}

fn residual_norm(h: &SparseOperator, v: &[Complex64], e: f64) -> f64 {
    let mut r = h.apply(v);
    axpy(&mut r, Complex64::new(-e, 0.0), v);
    norm(&r)
}

/// Lowest eigenpair of `H` on the orthogonal complement of `deflate`.
fn lanczos_lowest(
    h: &SparseOperator,
    deflate: &[Vec<Complex64>],
    opts: &EigenOptions,
    start: Vec<Complex64>,
) -> Result<(f64, Vec<Complex64>, usize)> {
    let dim = h.dim();
    let target = opts.tol * h.norm_bound().max(1.0);
    let m = opts.krylov_dim.min(dim.saturating_sub(deflate.len())).max(1);
    let mut x = start;
    let mut iterations = 0;
    let mut last = f64::INFINITY;
    for _ in 0..opts.max_restarts {
        project_out(&mut x, deflate);
        let nx = norm(&x);
        if nx == 0.0 {
            return Err(Error::NonConvergence { iterations, residual: f64::INFINITY });
        }
        x.iter_mut().for_each(|z| *z /= nx);
        let mut basis: Vec<Vec<Complex64>> = vec![x.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..m {
            iterations += 1;
            let mut w = h.apply(&basis[j]);
            project_out(&mut w, deflate);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            // full reorthogonalization, twice for stability
            for _ in 0..2 {
                project_out(&mut w, &basis);
                project_out(&mut w, deflate);
            }
            let b = norm(&w);
            if j + 1 == m || b < 1e-13 * h.norm_bound().max(1.0) {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|z| *z /= b);
            basis.push(w);
        }
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
        let eig = SymmetricEigen::new(t);
        let (imin, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty tridiagonal");
        let mut v = vec![ZERO; dim];
        for (j, b) in basis.iter().enumerate().take(k) {
            axpy(&mut v, Complex64::new(eig.eigenvectors[(j, imin)], 0.0), b);
        }
        project_out(&mut v, deflate);
        let nv = norm(&v);
        v.iter_mut().for_each(|z| *z /= nv);
        let mut hv = h.apply(&v);
        project_out(&mut hv, deflate);
        axpy(&mut hv, Complex64::new(-theta, 0.0), &v);
        last = norm(&hv);
        if last <= target {
            return Ok((theta, v, iterations));
        }
        x = v;
    }
    Err(Error::NonConvergence { iterations, residual: last })
}

/// Lowest eigenvalue and its full degenerate multiplet.
pub fn ground_state(h: &SparseOperator, opts: &EigenOptions) -> Result<GroundState> {
    if h.dim() == 0 {
        return Err(Error::InvalidParameter { name: "sector", reason: "empty space".into() });
    }
    if h.dim() <= opts.dense_cap {
        let (vals, vecs) = full_spectrum(h, opts.dense_cap)?;
        let e0 = vals[0];
        let mut multiplet = Vec::new();
        let mut energies = Vec::new();
        for (k, &e) in vals.iter().enumerate() {
            if e - e0 > opts.degeneracy_tol || multiplet.len() == opts.max_multiplet {
                break;
            }
            multiplet.push(vecs.column(k).iter().copied().collect::<Vec<_>>());
            energies.push(e);
        }
        let residual = multiplet.iter().zip(&energies).map(|(v, &e)| residual_norm(h, v, e)).fold(0.0, f64::max);
        return Ok(GroundState { energy: e0, multiplet, multiplet_energies: energies, residual, iterations: 1, method: Method::Dense });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15);
    let mut start = || (0..h.dim()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect::<Vec<_>>();
    let (e0, v0, mut iterations) = lanczos_lowest(h, &[], opts, start())?;
    let mut multiplet = vec![v0];
    let mut energies = vec![e0];
    while multiplet.len() < opts.max_multiplet.min(h.dim()) {
        let (e, v, it) = lanczos_lowest(h, &multiplet, opts, start())?;
        iterations += it;
        if e - e0 > opts.degeneracy_tol {
            break;
        }
        multiplet.push(v);
        energies.push(e);
    }
    let residual = multiplet.iter().zip(&energies).map(|(v, &e)| residual_norm(h, v, e)).fold(0.0, f64::max);
    Ok(GroundState { energy: e0, multiplet, multiplet_energies: energies, residual, iterations, method: Method::Lanczos })
}

/// The `k` lowest eigenvalues.
pub fn lowest_eigenvalues(h: &SparseOperator, k: usize, opts: &EigenOptions) -> Result<Vec<f64>> {
    if h.dim() <= opts.dense_cap {
        let (vals, _) = full_spectrum(h, opts.dense_cap)?;
        return Ok(vals.into_iter().take(k).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x243f_6a88_85a3_08d3);
    let mut found: Vec<Vec<Complex64>> = Vec::new();
    let mut out = Vec::new();
    for _ in 0..k.min(h.dim()) {
        let start = (0..h.dim()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect();
        let (e, v, _) = lanczos_lowest(h, &found, opts, start)?;
        out.push(e);
        found.push(v);
    }
    Ok(out)
}

/// `tr(O e^{-H/T}) / tr(e^{-H/T})` with `k_B = 1`; `T = 0` averages the
/// lowest multiplet uniformly.
pub fn thermal_expectation(
    h: &SparseOperator,
    temperature: f64,
    obs: &SparseOperator,
    opts: &EigenOptions,
) -> Result<f64> {
    if temperature.is_nan() || temperature < 0.0 {
        return Err(Error::InvalidParameter { name: "T", reason: format!("temperature must be >= 0, got {temperature}") });
    }
    if obs.dim() != h.dim() {
        return Err(Error::ShapeMismatch(format!("observable dim {} vs Hamiltonian dim {}", obs.dim(), h.dim())));
    }
    let (vals, vecs) = full_spectrum(h, opts.dense_cap)?;
    let e0 = vals[0];
    let weights: Vec<f64> = vals
        .iter()
        .map(|&e| {
            if temperature == 0.0 {
                if e - e0 <= opts.degeneracy_tol {
                    1.0
                } else {
                    0.0
                }
            } else {
                (-(e - e0) / temperature).exp()
            }
        })
        .collect();
    let z: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let v: Vec<Complex64> = vecs.column(k).iter().copied().collect();
        acc += w * obs.expectation(&v).re;
    }
    Ok(acc / z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manybody::sparse::TripletBuilder;

    fn chain(n: usize) -> SparseOperator {
        let mut b = TripletBuilder::new(n);
        for i in 0..n {
            b.push(i, (i + 1) % n, Complex64::new(-1.0, 0.0));
            b.push((i + 1) % n, i, Complex64::new(-1.0, 0.0));
            b.push(i, i, Complex64::new(0.01 * i as f64, 0.0));
        }
        b.build().unwrap()
    }

    #[test]
    fn identity_ground_state() {
        let g = ground_state(&SparseOperator::identity(5), &EigenOptions::default()).unwrap();
        assert_eq!(g.energy, 1.0);
        assert_eq!(g.degeneracy(), 5);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let h = chain(300);
        let dense = ground_state(&h, &EigenOptions::default()).unwrap();
        let opts = EigenOptions { dense_cap: 10, ..Default::default() };
        let lz = ground_state(&h, &opts).unwrap();
        assert_eq!(lz.method, Method::Lanczos);
        assert!((dense.energy - lz.energy).abs() < 1e-10);
        assert!(lz.residual <= 1e-10 * h.norm_bound());
        let ov = dot(dense.state(), lz.state()).norm();
        assert!((ov - 1.0).abs() < 1e-8);
    }

    #[test]
    fn lanczos_finds_degenerate_multiplet() {
        // periodic ring without onsite terms: doubly degenerate excited levels, unique ground state
        let opts = EigenOptions { dense_cap: 4, ..Default::default() };
        let h = SparseOperator::identity(40).scale_re(2.0);
        let g = ground_state(&h, &EigenOptions { max_multiplet: 3, ..opts }).unwrap();
        assert_eq!(g.degeneracy(), 3);
        let e = lowest_eigenvalues(&chain(50), 3, &opts).unwrap();
        let d = lowest_eigenvalues(&chain(50), 3, &EigenOptions::default()).unwrap();
        for (a, b) in e.iter().zip(&d) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn thermal_limits() {
        let h = chain(12);
        let id = SparseOperator::identity(12);
        let opts = EigenOptions::default();
        for t in [0.0, 0.5, 10.0, f64::INFINITY] {
            assert!((thermal_expectation(&h, t, &id, &opts).unwrap() - 1.0).abs() < 1e-12);
        }
        let obs = SparseOperator::diagonal(&(0..12).map(|i| Complex64::new(i as f64, 0.0)).collect::<Vec<_>>());
        assert!((thermal_expectation(&h, f64::INFINITY, &obs, &opts).unwrap() - 5.5).abs() < 1e-12);
        let g = ground_state(&h, &opts).unwrap();
        let t0 = thermal_expectation(&h, 0.0, &obs, &opts).unwrap();
        assert!((t0 - obs.expectation(g.state()).re).abs() < 1e-10);
        assert!(thermal_expectation(&h, -1.0, &obs, &opts).is_err());
    }
}
