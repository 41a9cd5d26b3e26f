//! Two- and four-point correlators of (uniform mixtures of) many-body
//! states, and the Wick residual of the fermion sector.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fock::{apply_fermion_string, FockSpace, Species};
use super::qmap::q_coefficients;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Quadruples are enumerated exhaustively up to this many fermion modes.
pub const EXHAUSTIVE_MODES: usize = 8;
pub const SAMPLED_QUADRUPLES: usize = 512;

/// `<O>` averaged uniformly over `states`, for `O` a string of fermion
/// ladders (right to left) times a string of boson ladders (right to left).
pub fn mixture_expectation(
    states: &[Vec<Complex64>],
    space: &FockSpace,
    fermion_ops: &[(usize, bool)],
    boson_ops: &[(usize, bool)],
) -> Complex64 {
    let n_max = space.n_max();
    let mut total = ZERO;
    for psi in states {
        let mut acc = ZERO;
        for (i, &amp) in psi.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            let (f, mut occ) = space.decode(i);
            let Some((f2, sign)) = apply_fermion_string(f, fermion_ops) else { continue };
            let mut w = sign;
            let mut alive = true;
            for &(m, dagger) in boson_ops.iter().rev() {
                let n = occ[m];
                if dagger {
                    if n == n_max {
                        alive = false;
                        break;
                    }
                    w *= ((n + 1) as f64).sqrt();
                    occ[m] = n + 1;
                } else {
                    if n == 0 {
                        alive = false;
                        break;
                    }
                    w *= (n as f64).sqrt();
                    occ[m] = n - 1;
                }
            }
            if !alive {
                continue;
            }
            if let Some(j) = space.encode(f2, &occ) {
                acc += psi[j].conj() * amp * w;
            }
        }
        total += acc;
    }
    total / states.len().max(1) as f64
}

/// Index quadruples `(i, j, k, l)` for `<c_i^dag c_j^dag c_k c_l>`.
pub fn wick_quadruples(n_modes: usize, seed: u64) -> Vec<[usize; 4]> {
    if n_modes == 0 {
        return Vec::new();
    }
    if n_modes <= EXHAUSTIVE_MODES {
        let mut out = Vec::with_capacity(n_modes.pow(4));
        for i in 0..n_modes {
            for j in 0..n_modes {
                for k in 0..n_modes {
                    for l in 0..n_modes {
                        out.push([i, j, k, l]);
                    }
                }
            }
        }
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..SAMPLED_QUADRUPLES).map(|_| std::array::from_fn(|_| rng.random_range(0..n_modes))).collect()
}

/// Boson correlators of one cell in the q basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellQCorrelators {
    pub cell: usize,
    /// `<q1^dag q2>`.
    pub q1d_q2: Complex64,
    /// `<q1^dag q2^dag>`.
    pub q1d_q2d: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorReport {
    /// Number of states in the uniform mixture.
    pub mixture_size: usize,
    /// `<d_m^dag d_n>`.
    pub boson_normal: DMatrix<Complex64>,
    /// `<d_m^dag d_n^dag>`.
    pub boson_anomalous: DMatrix<Complex64>,
    pub q_correlators: Vec<CellQCorrelators>,
    /// `C_ij = <c_i^dag c_j>`.
    pub fermion_two_point: DMatrix<Complex64>,
    pub four_point: Vec<([usize; 4], Complex64)>,
    /// `max |<c_i^dag c_j^dag c_k c_l> - (C_il C_jk - C_ik C_jl)|` over the samples.
    pub wick_residual: f64,
    pub worst_quadruple: Option<[usize; 4]>,
}

impl CorrelatorReport {
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mixture_size={}", self.mixture_size);
        let _ = writeln!(s, "wick_residual={:?}", self.wick_residual);
        if let Some(q) = self.worst_quadruple {
            let _ = writeln!(s, "worst_quadruple={},{},{},{}", q[0], q[1], q[2], q[3]);
        }
        let _ = writeln!(s, "quadruples={}", self.four_point.len());
        for m in 0..self.boson_normal.nrows() {
            let _ = writeln!(s, "boson_occupation.{m}={:?}", self.boson_normal[(m, m)].re);
        }
        for q in &self.q_correlators {
            let _ = writeln!(s, "cell{}.q1dag_q2={:?},{:?}", q.cell, q.q1d_q2.re, q.q1d_q2.im);
            let _ = writeln!(s, "cell{}.q1dag_q2dag={:?},{:?}", q.cell, q.q1d_q2d.re, q.q1d_q2d.im);
        }
        let trace: f64 = (0..self.fermion_two_point.nrows()).map(|i| self.fermion_two_point[(i, i)].re).sum();
        let _ = writeln!(s, "fermion_number={trace:?}");
        s
    }
}

/// Correlators over the uniform mixture of the given orthonormal states.
pub fn correlators_and_wick(states: &[Vec<Complex64>], space: &FockSpace, seed: u64) -> Result<CorrelatorReport> {
    if states.is_empty() {
        return Err(Error::InvalidParameter { name: "states", reason: "empty mixture".into() });
    }
    for s in states {
        if s.len() != space.dim() {
            return Err(Error::ShapeMismatch(format!("state of length {} for dimension {}", s.len(), space.dim())));
        }
    }
    let nb = space.boson_modes().len();
    let boson_normal = DMatrix::from_fn(nb, nb, |m, n| mixture_expectation(states, space, &[], &[(m, true), (n, false)]));
    let boson_anomalous = DMatrix::from_fn(nb, nb, |m, n| mixture_expectation(states, space, &[], &[(m, true), (n, true)]));

    let c = q_coefficients().map(|r| r.map(|x| x.to_f64()));
    let mut q_correlators = Vec::new();
    let cells: std::collections::BTreeSet<usize> = space.boson_modes().iter().map(|m| m.cell).collect();
    for cell in cells {
        let find = |s: Species| space.boson_modes().iter().position(|m| m.cell == cell && m.species == s);
        if let (Some(x), Some(z)) = (find(Species::X), find(Species::Z)) {
            let idx = [x, z];
            let mut a = ZERO;
            let mut b = ZERO;
            for (p, &m) in idx.iter().enumerate() {
                for (q, &n) in idx.iter().enumerate() {
                    a += boson_normal[(m, n)] * (c[0][p] * c[1][q]);
                    b += boson_anomalous[(m, n)] * (c[0][p] * c[1][q]);
                }
            }
            q_correlators.push(CellQCorrelators { cell, q1d_q2: a, q1d_q2d: b });
        }
    }

    let nf = space.n_fermion_modes();
    let two = DMatrix::from_fn(nf, nf, |i, j| mixture_expectation(states, space, &[(i, true), (j, false)], &[]));
    let mut four_point = Vec::new();
    let mut wick_residual = 0.0_f64;
    let mut worst_quadruple = None;
    for q in wick_quadruples(nf, seed) {
        let [i, j, k, l] = q;
        let v = mixture_expectation(states, space, &[(i, true), (j, true), (k, false), (l, false)], &[]);
        let wick = two[(i, l)] * two[(j, k)] - two[(i, k)] * two[(j, l)];
        let r = (v - wick).norm();
        if r > wick_residual {
            wick_residual = r;
            worst_quadruple = Some(q);
        }
        four_point.push((q, v));
    }
    Ok(CorrelatorReport {
        mixture_size: states.len(),
        boson_normal,
        boson_anomalous,
        q_correlators,
        fermion_two_point: two,
        four_point,
        wick_residual,
        worst_quadruple,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manybody::fock::BosonMode;

    fn basis(space: &FockSpace, f: u64, b: &[usize]) -> Vec<Complex64> {
        let mut v = vec![ZERO; space.dim()];
        v[space.encode(f, b).unwrap()] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn slater_determinant_satisfies_wick() {
        // single occupied orbital (c_0^dag + c_1^dag)/sqrt2 times c_2^dag
        let s = FockSpace::new(3, vec![], 0, Some(2)).unwrap();
        let a = basis(&s, 0b101, &[]);
        let b = basis(&s, 0b110, &[]);
        let psi: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| (x + y) / 2f64.sqrt()).collect();
        let r = correlators_and_wick(&[psi], &s, 0).unwrap();
        assert!(r.wick_residual < 1e-14);
        assert_eq!(r.four_point.len(), 81);
        assert!((r.fermion_two_point[(0, 1)].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn correlated_pair_violates_wick() {
        // (|1100> + |0011>)/sqrt2 is not Gaussian
        let s = FockSpace::new(4, vec![], 0, Some(2)).unwrap();
        let a = basis(&s, 0b0011, &[]);
        let b = basis(&s, 0b1100, &[]);
        let psi: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| (x + y) / 2f64.sqrt()).collect();
        let r = correlators_and_wick(&[psi], &s, 0).unwrap();
        assert!((r.wick_residual - 0.5).abs() < 1e-14);
    }

    #[test]
    fn vacuum_has_no_boson_correlations() {
        let modes = vec![BosonMode { cell: 0, species: Species::X }, BosonMode { cell: 0, species: Species::Z }];
        let s = FockSpace::new(2, modes, 2, None).unwrap();
        let r = correlators_and_wick(&[basis(&s, 0b01, &[0, 0])], &s, 0).unwrap();
        assert!(r.boson_normal.iter().chain(r.boson_anomalous.iter()).all(|z| *z == ZERO));
        assert_eq!(r.q_correlators[0].q1d_q2, ZERO);
    }

    #[test]
    fn q_correlators_follow_the_map() {
        let modes = vec![BosonMode { cell: 0, species: Species::X }, BosonMode { cell: 0, species: Species::Z }];
        let s = FockSpace::new(0, modes, 2, None).unwrap();
        // |1_x 0_z> + |0_x 1_z>: <d_x^dag d_z> = 1/2
        let psi: Vec<Complex64> =
            basis(&s, 0, &[1, 0]).iter().zip(&basis(&s, 0, &[0, 1])).map(|(x, y)| (x + y) / 2f64.sqrt()).collect();
        let r = correlators_and_wick(&[psi], &s, 0).unwrap();
        // q1^dag q2 = (2 sqrt2/3) d_x^dag d_z - d_z^dag d_z / 3
        let want = (2.0 * 2f64.sqrt() / 3.0) * 0.5 - 0.5 / 3.0;
        assert!((r.q_correlators[0].q1d_q2.re - want).abs() < 1e-14);
    }

    #[test]
    fn sampling_is_seeded() {
        assert_eq!(wick_quadruples(4, 1).len(), 256);
        let a = wick_quadruples(10, 7);
        assert_eq!(a, wick_quadruples(10, 7));
        assert_ne!(a, wick_quadruples(10, 8));
        assert_eq!(a.len(), SAMPLED_QUADRUPLES);
    }

    #[test]
    fn mixture_averages() {
        let s = FockSpace::new(2, vec![], 0, Some(1)).unwrap();
        let st = vec![basis(&s, 0b01, &[]), basis(&s, 0b10, &[])];
        let r = correlators_and_wick(&st, &s, 0).unwrap();
        assert!((r.fermion_two_point[(0, 0)].re - 0.5).abs() < 1e-15);
        assert_eq!(r.mixture_size, 2);
    }
}
