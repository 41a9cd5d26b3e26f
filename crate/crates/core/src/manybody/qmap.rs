//! The linear map `q1 = (2 sqrt2 / 3) d_x - d_z / 3`, `q2 = d_z` and its commutators.

use super::fock::FockSpace;
use super::sparse::SparseOperator;
use crate::error::Result;
use crate::symbolic::QSqrt2;

/// Coefficients of `(q1, q2)` on `(d_x, d_z)`, exact.
pub fn q_coefficients() -> [[QSqrt2; 2]; 2] {
    [
        [QSqrt2::sqrt2_times(2, 3), QSqrt2::rational(-1, 3)],
        [QSqrt2::zero(), QSqrt2::one()],
    ]
}

/// `[q_a, q_b^dag]` for canonical `d`: `sum_m c_am conj(c_bm)`.
///
/// The result is `[[1, -1/3], [-1/3, 1]]`: each mode keeps a unit
/// self-commutator, but the pair is not canonical.
pub fn q_map_commutators() -> [[QSqrt2; 2]; 2] {
    let c = q_coefficients();
    std::array::from_fn(|a| std::array::from_fn(|b| c[a][0] * c[b][0] + c[a][1] * c[b][1]))
}

/// `(q1, q2)` as operators, given the ladder of the cell's x and z modes.
pub fn q_operators(space: &FockSpace, x_mode: usize, z_mode: usize) -> Result<[SparseOperator; 2]> {
    let dx = space.boson_annihilator(x_mode)?;
    let dz = space.boson_annihilator(z_mode)?;
    let c = q_coefficients();
    let q1 = dx.combine(c[0][0].to_f64().into(), &dz, c[0][1].to_f64().into())?;
    Ok([q1, dz])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manybody::fock::{BosonMode, Species};

    #[test]
    fn exact_commutators() {
        let m = q_map_commutators();
        assert_eq!(m[0][0], QSqrt2::one());
        assert_eq!(m[1][1], QSqrt2::one());
        assert_eq!(m[0][1], QSqrt2::rational(-1, 3));
        assert_eq!(m[1][0], QSqrt2::rational(-1, 3));
    }

    #[test]
    fn operator_commutator_below_cutoff() {
        let modes = vec![BosonMode { cell: 0, species: Species::X }, BosonMode { cell: 0, species: Species::Z }];
        let s = FockSpace::new(0, modes, 4, None).unwrap();
        let [q1, q2] = q_operators(&s, 0, 1).unwrap();
        let com = q1.commutator(&q2.adjoint()).unwrap();
        let below: Vec<usize> = (0..s.dim()).filter(|&i| s.decode(i).1.iter().all(|&o| o < 4)).collect();
        let r = com.restrict(&below);
        for k in 0..below.len() {
            assert!((r[(k, k)].re + 1.0 / 3.0).abs() < 1e-14);
        }
    }
}
