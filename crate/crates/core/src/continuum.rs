//! Target field theory: gamma matrices, the dressed Dirac symbol, the
//! graviton quadratic form and its normal modes, fermionic currents, and
//! the current-current interaction left after integrating out geometry.

use nalgebra::{Matrix2, Matrix4, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::params::ModelParams;
use crate::symbolic::Monomial;
use crate::tensor::ETA;

pub type CMatrix4 = Matrix4<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dirac matrices in the block form `g0 = [[0, -1], [1, 0]]`, `gi = [[0, s_i], [s_i, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    pub g: [CMatrix4; 3],
}

impl Default for GammaSet {
    fn default() -> Self {
        Self::new()
    }
}

impl GammaSet {
    pub fn new() -> Self {
        let z = c(0.0);
        let sigma = [
            [[c(0.0), c(1.0)], [c(1.0), c(0.0)]],
            [[z, -I], [I, z]],
        ];
        let mut g0 = CMatrix4::zeros();
        for k in 0..2 {
            g0[(k, k + 2)] = c(-1.0);
            g0[(k + 2, k)] = c(1.0);
        }
        let block = |s: [[Complex64; 2]; 2]| {
            let mut m = CMatrix4::zeros();
            for r in 0..2 {
                for q in 0..2 {
                    m[(r, q + 2)] = s[r][q];
                    m[(r + 2, q)] = s[r][q];
                }
            }
            m
        };
        Self { g: [g0, block(sigma[0]), block(sigma[1])] }
    }

    /// Largest entry of `{g_A, g_B} - 2 eta_AB` over all six pairs.
    pub fn clifford_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..3 {
            for b in a..3 {
                let mut ac = self.g[a] * self.g[b] + self.g[b] * self.g[a];
                if a == b {
                    ac -= CMatrix4::identity() * c(2.0 * ETA[a]);
                }
                worst = worst.max(ac.iter().fold(0.0_f64, |m, z| m.max(z.norm())));
            }
        }
        worst
    }

    /// `g0 g_a`, Hermitian for the spatial indices.
    pub fn alpha(&self, a: usize) -> CMatrix4 {
        self.g[0] * self.g[a]
    }
}

/// Local geometry fed to the symbol: values and the gradients that enter
/// the ordering term.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SymbolInput {
    pub xi1x: f64,
    pub xi2y: f64,
    pub dx_xi1x: f64,
    pub dy_xi2y: f64,
}

/// The Dirac symbol plus the weak-coupling ratio `8 pi G max|xi| / l`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracSymbol {
    pub matrix: CMatrix4,
    pub weak_coupling_ratio: f64,
}

impl DiracSymbol {
    pub fn is_weak_coupling(&self) -> bool {
        self.weak_coupling_ratio < 1.0
    }

    pub fn hermitian_part(&self) -> CMatrix4 {
        (self.matrix + self.matrix.adjoint()) * c(0.5)
    }

    /// `(h - h^dagger) / 2`; equals the gradient ordering term.
    pub fn anti_hermitian_part(&self) -> CMatrix4 {
        (self.matrix - self.matrix.adjoint()) * c(0.5)
    }
}

/// `(1/l - 8 pi G xi^1_x / l^2, 1/l - 8 pi G xi^2_y / l^2)`.
pub fn dressed_velocities(params: &ModelParams, xi1x: f64, xi2y: f64) -> (f64, f64) {
    let (l, k) = (params.l(), params.kappa());
    (1.0 / l - k * xi1x / (l * l), 1.0 / l - k * xi2y / (l * l))
}

/// `v_x g0 g1 p_x + v_y g0 g2 p_y + (4 pi G / l^2)(d_x xi^1_x i g0 g1 + d_y xi^2_y i g0 g2)`.
///
/// The gradient piece is anti-Hermitian: it is the correction that makes
/// `v(x) p` a Hermitian operator once `p` acts on position-dependent
/// velocities. With zero gradients the matrix is Hermitian.
pub fn single_particle_symbol(params: &ModelParams, xi: SymbolInput, p: [f64; 2]) -> DiracSymbol {
    let gamma = GammaSet::new();
    let (vx, vy) = dressed_velocities(params, xi.xi1x, xi.xi2y);
    let l = params.l();
    let s = 4.0 * std::f64::consts::PI * params.g() / (l * l);
    let a1 = gamma.alpha(1);
    let a2 = gamma.alpha(2);
    let matrix = a1 * c(vx * p[0]) + a2 * c(vy * p[1]) + (a1 * c(xi.dx_xi1x) + a2 * c(xi.dy_xi2y)) * (I * s);
    DiracSymbol { matrix, weak_coupling_ratio: params.kappa() * xi.xi1x.abs().max(xi.xi2y.abs()) / l }
}

/// Which sign of the mass term the graviton Hamiltonian carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassSign {
    /// `-8 pi G mu^2 xi^1 xi^2`: what the Legendre transform of the massive action gives.
    #[default]
    Legendre,
    /// `+8 pi G mu^2 xi^1 xi^2`: the opposite sign, the one paired with the q-operator map.
    Flipped,
}

impl MassSign {
    fn factor(self) -> i64 {
        match self {
            MassSign::Legendre => -1,
            MassSign::Flipped => 1,
        }
    }
}

/// `H_gr = kinetic pi^x_1 pi^y_2 + mass xi^1_x xi^2_y`, also as
/// `z^T K z / 2` over `z = (xi^1_x, xi^2_y, pi^x_1, pi^y_2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GravitonQuadraticForm {
    pub sign: MassSign,
    pub kinetic: f64,
    pub mass: f64,
    pub matrix: Matrix4<f64>,
    pub kinetic_exact: Monomial,
    pub mass_exact: Monomial,
    /// Coefficient of `(q1^dag - q1)(q2^dag - q2)`.
    pub q_kinetic_exact: Monomial,
    /// Coefficient of `(q1^dag + q1)(q2^dag + q2)`.
    pub q_mass_exact: Monomial,
}

impl GravitonQuadraticForm {
    pub fn energy(&self, z: [f64; 4]) -> f64 {
        self.kinetic * z[2] * z[3] + self.mass * z[0] * z[1]
    }

    /// Exact coefficient lines, `name=value`.
    pub fn coefficient_table(&self) -> String {
        format!(
            "pi1*pi2={}\nxi1*xi2={}\n(q1d-q1)(q2d-q2)={}\n(q1d+q1)(q2d+q2)={}\n",
            self.kinetic_exact, self.mass_exact, self.q_kinetic_exact, self.q_mass_exact
        )
    }
}

pub fn hgr_quadratic_form(params: &ModelParams, sign: MassSign) -> Result<GravitonQuadraticForm> {
    params.require_gravity("the kinetic coefficient 1/(8 pi G) is undefined")?;
    let s = sign.factor();
    let kappa = Monomial::kappa();
    let kinetic_exact = -kappa.inv().expect("nonzero");
    let mass_exact = Monomial::rational(s, 1) * kappa * Monomial::mu().pow(2);
    let q_kinetic_exact = Monomial::rational(1, 16) * (Monomial::pi() * Monomial::g()).inv().expect("nonzero");
    let q_mass_exact = Monomial::rational(4 * s, 1) * Monomial::pi() * Monomial::g() * Monomial::mu().pow(2);
    let kinetic = kinetic_exact.eval(params);
    let mass = mass_exact.eval(params);
    let mut matrix = Matrix4::zeros();
    matrix[(0, 1)] = mass;
    matrix[(1, 0)] = mass;
    matrix[(2, 3)] = kinetic;
    matrix[(3, 2)] = kinetic;
    Ok(GravitonQuadraticForm { sign, kinetic, mass, matrix, kinetic_exact, mass_exact, q_kinetic_exact, q_mass_exact })
}

/// Normal modes of the graviton sector in the `q_pm = (1 +- 2) / sqrt 2` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalModes {
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// Sign of the energy of each mode: `+1` positive-definite, `-1` negative-definite, `0` otherwise.
    pub plus_definiteness: i8,
    pub minus_definiteness: i8,
}

impl NormalModes {
    /// Mode signs sorted descending, e.g. `(1, -1)`.
    pub fn signature(&self) -> (i8, i8) {
        let (a, b) = (self.plus_definiteness, self.minus_definiteness);
        (a.max(b), a.min(b))
    }

    pub fn signature_label(&self) -> String {
        let s = |x: i8| match x {
            1 => "+",
            -1 => "-",
            _ => "0",
        };
        let (a, b) = self.signature();
        format!("({},{})", s(a), s(b))
    }
}

/// Frequencies and definiteness of the two modes of the Legendre-sign form.
pub fn normal_mode_frequencies(params: &ModelParams) -> Result<NormalModes> {
    normal_modes(&hgr_quadratic_form(params, MassSign::Legendre)?)
}

pub fn normal_modes(form: &GravitonQuadraticForm) -> Result<NormalModes> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let rot2 = Matrix2::new(r, r, r, -r);
    let mut rot = Matrix4::zeros();
    rot.fixed_view_mut::<2, 2>(0, 0).copy_from(&rot2);
    rot.fixed_view_mut::<2, 2>(2, 2).copy_from(&rot2);
    let k = rot.transpose() * form.matrix * rot;
    let mode = |i: usize| -> Result<(f64, i8)> {
        let (kx, kp) = (k[(i, i)], k[(i + 2, i + 2)]);
        let w2 = kx * kp;
        if w2 < 0.0 {
            return Err(Error::InvalidParameter {
                name: "mass sign",
                reason: format!("mode {i} is not oscillatory (omega^2 = {w2})"),
            });
        }
        let def = if kx > 0.0 && kp > 0.0 {
            1
        } else if kx < 0.0 && kp < 0.0 {
            -1
        } else {
            0
        };
        Ok((w2.sqrt(), def))
    };
    let (wp, dp) = mode(0)?;
    let (wm, dm) = mode(1)?;
    Ok(NormalModes { omega_plus: wp, omega_minus: wm, plus_definiteness: dp, minus_definiteness: dm })
}

/// Four-component spinor samples on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    grid: Grid2D,
    pub psi: Vec<[Complex64; 4]>,
}

impl SpinorField {
    pub fn new(grid: Grid2D, psi: Vec<[Complex64; 4]>) -> Result<Self> {
        grid.check_len("psi", psi.len())?;
        Ok(Self { grid, psi })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
}

/// Currents `J^a_i` per node, indexed `[a - 1][i]` with `i = x, y`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentField {
    grid: Grid2D,
    pub j: [[Vec<f64>; 2]; 2],
}

impl CurrentField {
    pub fn new(grid: Grid2D, j: [[Vec<f64>; 2]; 2]) -> Result<Self> {
        for row in &j {
            for comp in row {
                grid.check_len("current", comp.len())?;
            }
        }
        Ok(Self { grid, j })
    }

    /// Only `J^1_x` and `J^2_y` set.
    pub fn diagonal(grid: Grid2D, j1x: Vec<f64>, j2y: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, [[j1x, vec![0.0; n]], [vec![0.0; n], j2y]])
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn j1x(&self) -> &[f64] {
        &self.j[0][0]
    }

    pub fn j2y(&self) -> &[f64] {
        &self.j[1][1]
    }
}

/// `J^a_i = (i / 2l)(psibar g^a d_i psi - d_i psibar g^a psi) = -Im(psi^dag g0 g^a d_i psi) / l`,
/// with central differences.
pub fn fermionic_current(psi: &SpinorField, params: &ModelParams) -> CurrentField {
    let grid = psi.grid;
    let gamma = GammaSet::new();
    let l = params.l();
    let comps: [Vec<Complex64>; 4] = std::array::from_fn(|s| psi.psi.iter().map(|p| p[s]).collect());
    let d: [[Vec<Complex64>; 4]; 2] = std::array::from_fn(|i| std::array::from_fn(|s| grid.central_diff_complex(&comps[s], i)));
    let j = std::array::from_fn(|a| {
        let m = gamma.alpha(a + 1);
        std::array::from_fn(|i| {
            (0..grid.len())
                .map(|n| {
                    let mut x = Complex64::new(0.0, 0.0);
                    for r in 0..4 {
                        for q in 0..4 {
                            x += comps[r][n].conj() * m[(r, q)] * d[i][q][n];
                        }
                    }
                    -x.im / l
                })
                .collect()
        })
    });
    CurrentField { grid, j }
}

/// Current-current interaction left after eliminating `xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveInteraction {
    pub sign: MassSign,
    /// Coefficient of `eps_ab eps^{ij} J^a_i J^b_j`.
    pub coefficient: f64,
    pub coefficient_exact: Monomial,
    /// Interaction density per node.
    pub density: Vec<f64>,
}

/// Stationary value `-b^T A^{-1} b / 2` of `xi^T A xi / 2 + b^T xi`.
pub fn completed_square(a: Matrix2<f64>, b: Vector2<f64>) -> Result<f64> {
    let inv = a.try_inverse().ok_or(Error::MasslessLimit)?;
    Ok(-0.5 * b.dot(&(inv * b)))
}

/// Eliminates the static `xi` sector: `H = m xi^1_x xi^2_y + (8 pi G / l) xi^i_a J^a_i`.
///
/// `m = +-8 pi G mu^2` by `sign`. Only `J^1_x`, `J^2_y` couple to diagonal
/// geometry; the result is `-(8 pi G)^2 / (l^2 m) J^1_x J^2_y`, quoted as a
/// coefficient on `eps_ab eps^{ij} J^a_i J^b_j = 2 J^1_x J^2_y`.
pub fn integrate_out_geometry(
    currents: &CurrentField,
    params: &ModelParams,
    sign: MassSign,
) -> Result<EffectiveInteraction> {
    if params.mu() == 0.0 {
        return Err(Error::MasslessLimit);
    }
    let kappa = Monomial::kappa();
    let m = Monomial::rational(sign.factor(), 1) * kappa * Monomial::mu().pow(2);
    let coupling = kappa.div(&Monomial::l()).expect("l is a symbol");
    // -b1 b2 / m from A = [[0, m], [m, 0]], per unit J^1_x J^2_y
    let cross = -(coupling * coupling).div(&m).expect("mass is nonzero symbolically");
    let coefficient_exact = Monomial::rational(1, 2) * cross;
    let coefficient = coefficient_exact.eval(params);
    let density = currents.j1x().iter().zip(currents.j2y()).map(|(a, b)| 2.0 * coefficient * a * b).collect();
    Ok(EffectiveInteraction { sign, coefficient, coefficient_exact, density })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn eigenvalues(m: &CMatrix4) -> Vec<f64> {
        let mut e: Vec<f64> = nalgebra::SymmetricEigen::new(*m).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn clifford_algebra() {
        assert!(GammaSet::new().clifford_defect() < 1e-15);
    }

    #[test]
    fn flat_symbol_spectrum() {
        let p = ModelParams::new(0.01, 1.0, 1.0).unwrap();
        let h = single_particle_symbol(&p, SymbolInput::default(), [1.0, 0.0]);
        assert_eq!(h.matrix, GammaSet::new().alpha(1));
        let e = eigenvalues(&h.matrix);
        for (x, want) in e.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((x - want).abs() < 1e-14);
        }
        let p2 = ModelParams::new(0.01, 2.0, 1.0).unwrap();
        let e = eigenvalues(&single_particle_symbol(&p2, SymbolInput::default(), [0.0, 3.0]).matrix);
        assert!((e[0] + 1.5).abs() < 1e-14 && (e[3] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn velocity_renormalized_to_zero() {
        let p = ModelParams::new(1.0 / (8.0 * PI), 1.0, 1.0).unwrap();
        let h = single_particle_symbol(&p, SymbolInput { xi1x: 1.0, ..Default::default() }, [1.0, 0.0]);
        assert!(h.matrix.iter().all(|z| z.norm() < 1e-15));
        assert!(!h.is_weak_coupling());
    }

    #[test]
    fn gradient_term_is_the_anti_hermitian_part() {
        let p = ModelParams::new(0.02, 1.3, 1.0).unwrap();
        let input = SymbolInput { xi1x: 0.1, xi2y: -0.2, dx_xi1x: 0.7, dy_xi2y: -0.4 };
        let h = single_particle_symbol(&p, input, [0.3, -0.8]);
        let flat = single_particle_symbol(&p, SymbolInput { dx_xi1x: 0.0, dy_xi2y: 0.0, ..input }, [0.3, -0.8]);
        assert!((h.hermitian_part() - flat.matrix).norm() < 1e-15);
        assert!((flat.matrix - flat.matrix.adjoint()).norm() == 0.0);
    }

    #[test]
    fn hgr_coefficients_at_unit_kappa() {
        let p = ModelParams::new(1.0 / (8.0 * PI), 1.0, 1.0).unwrap();
        let f = hgr_quadratic_form(&p, MassSign::Legendre).unwrap();
        assert!((f.kinetic + 1.0).abs() < 1e-15 && (f.mass + 1.0).abs() < 1e-15);
        assert_eq!(f.matrix, f.matrix.transpose());
        assert_eq!(f.q_kinetic_exact.to_string(), "1/16*pi^-1*G^-1");
        assert_eq!(f.q_mass_exact.to_string(), "-4*pi*G*mu^2");
        let z = [0.3, -1.1, 0.7, 2.0];
        assert_eq!(f.energy(z), f.energy([z[1], z[0], z[3], z[2]]));
        assert!((0.5 * (f.matrix * nalgebra::Vector4::from(z)).dot(&nalgebra::Vector4::from(z)) - f.energy(z)).abs() < 1e-14);
    }

    #[test]
    fn topological_limit_rejected() {
        let p = ModelParams::new(0.0, 1.0, 1.0).unwrap();
        assert!(matches!(hgr_quadratic_form(&p, MassSign::Legendre), Err(Error::TopologicalLimit(_))));
        assert!(normal_mode_frequencies(&p).is_err());
    }

    #[test]
    fn modes_have_mass_mu_and_opposite_signs() {
        for g in [0.01, 0.001] {
            let p = ModelParams::new(g, 1.0, 0.5).unwrap();
            let m = normal_mode_frequencies(&p).unwrap();
            assert!((m.omega_plus - 0.5).abs() < 1e-14 && (m.omega_minus - 0.5).abs() < 1e-14);
            assert_eq!((m.plus_definiteness, m.minus_definiteness), (-1, 1));
            assert_eq!(m.signature_label(), "(+,-)");
        }
        let p = ModelParams::new_allow_massless(0.01, 1.0, 0.0).unwrap();
        let m = normal_mode_frequencies(&p).unwrap();
        assert_eq!((m.omega_plus, m.omega_minus), (0.0, 0.0));
    }

    #[test]
    fn flipped_sign_is_not_oscillatory() {
        let p = ModelParams::new(0.01, 1.0, 0.5).unwrap();
        assert!(normal_modes(&hgr_quadratic_form(&p, MassSign::Flipped).unwrap()).is_err());
    }

    #[test]
    fn constant_spinor_carries_no_current() {
        let grid = Grid2D::new(4, 4, 1.0).unwrap();
        let u = [c(0.3), Complex64::new(0.1, -0.4), c(-1.0), I];
        let psi = SpinorField::new(grid, vec![u; 16]).unwrap();
        let j = fermionic_current(&psi, &ModelParams::new(0.01, 1.0, 1.0).unwrap());
        assert!(j.j.iter().flatten().flatten().all(|x| *x == 0.0));
    }

    #[test]
    fn coefficient_at_reference_point() {
        let p = ModelParams::new(1.0 / (4.0 * PI), 1.0, 1.0).unwrap();
        let grid = Grid2D::new(4, 4, 1.0).unwrap();
        let j = CurrentField::diagonal(grid, vec![0.3; 16], vec![0.3; 16]).unwrap();
        let e = integrate_out_geometry(&j, &p, MassSign::Flipped).unwrap();
        assert_eq!(e.coefficient_exact.to_string(), "-4*pi*G*l^-2*mu^-2");
        assert!((e.coefficient + 1.0).abs() < 1e-15);
        assert!(e.density.iter().all(|d| (d + 0.18).abs() < 1e-15));
        let zero = integrate_out_geometry(&j, &ModelParams::new(0.0, 1.0, 1.0).unwrap(), MassSign::Flipped).unwrap();
        assert_eq!(zero.coefficient, 0.0);
        let massless = ModelParams::new_allow_massless(0.01, 1.0, 0.0).unwrap();
        assert!(matches!(integrate_out_geometry(&j, &massless, MassSign::Flipped), Err(Error::MasslessLimit)));
    }

    #[test]
    fn completed_square_matches_symbolic_cross_term() {
        let p = ModelParams::new(0.003, 1.7, 0.4).unwrap();
        let m = p.kappa() * p.mu() * p.mu();
        let b = Vector2::new(0.2, -0.5) * (p.kappa() / p.l());
        let direct = completed_square(Matrix2::new(0.0, m, m, 0.0), b).unwrap();
        let grid = Grid2D::new(4, 4, 1.0).unwrap();
        let j = CurrentField::diagonal(grid, vec![0.2; 16], vec![-0.5; 16]).unwrap();
        let e = integrate_out_geometry(&j, &p, MassSign::Flipped).unwrap();
        assert!((direct - e.density[0]).abs() < 1e-15);
    }
}
