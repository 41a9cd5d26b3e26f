//! Simulator (boson-fermion lattice) and target (fermion-graviton)
//! Hamiltonians on a common truncated Fock space, and the residual of the
//! mapping between them.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;

use super::eigen::DEFAULT_DENSE_CAP;
use super::fock::{FockSpace, Species};
use super::qmap::q_coefficients;
use super::sparse::SparseOperator;
use crate::continuum::{hgr_quadratic_form, MassSign};
use crate::designer::{optical_params, OpticalParams};
use crate::error::{Error, Result};
use crate::lattice::{bonds, cell_couplings, BondKind, LatticeSpec};
use crate::params::ModelParams;
use crate::symbolic::{Monomial, QSqrt2};

/// Boson indices `(x, z)` of each cell, `None` for cells without bosons.
pub fn cell_boson_pairs(spec: &LatticeSpec, space: &FockSpace) -> Result<Vec<Option<(usize, usize)>>> {
    if space.n_fermion_modes() != spec.n_modes() {
        return Err(Error::ShapeMismatch(format!(
            "{} fermion modes for a lattice with {}",
            space.n_fermion_modes(),
            spec.n_modes()
        )));
    }
    let mut pairs = vec![(None, None); spec.cells()];
    for (i, m) in space.boson_modes().iter().enumerate() {
        if m.cell >= spec.cells() {
            return Err(Error::InvalidParameter { name: "boson_modes", reason: format!("cell {} outside lattice", m.cell) });
        }
        match m.species {
            Species::X => pairs[m.cell].0 = Some(i),
            Species::Z => pairs[m.cell].1 = Some(i),
        }
    }
    pairs
        .into_iter()
        .enumerate()
        .map(|(c, p)| match p {
            (Some(x), Some(z)) => Ok(Some((x, z))),
            (None, None) => Ok(None),
            _ => Err(Error::InvalidParameter {
                name: "boson_modes",
                reason: format!("cell {c} needs both an x and a z mode or neither"),
            }),
        })
        .collect()
}

/// `(d_x, d_z)` on the two-mode local space, x the most significant digit.
pub fn local_ladders(n_max: usize) -> [DMatrix<Complex64>; 2] {
    let d = FockSpace::ladder_matrix(n_max);
    let id = DMatrix::<Complex64>::identity(n_max + 1, n_max + 1);
    [d.kronecker(&id), id.kronecker(&d)]
}

fn dag(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    m.adjoint()
}

/// Symmetrizes away rounding so assembled operators are exactly Hermitian.
fn hermitize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn scaled(m: &DMatrix<Complex64>, s: f64) -> DMatrix<Complex64> {
    m * Complex64::new(s, 0.0)
}

/// Local `(J_x, J_z)` of the simulator: `Delta D (D + d + d^dag)` plus offsets.
pub fn simulator_couplings_local(op: &OpticalParams, n_max: usize) -> [DMatrix<Complex64>; 2] {
    let [dx, dz] = local_ladders(n_max);
    let id = DMatrix::<Complex64>::identity(dx.nrows(), dx.nrows());
    let j = |d: &DMatrix<Complex64>, s: Species, bg: f64| scaled(&id, bg) + scaled(&(d + dag(d)), op.slope(s));
    [j(&dx, Species::X, op.background_jx()), j(&dz, Species::Z, op.background_jz())]
}

/// Bosonic part of the simulator on one cell, with `alpha_m = D_m + d_m`:
/// `(1/24 pi G) P_z (sqrt2 P_x - P_z/2) + (8 pi G mu^2 / 3)(N_z + N_x)
///  - (256 pi^3 G^3 mu^2 / 3 l^2) N_z (N_x - N_z / 2)`, `P = alpha^dag - alpha`, `N = alpha^dag alpha`.
pub fn simulator_boson_local(params: &ModelParams, op: &OpticalParams, n_max: usize) -> DMatrix<Complex64> {
    let (g, l, mu) = (params.g(), params.l(), params.mu());
    let [dx, dz] = local_ladders(n_max);
    let id = DMatrix::<Complex64>::identity(dx.nrows(), dx.nrows());
    let ax = scaled(&id, op.d_x) + &dx;
    let az = scaled(&id, op.d_z) + &dz;
    let (px, pz) = (dag(&ax) - &ax, dag(&az) - &az);
    let (nx, nz) = (dag(&ax) * &ax, dag(&az) * &az);
    let kinetic = scaled(&(&pz * (scaled(&px, SQRT_2) - scaled(&pz, 0.5))), 1.0 / (24.0 * PI * g));
    let quadratic = scaled(&(&nz + &nx), 8.0 * PI * g * mu * mu / 3.0);
    let quartic = scaled(&(&nz * (&nx - scaled(&nz, 0.5))), -256.0 * PI.powi(3) * g.powi(3) * mu * mu / (3.0 * l * l));
    hermitize(kinetic + quadratic + quartic)
}

/// `(q1, q2)` on the local space.
pub fn local_q(n_max: usize) -> [DMatrix<Complex64>; 2] {
    let [dx, dz] = local_ladders(n_max);
    let c = q_coefficients();
    let q = |r: usize| scaled(&dx, c[r][0].to_f64()) + scaled(&dz, c[r][1].to_f64());
    [q(0), q(1)]
}

/// `H_gr` on one cell in the q form, with `q` substituted by `d`.
pub fn target_boson_local(params: &ModelParams, sign: MassSign, n_max: usize) -> Result<DMatrix<Complex64>> {
    let form = hgr_quadratic_form(params, sign)?;
    let [q1, q2] = local_q(n_max);
    let kin = (dag(&q1) - &q1) * (dag(&q2) - &q2);
    let mass = (dag(&q1) + &q1) * (dag(&q2) + &q2);
    Ok(hermitize(scaled(&kin, form.q_kinetic_exact.eval(params)) + scaled(&mass, form.q_mass_exact.eval(params))))
}

/// Local `(J_x, J_z)` of the target: the exact lattice dictionary applied to
/// `xi^1_x = (q1 + q1^dag)/sqrt2`, `xi^2_y = (q2 + q2^dag)/sqrt2`, built in
/// the joint eigenbasis of the two commuting field operators.
pub fn target_couplings_local(params: &ModelParams, n_max: usize, cell: usize) -> Result<[DMatrix<Complex64>; 2]> {
    let d = FockSpace::ladder_matrix(n_max).map(|z| z.re);
    let x = &d + d.transpose();
    let eig = SymmetricEigen::new(x);
    let (u1, lam) = (eig.eigenvectors, eig.eigenvalues);
    let u = u1.kronecker(&u1).map(|r| Complex64::new(r, 0.0));
    let c = q_coefficients();
    let n = n_max + 1;
    let mut jx = DMatrix::<Complex64>::zeros(n * n, n * n);
    let mut jz = jx.clone();
    for i in 0..n {
        for k in 0..n {
            let x1 = c[0][0].to_f64() * lam[i] + c[0][1].to_f64() * lam[k];
            let x2 = lam[k];
            let cpl = cell_couplings(x1 / SQRT_2, x2 / SQRT_2, params).map_err(|reason| Error::Inversion { cell, reason })?;
            jx[(i * n + k, i * n + k)] = cpl.jx.into();
            jz[(i * n + k, i * n + k)] = cpl.jz.into();
        }
    }
    let back = |m: DMatrix<Complex64>| hermitize(&u * m * u.adjoint());
    Ok([back(jx), back(jz)])
}

/// Background tunnelling `2/(3l)`, the isotropic Dirac point of velocity `1/l`.
pub fn background_coupling(params: &ModelParams) -> f64 {
    2.0 / (3.0 * params.l())
}

struct CellTerms {
    /// Local `(J_x, J_z)` per cell with bosons.
    couplings: Vec<Option<[DMatrix<Complex64>; 2]>>,
    /// Local boson Hamiltonian per cell with bosons.
    bosons: Vec<Option<DMatrix<Complex64>>>,
}

fn assemble(
    space: &FockSpace,
    spec: &LatticeSpec,
    pairs: &[Option<(usize, usize)>],
    terms: &CellTerms,
    j0: f64,
) -> Result<SparseOperator> {
    let mut h = SparseOperator::zeros(space.dim());
    let mut embedded: Vec<Option<[SparseOperator; 2]>> = Vec::with_capacity(pairs.len());
    for (p, c) in pairs.iter().zip(&terms.couplings) {
        embedded.push(match (p, c) {
            (Some((x, z)), Some([jx, jz])) => Some([space.embed_bosons(&[*x, *z], jx)?, space.embed_bosons(&[*x, *z], jz)?]),
            _ => None,
        });
    }
    for bond in bonds(spec) {
        let (a, b) = (LatticeSpec::a_mode(bond.a_cell), LatticeSpec::b_mode(bond.b_cell));
        let hop = space.hop(a, b)?;
        let hop = hop.add(&hop.adjoint())?;
        // the cell of the a-site owns the bond's tunnelling control
        let term = match &embedded[bond.a_cell] {
            Some([jx, jz]) => match bond.kind {
                BondKind::X | BondKind::Y => jx.mul(&hop)?,
                BondKind::Z => jz.mul(&hop)?,
            },
            None => hop.scale_re(j0),
        };
        h = h.add(&term)?;
    }
    for (p, b) in pairs.iter().zip(&terms.bosons) {
        if let (Some((x, z)), Some(local)) = (p, b) {
            h = h.add(&space.embed_bosons(&[*x, *z], local)?)?;
        }
    }
    Ok(h)
}

/// Simulator Hamiltonian with the designer's optical parameters.
///
/// At `G = 0` the condensate is unbounded; the model then reduces to the
/// background tight-binding lattice with free (dispersionless) bosons.
pub fn assemble_simulator_hamiltonian(params: &ModelParams, spec: &LatticeSpec, space: &FockSpace) -> Result<SparseOperator> {
    if params.g() == 0.0 {
        let pairs = cell_boson_pairs(spec, space)?;
        let terms = CellTerms { couplings: vec![None; pairs.len()], bosons: vec![None; pairs.len()] };
        return assemble(space, spec, &vec![None; pairs.len()], &terms, background_coupling(params));
    }
    assemble_simulator_with(params, spec, space, &optical_params(params)?)
}

pub fn assemble_simulator_with(
    params: &ModelParams,
    spec: &LatticeSpec,
    space: &FockSpace,
    op: &OpticalParams,
) -> Result<SparseOperator> {
    let pairs = cell_boson_pairs(spec, space)?;
    let n = space.n_max();
    let couplings = pairs.iter().map(|p| p.map(|_| simulator_couplings_local(op, n))).collect();
    let local = simulator_boson_local(params, op, n);
    let bosons = pairs.iter().map(|p| p.map(|_| local.clone())).collect();
    assemble(space, spec, &pairs, &CellTerms { couplings, bosons }, op.background_jx())
}

/// Target fermion-graviton Hamiltonian on the same space. At `G = 0`
/// the lattice is the free background Dirac lattice and bosons decouple.
pub fn assemble_target_hamiltonian(
    params: &ModelParams,
    spec: &LatticeSpec,
    space: &FockSpace,
    sign: MassSign,
) -> Result<SparseOperator> {
    let pairs = cell_boson_pairs(spec, space)?;
    let j0 = background_coupling(params);
    if params.g() == 0.0 {
        let terms = CellTerms { couplings: vec![None; pairs.len()], bosons: vec![None; pairs.len()] };
        return assemble(space, spec, &vec![None; pairs.len()], &terms, j0);
    }
    let n = space.n_max();
    let couplings = pairs
        .iter()
        .enumerate()
        .map(|(c, p)| p.map(|_| target_couplings_local(params, n, c)).transpose())
        .collect::<Result<Vec<_>>>()?;
    let local = target_boson_local(params, sign, n)?;
    let bosons = pairs.iter().map(|p| p.map(|_| local.clone())).collect();
    assemble(space, spec, &pairs, &CellTerms { couplings, bosons }, j0)
}

/// Coefficients of `P_x P_z` and `P_z^2` in the simulator and in the target
/// after substituting `q` by `d`. They agree exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KineticPieceMatch {
    pub simulator: [Monomial; 2],
    pub target: [Monomial; 2],
}

impl KineticPieceMatch {
    pub fn exact(&self) -> bool {
        self.simulator == self.target
    }
}

pub fn kinetic_piece_match() -> KineticPieceMatch {
    let inv_pi_g = (Monomial::pi() * Monomial::g()).inv().expect("symbolic");
    let simulator =
        [Monomial::constant(QSqrt2::sqrt2_times(1, 24)) * inv_pi_g, Monomial::rational(-1, 48) * inv_pi_g];
    let c = q_coefficients();
    let pref = Monomial::rational(1, 16) * inv_pi_g;
    // (q1^dag - q1)(q2^dag - q2) = (c10 P_x + c11 P_z)(c21 P_z) with c20 = 0
    let target = [pref * Monomial::constant(c[0][0] * c[1][1]), pref * Monomial::constant(c[0][1] * c[1][1])];
    KineticPieceMatch { simulator, target }
}

/// Kinetic pieces as local operators: simulator `(alpha^dag - alpha)` line
/// and target `(q^dag - q)` line. `D` drops out since it is real.
pub fn kinetic_pieces_local(params: &ModelParams, n_max: usize) -> Result<[DMatrix<Complex64>; 2]> {
    params.require_gravity("kinetic coefficients ~ 1/G")?;
    let g = params.g();
    let [dx, dz] = local_ladders(n_max);
    let (px, pz) = (dag(&dx) - &dx, dag(&dz) - &dz);
    let sim = scaled(&(&pz * (scaled(&px, SQRT_2) - scaled(&pz, 0.5))), 1.0 / (24.0 * PI * g));
    let [q1, q2] = local_q(n_max);
    let tgt = scaled(&((dag(&q1) - &q1) * (dag(&q2) - &q2)), 1.0 / (16.0 * PI * g));
    Ok([sim, tgt])
}

/// `min_c || (H_sim - H_target - c) ||` on the states with total boson
/// occupation `<= window`, in the spectral norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingResidual {
    pub residual: f64,
    /// Optimal constant `c`.
    pub offset: f64,
    pub window: usize,
    pub restricted_dim: usize,
}

pub fn mapping_residual(
    h_sim: &SparseOperator,
    h_target: &SparseOperator,
    space: &FockSpace,
    window: usize,
) -> Result<MappingResidual> {
    if window > space.n_max() {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: format!("window {window} exceeds n_max {}", space.n_max()),
        });
    }
    if h_sim.dim() != space.dim() || h_target.dim() != space.dim() {
        return Err(Error::ShapeMismatch("operators and space differ in dimension".into()));
    }
    let keep: Vec<usize> = (0..space.dim()).filter(|&i| space.boson_total(i) <= window).collect();
    if keep.len() > DEFAULT_DENSE_CAP {
        return Err(Error::DimensionCap { what: "restricted mapping subspace", value: keep.len(), cap: DEFAULT_DENSE_CAP });
    }
    let diff = h_sim.sub(h_target)?.restrict(&keep);
    let (residual, offset) = spread(diff);
    Ok(MappingResidual { residual, offset, window, restricted_dim: keep.len() })
}

/// Half the spectral width and centre of a Hermitian matrix.
fn spread(m: DMatrix<Complex64>) -> (f64, f64) {
    if m.nrows() == 0 {
        return (0.0, 0.0);
    }
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let ev = h.symmetric_eigenvalues();
    let (lo, hi) = ev.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &e| (a.min(e), b.max(e)));
    (0.5 * (hi - lo), 0.5 * (hi + lo))
}

/// Mapping residual of the kinetic pieces alone on one cell.
pub fn kinetic_piece_residual(params: &ModelParams, n_max: usize, window: usize) -> Result<f64> {
    let [sim, tgt] = kinetic_pieces_local(params, n_max)?;
    let n = n_max + 1;
    let keep: Vec<usize> = (0..n * n).filter(|i| i / n + i % n <= window).collect();
    let diff = DMatrix::from_fn(keep.len(), keep.len(), |r, c| sim[(keep[r], keep[c])] - tgt[(keep[r], keep[c])]);
    Ok(spread(diff).0)
}

/// Squared classical frequencies of the target boson form once `q` is
/// replaced by `d`. Because the map is not canonical these are
/// `(2 mu / 3)^2` and `(4 mu / 3)^2` for the Legendre sign, not `mu^2`.
pub fn mapped_frequency_squares(params: &ModelParams, sign: MassSign) -> Result<[f64; 2]> {
    let form = hgr_quadratic_form(params, sign)?;
    let c = q_coefficients().map(|r| r.map(|x| x.to_f64()));
    // with d = (x + i p)/sqrt2: (q^dag - q) = -i sqrt2 p_q, (q^dag + q) = sqrt2 x_q
    let s = Matrix2::from_fn(|i, j| c[0][i] * c[1][j] + c[1][i] * c[0][j]);
    let k_pp = s * (-2.0 * form.q_kinetic_exact.eval(params));
    let k_xx = s * (2.0 * form.q_mass_exact.eval(params));
    let w = (k_pp * k_xx).eigenvalues().ok_or(Error::NonConvergence { iterations: 0, residual: f64::NAN })?;
    let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
    Ok([a, b])
}

/// Identity check of a Hamiltonian's particle-number conservation: `||[H, N]||_max`.
pub fn number_commutator(h: &SparseOperator, space: &FockSpace) -> Result<f64> {
    Ok(h.commutator(&space.fermion_number())?.max_abs())
}

/// Projects `H` onto the boson vacuum (all `d` occupations zero).
pub fn vacuum_block(h: &SparseOperator, space: &FockSpace) -> DMatrix<Complex64> {
    let keep: Vec<usize> = (0..space.dim()).filter(|&i| space.boson_total(i) == 0).collect();
    h.restrict(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_tight_binding, CouplingField, Couplings};
    use crate::manybody::fock::BosonMode;

    fn one_cell(n_max: usize, sector: Option<usize>) -> (LatticeSpec, FockSpace) {
        let spec = LatticeSpec::new(1, 1).unwrap();
        let modes = vec![BosonMode { cell: 0, species: Species::X }, BosonMode { cell: 0, species: Species::Z }];
        (spec, FockSpace::new(2, modes, n_max, sector).unwrap())
    }

    #[test]
    fn coefficient_identity_is_exact() {
        let m = kinetic_piece_match();
        assert!(m.exact());
        assert_eq!(m.simulator[1].to_string(), "-1/48*pi^-1*G^-1");
    }

    #[test]
    fn kinetic_pieces_agree_numerically() {
        for g in [1e-3, 1e-2] {
            let p = ModelParams::new(g, 1.0, 1.0).unwrap();
            assert!(kinetic_piece_residual(&p, 3, 3).unwrap() < 1e-12);
        }
    }

    #[test]
    fn hermitian_and_number_conserving() {
        let p = ModelParams::new(1e-2, 1.0, 0.7).unwrap();
        let (spec, space) = one_cell(2, None);
        for h in [
            assemble_simulator_hamiltonian(&p, &spec, &space).unwrap(),
            assemble_target_hamiltonian(&p, &spec, &space, MassSign::Legendre).unwrap(),
        ] {
            assert_eq!(h.hermiticity_defect(), 0.0);
            assert_eq!(number_commutator(&h, &space).unwrap(), 0.0);
        }
    }

    #[test]
    fn vacuum_projection_is_background_lattice() {
        let p = ModelParams::new(1e-3, 1.0, 1.0).unwrap();
        let spec = LatticeSpec::new(2, 1).unwrap();
        let modes = vec![BosonMode { cell: 0, species: Species::X }, BosonMode { cell: 0, species: Species::Z }];
        let space = FockSpace::new(4, modes, 1, Some(1)).unwrap();
        let h = assemble_simulator_hamiltonian(&p, &spec, &space).unwrap();
        let h0 = vacuum_block(&h, &space);
        let tb = build_tight_binding(&CouplingField::uniform(spec, Couplings::isotropic(2.0 / 3.0)), &spec).unwrap();
        // one fermion: the vacuum block is the single-particle matrix plus a constant
        let shift = h0[(0, 0)] - tb[(0, 0)];
        for r in 0..4 {
            for c in 0..4 {
                let want = tb[(r, c)] + if r == c { shift } else { 0.0.into() };
                assert!((h0[(r, c)] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn no_fluctuations_gives_background() {
        let p = ModelParams::new(1e-2, 1.0, 1.0).unwrap();
        let (spec, space) = one_cell(0, None);
        let h = assemble_simulator_hamiltonian(&p, &spec, &space).unwrap().to_dense();
        // states: empty, b, a, ab
        let c = h[(0, 0)];
        assert!((h[(3, 3)] - c).norm() < 1e-9 && (h[(1, 1)] - c).norm() < 1e-9);
        assert!((h[(1, 2)].norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_target_is_free() {
        let p = ModelParams::new(0.0, 1.0, 1.0).unwrap();
        let (spec, space) = one_cell(1, Some(1));
        let h = assemble_target_hamiltonian(&p, &spec, &space, MassSign::Legendre).unwrap();
        let ev = h.to_dense().symmetric_eigenvalues();
        let mut ev: Vec<f64> = ev.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + 2.0).abs() < 1e-12 && (ev[ev.len() - 1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn target_couplings_linearize_to_simulator() {
        let p = ModelParams::new(1e-4, 1.0, 1.0).unwrap();
        let op = optical_params(&p).unwrap();
        let sim = simulator_couplings_local(&op, 2);
        let tgt = target_couplings_local(&p, 2, 0).unwrap();
        for k in 0..2 {
            let d = (&sim[k] - &tgt[k]).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
            // agreement to first order; the remainder is O(G^2)
            assert!(d < 1e-5, "{d}");
        }
    }

    #[test]
    fn vacuum_window_absorbs_into_constant() {
        let p = ModelParams::new(1e-2, 1.0, 1.0).unwrap();
        let spec = LatticeSpec::new(1, 1).unwrap();
        let modes = vec![BosonMode { cell: 0, species: Species::X }, BosonMode { cell: 0, species: Species::Z }];
        let space = FockSpace::new(2, modes, 3, Some(0)).unwrap();
        let hs = assemble_simulator_hamiltonian(&p, &spec, &space).unwrap();
        let ht = assemble_target_hamiltonian(&p, &spec, &space, MassSign::Legendre).unwrap();
        let r = mapping_residual(&hs, &ht, &space, 0).unwrap();
        assert!(r.residual < 1e-9 && r.restricted_dim == 1);
        assert!(mapping_residual(&hs, &ht, &space, 4).is_err());
    }

    #[test]
    fn non_canonical_map_shifts_frequencies() {
        let p = ModelParams::new(1e-2, 1.0, 0.6).unwrap();
        let w = mapped_frequency_squares(&p, MassSign::Legendre).unwrap();
        assert!((w[0] - (0.4f64).powi(2)).abs() < 1e-12);
        assert!((w[1] - (0.8f64).powi(2)).abs() < 1e-12);
        let w = mapped_frequency_squares(&p, MassSign::Flipped).unwrap();
        assert!(w[1] < 0.0);
    }

    #[test]
    fn mismatched_modes_rejected() {
        let spec = LatticeSpec::new(1, 1).unwrap();
        let s = FockSpace::new(2, vec![BosonMode { cell: 0, species: Species::X }], 1, None).unwrap();
        assert!(cell_boson_pairs(&spec, &s).is_err());
        let s = FockSpace::new(4, vec![], 1, None).unwrap();
        assert!(cell_boson_pairs(&spec, &s).is_err());
    }
}
