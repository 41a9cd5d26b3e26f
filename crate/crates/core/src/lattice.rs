//! Honeycomb tight-binding model and its dictionary to the diagonal dreibein.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::DiagonalFluctuationField;
use crate::grid::Grid2D;
use crate::params::ModelParams;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Unit-cell vectors.
pub const N1: [f64; 2] = [SQRT3 / 2.0, 1.5];
pub const N2: [f64; 2] = [-SQRT3 / 2.0, 1.5];

/// Tunnelling amplitudes of one unit cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl Couplings {
    pub fn new(jx: f64, jy: f64, jz: f64) -> Self {
        Self { jx, jy, jz }
    }

    pub fn isotropic(j: f64) -> Self {
        Self::new(j, j, j)
    }

    pub fn jx_equals_jy(&self) -> bool {
        (self.jx - self.jy).abs() <= 1e-14 * self.jx.abs().max(self.jy.abs())
    }

    /// `0 < J_z < 2 J_x` with `J_x = J_y`.
    pub fn in_dirac_regime(&self) -> bool {
        self.jx_equals_jy() && self.jz > 0.0 && self.jz < 2.0 * self.jx
    }

    fn require_dirac(&self) -> Result<()> {
        if !self.jx_equals_jy() {
            return Err(Error::InvalidParameter {
                name: "jy",
                reason: format!("Fermi points need J_x = J_y, got {} and {}", self.jx, self.jy),
            });
        }
        if self.in_dirac_regime() {
            Ok(())
        } else {
            Err(Error::NoDiracPoints { jx: self.jx, jy: self.jy, jz: self.jz })
        }
    }

    /// Dressed velocities `((sqrt3/2) sqrt(4 J_x^2 - J_z^2), (3/2) J_z)`.
    pub fn velocities(&self) -> (f64, f64) {
        (0.5 * SQRT3 * (4.0 * self.jx * self.jx - self.jz * self.jz).sqrt(), 1.5 * self.jz)
    }
}

/// Unit-cell counts of a periodic honeycomb patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpec {
    ncx: usize,
    ncy: usize,
}

impl LatticeSpec {
    pub fn new(ncx: usize, ncy: usize) -> Result<Self> {
        if ncx == 0 || ncy == 0 {
            return Err(Error::InvalidParameter { name: "cells", reason: format!("need >= 1 cell per axis, got {ncx}x{ncy}") });
        }
        Ok(Self { ncx, ncy })
    }

    pub fn ncx(&self) -> usize {
        self.ncx
    }

    pub fn ncy(&self) -> usize {
        self.ncy
    }

    pub fn cells(&self) -> usize {
        self.ncx * self.ncy
    }

    /// Linear cell index of `(ix, iy)` with periodic wrap.
    pub fn cell(&self, ix: isize, iy: isize) -> usize {
        let x = ix.rem_euclid(self.ncx as isize) as usize;
        let y = iy.rem_euclid(self.ncy as isize) as usize;
        x + self.ncx * y
    }

    pub fn cell_coords(&self, c: usize) -> (usize, usize) {
        (c % self.ncx, c / self.ncx)
    }

    /// Fermion mode of the `a` site of cell `c`; the `b` site is the next one.
    pub fn a_mode(c: usize) -> usize {
        2 * c
    }

    pub fn b_mode(c: usize) -> usize {
        2 * c + 1
    }

    pub fn n_modes(&self) -> usize {
        2 * self.cells()
    }

    /// Momenta `k` with `k . n1 = 2 pi m1 / ncx`, `k . n2 = 2 pi m2 / ncy`.
    pub fn brillouin_grid(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.cells());
        for m2 in 0..self.ncy {
            for m1 in 0..self.ncx {
                let p1 = std::f64::consts::TAU * m1 as f64 / self.ncx as f64;
                let p2 = std::f64::consts::TAU * m2 as f64 / self.ncy as f64;
                // solve k.n1 = p1, k.n2 = p2
                let kx = (p1 - p2) / SQRT3;
                let ky = (p1 + p2) / 3.0;
                out.push([kx, ky]);
            }
        }
        out
    }
}

/// Position-dependent couplings, one entry per unit cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingField {
    spec: LatticeSpec,
    pub cells: Vec<Couplings>,
}

impl CouplingField {
    pub fn uniform(spec: LatticeSpec, c: Couplings) -> Self {
        Self { spec, cells: vec![c; spec.cells()] }
    }

    pub fn new(spec: LatticeSpec, cells: Vec<Couplings>) -> Result<Self> {
        if cells.len() != spec.cells() {
            return Err(Error::ShapeMismatch(format!("{} couplings for {} cells", cells.len(), spec.cells())));
        }
        Ok(Self { spec, cells })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    /// Cells whose couplings leave the Dirac regime.
    pub fn out_of_regime(&self) -> Vec<usize> {
        self.cells.iter().enumerate().filter(|(_, c)| !c.in_dirac_regime()).map(|(i, _)| i).collect()
    }
}

/// `f(k) = J_x e^{-i k.n1} + J_y e^{-i k.n2} + J_z`.
pub fn bloch_f(c: &Couplings, k: [f64; 2]) -> Complex64 {
    let phase = |n: [f64; 2]| Complex64::from_polar(1.0, -(k[0] * n[0] + k[1] * n[1]));
    phase(N1) * c.jx + phase(N2) * c.jy + c.jz
}

/// Band energies `(-|f|, +|f|)`.
pub fn bands(c: &Couplings, k: [f64; 2]) -> (f64, f64) {
    let e = bloch_f(c, k).norm();
    (-e, e)
}

/// `P_pm = (+-k*, 0)` and the root diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiPoints {
    pub kx: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl FermiPoints {
    pub fn plus(&self) -> [f64; 2] {
        [self.kx, 0.0]
    }

    pub fn minus(&self) -> [f64; 2] {
        [-self.kx, 0.0]
    }
}

/// `(2/sqrt3) arccos(-J_z / (2 J_x))`.
pub fn fermi_kx_closed_form(c: &Couplings) -> f64 {
    2.0 / SQRT3 * (-c.jz / (2.0 * c.jx)).clamp(-1.0, 1.0).acos()
}

/// The variant with `arccos(-J_z / J_x)`; `None` where the argument leaves `[-1, 1]`.
pub fn fermi_kx_naive_form(c: &Couplings) -> Option<f64> {
    let arg = -c.jz / c.jx;
    (arg.abs() <= 1.0).then(|| 2.0 / SQRT3 * arg.acos())
}

/// Root of `J_z + 2 J_x cos(sqrt3 k / 2)` on `(0, 2 pi / sqrt3)` by
/// bracketed Newton iteration, seeded with the closed form.
pub fn fermi_points(c: &Couplings) -> Result<FermiPoints> {
    c.require_dirac()?;
    let g = |k: f64| c.jz + 2.0 * c.jx * (0.5 * SQRT3 * k).cos();
    let dg = |k: f64| -SQRT3 * c.jx * (0.5 * SQRT3 * k).sin();
    let (mut lo, mut hi) = (0.0, 2.0 * std::f64::consts::PI / SQRT3);
    let mut k = fermi_kx_closed_form(c).clamp(lo, hi);
    let mut iterations = 0;
    for it in 1..=200 {
        iterations = it;
        let gk = g(k);
        if gk == 0.0 {
            break;
        }
        // g decreases across the bracket
        if gk > 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let d = dg(k);
        let newton = if d != 0.0 { k - gk / d } else { f64::NAN };
        let next = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let done = (next - k).abs() <= 4.0 * f64::EPSILON * k.abs().max(1.0);
        k = next;
        if done {
            break;
        }
    }
    let residual = bloch_f(c, [k, 0.0]).norm();
    if residual > 1e-12 {
        return Err(Error::NonConvergence { iterations, residual });
    }
    Ok(FermiPoints { kx: k, residual, iterations })
}

/// Slopes of `f(P_pm + p) = A_pm p_x + B_pm p_y` and their finite-difference check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracSlopes {
    pub a_plus: f64,
    pub a_minus: f64,
    pub b_plus: f64,
    pub b_minus: f64,
    /// Largest relative deviation of the closed forms from the numerical gradient.
    pub gradient_error: f64,
}

/// Closed-form slopes, validated against central differences of `f`.
///
/// The x-slope is `d f / d k_x`, which is real at the Fermi points. The
/// y-derivative is purely imaginary there, `d f / d k_y = 1.5 i J_z`; the
/// real slope `B` corresponds to `i d f / d k_y`, reflecting the phase
/// convention of the Fourier expansion.
pub fn dirac_slopes(c: &Couplings) -> Result<DiracSlopes> {
    let fp = fermi_points(c)?;
    let a = 0.5 * SQRT3 * (4.0 * c.jx * c.jx - c.jz * c.jz).sqrt();
    let b = -1.5 * c.jz;
    let s = DiracSlopes { a_plus: -a, a_minus: a, b_plus: b, b_minus: b, gradient_error: 0.0 };
    let step = 1e-5;
    let mut worst = 0.0_f64;
    let scale = a.abs().max(b.abs());
    for (p, av, bv) in [(fp.plus(), s.a_plus, s.b_plus), (fp.minus(), s.a_minus, s.b_minus)] {
        let dx = (bloch_f(c, [p[0] + step, p[1]]) - bloch_f(c, [p[0] - step, p[1]])) / (2.0 * step);
        let dy = (bloch_f(c, [p[0], p[1] + step]) - bloch_f(c, [p[0], p[1] - step])) / (2.0 * step);
        let iy = dy * Complex64::new(0.0, 1.0);
        worst = worst.max((dx - av).norm() / scale).max((iy - bv).norm() / scale);
    }
    Ok(DiracSlopes { gradient_error: worst, ..s })
}

/// `(xi^1_x, xi^2_y)` of one cell from its couplings.
pub fn cell_fluctuation(c: &Couplings, params: &ModelParams) -> std::result::Result<(f64, f64), String> {
    if !c.in_dirac_regime() {
        return Err(format!("couplings ({}, {}, {}) outside the Dirac regime", c.jx, c.jy, c.jz));
    }
    let l = params.l();
    let (vx, vy) = c.velocities();
    let vmax = 2.0 / l;
    for (name, v) in [("x", vx), ("y", vy)] {
        if !(v > 0.0 && v < vmax) {
            return Err(format!("dressed {name}-velocity {v} outside the reachable range (0, {vmax})"));
        }
    }
    if params.g() == 0.0 {
        let tol = 1e-12 / l;
        if (vx - 1.0 / l).abs() > tol || (vy - 1.0 / l).abs() > tol {
            return Err(format!("G = 0 admits only the background couplings, velocities ({vx}, {vy})"));
        }
        return Ok((0.0, 0.0));
    }
    let s = l * l / params.kappa();
    Ok(((1.0 / l - vx) * s, (1.0 / l - vy) * s))
}

/// Couplings producing `(xi^1_x, xi^2_y)` in one cell.
pub fn cell_couplings(xi1x: f64, xi2y: f64, params: &ModelParams) -> std::result::Result<Couplings, String> {
    let l = params.l();
    let k = params.kappa() / (l * l);
    let (vx, vy) = (1.0 / l - k * xi1x, 1.0 / l - k * xi2y);
    if !(vx > 0.0 && vy > 0.0) {
        return Err(format!("negative dressed velocity ({vx}, {vy})"));
    }
    let jz = 2.0 * vy / 3.0;
    let jx = 0.5 * (jz * jz + 4.0 * vx * vx / 3.0).sqrt();
    Ok(Couplings::isotropic(jx).with_jz(jz))
}

impl Couplings {
    pub fn with_jz(self, jz: f64) -> Self {
        Self { jz, ..self }
    }
}

/// Inverts the dictionary cell by cell. The lattice needs at least four
/// cells per axis to carry a fluctuation field.
pub fn dreibein_from_couplings(c: &CouplingField, params: &ModelParams) -> Result<DiagonalFluctuationField> {
    let grid = Grid2D::new(c.spec.ncx, c.spec.ncy, 1.0)?;
    let mut xi1 = Vec::with_capacity(c.cells.len());
    let mut xi2 = Vec::with_capacity(c.cells.len());
    for (cell, cc) in c.cells.iter().enumerate() {
        let (a, b) = cell_fluctuation(cc, params).map_err(|reason| Error::Inversion { cell, reason })?;
        xi1.push(a);
        xi2.push(b);
    }
    DiagonalFluctuationField::new(grid, xi1, xi2)
}

pub fn couplings_from_dreibein(xi: &DiagonalFluctuationField, params: &ModelParams) -> Result<CouplingField> {
    let spec = LatticeSpec::new(xi.grid().nx(), xi.grid().ny())?;
    let cells = xi
        .xi1x
        .iter()
        .zip(&xi.xi2y)
        .enumerate()
        .map(|(cell, (&a, &b))| cell_couplings(a, b, params).map_err(|reason| Error::Inversion { cell, reason }))
        .collect::<Result<Vec<_>>>()?;
    CouplingField::new(spec, cells)
}

/// One hopping term `J a_i^dag b_j` of the real-space model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub a_cell: usize,
    pub b_cell: usize,
    pub kind: BondKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BondKind {
    X,
    Y,
    Z,
}

/// All bonds: `a_i b_{i+n1}` (x), `a_i b_{i+n2}` (y) and `a_i b_i` (z).
pub fn bonds(spec: &LatticeSpec) -> Vec<Bond> {
    let mut out = Vec::with_capacity(3 * spec.cells());
    for c in 0..spec.cells() {
        let (ix, iy) = spec.cell_coords(c);
        let (ix, iy) = (ix as isize, iy as isize);
        out.push(Bond { a_cell: c, b_cell: spec.cell(ix + 1, iy), kind: BondKind::X });
        out.push(Bond { a_cell: c, b_cell: spec.cell(ix, iy + 1), kind: BondKind::Y });
        out.push(Bond { a_cell: c, b_cell: c, kind: BondKind::Z });
    }
    out
}

/// Bond amplitude: the average of the two end cells' couplings.
pub fn bond_amplitude(c: &CouplingField, bond: &Bond) -> f64 {
    let pick = |cc: &Couplings| match bond.kind {
        BondKind::X => cc.jx,
        BondKind::Y => cc.jy,
        BondKind::Z => cc.jz,
    };
    0.5 * (pick(&c.cells[bond.a_cell]) + pick(&c.cells[bond.b_cell]))
}

/// Single-particle hopping matrix over modes `a_c = 2c`, `b_c = 2c + 1`.
pub fn build_tight_binding(c: &CouplingField, spec: &LatticeSpec) -> Result<DMatrix<Complex64>> {
    if c.spec != *spec {
        return Err(Error::ShapeMismatch("coupling field and lattice spec differ".into()));
    }
    let n = spec.n_modes();
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for bond in bonds(spec) {
        let j = bond_amplitude(c, &bond);
        let (r, q) = (LatticeSpec::a_mode(bond.a_cell), LatticeSpec::b_mode(bond.b_cell));
        h[(r, q)] += j;
        h[(q, r)] += j;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bloch_reference_values() {
        assert!((bloch_f(&Couplings::isotropic(1.0), [0.0, 0.0]) - 3.0).norm() < 1e-15);
        let k = [4.0 * PI / (3.0 * SQRT3), 0.0];
        assert!(bloch_f(&Couplings::isotropic(1.0), k).norm() < 1e-12);
    }

    #[test]
    fn gapped_beyond_merging() {
        let c = Couplings::new(1.0, 1.0, 2.5);
        let n = 200;
        let mut min = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                let k = [4.0 * PI / SQRT3 * i as f64 / n as f64, 4.0 * PI / 3.0 * j as f64 / n as f64];
                min = min.min(bloch_f(&c, k).norm());
            }
        }
        assert!(min > 0.4);
    }

    #[test]
    fn fermi_point_reference() {
        let fp = fermi_points(&Couplings::isotropic(2.0 / 3.0)).unwrap();
        assert!((fp.kx - 2.418399).abs() < 1e-6);
        assert!(fp.residual <= 1e-12);
        assert_eq!(fp.minus(), [-fp.kx, 0.0]);
    }

    #[test]
    fn cones_merge_at_zone_edge() {
        let fp = fermi_points(&Couplings::new(1.0, 1.0, 2.0 - 1e-10)).unwrap();
        assert!((fp.kx - 2.0 * PI / SQRT3).abs() < 1e-4);
        assert!(matches!(fermi_points(&Couplings::new(1.0, 1.0, 2.0)), Err(Error::NoDiracPoints { .. })));
        assert!(fermi_points(&Couplings::new(1.0, 1.1, 1.0)).is_err());
        assert!(fermi_points(&Couplings::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn slope_references() {
        let s = dirac_slopes(&Couplings::isotropic(2.0 / 3.0)).unwrap();
        assert!((s.a_plus + 1.0).abs() < 1e-14 && (s.a_minus - 1.0).abs() < 1e-14);
        assert!((s.b_plus + 1.0).abs() < 1e-14);
        let s = dirac_slopes(&Couplings::isotropic(1.0)).unwrap();
        assert!((s.a_plus + 1.5).abs() < 1e-14 && (s.b_minus + 1.5).abs() < 1e-14);
        assert!(s.gradient_error < 1e-6);
    }

    #[test]
    fn background_dictionary_point() {
        let p = ModelParams::new(0.01, 1.5, 1.0).unwrap();
        let (a, b) = cell_fluctuation(&Couplings::isotropic(2.0 / (3.0 * 1.5)), &p).unwrap();
        assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        let c = cell_couplings(0.0, 0.0, &p).unwrap();
        for j in [c.jx, c.jy, c.jz] {
            assert!((j - 2.0 / 4.5).abs() < 1e-15);
        }
    }

    #[test]
    fn direct_inversion_of_z_velocity() {
        let p = ModelParams::new(0.01, 1.0, 1.0).unwrap();
        let mut c = cell_couplings(0.0, 0.0, &p).unwrap();
        c.jz = (1.0 - p.kappa() * 0.1) / 1.5;
        let (a, b) = cell_fluctuation(&c, &p).unwrap();
        assert!((b - 0.1).abs() < 1e-12);
        // adjusting J_z alone also moves the x-velocity, hence xi^1_x
        assert!(a.abs() > 0.0);
    }

    #[test]
    fn dictionary_rejects_zero_z_coupling() {
        let p = ModelParams::new(0.01, 1.0, 1.0).unwrap();
        let xi2 = 1.0 / p.kappa();
        assert!(cell_couplings(0.0, xi2, &p).is_err());
    }

    #[test]
    fn topological_limit_needs_background() {
        let p = ModelParams::new(0.0, 1.0, 1.0).unwrap();
        assert_eq!(cell_fluctuation(&Couplings::isotropic(2.0 / 3.0), &p).unwrap(), (0.0, 0.0));
        assert!(cell_fluctuation(&Couplings::isotropic(0.7), &p).is_err());
    }

    #[test]
    fn inversion_error_names_cell() {
        let p = ModelParams::new(0.01, 1.0, 1.0).unwrap();
        let spec = LatticeSpec::new(4, 4).unwrap();
        let mut f = CouplingField::uniform(spec, Couplings::isotropic(2.0 / 3.0));
        f.cells[5] = Couplings::new(1.0, 1.0, 2.5);
        assert!(matches!(dreibein_from_couplings(&f, &p), Err(Error::Inversion { cell: 5, .. })));
    }

    #[test]
    fn single_cell_spectrum() {
        let spec = LatticeSpec::new(1, 1).unwrap();
        let h = build_tight_binding(&CouplingField::uniform(spec, Couplings::isotropic(1.0)), &spec).unwrap();
        let e = h.symmetric_eigenvalues();
        let mut e: Vec<f64> = e.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        assert!((e[0] + 3.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn naive_closed_form_misses_root() {
        let c = Couplings::isotropic(1.0);
        let k = fermi_kx_naive_form(&c).unwrap();
        assert!((bloch_f(&c, [k, 0.0]).norm() - 1.0).abs() < 1e-12);
    }
}
