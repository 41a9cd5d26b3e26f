//! Coupling sweeps: the Wick residual and the mapping residual as functions of `G`.

use rayon::prelude::*;
use std::fmt::Write as _;

use super::correlators::correlators_and_wick;
use super::eigen::{ground_state, EigenOptions};
use super::fock::FockSpace;
use super::hamiltonian::{assemble_simulator_hamiltonian, assemble_target_hamiltonian, mapping_residual};
use super::sparse::SparseOperator;
use crate::continuum::MassSign;
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::params::ModelParams;

/// Which Hamiltonian a sweep diagonalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Model {
    #[default]
    Simulator,
    Target(MassSign),
}

pub fn assemble(model: Model, params: &ModelParams, spec: &LatticeSpec, space: &FockSpace) -> Result<SparseOperator> {
    match model {
        Model::Simulator => assemble_simulator_hamiltonian(params, spec, space),
        Model::Target(sign) => assemble_target_hamiltonian(params, spec, space, sign),
    }
}

/// Restates a space with a smaller boson cutoff.
pub fn with_cutoff(space: &FockSpace, n_max: usize) -> Result<FockSpace> {
    FockSpace::new(space.n_fermion_modes(), space.boson_modes().to_vec(), n_max, space.sector())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WickPoint {
    pub g: f64,
    pub wick_residual: f64,
    pub energy: f64,
    pub degeneracy: usize,
    pub eigen_residual: f64,
    /// `E0(n_max) - E0(n_max - 1)`; `None` when `n_max = 0`.
    pub truncation_delta: Option<f64>,
}

/// Ground state of `model` at coupling `g` (other parameters from `base`) and its Wick residual.
pub fn wick_point(
    g: f64,
    base: &ModelParams,
    spec: &LatticeSpec,
    space: &FockSpace,
    model: Model,
    seed: u64,
    opts: &EigenOptions,
) -> Result<WickPoint> {
    let p = ModelParams::new(g, base.l(), base.mu())?;
    let h = assemble(model, &p, spec, space)?;
    let gs = ground_state(&h, opts)?;
    let report = correlators_and_wick(&gs.multiplet, space, seed)?;
    let truncation_delta = if space.n_max() > 0 {
        let smaller = with_cutoff(space, space.n_max() - 1)?;
        Some(gs.energy - ground_state(&assemble(model, &p, spec, &smaller)?, opts)?.energy)
    } else {
        None
    };
    Ok(WickPoint {
        g,
        wick_residual: report.wick_residual,
        energy: gs.energy,
        degeneracy: gs.degeneracy(),
        eigen_residual: gs.residual,
        truncation_delta,
    })
}

/// Independent points run in parallel; the output order follows `grid`.
pub fn wick_sweep(
    grid: &[f64],
    base: &ModelParams,
    spec: &LatticeSpec,
    space: &FockSpace,
    model: Model,
    seed: u64,
    opts: &EigenOptions,
) -> Result<Vec<WickPoint>> {
    grid.par_iter().map(|&g| wick_point(g, base, spec, space, model, seed, opts)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapPoint {
    pub g: f64,
    pub residual: f64,
    pub offset: f64,
    pub restricted_dim: usize,
}

pub fn map_residual_sweep(
    grid: &[f64],
    base: &ModelParams,
    spec: &LatticeSpec,
    space: &FockSpace,
    sign: MassSign,
    window: usize,
) -> Result<Vec<MapPoint>> {
    grid.par_iter()
        .map(|&g| {
            let p = ModelParams::new(g, base.l(), base.mu())?;
            let hs = assemble_simulator_hamiltonian(&p, spec, space)?;
            let ht = assemble_target_hamiltonian(&p, spec, space, sign)?;
            let m = mapping_residual(&hs, &ht, space, window)?;
            Ok(MapPoint { g, residual: m.residual, offset: m.offset, restricted_dim: m.restricted_dim })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::ShapeMismatch("need at least two matching points".into()));
    }
    if x.iter().chain(y).any(|v| v.is_nan() || *v <= 0.0) {
        return Err(Error::InvalidParameter { name: "points", reason: "log-log fit needs positive values".into() });
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

pub fn wick_table(points: &[WickPoint]) -> String {
    let mut s = String::from("G,wick_residual,energy,degeneracy,eigen_residual,truncation_delta\n");
    for p in points {
        let delta = p.truncation_delta.map_or_else(|| "NA".to_string(), |d| format!("{d:?}"));
        let _ = writeln!(s, "{:?},{:?},{:?},{},{:?},{}", p.g, p.wick_residual, p.energy, p.degeneracy, p.eigen_residual, delta);
    }
    s
}

pub fn map_table(points: &[MapPoint]) -> String {
    let mut s = String::from("G,residual,offset,restricted_dim\n");
    for p in points {
        let _ = writeln!(s, "{:?},{:?},{:?},{}", p.g, p.residual, p.offset, p.restricted_dim);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [1e-3, 3e-3, 1e-2];
        let y: Vec<f64> = x.iter().map(|v: &f64| 5.0 * v.powf(1.7)).collect();
        assert!((loglog_slope(&x, &y).unwrap() - 1.7).abs() < 1e-12);
        assert!(loglog_slope(&x, &[0.0, 1.0, 2.0]).is_err());
    }
}
