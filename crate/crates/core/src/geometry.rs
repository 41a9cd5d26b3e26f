//! Dreibein and metric fluctuations on a flat background, and the
//! torsion-free spin connection they determine.
//!
//! The background is `e^0_t = 1`, `e^a_i = l delta^a_i`, with zero spin
//! connection. Fluctuations enter as `e = ebar + 8 pi G xi` and
//! `omega = 8 pi G v`.

use crate::error::{Error, Result};
use crate::grid::{time_diff, Grid2D, TimeBoundary};
use crate::params::ModelParams;
use crate::tensor::{eps, eps_mixed, ETA};

/// Nine per-node components indexed `[A][mu]`.
pub type Components = [[Vec<f64>; 3]; 3];

fn zero_components(n: usize) -> Components {
    std::array::from_fn(|_| std::array::from_fn(|_| vec![0.0; n]))
}

/// Background dreibein `ebar^A_mu`.
pub fn background_dreibein(params: &ModelParams) -> [[f64; 3]; 3] {
    let l = params.l();
    [[1.0, 0.0, 0.0], [0.0, l, 0.0], [0.0, 0.0, l]]
}

/// `M^{AB}_{mu nu} = (1/ebar)(ebar^A_mu ebar^B_nu / 2 - ebar^A_nu ebar^B_mu)`, indexed `[A][B][mu][nu]`.
pub fn connection_tensor(params: &ModelParams) -> [[[[f64; 3]; 3]; 3]; 3] {
    let e = background_dreibein(params);
    let det = params.background_det();
    let mut m = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for mu in 0..3 {
                for nu in 0..3 {
                    m[a][b][mu][nu] = (0.5 * e[a][mu] * e[b][nu] - e[a][nu] * e[b][mu]) / det;
                }
            }
        }
    }
    m
}

/// The two diagonal spatial dreibein fluctuations `xi^1_x`, `xi^2_y` on a grid.
///
/// Off-diagonal components do not exist in this representation. Since the
/// background is diagonal, the inverse field `xi^i_a` has the same values.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalFluctuationField {
    grid: Grid2D,
    pub xi1x: Vec<f64>,
    pub xi2y: Vec<f64>,
    pub xi1x_dot: Option<Vec<f64>>,
    pub xi2y_dot: Option<Vec<f64>>,
}

impl DiagonalFluctuationField {
    pub fn new(grid: Grid2D, xi1x: Vec<f64>, xi2y: Vec<f64>) -> Result<Self> {
        grid.check_len("xi1x", xi1x.len())?;
        grid.check_len("xi2y", xi2y.len())?;
        Ok(Self { grid, xi1x, xi2y, xi1x_dot: None, xi2y_dot: None })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        let n = grid.len();
        Self { grid, xi1x: vec![0.0; n], xi2y: vec![0.0; n], xi1x_dot: None, xi2y_dot: None }
    }

    pub fn with_time_derivatives(mut self, xi1x_dot: Vec<f64>, xi2y_dot: Vec<f64>) -> Result<Self> {
        self.grid.check_len("xi1x_dot", xi1x_dot.len())?;
        self.grid.check_len("xi2y_dot", xi2y_dot.len())?;
        self.xi1x_dot = Some(xi1x_dot);
        self.xi2y_dot = Some(xi2y_dot);
        Ok(self)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    fn dots(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.len();
        (
            self.xi1x_dot.clone().unwrap_or_else(|| vec![0.0; n]),
            self.xi2y_dot.clone().unwrap_or_else(|| vec![0.0; n]),
        )
    }
}

/// Per-node 3x3 metric in Gaussian coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    grid: Grid2D,
    pub g: Vec<[[f64; 3]; 3]>,
}

impl MetricField {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
}

/// `h_xx = 2 l xi^1_x`, `h_yy = 2 l xi^2_y` at every node.
pub fn metric_fluctuation(params: &ModelParams, xi: &DiagonalFluctuationField) -> (Vec<f64>, Vec<f64>) {
    let l2 = 2.0 * params.l();
    (xi.xi1x.iter().map(|v| l2 * v).collect(), xi.xi2y.iter().map(|v| l2 * v).collect())
}

/// `g = diag(-1, l^2 + 8 pi G h_xx, l^2 + 8 pi G h_yy)`.
pub fn metric_from_fluctuation(params: &ModelParams, xi: &DiagonalFluctuationField) -> Result<MetricField> {
    let (hxx, hyy) = metric_fluctuation(params, xi);
    let l2 = params.background_det();
    let k = params.kappa();
    let mut g = Vec::with_capacity(hxx.len());
    for (node, (&a, &b)) in hxx.iter().zip(&hyy).enumerate() {
        let (gxx, gyy) = (l2 + k * a, l2 + k * b);
        for value in [gxx, gyy] {
            if value <= 0.0 || value.is_nan() {
                return Err(Error::DegenerateMetric { node, value });
            }
        }
        g.push([[-1.0, 0.0, 0.0], [0.0, gxx, 0.0], [0.0, 0.0, gyy]]);
    }
    Ok(MetricField { grid: xi.grid, g })
}

/// Spin-connection fluctuation `v^A_mu` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinConnectionField {
    grid: Grid2D,
    /// Indexed `[A][mu]` with `mu = t, x, y`.
    pub v: Components,
}

impl SpinConnectionField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, v: zero_components(grid.len()) }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn component(&self, a: usize, mu: usize) -> &[f64] {
        &self.v[a][mu]
    }

    pub fn v0t(&self) -> &[f64] {
        &self.v[0][0]
    }
    pub fn v0x(&self) -> &[f64] {
        &self.v[0][1]
    }
    pub fn v0y(&self) -> &[f64] {
        &self.v[0][2]
    }
    pub fn v1x(&self) -> &[f64] {
        &self.v[1][1]
    }
    pub fn v1y(&self) -> &[f64] {
        &self.v[1][2]
    }
    pub fn v2x(&self) -> &[f64] {
        &self.v[2][1]
    }
    pub fn v2y(&self) -> &[f64] {
        &self.v[2][2]
    }

    /// Largest absolute component over all nodes.
    pub fn max_abs(&self) -> f64 {
        self.v.iter().flatten().flatten().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Max-norm of the difference to another field on the same grid.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0_f64;
        for a in 0..3 {
            for mu in 0..3 {
                for (x, y) in self.v[a][mu].iter().zip(&other.v[a][mu]) {
                    m = m.max((x - y).abs());
                }
            }
        }
        m
    }
}

/// Closed-form torsion-free connection for diagonal fluctuations.
///
/// Spatial derivatives are central differences; time derivatives are read
/// from the field (missing ones count as zero). Only `v^0_x`, `v^0_y`,
/// `v^1_y` and `v^2_x` can be nonzero for this shape.
pub fn spin_connection_gauge_fixed(params: &ModelParams, xi: &DiagonalFluctuationField) -> SpinConnectionField {
    let grid = xi.grid;
    let l = params.l();
    let (d1, d2) = xi.dots();
    let dy_xi1 = grid.central_diff(&xi.xi1x, 1);
    let dx_xi2 = grid.central_diff(&xi.xi2y, 0);
    let mut out = SpinConnectionField::zeros(grid);
    out.v[0][1] = dy_xi1.iter().map(|d| d / l).collect();
    out.v[0][2] = dx_xi2.iter().map(|d| -d / l).collect();
    out.v[1][2] = d2;
    out.v[2][1] = d1.iter().map(|d| -d).collect();
    out
}

/// Space-time samples of the full `xi^A_mu` on `nt` slices of a periodic grid.
///
/// Data are slice-major: node `i` of slice `t` sits at `t * grid.len() + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimeSlab {
    grid: Grid2D,
    nt: usize,
    ht: f64,
    boundary: TimeBoundary,
    pub xi: Components,
    /// Exact time derivatives, when known. Used by residual checks in place
    /// of finite differences in time.
    pub xi_dot: Option<Components>,
}

impl SpacetimeSlab {
    pub fn zeros(grid: Grid2D, nt: usize, ht: f64, boundary: TimeBoundary) -> Result<Self> {
        if nt < 3 {
            return Err(Error::TooFewTimeSlices(nt));
        }
        if !(ht.is_finite() && ht > 0.0) {
            return Err(Error::InvalidParameter { name: "ht", reason: format!("must be finite and > 0, got {ht}") });
        }
        Ok(Self { grid, nt, ht, boundary, xi: zero_components(nt * grid.len()), xi_dot: None })
    }

    /// Fills `xi^A_mu(x, y, t)` from `f(A, mu, x, y, t)`.
    pub fn from_fn(
        grid: Grid2D,
        nt: usize,
        ht: f64,
        boundary: TimeBoundary,
        f: impl Fn(usize, usize, f64, f64, f64) -> f64,
    ) -> Result<Self> {
        let mut s = Self::zeros(grid, nt, ht, boundary)?;
        s.xi = s.sample(&f);
        Ok(s)
    }

    /// Attaches exact time derivatives `g(A, mu, x, y, t)`.
    pub fn with_time_derivatives(mut self, g: impl Fn(usize, usize, f64, f64, f64) -> f64) -> Self {
        self.xi_dot = Some(self.sample(&g));
        self
    }

    fn sample(&self, f: &impl Fn(usize, usize, f64, f64, f64) -> f64) -> Components {
        let m = self.grid.len();
        std::array::from_fn(|a| {
            std::array::from_fn(|mu| {
                (0..self.nt * m)
                    .map(|k| {
                        let (x, y) = self.grid.position(k % m);
                        f(a, mu, x, y, (k / m) as f64 * self.ht)
                    })
                    .collect()
            })
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn ht(&self) -> f64 {
        self.ht
    }

    pub fn boundary(&self) -> TimeBoundary {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.nt * self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Diagonal part of slice `t`, with exact time derivatives when present.
    pub fn diagonal_slice(&self, t: usize) -> DiagonalFluctuationField {
        let m = self.grid.len();
        let r = t * m..(t + 1) * m;
        let mut f = DiagonalFluctuationField {
            grid: self.grid,
            xi1x: self.xi[1][1][r.clone()].to_vec(),
            xi2y: self.xi[2][2][r.clone()].to_vec(),
            xi1x_dot: None,
            xi2y_dot: None,
        };
        if let Some(d) = &self.xi_dot {
            f.xi1x_dot = Some(d[1][1][r.clone()].to_vec());
            f.xi2y_dot = Some(d[2][2][r].to_vec());
        }
        f
    }

    /// Derivative of slice-major data along `alpha` (0 = t, 1 = x, 2 = y).
    pub(crate) fn diff(&self, data: &[f64], alpha: usize) -> Vec<f64> {
        let m = self.grid.len();
        match alpha {
            0 => time_diff(data, self.nt, m, self.ht, self.boundary),
            _ => data.chunks(m).flat_map(|s| self.grid.central_diff(s, alpha - 1)).collect(),
        }
    }

    fn spectral(&self, data: &[f64], axis: usize) -> Vec<f64> {
        data.chunks(self.grid.len()).flat_map(|s| self.grid.spectral_diff(s, axis)).collect()
    }

    pub(crate) fn check_same_shape(&self, other: &ConnectionSlab) -> Result<()> {
        if self.grid != other.grid || self.nt != other.nt || self.ht != other.ht {
            return Err(Error::ShapeMismatch(format!(
                "xi slab {}x{}x{} vs v slab {}x{}x{}",
                self.grid.nx(),
                self.grid.ny(),
                self.nt,
                other.grid.nx(),
                other.grid.ny(),
                other.nt
            )));
        }
        Ok(())
    }
}

/// Space-time samples of `v^A_mu`, same layout as [`SpacetimeSlab`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionSlab {
    grid: Grid2D,
    nt: usize,
    ht: f64,
    pub v: Components,
}

impl ConnectionSlab {
    pub fn zeros_like(xi: &SpacetimeSlab) -> Self {
        Self { grid: xi.grid, nt: xi.nt, ht: xi.ht, v: zero_components(xi.len()) }
    }

    pub fn slice(&self, t: usize) -> SpinConnectionField {
        let m = self.grid.len();
        SpinConnectionField {
            grid: self.grid,
            v: std::array::from_fn(|a| std::array::from_fn(|mu| self.v[a][mu][t * m..(t + 1) * m].to_vec())),
        }
    }

    pub fn nt(&self) -> usize {
        self.nt
    }
}

/// `W^nu_B = eps^{nu alpha beta} d_alpha xi_{B beta}` from precomputed derivatives `d[alpha][B][beta]`.
fn curl(d: &[Components; 3], n: usize) -> Components {
    let mut w = zero_components(n);
    for (nu, w_nu) in w.iter_mut().enumerate() {
        for (b, w_nb) in w_nu.iter_mut().enumerate() {
            for alpha in 0..3 {
                for beta in 0..3 {
                    let s = eps(nu, alpha, beta) * ETA[b];
                    if s != 0.0 {
                        for (o, x) in w_nb.iter_mut().zip(&d[alpha][b][beta]) {
                            *o += s * x;
                        }
                    }
                }
            }
        }
    }
    w
}

/// Spatial/temporal derivatives of every component of a slab, indexed `[alpha][A][mu]`.
pub(crate) fn slab_derivatives(slab: &SpacetimeSlab) -> [Components; 3] {
    std::array::from_fn(|alpha| {
        std::array::from_fn(|a| std::array::from_fn(|mu| slab.diff(&slab.xi[a][mu], alpha)))
    })
}

/// `W^nu_B` for a slab, by finite differences; indexed `[nu][B]`.
pub fn slab_curl(slab: &SpacetimeSlab) -> Components {
    curl(&slab_derivatives(slab), slab.len())
}

/// General linearized solution `v^A_mu = M^{AB}_{mu nu} W^nu_B`, by finite differences.
pub fn spin_connection_general(params: &ModelParams, slab: &SpacetimeSlab) -> ConnectionSlab {
    let w = slab_curl(slab);
    let m = connection_tensor(params);
    let mut out = ConnectionSlab::zeros_like(slab);
    for a in 0..3 {
        for mu in 0..3 {
            let o = &mut out.v[a][mu];
            for b in 0..3 {
                for nu in 0..3 {
                    let c = m[a][b][mu][nu];
                    if c != 0.0 {
                        for (x, y) in o.iter_mut().zip(&w[nu][b]) {
                            *x += c * y;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Max-norm of the linearized torsion `eps^{mu nu rho}(d_nu xi^A_rho + eps^A_BC ebar^B_nu v^C_rho)`.
///
/// Spatial derivatives of `xi` are spectral and time derivatives are the
/// slab's exact ones when attached, so the value measures the error of `v`
/// rather than the consistency of two stencils.
pub fn torsion_residual(params: &ModelParams, xi: &SpacetimeSlab, v: &ConnectionSlab) -> Result<f64> {
    xi.check_same_shape(v)?;
    let n = xi.len();
    let e = background_dreibein(params);
    let d: [Components; 3] = std::array::from_fn(|alpha| {
        std::array::from_fn(|a| {
            std::array::from_fn(|mu| match (alpha, &xi.xi_dot) {
                (0, Some(dot)) => dot[a][mu].clone(),
                (0, None) => xi.diff(&xi.xi[a][mu], 0),
                _ => xi.spectral(&xi.xi[a][mu], alpha - 1),
            })
        })
    });
    let mut worst = 0.0_f64;
    let mut t = vec![0.0; n];
    for a in 0..3 {
        for mu in 0..3 {
            t.iter_mut().for_each(|x| *x = 0.0);
            for nu in 0..3 {
                for rho in 0..3 {
                    let s = eps(mu, nu, rho);
                    if s == 0.0 {
                        continue;
                    }
                    for (o, x) in t.iter_mut().zip(&d[nu][a][rho]) {
                        *o += s * x;
                    }
                    for b in 0..3 {
                        for c in 0..3 {
                            let k = s * eps_mixed(a, b, c) * e[b][nu];
                            if k != 0.0 {
                                for (o, x) in t.iter_mut().zip(&v.v[c][rho]) {
                                    *o += k * x;
                                }
                            }
                        }
                    }
                }
            }
            worst = t.iter().fold(worst, |m, x| m.max(x.abs()));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn params(g: f64, l: f64) -> ModelParams {
        ModelParams::new(g, l, 1.0).unwrap()
    }

    #[test]
    fn flat_metric_for_zero_fluctuation() {
        let grid = Grid2D::new(4, 4, 1.0).unwrap();
        let m = metric_from_fluctuation(&params(0.1, 1.0), &DiagonalFluctuationField::zeros(grid)).unwrap();
        assert!(m.g.iter().all(|g| *g == [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]));
    }

    #[test]
    fn metric_picks_up_two_l_xi() {
        let grid = Grid2D::new(4, 4, 1.0).unwrap();
        let xi = DiagonalFluctuationField::new(grid, vec![0.1; 16], vec![0.0; 16]).unwrap();
        let m = metric_from_fluctuation(&params(1.0 / (8.0 * PI), 1.0), &xi).unwrap();
        assert!((m.g[5][1][1] - 1.2).abs() < 1e-15);
        assert_eq!(m.g[5][2][2], 1.0);
    }

    #[test]
    fn metric_degeneracy_reported() {
        let grid = Grid2D::new(4, 4, 1.0).unwrap();
        let p = params(0.05, 1.0);
        // l^2 + 8 pi G 2 l xi = 0
        let xi0 = -1.0 / (16.0 * PI * 0.05);
        let mut v = vec![0.0; 16];
        v[7] = xi0;
        let xi = DiagonalFluctuationField::new(grid, v, vec![0.0; 16]).unwrap();
        assert!(matches!(metric_from_fluctuation(&p, &xi), Err(Error::DegenerateMetric { node: 7, .. })));
    }

    #[test]
    fn static_profile_has_only_temporal_rotation() {
        let grid = Grid2D::new(16, 16, 0.25).unwrap();
        let (_, ly) = grid.extent();
        let xi1 = grid.sample(|_, y| 0.01 * (TAU * y / ly).sin());
        let xi = DiagonalFluctuationField::new(grid, xi1, vec![0.0; grid.len()]).unwrap();
        let v = spin_connection_gauge_fixed(&params(0.01, 1.0), &xi);
        assert!(v.v0x().iter().any(|x| x.abs() > 1e-3));
        assert!(v.v1y().iter().chain(v.v2x()).all(|x| *x == 0.0));
        assert!(v.v0t().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn constant_rate_gives_constant_spatial_rotation() {
        let grid = Grid2D::new(8, 8, 0.5).unwrap();
        let n = grid.len();
        let xi = DiagonalFluctuationField::zeros(grid).with_time_derivatives(vec![0.3; n], vec![0.0; n]).unwrap();
        let v = spin_connection_gauge_fixed(&params(0.01, 2.0), &xi);
        assert!(v.v2x().iter().all(|x| *x == -0.3));
        assert!(v.v0t().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn general_solution_satisfies_torsion_equation_exactly_for_linear_fields() {
        // Fields linear in t with constant spatial profile: every stencil is exact.
        let grid = Grid2D::new(8, 8, 0.5).unwrap();
        let slab = SpacetimeSlab::from_fn(grid, 3, 0.1, TimeBoundary::Open, |a, mu, _, _, t| {
            0.1 * (1 + a + 2 * mu) as f64 * t
        })
        .unwrap()
        .with_time_derivatives(|a, mu, _, _, _| 0.1 * (1 + a + 2 * mu) as f64);
        let p = params(0.02, 1.3);
        let v = spin_connection_general(&p, &slab);
        assert!(torsion_residual(&p, &slab, &v).unwrap() < 1e-13);
    }

    #[test]
    fn slab_needs_three_slices() {
        let grid = Grid2D::new(4, 4, 1.0).unwrap();
        assert!(matches!(
            SpacetimeSlab::zeros(grid, 2, 0.1, TimeBoundary::Open),
            Err(Error::TooFewTimeSlices(2))
        ));
    }

    #[test]
    fn zero_slab_gives_zero_connection() {
        let grid = Grid2D::new(4, 4, 1.0).unwrap();
        let slab = SpacetimeSlab::zeros(grid, 3, 0.1, TimeBoundary::Periodic).unwrap();
        let v = spin_connection_general(&params(0.1, 1.0), &slab);
        assert!(v.v.iter().flatten().flatten().all(|x| *x == 0.0));
    }
}
