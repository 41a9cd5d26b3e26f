//! Palatini action order by order, the massless Fierz-Pauli form and the
//! gauge-fixed massive action, all on discretized slabs.

use std::fmt::Write as _;

use crate::continuum::{hgr_quadratic_form, MassSign};
use crate::error::{Error, Result};
use crate::geometry::{background_dreibein, connection_tensor, slab_curl, Components, ConnectionSlab, SpacetimeSlab};
use crate::grid::TimeBoundary;
use crate::params::ModelParams;
use crate::tensor::{eps, eps2, eps_lower, ETA};

/// Action values per expansion order plus named consistency residuals.
///
/// With `e = ebar + k xi`, `omega = k v` and `k = 8 pi G` the Palatini
/// action is `s0 / k + s1 + k s2 + k^2 s3`. `s0` and `s1` are contractions
/// with the background curvature and torsion (`s1` also carries the surface
/// term `eps ebar d v`), `s3` is the cubic remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionReport {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s_massive: Option<f64>,
    pub weak_coupling_ratio: f64,
    pub residuals: Vec<(String, f64)>,
}

impl ActionReport {
    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// Flat `key=value` block, one entry per line.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "s0={:?}", self.s0);
        let _ = writeln!(s, "s1={:?}", self.s1);
        let _ = writeln!(s, "s2={:?}", self.s2);
        let _ = writeln!(s, "s3={:?}", self.s3);
        if let Some(m) = self.s_massive {
            let _ = writeln!(s, "s_massive={m:?}");
        }
        let _ = writeln!(s, "weak_coupling_ratio={:?}", self.weak_coupling_ratio);
        for (k, v) in &self.residuals {
            let _ = writeln!(s, "residual.{k}={v:?}");
        }
        s
    }
}

fn volume_element(xi: &SpacetimeSlab) -> f64 {
    let h = xi.grid().h();
    h * h * xi.ht()
}

fn lower(c: &Components) -> Components {
    std::array::from_fn(|a| std::array::from_fn(|mu| c[a][mu].iter().map(|x| ETA[a] * x).collect()))
}

fn levi_civita_terms() -> impl Iterator<Item = (usize, usize, usize, f64)> {
    (0..27).filter_map(|k| {
        let (m, n, r) = (k / 9, (k / 3) % 3, k % 3);
        let s = eps(m, n, r);
        (s != 0.0).then_some((m, n, r, s))
    })
}

/// `int eps^{mu nu rho} e^A_mu d_nu w_{A rho}` on the slab.
fn curl_pairing(xi: &SpacetimeSlab, e: &Components, w: &Components) -> f64 {
    let wl = lower(w);
    let mut total = 0.0;
    for (mu, nu, rho, s) in levi_civita_terms() {
        for a in 0..3 {
            let d = xi.diff(&wl[a][rho], nu);
            total += s * e[a][mu].iter().zip(&d).map(|(x, y)| x * y).sum::<f64>();
        }
    }
    total * volume_element(xi)
}

/// `int eps^{mu nu rho} eps_ABC e^A_mu w^B_nu w^C_rho`.
fn cubic_pairing(xi: &SpacetimeSlab, e: &Components, w: &Components) -> f64 {
    let mut total = 0.0;
    for (mu, nu, rho, s) in levi_civita_terms() {
        for (a, b, c, t) in levi_civita_terms() {
            let k = s * t * ETA[a] * ETA[b] * ETA[c];
            let sum: f64 = (0..xi.len()).map(|i| e[a][mu][i] * w[b][nu][i] * w[c][rho][i]).sum();
            total += k * sum;
        }
    }
    total * volume_element(xi)
}

fn background_components(params: &ModelParams, n: usize) -> Components {
    let e = background_dreibein(params);
    std::array::from_fn(|a| std::array::from_fn(|mu| vec![e[a][mu]; n]))
}

fn require_periodic(xi: &SpacetimeSlab) -> Result<()> {
    if xi.boundary() == TimeBoundary::Periodic {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "boundary", reason: "the action needs a slab periodic in time".into() })
    }
}

/// Full Palatini action `(1/8 pi G) int eps e^A (d omega_A + eps_ABC omega^B omega^C / 2)`.
pub fn palatini_total(params: &ModelParams, slab: &SpacetimeSlab, e: &Components, omega: &Components) -> Result<f64> {
    params.require_gravity("the Palatini action carries 1/(8 pi G)")?;
    require_periodic(slab)?;
    Ok((curl_pairing(slab, e, omega) + 0.5 * cubic_pairing(slab, e, omega)) / params.kappa())
}

/// Order-by-order Palatini terms for fluctuations `xi`, `v` on the flat background.
pub fn palatini_orders(params: &ModelParams, xi: &SpacetimeSlab, v: &ConnectionSlab) -> Result<ActionReport> {
    xi.check_same_shape(v)?;
    require_periodic(xi)?;
    let n = xi.len();
    let ebar = background_components(params, n);
    // flat background: the connection vanishes, so s0 is evaluated on zero omega
    let zero: Components = std::array::from_fn(|_| std::array::from_fn(|_| vec![0.0; n]));
    let s0 = curl_pairing(xi, &ebar, &zero) + 0.5 * cubic_pairing(xi, &ebar, &zero);
    let s1 = curl_pairing(xi, &ebar, &v.v);
    let s2 = curl_pairing(xi, &xi.xi, &v.v) + 0.5 * cubic_pairing(xi, &ebar, &v.v);
    let s3 = 0.5 * cubic_pairing(xi, &xi.xi, &v.v);
    let mut residuals = Vec::new();
    if params.g() > 0.0 {
        let k = params.kappa();
        let e: Components =
            std::array::from_fn(|a| std::array::from_fn(|mu| (0..n).map(|i| ebar[a][mu][i] + k * xi.xi[a][mu][i]).collect()));
        let omega: Components = std::array::from_fn(|a| std::array::from_fn(|mu| v.v[a][mu].iter().map(|x| k * x).collect()));
        let total = palatini_total(params, xi, &e, &omega)?;
        let expanded = s0 / k + s1 + k * s2 + k * k * s3;
        let scale = total.abs().max(expanded.abs()).max(f64::MIN_POSITIVE);
        residuals.push(("bookkeeping".to_string(), (total - expanded).abs() / scale));
    }
    Ok(ActionReport { s0, s1, s2, s3, s_massive: None, weak_coupling_ratio: params.weak_coupling_ratio(), residuals })
}

/// `-4 pi G int M^{AB}_{mu nu} W^mu_A W^nu_B` with `W^mu_A = eps^{mu alpha beta} d_alpha xi_{A beta}`.
pub fn fierz_pauli_quadratic(params: &ModelParams, xi: &SpacetimeSlab) -> f64 {
    -4.0 * std::f64::consts::PI * params.g() * connection_quadratic(params, xi)
}

/// `int M^{AB}_{mu nu} W^mu_A W^nu_B`, the G-free part of the quadratic action.
pub fn connection_quadratic(params: &ModelParams, xi: &SpacetimeSlab) -> f64 {
    let w = slab_curl(xi);
    let m = connection_tensor(params);
    let mut total = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for mu in 0..3 {
                for nu in 0..3 {
                    let c = m[a][b][mu][nu];
                    if c != 0.0 {
                        total += c * w[mu][a].iter().zip(&w[nu][b]).map(|(x, y)| x * y).sum::<f64>();
                    }
                }
            }
        }
    }
    total * volume_element(xi)
}

/// Metric fluctuation `h_{mu nu} = ebar_{A mu} xi^A_nu + ebar_{A nu} xi^A_mu`, indexed `[mu][nu]`.
pub fn metric_perturbation(params: &ModelParams, xi: &SpacetimeSlab) -> Components {
    let e = background_dreibein(params);
    std::array::from_fn(|mu| {
        std::array::from_fn(|nu| {
            (0..xi.len())
                .map(|i| (0..3).map(|a| ETA[a] * (e[a][mu] * xi.xi[a][nu][i] + e[a][nu] * xi.xi[a][mu][i])).sum())
                .collect()
        })
    })
}

/// Textbook massless Fierz-Pauli action of `h` on the background metric
/// `diag(-1, l^2, l^2)`:
/// `int sqrt(-g) [-d h d h / 2 + d_mu h_{nu l} d^nu h^{mu l} - d_mu h^{mu nu} d_nu h + d h d h / 2]`.
///
/// For the dreibein parametrization the quadratic action above equals
/// `2 pi G` times this value.
pub fn fierz_pauli_standard(params: &ModelParams, xi: &SpacetimeSlab) -> f64 {
    let l2 = params.background_det();
    let ginv = [-1.0, 1.0 / l2, 1.0 / l2];
    let h = metric_perturbation(params, xi);
    // dh[alpha][mu][nu]
    let dh: [Components; 3] = std::array::from_fn(|al| std::array::from_fn(|mu| std::array::from_fn(|nu| xi.diff(&h[mu][nu], al))));
    let n = xi.len();
    let trace_d: [Vec<f64>; 3] =
        std::array::from_fn(|al| (0..n).map(|i| (0..3).map(|m| ginv[m] * dh[al][m][m][i]).sum()).collect());
    let mut total = 0.0;
    for i in 0..n {
        let mut lag = 0.0;
        for al in 0..3 {
            for mu in 0..3 {
                for nu in 0..3 {
                    lag -= 0.5 * ginv[al] * ginv[mu] * ginv[nu] * dh[al][mu][nu][i] * dh[al][mu][nu][i];
                }
            }
        }
        for mu in 0..3 {
            for nu in 0..3 {
                for la in 0..3 {
                    // d_mu h_{nu la} d^nu h^{mu la}
                    lag += ginv[nu] * ginv[mu] * ginv[la] * dh[mu][nu][la][i] * dh[nu][mu][la][i];
                }
            }
        }
        for mu in 0..3 {
            // d_mu h^{mu nu} d_nu h, diagonal inverse metric
            for nu in 0..3 {
                lag -= ginv[mu] * ginv[nu] * dh[mu][mu][nu][i] * trace_d[nu][i];
            }
        }
        for al in 0..3 {
            lag += 0.5 * ginv[al] * trace_d[al][i] * trace_d[al][i];
        }
        total += lag;
    }
    total * l2 * volume_element(xi)
}

/// Coefficient table `c[(a,i)][(b,j)] = eps^{ij} eps_ab` over the spatial
/// components `(1x, 1y, 2x, 2y)`.
pub fn spatial_cross_contraction() -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    for (p, row) in c.iter_mut().enumerate() {
        for (q, v) in row.iter_mut().enumerate() {
            let (a, i) = (p / 2, p % 2);
            let (b, j) = (q / 2, q % 2);
            *v = eps2(i, j) * eps2(a, b);
        }
    }
    c
}

/// `-4 pi G eps^{ij} eps_ab (xidot^a_i xidot^b_j - mu^2 xi^a_i xi^b_j)` at a point,
/// components ordered `(1x, 1y, 2x, 2y)`.
pub fn massive_density(params: &ModelParams, xi: [f64; 4], xi_dot: [f64; 4]) -> f64 {
    let c = spatial_cross_contraction();
    let mu2 = params.mu() * params.mu();
    let mut s = 0.0;
    for p in 0..4 {
        for q in 0..4 {
            s += c[p][q] * (xi_dot[p] * xi_dot[q] - mu2 * xi[p] * xi[q]);
        }
    }
    -4.0 * std::f64::consts::PI * params.g() * s
}

/// Gauge-fixed massive action `-8 pi G int (xidot^1_x xidot^2_y - mu^2 xi^1_x xi^2_y)`.
///
/// Time derivatives come from the slab when attached, else from finite differences.
pub fn massive_fp_action(params: &ModelParams, xi: &SpacetimeSlab) -> f64 {
    let d1 = xi.xi_dot.as_ref().map(|d| d[1][1].clone()).unwrap_or_else(|| xi.diff(&xi.xi[1][1], 0));
    let d2 = xi.xi_dot.as_ref().map(|d| d[2][2].clone()).unwrap_or_else(|| xi.diff(&xi.xi[2][2], 0));
    let total: f64 = (0..xi.len())
        .map(|i| {
            massive_density(params, [xi.xi[1][1][i], 0.0, 0.0, xi.xi[2][2][i]], [d1[i], 0.0, 0.0, d2[i]])
        })
        .sum();
    total * volume_element(xi)
}

/// Fierz-Pauli mass term `4 pi G mu^2 eps^{mu nu rho} eps_ABC ebar^A_mu xi^B_nu xi^C_rho`
/// with the Lorentzian lowered symbol. On the gauge-fixed shape this is
/// minus the mass part of [`massive_fp_action`].
pub fn fierz_pauli_mass_term(params: &ModelParams, xi: &SpacetimeSlab) -> f64 {
    let e = background_dreibein(params);
    let mut total = 0.0;
    for (mu, nu, rho, s) in levi_civita_terms() {
        for (a, b, c, _) in levi_civita_terms() {
            let k = s * eps_lower(a, b, c) * e[a][mu];
            if k != 0.0 {
                total += k * xi.xi[b][nu].iter().zip(&xi.xi[c][rho]).map(|(x, y)| x * y).sum::<f64>();
            }
        }
    }
    4.0 * std::f64::consts::PI * params.g() * params.mu().powi(2) * total * volume_element(xi)
}

/// Hamiltonian density from the Legendre transform of [`massive_density`]
/// on diagonal fields, at `(xi^1_x, xi^2_y, pi^x_1, pi^y_2)`.
///
/// Momenta and the velocity Hessian are taken by unit-step central
/// differences, which are exact for this quadratic Lagrangian.
pub fn legendre_hamiltonian(params: &ModelParams, z: [f64; 4]) -> Result<f64> {
    params.require_gravity("no kinetic term to invert")?;
    let lag = |v: [f64; 2]| massive_density(params, [z[0], 0.0, 0.0, z[1]], [v[0], 0.0, 0.0, v[1]]);
    let grad = |v: [f64; 2]| -> [f64; 2] {
        std::array::from_fn(|k| {
            let (mut p, mut m) = (v, v);
            p[k] += 1.0;
            m[k] -= 1.0;
            0.5 * (lag(p) - lag(m))
        })
    };
    let p0 = grad([0.0, 0.0]);
    let a = [grad([1.0, 0.0]), grad([0.0, 1.0])];
    let hess = nalgebra::Matrix2::new(a[0][0] - p0[0], a[1][0] - p0[0], a[0][1] - p0[1], a[1][1] - p0[1]);
    let rhs = nalgebra::Vector2::new(z[2] - p0[0], z[3] - p0[1]);
    let vdot = hess.lu().solve(&rhs).ok_or_else(|| Error::InvalidParameter {
        name: "G",
        reason: "singular velocity Hessian".into(),
    })?;
    let v = [vdot[0], vdot[1]];
    Ok(z[2] * v[0] + z[3] * v[1] - lag(v))
}

/// Largest `|H_legendre - H_gr|` over the points, against the Legendre-sign form.
pub fn legendre_residual(params: &ModelParams, points: &[[f64; 4]]) -> Result<f64> {
    let form = hgr_quadratic_form(params, MassSign::Legendre)?;
    let mut worst = 0.0_f64;
    for z in points {
        worst = worst.max((legendre_hamiltonian(params, *z)? - form.energy(*z)).abs());
    }
    Ok(worst)
}
