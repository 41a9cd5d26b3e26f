//! Optical-lattice design: condensate amplitudes and boson-fermion
//! couplings for given `(G, l)`, the weak-fluctuation test, and
//! Bose-Hubbard overlap integrals.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::Couplings;
use crate::manybody::fock::{BosonMode, FockSpace, Species};
use crate::params::ModelParams;
use crate::symbolic::{Monomial, QSqrt2};

/// Condensate amplitudes `D_m` and couplings `Delta_m`; the tunnelling of
/// link `m` is `J_m = Delta_m D_m (D_m + d_m + d_m^dag) + offset_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalParams {
    pub d_x: f64,
    pub d_z: f64,
    pub delta_x: f64,
    pub delta_z: f64,
    pub jx_offset: f64,
    pub jz_offset: f64,
}

impl OpticalParams {
    pub fn background_jx(&self) -> f64 {
        self.delta_x * self.d_x * self.d_x + self.jx_offset
    }

    pub fn background_jz(&self) -> f64 {
        self.delta_z * self.d_z * self.d_z + self.jz_offset
    }

    pub fn background_couplings(&self) -> Couplings {
        Couplings::isotropic(self.background_jx()).with_jz(self.background_jz())
    }

    /// `Delta_m D_m`, the coefficient of `d_m + d_m^dag` in `J_m`.
    pub fn slope(&self, s: Species) -> f64 {
        match s {
            Species::X => self.delta_x * self.d_x,
            Species::Z => self.delta_z * self.d_z,
        }
    }

    pub fn amplitude(&self, s: Species) -> f64 {
        match s {
            Species::X => self.d_x,
            Species::Z => self.d_z,
        }
    }
}

/// Exact forms of `D_x, D_z, Delta_x, Delta_z`.
pub fn optical_params_exact() -> [Monomial; 4] {
    let pi_g = Monomial::pi() * Monomial::g();
    let inv = pi_g.inv().expect("symbolic");
    [
        Monomial::rational(-1, 4) * Monomial::l() * inv,
        Monomial::constant(QSqrt2::sqrt2_times(-1, 8)) * Monomial::l() * inv,
        Monomial::rational(32, 3) * pi_g.pow(2) * Monomial::l().pow(3).inv().expect("symbolic"),
        Monomial::rational(64, 3) * pi_g.pow(2) * Monomial::l().pow(3).inv().expect("symbolic"),
    ]
}

pub fn optical_params(params: &ModelParams) -> Result<OpticalParams> {
    optical_params_with_offsets(params, 0.0, 0.0)
}

/// As [`optical_params`] with constant additive tunnelling offsets.
pub fn optical_params_with_offsets(params: &ModelParams, jx_offset: f64, jz_offset: f64) -> Result<OpticalParams> {
    params.require_gravity("condensate amplitudes D_m ~ 1/G are unbounded")?;
    let (g, l) = (params.g(), params.l());
    let d_x = -l / (4.0 * PI * g);
    Ok(OpticalParams {
        d_x,
        d_z: d_x / std::f64::consts::SQRT_2,
        delta_x: 32.0 * PI * PI * g * g / (3.0 * l * l * l),
        delta_z: 64.0 * PI * PI * g * g / (3.0 * l * l * l),
        jx_offset,
        jz_offset,
    })
}

/// Key-value design sheet with formulas and validity flags.
pub fn design_sheet(params: &ModelParams, op: &OpticalParams) -> String {
    let exact = optical_params_exact();
    let bg = op.background_couplings();
    let (vx, vy) = bg.velocities();
    let mut s = String::new();
    let mut kv = |k: &str, v: f64, f: &str| {
        let _ = writeln!(s, "{k}={v:?}  # {f}");
    };
    kv("G", params.g(), "input");
    kv("l", params.l(), "input");
    kv("mu", params.mu(), "input");
    kv("D_x", op.d_x, &exact[0].to_string());
    kv("D_z", op.d_z, &exact[1].to_string());
    kv("Delta_x", op.delta_x, &exact[2].to_string());
    kv("Delta_z", op.delta_z, &exact[3].to_string());
    kv("J_x0", op.background_jx(), "Delta_x*D_x^2 + offset_x");
    kv("J_z0", op.background_jz(), "Delta_z*D_z^2 + offset_z");
    kv("v_x", vx, "(sqrt3/2)*sqrt(4*J_x0^2 - J_z0^2)");
    kv("v_y", vy, "(3/2)*J_z0");
    kv("slope_x", op.slope(Species::X), "Delta_x*D_x");
    kv("slope_z", op.slope(Species::Z), "Delta_z*D_z");
    kv("weak_coupling_ratio", params.weak_coupling_ratio(), "8*pi*G/l");
    let _ = writeln!(s, "flag.dirac_regime={}", bg.in_dirac_regime());
    let _ = writeln!(s, "flag.isotropic={}", (vx - vy).abs() <= 1e-10 * vx.abs().max(vy.abs()));
    let _ = writeln!(s, "flag.weak_coupling={}", params.weak_coupling_ratio() < 1.0);
    s
}

/// Per-mode `<d^dag d> / D^2` against a threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakFluctuationReport {
    pub ratios: Vec<(BosonMode, f64)>,
    pub threshold: f64,
}

impl WeakFluctuationReport {
    pub const DEFAULT_THRESHOLD: f64 = 1e-2;

    pub fn passes(&self) -> bool {
        self.ratios.iter().all(|(_, r)| *r < self.threshold)
    }

    pub fn failing(&self) -> Vec<BosonMode> {
        self.ratios.iter().filter(|(_, r)| *r >= self.threshold).map(|(m, _)| *m).collect()
    }
}

/// Ratios from given occupations `<d_m^dag d_m>`.
pub fn fluctuation_ratios(occupations: &[(BosonMode, f64)], op: &OpticalParams, threshold: f64) -> WeakFluctuationReport {
    let ratios = occupations.iter().map(|(m, n)| (*m, n / op.amplitude(m.species).powi(2))).collect();
    WeakFluctuationReport { ratios, threshold }
}

pub fn weak_fluctuation_check(
    state: &[Complex64],
    space: &FockSpace,
    op: &OpticalParams,
    threshold: f64,
) -> Result<WeakFluctuationReport> {
    if state.len() != space.dim() {
        return Err(Error::ShapeMismatch(format!("state of length {} for dimension {}", state.len(), space.dim())));
    }
    let mut occ = vec![0.0; space.boson_modes().len()];
    for (i, z) in state.iter().enumerate() {
        let p = z.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for (o, n) in occ.iter_mut().zip(space.decode(i).1) {
            *o += p * n as f64;
        }
    }
    let pairs: Vec<(BosonMode, f64)> = space.boson_modes().iter().copied().zip(occ).collect();
    Ok(fluctuation_ratios(&pairs, op, threshold))
}

/// Lowest-band tunnelling of `V(x) = v0 E_R sin^2(pi x / a)`, in recoil units:
/// a quarter of the exact 1-D bandwidth.
pub fn band_tunnelling(v0: f64) -> f64 {
    let lowest = |q: f64| -> f64 {
        let nmax = 30i32;
        let n = (2 * nmax + 1) as usize;
        let h = DMatrix::from_fn(n, n, |r, c| {
            let (kr, kc) = (r as i32 - nmax, c as i32 - nmax);
            if r == c {
                (2.0 * kr as f64 + q).powi(2) + 0.5 * v0
            } else if (kr - kc).abs() == 1 {
                -0.25 * v0
            } else {
                0.0
            }
        });
        SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    };
    0.25 * (lowest(1.0) - lowest(0.0))
}

/// Tunnelling per axis and on-site interaction of a cubic optical lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubbardIntegrals {
    /// Nearest-neighbour tunnelling per axis (exact 1-D band calculation).
    pub t: [f64; 3],
    /// On-site interaction (Gaussian harmonic-well orbitals).
    pub u: f64,
    /// Orbital widths `a / (pi v0^{1/4})`.
    pub sigma: [f64; 3],
    pub recoil_energy: f64,
    /// `v0 >= 1` on every axis.
    pub tight_binding_ok: bool,
}

impl HubbardIntegrals {
    pub const T_METHOD: &'static str = "exact 1-D band, t = bandwidth/4";
    pub const U_METHOD: &'static str = "Gaussian orbitals of the harmonic well";
}

/// `t` and `U` with `hbar = 1`; `v0` in recoil units `E_R = pi^2 / (2 m a^2)`.
pub fn hubbard_integrals(v0: [f64; 3], a_s: f64, mass: f64, spacing: f64) -> Result<HubbardIntegrals> {
    for (name, v, ok) in [
        ("v0", v0.iter().copied().fold(f64::INFINITY, f64::min), v0.iter().all(|v| v.is_finite() && *v > 0.0)),
        ("mass", mass, mass.is_finite() && mass > 0.0),
        ("spacing", spacing, spacing.is_finite() && spacing > 0.0),
        ("a_s", a_s, a_s.is_finite()),
    ] {
        if !ok {
            return Err(Error::InvalidParameter { name, reason: format!("out of range: {v}") });
        }
    }
    let er = PI * PI / (2.0 * mass * spacing * spacing);
    let t = v0.map(|v| band_tunnelling(v) * er);
    let sigma = v0.map(|v| spacing / (PI * v.powf(0.25)));
    let overlap: f64 = sigma.iter().map(|s| 1.0 / ((2.0 * PI).sqrt() * s)).product();
    Ok(HubbardIntegrals {
        t,
        u: 4.0 * PI * a_s / mass * overlap,
        sigma,
        recoil_energy: er,
        tight_binding_ok: v0.iter().all(|v| *v >= 1.0),
    })
}
