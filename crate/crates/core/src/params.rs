//! Physical parameters shared by every module.
//!
//! Units: hbar = 1 and the lattice spacing is 1, so every quantity is a
//! plain dimensionless number.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// The triple (G, l, mu): Newton constant, background dreibein scale and
/// graviton mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    g: f64,
    l: f64,
    mu: f64,
}

impl ModelParams {
    pub fn new(g: f64, l: f64, mu: f64) -> Result<Self> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::InvalidParameter { name: "G", reason: format!("must be finite and >= 0, got {g}") });
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidParameter { name: "l", reason: format!("must be finite and > 0, got {l}") });
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter { name: "mu", reason: format!("must be finite and > 0, got {mu}") });
        }
        Ok(Self { g, l, mu })
    }

    /// Same as [`ModelParams::new`] but admits `mu = 0`, which only the
    /// limit checks of a few operations need.
    pub fn new_allow_massless(g: f64, l: f64, mu: f64) -> Result<Self> {
        if mu == 0.0 {
            let p = Self::new(g, l, 1.0)?;
            return Ok(Self { mu: 0.0, ..p });
        }
        Self::new(g, l, mu)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// 8 pi G, the fluctuation scale of dreibein and spin connection.
    pub fn kappa(&self) -> f64 {
        8.0 * PI * self.g
    }

    /// 8 pi G / l, recorded in reports; the linear-in-G expansion needs it small.
    pub fn weak_coupling_ratio(&self) -> f64 {
        self.kappa() / self.l
    }

    /// Background dreibein determinant, `l^2`.
    pub fn background_det(&self) -> f64 {
        self.l * self.l
    }

    pub(crate) fn require_gravity(&self, what: &'static str) -> Result<()> {
        if self.g == 0.0 {
            Err(Error::TopologicalLimit(what))
        } else {
            Ok(())
        }
    }
}
