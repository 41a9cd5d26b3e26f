//! Seeded band-limited fluctuation fields for checks and command-line runs.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::SpacetimeSlab;
use crate::grid::{Grid2D, TimeBoundary};

/// Which `xi^A_mu` components carry waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Components {
    /// `xi^1_x` and `xi^2_y` only.
    Diagonal,
    /// All nine.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveMode {
    pub a: usize,
    pub mu: usize,
    pub kx: f64,
    pub ky: f64,
    pub w: f64,
    pub amp: f64,
    pub phase: f64,
}

/// A finite sum of plane waves `amp sin(kx x + ky y - w t + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandLimited {
    pub modes: Vec<WaveMode>,
}

impl BandLimited {
    /// `n_modes` waves with wavenumbers up to `kmax` quanta of the box
    /// `lx * ly`. With a `period`, frequencies are multiples of `2 pi / period`
    /// so the field is periodic in time; otherwise they are drawn from `[0.5, 1.5)`.
    pub fn random(
        seed: u64,
        n_modes: usize,
        kmax: i32,
        amplitude: f64,
        which: Components,
        box_len: [f64; 2],
        period: Option<f64>,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes = (0..n_modes)
            .map(|i| {
                let (a, mu) = match which {
                    Components::Diagonal => (1 + i % 2, 1 + i % 2),
                    Components::All => (i % 3, (i / 3) % 3),
                };
                let kx = TAU * rng.random_range(-kmax..=kmax) as f64 / box_len[0];
                let ky = TAU * rng.random_range(-kmax..=kmax) as f64 / box_len[1];
                let w = match period {
                    Some(t) => TAU * rng.random_range(-kmax..=kmax) as f64 / t,
                    None => rng.random_range(0.5..1.5),
                };
                WaveMode { a, mu, kx, ky, w, amp: rng.random_range(-amplitude..amplitude), phase: rng.random_range(0.0..TAU) }
            })
            .collect();
        Self { modes }
    }

    pub fn value(&self, a: usize, mu: usize, x: f64, y: f64, t: f64) -> f64 {
        self.sum(a, mu, |m| m.amp * (m.kx * x + m.ky * y - m.w * t + m.phase).sin())
    }

    pub fn time_derivative(&self, a: usize, mu: usize, x: f64, y: f64, t: f64) -> f64 {
        self.sum(a, mu, |m| -m.w * m.amp * (m.kx * x + m.ky * y - m.w * t + m.phase).cos())
    }

    fn sum(&self, a: usize, mu: usize, f: impl Fn(&WaveMode) -> f64) -> f64 {
        self.modes.iter().filter(|m| m.a == a && m.mu == mu).map(f).sum()
    }

    /// Samples the field on a slab, with exact time derivatives attached.
    pub fn slab(&self, grid: Grid2D, nt: usize, ht: f64, boundary: TimeBoundary) -> Result<SpacetimeSlab> {
        Ok(SpacetimeSlab::from_fn(grid, nt, ht, boundary, |a, mu, x, y, t| self.value(a, mu, x, y, t))?
            .with_time_derivatives(|a, mu, x, y, t| self.time_derivative(a, mu, x, y, t)))
    }
}
