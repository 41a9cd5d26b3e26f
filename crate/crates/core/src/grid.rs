//! Periodic sample grids and the finite-difference stencils used on them.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Uniform periodic grid with `nx * ny` nodes and spacing `h`.
///
/// Node `(ix, iy)` is stored at `iy * nx + ix`, so `ix` runs fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    h: f64,
}

impl Grid2D {
    pub const MIN_NODES: usize = 4;

    pub fn new(nx: usize, ny: usize, h: f64) -> Result<Self> {
        if nx < Self::MIN_NODES || ny < Self::MIN_NODES {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("need at least {} nodes per axis, got {nx} x {ny}", Self::MIN_NODES),
            });
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter { name: "h", reason: format!("must be finite and > 0, got {h}") });
        }
        Ok(Self { nx, ny, h })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Side lengths of the periodic box.
    pub fn extent(&self) -> (f64, f64) {
        (self.nx as f64 * self.h, self.ny as f64 * self.h)
    }

    /// Linear index of `(ix, iy)` with periodic wrap; any integer pair is valid.
    pub fn index(&self, ix: isize, iy: isize) -> usize {
        let x = ix.rem_euclid(self.nx as isize) as usize;
        let y = iy.rem_euclid(self.ny as isize) as usize;
        y * self.nx + x
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn position(&self, idx: usize) -> (f64, f64) {
        let (ix, iy) = self.coords(idx);
        (ix as f64 * self.h, iy as f64 * self.h)
    }

    /// Samples `f(x, y)` at every node.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let (x, y) = self.position(i);
                f(x, y)
            })
            .collect()
    }

    pub(crate) fn check_len(&self, what: &str, n: usize) -> Result<()> {
        if n == self.len() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!("{what}: {n} samples for a {}x{} grid", self.nx, self.ny)))
        }
    }

    /// Second-order central difference along `axis` (0 = x, 1 = y).
    pub fn central_diff(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let inv = 0.5 / self.h;
        (0..self.len())
            .map(|i| {
                let (ix, iy) = self.coords(i);
                let (ix, iy) = (ix as isize, iy as isize);
                let (p, m) = if axis == 0 {
                    (self.index(ix + 1, iy), self.index(ix - 1, iy))
                } else {
                    (self.index(ix, iy + 1), self.index(ix, iy - 1))
                };
                (f[p] - f[m]) * inv
            })
            .collect()
    }

    /// Central difference for complex samples.
    pub fn central_diff_complex(&self, f: &[Complex64], axis: usize) -> Vec<Complex64> {
        let inv = 0.5 / self.h;
        (0..self.len())
            .map(|i| {
                let (ix, iy) = self.coords(i);
                let (ix, iy) = (ix as isize, iy as isize);
                let (p, m) = if axis == 0 {
                    (self.index(ix + 1, iy), self.index(ix - 1, iy))
                } else {
                    (self.index(ix, iy + 1), self.index(ix, iy - 1))
                };
                (f[p] - f[m]) * inv
            })
            .collect()
    }

    /// Spectral derivative along `axis`; exact for trigonometric polynomials
    /// below the Nyquist mode (the Nyquist mode itself is dropped).
    pub fn spectral_diff(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let (n, count) = if axis == 0 { (self.nx, self.ny) } else { (self.ny, self.nx) };
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let (lx, ly) = self.extent();
        let period = if axis == 0 { lx } else { ly };
        let mut out = vec![0.0; self.len()];
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..count {
            let at = |k: usize| if axis == 0 { j * self.nx + k } else { k * self.nx + j };
            for (k, z) in line.iter_mut().enumerate() {
                *z = Complex64::new(f[at(k)], 0.0);
            }
            fwd.process(&mut line);
            for (k, z) in line.iter_mut().enumerate() {
                let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                let m = if n % 2 == 0 && k == n / 2 { 0.0 } else { m };
                let w = std::f64::consts::TAU * m / period;
                *z *= Complex64::new(0.0, w / n as f64);
            }
            inv.process(&mut line);
            for (k, z) in line.iter().enumerate() {
                out[at(k)] = z.re;
            }
        }
        out
    }

    /// Trapezoid rule over the periodic box: `h^2 * sum`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.h * self.h * f.iter().sum::<f64>()
    }
}

/// How a space-time slab treats its first and last time slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeBoundary {
    /// Slices wrap around; central differences everywhere.
    Periodic,
    /// One-sided second-order stencils at the two ends.
    Open,
}

/// Second-order time derivative of slice-major data (`nt` slices of `m` nodes).
pub fn time_diff(data: &[f64], nt: usize, m: usize, ht: f64, boundary: TimeBoundary) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    let at = |t: usize, i: usize| data[t * m + i];
    for t in 0..nt {
        for i in 0..m {
            out[t * m + i] = match boundary {
                TimeBoundary::Periodic => (at((t + 1) % nt, i) - at((t + nt - 1) % nt, i)) / (2.0 * ht),
                TimeBoundary::Open if t == 0 => (-3.0 * at(0, i) + 4.0 * at(1, i) - at(2, i)) / (2.0 * ht),
                TimeBoundary::Open if t == nt - 1 => {
                    (3.0 * at(t, i) - 4.0 * at(t - 1, i) + at(t - 2, i)) / (2.0 * ht)
                }
                TimeBoundary::Open => (at(t + 1, i) - at(t - 1, i)) / (2.0 * ht),
            };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn rejects_small_or_bad_grids() {
        assert!(Grid2D::new(3, 8, 0.1).is_err());
        assert!(Grid2D::new(8, 8, 0.0).is_err());
        assert!(Grid2D::new(4, 4, 1.0).is_ok());
    }

    #[test]
    fn wraparound_is_total() {
        let g = Grid2D::new(5, 4, 1.0).unwrap();
        assert_eq!(g.index(-1, 0), 4);
        assert_eq!(g.index(5, -1), 15);
        assert_eq!(g.index(-11, 9), g.index(4, 1));
    }

    #[test]
    fn spectral_derivative_is_exact_for_low_modes() {
        let g = Grid2D::new(16, 12, 0.25).unwrap();
        let (lx, ly) = g.extent();
        let f = g.sample(|x, y| (TAU * 2.0 * x / lx).sin() * (TAU * y / ly).cos());
        let dfx = g.spectral_diff(&f, 0);
        let dfy = g.spectral_diff(&f, 1);
        for i in 0..g.len() {
            let (x, y) = g.position(i);
            let ex = TAU * 2.0 / lx * (TAU * 2.0 * x / lx).cos() * (TAU * y / ly).cos();
            let ey = -TAU / ly * (TAU * 2.0 * x / lx).sin() * (TAU * y / ly).sin();
            assert!((dfx[i] - ex).abs() < 1e-12);
            assert!((dfy[i] - ey).abs() < 1e-12);
        }
    }

    #[test]
    fn central_difference_has_sine_symbol() {
        let g = Grid2D::new(8, 8, 0.5).unwrap();
        let (lx, _) = g.extent();
        let k = TAU / lx;
        let f = g.sample(|x, _| (k * x).sin());
        let d = g.central_diff(&f, 0);
        for i in 0..g.len() {
            let (x, _) = g.position(i);
            assert!((d[i] - (k * g.h()).sin() / g.h() * (k * x).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn open_time_stencil_is_exact_on_quadratics() {
        let nt = 4;
        let data: Vec<f64> = (0..nt).map(|t| (t as f64 * 0.1).powi(2)).collect();
        let d = time_diff(&data, nt, 1, 0.1, TimeBoundary::Open);
        for (t, v) in d.iter().enumerate() {
            assert!((v - 2.0 * t as f64 * 0.1).abs() < 1e-12);
        }
    }
}
