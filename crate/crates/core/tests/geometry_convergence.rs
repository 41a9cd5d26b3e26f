use gravlat::geometry::{spin_connection_gauge_fixed, spin_connection_general, torsion_residual, SpacetimeSlab};
use gravlat::{Grid2D, ModelParams, TimeBoundary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

struct Mode {
    comp: usize,
    kx: f64,
    ky: f64,
    w: f64,
    amp: f64,
    phase: f64,
}

fn random_modes(seed: u64, box_len: f64) -> Vec<Mode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..6)
        .map(|i| Mode {
            comp: 1 + i % 2,
            kx: TAU * rng.random_range(-2..=2) as f64 / box_len,
            ky: TAU * rng.random_range(-2..=2) as f64 / box_len,
            w: rng.random_range(0.5..1.5),
            amp: rng.random_range(-0.05..0.05),
            phase: rng.random_range(0.0..TAU),
        })
        .collect()
}

fn slab(n: usize, modes: &[Mode], box_len: f64) -> SpacetimeSlab {
    let h = box_len / n as f64;
    let grid = Grid2D::new(n, n, h).unwrap();
    let val = |a: usize, mu: usize, x: f64, y: f64, t: f64, dot: bool| {
        if a != mu || a == 0 {
            return 0.0;
        }
        modes
            .iter()
            .filter(|m| m.comp == a)
            .map(|m| {
                let arg = m.kx * x + m.ky * y - m.w * t + m.phase;
                if dot {
                    -m.w * m.amp * arg.cos()
                } else {
                    m.amp * arg.sin()
                }
            })
            .sum()
    };
    SpacetimeSlab::from_fn(grid, 3, h, TimeBoundary::Open, |a, mu, x, y, t| val(a, mu, x, y, t, false))
        .unwrap()
        .with_time_derivatives(|a, mu, x, y, t| val(a, mu, x, y, t, true))
}

fn errors(p: &ModelParams, s: &SpacetimeSlab) -> (f64, f64) {
    let v = spin_connection_general(p, s);
    let torsion = torsion_residual(p, s, &v).unwrap();
    let mut agree = 0.0_f64;
    for t in 0..s.nt() {
        let g = spin_connection_gauge_fixed(p, &s.diagonal_slice(t));
        agree = agree.max(g.max_diff(&v.slice(t)));
    }
    (torsion, agree)
}

#[test]
fn residuals_shrink_quadratically_under_refinement() {
    let p = ModelParams::new(0.01, 1.0, 1.0).unwrap();
    let box_len = 4.0;
    for seed in 0..3 {
        let modes = random_modes(seed, box_len);
        let (t1, a1) = errors(&p, &slab(16, &modes, box_len));
        let (t2, a2) = errors(&p, &slab(32, &modes, box_len));
        let (rt, ra) = (t1 / t2, a1 / a2);
        assert!((3.0..5.0).contains(&rt), "torsion ratio {rt}");
        assert!((3.0..5.0).contains(&ra), "agreement ratio {ra}");
    }
}
