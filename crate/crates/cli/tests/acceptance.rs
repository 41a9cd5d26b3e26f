//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines appear in order and uncaptured. The
//! process exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use gravlat::continuum::{hgr_quadratic_form, integrate_out_geometry, normal_modes, CurrentField, MassSign};
use gravlat::designer::{optical_params, optical_params_exact};
use gravlat::geometry::spin_connection_general;
use gravlat::gravity_action::{fierz_pauli_quadratic, legendre_residual, palatini_orders};
use gravlat::lattice::{
    bloch_f, dirac_slopes, fermi_kx_closed_form, fermi_kx_naive_form, fermi_points, Couplings, LatticeSpec,
};
use gravlat::manybody::eigen::EigenOptions;
use gravlat::manybody::fock::{BosonMode, FockSpace, Species};
use gravlat::manybody::hamiltonian::{kinetic_piece_match, kinetic_piece_residual};
use gravlat::manybody::qmap::q_map_commutators;
use gravlat::manybody::sweep::{loglog_slope, map_residual_sweep, wick_sweep, Model};
use gravlat::samples::{BandLimited, Components};
use gravlat::symbolic::{Monomial, QSqrt2};
use gravlat::{Grid2D, ModelParams, TimeBoundary};
use gravlat_cli::commands::{connection_errors, periodic_general_slab, phase_space_points};
use gravlat_cli::{execute, parse_config};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn require(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn jz_sweep() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 10.0).collect()
}

fn fermi_suite() -> Check {
    let mut worst_f = 0.0_f64;
    let mut worst_closed = 0.0_f64;
    for jz in jz_sweep() {
        let c = Couplings::new(1.0, 1.0, jz);
        let p = fermi_points(&c).map_err(err)?;
        for k in [p.plus(), p.minus()] {
            worst_f = worst_f.max(bloch_f(&c, k).norm());
        }
        worst_closed = worst_closed.max((p.kx - fermi_kx_closed_form(&c)).abs());
    }
    let c = Couplings::new(1.0, 1.0, 1.0);
    let naive = fermi_kx_naive_form(&c).ok_or("naive form undefined at Jz = 1")?;
    let naive_res = bloch_f(&c, [naive, 0.0]).norm();
    require(
        worst_f <= 1e-12 && worst_closed <= 1e-9 && naive_res > 1e-12,
        format!("max|f|={worst_f:.2e} closed_form_err={worst_closed:.2e} naive_form_residual(Jz=1)={naive_res:.3}"),
    )
}

fn slope_suite() -> Check {
    let mut worst = 0.0_f64;
    for jz in jz_sweep() {
        worst = worst.max(dirac_slopes(&Couplings::new(1.0, 1.0, jz)).map_err(err)?.gradient_error);
    }
    let iso = dirac_slopes(&Couplings::isotropic(1.0)).map_err(err)?;
    let iso_err = [iso.a_plus, iso.a_minus, iso.b_plus, iso.b_minus]
        .iter()
        .map(|s| (s.abs() - 1.5).abs())
        .fold(0.0, f64::max);
    let (vx, vy) = Couplings::isotropic(2.0 / 3.0).velocities();
    let v_err = (vx - 1.0).abs().max((vy - 1.0).abs());
    require(
        worst <= 1e-6 && iso_err <= 1e-12 && v_err <= 1e-12,
        format!("gradient_rel_err={worst:.2e} |A|,|B|-1.5={iso_err:.1e} velocity-1={v_err:.1e}"),
    )
}

fn geometry_suite() -> Check {
    let p = ModelParams::new(0.01, 1.0, 1.0).map_err(err)?;
    let box_len = [4.0, 4.0];
    let field = BandLimited::random(7, 6, 2, 0.05, Components::Diagonal, box_len, None);
    let mut out = Vec::new();
    for n in [16, 32] {
        let h = box_len[0] / n as f64;
        let slab = field.slab(Grid2D::new(n, n, h).map_err(err)?, 3, h, TimeBoundary::Open).map_err(err)?;
        out.push(connection_errors(&p, &slab).map_err(err)?);
    }
    let torsion = out[0].0 / out[1].0;
    let agree = out[0].1 / out[1].1;
    let ok = |r: f64| (3.0..=5.0).contains(&r);
    require(ok(torsion) && ok(agree), format!("torsion_ratio={torsion:.3} agreement_ratio={agree:.3}"))
}

fn action_suite() -> Check {
    let p = ModelParams::new(0.01, 1.0, 1.0).map_err(err)?;
    let mut cfg = parse_config("command = \"action-check\"\n").map_err(err)?;
    cfg.params = p;
    let mut low = 0.0_f64;
    let mut quad = 0.0_f64;
    for seed in 0..5 {
        let xi = periodic_general_slab(&cfg, seed).map_err(err)?;
        let v = spin_connection_general(&p, &xi);
        let r = palatini_orders(&p, &xi, &v).map_err(err)?;
        low = low.max(r.s0.abs()).max(r.s1.abs());
        let b6 = fierz_pauli_quadratic(&p, &xi);
        // the expansion carries an overall minus against the quadratic form
        quad = quad.max((p.kappa() * r.s2 + b6).abs() / b6.abs());
    }
    let leg = legendre_residual(&p, &phase_space_points(0, 100)).map_err(err)?;
    require(
        low <= 1e-12 && quad <= 1e-8 && leg <= 1e-12,
        format!("max|S0|,|S1|={low:.1e} quadratic_rel={quad:.1e} legendre={leg:.1e}"),
    )
}

fn graviton_mass() -> Check {
    let mut worst = 0.0_f64;
    let mut signatures_ok = true;
    for g in [1e-3, 1e-2] {
        for mu in [0.1, 0.5, 1.0] {
            let p = ModelParams::new(g, 1.0, mu).map_err(err)?;
            let m = normal_modes(&hgr_quadratic_form(&p, MassSign::Legendre).map_err(err)?).map_err(err)?;
            worst = worst.max((m.omega_plus - mu).abs()).max((m.omega_minus - mu).abs());
            signatures_ok &= m.signature() == (1, -1);
        }
    }
    require(worst <= 1e-10 && signatures_ok, format!("max|omega-mu|={worst:.1e} signature_(+,-)={signatures_ok}"))
}

fn designer_consistency() -> Check {
    let [dx, dz, delx, delz] = optical_params_exact();
    let exact = dx.div(&dz) == Some(Monomial::constant(QSqrt2::sqrt2_times(1, 1)))
        && delz.div(&delx) == Some(Monomial::rational(2, 1))
        && delx * dx * dx == Monomial::new(QSqrt2::rational(2, 3), 0, 0, -1, 0)
        && delz * dz * dz == Monomial::new(QSqrt2::rational(2, 3), 0, 0, -1, 0);
    let mut amp = 0.0_f64;
    let mut vel = 0.0_f64;
    for g in [1e-3, 1e-2] {
        for l in [1.0, 2.0] {
            let p = ModelParams::new(g, l, 1.0).map_err(err)?;
            let op = optical_params(&p).map_err(err)?;
            let target = 2.0 / (3.0 * l);
            amp = amp.max((op.background_jx() - target).abs()).max((op.background_jz() - target).abs());
            let c = op.background_couplings();
            let s = dirac_slopes(&c).map_err(err)?;
            let (vx, vy) = c.velocities();
            vel = vel.max((vx - 1.0 / l).abs()).max((vy - 1.0 / l).abs()).max((s.a_minus - 1.0 / l).abs());
        }
    }
    require(
        exact && amp <= 1e-12 && vel <= 1e-10,
        format!("exact_ratios={exact} max|Delta D^2-2/(3l)|={amp:.1e} max|v-1/l|={vel:.1e}"),
    )
}

fn mapping_suite() -> Check {
    let spec = LatticeSpec::new(1, 1).map_err(err)?;
    let modes = vec![BosonMode { cell: 0, species: Species::X }, BosonMode { cell: 0, species: Species::Z }];
    let space = FockSpace::new(spec.n_modes(), modes, 3, None).map_err(err)?;
    let base = ModelParams::new(1e-2, 1.0, 1.0).map_err(err)?;
    let pts = map_residual_sweep(&[1e-2, 1e-3], &base, &spec, &space, MassSign::Legendre, 2).map_err(err)?;
    let ratio = pts[0].residual / pts[1].residual;
    let mut kin = 0.0_f64;
    for g in [1e-2, 1e-3] {
        kin = kin.max(kinetic_piece_residual(&ModelParams::new(g, 1.0, 1.0).map_err(err)?, 3, 2).map_err(err)?);
    }
    let exact = kinetic_piece_match().exact();
    require(
        (5.0..=20.0).contains(&ratio) && kin <= 1e-12 && exact,
        format!(
            "R(1e-2)={:.3e} R(1e-3)={:.3e} ratio={ratio:.1} kinetic_residual={kin:.1e} kinetic_exact={exact}",
            pts[0].residual, pts[1].residual
        ),
    )
}

fn q_map() -> Check {
    let c = q_map_commutators();
    let want = [[QSqrt2::one(), QSqrt2::rational(-1, 3)], [QSqrt2::rational(-1, 3), QSqrt2::one()]];
    require(
        c == want,
        format!("[q1,q1d]={} [q2,q2d]={} [q1,q2d]={} (not canonical)", c[0][0], c[1][1], c[0][1]),
    )
}

fn wick_signature() -> Check {
    let spec = LatticeSpec::new(2, 1).map_err(err)?;
    let modes = vec![BosonMode { cell: 0, species: Species::X }, BosonMode { cell: 0, species: Species::Z }];
    let space = FockSpace::new(spec.n_modes(), modes, 2, Some(spec.n_modes() / 2)).map_err(err)?;
    let base = ModelParams::new(1e-2, 1.0, 1.0).map_err(err)?;
    let grid = [0.0, 1e-3, 3e-3, 1e-2];
    let pts = wick_sweep(&grid, &base, &spec, &space, Model::Simulator, 0, &EigenOptions::default()).map_err(err)?;
    let r: Vec<f64> = pts.iter().map(|p| p.wick_residual).collect();
    let monotone = r[1..].windows(2).all(|w| w[1] > w[0]) && r[1] > r[0];
    let slope = loglog_slope(&grid[1..], &r[1..]).map_err(err)?;
    require(
        r[0] <= 1e-10 && monotone && (0.7..=1.3).contains(&slope),
        format!("R={:.2e},{:.2e},{:.2e},{:.2e} monotone={monotone} slope={slope:.2}", r[0], r[1], r[2], r[3]),
    )
}

/// `ln int exp(-H) / int exp(-H_0)` for `H = m x y + b1 x + b2 y` with `m > 0`.
///
/// In `u = (x + y)/sqrt2`, `w = (x - y)/sqrt2` the quadratic part is
/// `m (u^2 - w^2) / 2`; the `w` contour is rotated to `w = i eta`, leaving a
/// positive Gaussian with an oscillating linear term. Trapezoid rule on a
/// square box, which is spectrally accurate for Gaussians.
fn gaussian_log_ratio(m: f64, b1: f64, b2: f64) -> f64 {
    let bu = (b1 + b2) / 2f64.sqrt();
    let bw = (b1 - b2) / 2f64.sqrt();
    let half = 12.0 / m.sqrt();
    let n = 601;
    let h = 2.0 * half / (n - 1) as f64;
    let (mut re, mut im, mut z0) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let u = -half + i as f64 * h;
        for j in 0..n {
            let eta = -half + j as f64 * h;
            let g = (-0.5 * m * (u * u + eta * eta)).exp();
            let phase = -bw * eta;
            let amp = g * (-bu * u).exp();
            re += amp * phase.cos();
            im += amp * phase.sin();
            z0 += g;
        }
    }
    debug_assert!(im.abs() <= 1e-9 * re.abs());
    (re / z0).ln()
}

fn integrate_out() -> Check {
    let mut worst = 0.0_f64;
    let mut symbolic = true;
    let (j1, j2) = (0.7, -0.4);
    for (g, l, mu) in [(1e-2, 1.0, 1.0), (1e-3, 2.0, 0.5), (2e-2, 1.0, 1.5)] {
        let p = ModelParams::new(g, l, mu).map_err(err)?;
        let grid = Grid2D::new(4, 4, 1.0).map_err(err)?;
        let currents = CurrentField::diagonal(grid, vec![j1; 16], vec![j2; 16]).map_err(err)?;
        let e = integrate_out_geometry(&currents, &p, MassSign::Flipped).map_err(err)?;
        let want = Monomial::new(QSqrt2::rational(-4, 1), 1, 1, -2, -2);
        symbolic &= e.coefficient_exact == want;
        let kappa = 8.0 * PI * g;
        let log_ratio = gaussian_log_ratio(kappa * mu * mu, kappa / l * j1, kappa / l * j2);
        // effective energy is minus the log of the partition-function ratio
        worst = worst.max((e.density[0] + log_ratio).abs() / log_ratio.abs());
    }
    require(
        symbolic && worst <= 1e-8,
        format!("symbolic_-4piG/(l^2mu^2)={symbolic} quadrature_rel_err={worst:.1e}"),
    )
}

fn determinism() -> Check {
    let toml = "command = \"wick-sweep\"\nseed = 11\n[lattice]\ncells = [2, 1]\n[sweep]\nG = [0.0, 1e-3, 1e-2]\n";
    let dir = tempfile::tempdir().map_err(err)?;
    let mut cfg = parse_config(toml).map_err(err)?;
    cfg.output = dir.path().to_path_buf();
    let mut runs = Vec::new();
    for _ in 0..2 {
        execute(&cfg).map_err(err)?;
        let mut names = std::fs::read_dir(dir.path())
            .map_err(err)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        names.sort();
        let mut files = Vec::new();
        for path in names {
            let text = std::fs::read_to_string(&path).map_err(err)?;
            let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
            // wall time is the one field allowed to differ
            let text = if name == "manifest.txt" {
                text.lines().filter(|l| !l.starts_with("wall_time_s")).collect::<Vec<_>>().join("\n")
            } else {
                text
            };
            files.push((name, text));
        }
        runs.push(files);
    }
    require(
        runs[0] == runs[1] && !runs[0].is_empty(),
        format!("{} artifacts byte-identical={}", runs[0].len(), runs[0] == runs[1]),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("fermi points", fermi_suite),
        ("dirac slopes", slope_suite),
        ("geometry convergence", geometry_suite),
        ("action orders", action_suite),
        ("graviton mass", graviton_mass),
        ("designer consistency", designer_consistency),
        ("hamiltonian mapping", mapping_suite),
        ("q-map commutators", q_map),
        ("wick signature", wick_signature),
        ("integrate-out coefficient", integrate_out),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = check();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(d) => println!("criterion {:>2} PASS {name}: {d} ({secs:.2}s)", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {d} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
