//! Command dispatch: each command turns a [`RunConfig`] into named text
//! artifacts; [`execute`] writes them with a manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gravlat::continuum::{hgr_quadratic_form, integrate_out_geometry, normal_modes, CurrentField, MassSign};
use gravlat::designer::{design_sheet, hubbard_integrals, optical_params_with_offsets, weak_fluctuation_check, HubbardIntegrals};
use gravlat::geometry::{spin_connection_gauge_fixed, spin_connection_general, torsion_residual, SpacetimeSlab};
use gravlat::gravity_action::{
    fierz_pauli_quadratic, fierz_pauli_standard, legendre_residual, massive_fp_action, palatini_orders,
};
use gravlat::lattice::{
    bands, couplings_from_dreibein, dirac_slopes, dreibein_from_couplings, fermi_kx_closed_form, fermi_kx_naive_form,
    fermi_points, bloch_f, cell_fluctuation, Couplings, LatticeSpec,
};
use gravlat::manybody::correlators::correlators_and_wick;
use gravlat::manybody::eigen::{ground_state, lowest_eigenvalues, thermal_expectation, EigenOptions, GroundState};
use gravlat::manybody::fock::{BosonMode, FockSpace, Species};
use gravlat::manybody::hamiltonian::{kinetic_piece_match, kinetic_piece_residual, mapped_frequency_squares};
use gravlat::manybody::io::{write_matrix, write_state};
use gravlat::manybody::sparse::SparseOperator;
use gravlat::manybody::sweep::{
    assemble, loglog_slope, map_residual_sweep, map_table, wick_sweep, wick_table,
};
use gravlat::samples::{BandLimited, Components};
use gravlat::{Category, Grid2D, ModelParams, TimeBoundary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{CommandName, ConfigErrors, RunConfig};

/// One output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub content: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// Truncation-convergence deltas and similar diagnostics for the manifest.
    pub deltas: Vec<(String, String)>,
}

impl Outcome {
    fn file(&mut self, name: &str, content: String) {
        self.artifacts.push(Artifact { name: name.to_string(), content });
    }

    fn delta(&mut self, key: &str, value: String) {
        self.deltas.push((key.to_string(), value));
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.artifacts.iter().find(|a| a.name == name).map(|a| a.content.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigErrors),
    #[error("{0}")]
    Core(#[from] gravlat::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    /// 2 configuration or domain error, 3 non-convergence, 4 resource cap, 1 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Core(e) => match e.category() {
                Category::Domain | Category::Parse => 2,
                Category::NonConvergence => 3,
                Category::ResourceCap => 4,
            },
            RunError::Io { .. } => 1,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Core(e) => match e.category() {
                Category::Domain => "domain",
                Category::Parse => "parse",
                Category::NonConvergence => "non-convergence",
                Category::ResourceCap => "resource-cap",
            },
            RunError::Io { .. } => "io",
        }
    }
}

type Res<T> = Result<T, RunError>;

fn f(x: f64) -> String {
    format!("{x:?}")
}

/// Runs the configured command without touching the filesystem.
pub fn compute(cfg: &RunConfig) -> Res<Outcome> {
    let mut out = Outcome::default();
    match cfg.command {
        CommandName::Dispersion => dispersion(cfg, &mut out)?,
        CommandName::FermiPoints => fermi(cfg, &mut out)?,
        CommandName::Slopes => slopes(cfg, &mut out)?,
        CommandName::MapCouplings => map_couplings(cfg, &mut out)?,
        CommandName::SpinConnection => spin_connection(cfg, &mut out)?,
        CommandName::ActionCheck => action_check(cfg, &mut out)?,
        CommandName::GravitonModes => graviton_modes(cfg, &mut out)?,
        CommandName::Design => design(cfg, &mut out)?,
        CommandName::Spectrum => spectrum(cfg, &mut out)?,
        CommandName::GroundState => ground(cfg, &mut out)?,
        CommandName::Correlators => correlators(cfg, &mut out)?,
        CommandName::WickSweep => wick(cfg, &mut out)?,
        CommandName::MapResidual => map_residual(cfg, &mut out)?,
        CommandName::IntegrateOut => integrate_out(cfg, &mut out)?,
    }
    Ok(out)
}

/// Runs the command and writes its artifacts and `manifest.txt` into `cfg.output`.
pub fn execute(cfg: &RunConfig) -> Res<Outcome> {
    let start = Instant::now();
    let out = compute(cfg)?;
    let dir = &cfg.output;
    std::fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.clone(), source })?;
    for a in &out.artifacts {
        write(&dir.join(&a.name), &a.content)?;
    }
    let mut m = String::from("# gravlat run manifest\n");
    let _ = writeln!(m, "code_version={} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
    let names: Vec<&str> = out.artifacts.iter().map(|a| a.name.as_str()).collect();
    let _ = writeln!(m, "artifacts={}", names.join(","));
    m.push_str(&cfg.echo());
    for (k, v) in &out.deltas {
        let _ = writeln!(m, "{k}={v}");
    }
    let _ = writeln!(m, "wall_time_s={:?}", start.elapsed().as_secs_f64());
    write(&dir.join("manifest.txt"), &m)?;
    Ok(out)
}

fn write(path: &Path, content: &str) -> Res<()> {
    std::fs::write(path, content).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

fn dispersion(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    let spec = LatticeSpec::new(cfg.lattice.k_grid, cfg.lattice.k_grid)?;
    let mut s = String::from("kx,ky,E1,E2\n");
    for k in spec.brillouin_grid() {
        let (lo, hi) = bands(&cfg.lattice.couplings, k);
        let _ = writeln!(s, "{},{},{},{}", f(k[0]), f(k[1]), f(lo), f(hi));
    }
    out.file("bands.csv", s);
    Ok(())
}

fn sweep_couplings(cfg: &RunConfig) -> Vec<Couplings> {
    let c = cfg.lattice.couplings;
    cfg.sweep.jz.iter().map(|&jz| Couplings::new(c.jx, c.jy, jz)).collect()
}

fn fermi_row(c: &Couplings) -> String {
    let head = format!("{},{},{}", f(c.jx), f(c.jy), f(c.jz));
    match fermi_points(c) {
        Ok(p) => {
            let closed = fermi_kx_closed_form(c);
            let naive = fermi_kx_naive_form(c);
            let naive_res = naive.map_or_else(|| "NA".to_string(), |k| f(bloch_f(c, [k, 0.0]).norm()));
            format!(
                "{head},ok,{},{},{},{},{},{},{},{}",
                f(p.plus()[0]),
                f(p.minus()[0]),
                f(p.residual),
                p.iterations,
                f(closed),
                f((closed - p.kx).abs()),
                naive.map_or_else(|| "NA".to_string(), f),
                naive_res
            )
        }
        Err(e) => format!("{head},{},NA,NA,NA,NA,NA,NA,NA,NA", status(&e)),
    }
}

fn status(e: &gravlat::Error) -> &'static str {
    match e {
        gravlat::Error::NoDiracPoints { .. } => "no-dirac-points",
        _ => "error",
    }
}

const FERMI_HEADER: &str =
    "jx,jy,jz,status,kx_plus,kx_minus,residual,iterations,closed_form,closed_form_error,naive_form,naive_residual\n";

fn fermi(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    fermi_points(&cfg.lattice.couplings)?;
    out.file("fermi_points.csv", format!("{FERMI_HEADER}{}\n", fermi_row(&cfg.lattice.couplings)));
    let mut s = String::from(FERMI_HEADER);
    for c in sweep_couplings(cfg) {
        s.push_str(&fermi_row(&c));
        s.push('\n');
    }
    out.file("fermi_sweep.csv", s);
    Ok(())
}

const SLOPE_HEADER: &str = "jx,jy,jz,status,a_plus,a_minus,b_plus,b_minus,gradient_error,velocity_x,velocity_y\n";

fn slope_row(c: &Couplings) -> String {
    let head = format!("{},{},{}", f(c.jx), f(c.jy), f(c.jz));
    match dirac_slopes(c) {
        Ok(d) => {
            let (vx, vy) = c.velocities();
            format!(
                "{head},ok,{},{},{},{},{},{},{}",
                f(d.a_plus),
                f(d.a_minus),
                f(d.b_plus),
                f(d.b_minus),
                f(d.gradient_error),
                f(vx),
                f(vy)
            )
        }
        Err(e) => format!("{head},{},NA,NA,NA,NA,NA,NA,NA", status(&e)),
    }
}

fn slopes(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    dirac_slopes(&cfg.lattice.couplings)?;
    out.file("slopes.csv", format!("{SLOPE_HEADER}{}\n", slope_row(&cfg.lattice.couplings)));
    let mut s = String::from(SLOPE_HEADER);
    for c in sweep_couplings(cfg) {
        s.push_str(&slope_row(&c));
        s.push('\n');
    }
    out.file("slopes_sweep.csv", s);
    Ok(())
}

fn geometry_grid(cfg: &RunConfig, refine: usize) -> Res<Grid2D> {
    Ok(Grid2D::new(cfg.geometry.n * refine, cfg.geometry.n * refine, cfg.geometry.h / refine as f64)?)
}

fn box_len(cfg: &RunConfig) -> [f64; 2] {
    let l = cfg.geometry.n as f64 * cfg.geometry.h;
    [l, l]
}

fn map_couplings(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    let p = &cfg.params;
    let c = cfg.lattice.couplings;
    let mut s = String::from("jx,jy,jz,xi1x,xi2y\n");
    let (a, b) = cell_fluctuation(&c, p).map_err(|reason| gravlat::Error::Inversion { cell: 0, reason })?;
    let _ = writeln!(s, "{},{},{},{},{}", f(c.jx), f(c.jy), f(c.jz), f(a), f(b));
    out.file("j_to_xi.csv", s);

    let grid = geometry_grid(cfg, 1)?;
    let field = BandLimited::random(cfg.seed, cfg.geometry.modes, cfg.geometry.kmax, cfg.geometry.amplitude, Components::Diagonal, box_len(cfg), None);
    let slab = field.slab(grid, 3, cfg.geometry.ht, TimeBoundary::Open)?;
    let xi = slab.diagonal_slice(0);
    let cf = couplings_from_dreibein(&xi, p)?;
    let back = dreibein_from_couplings(&cf, p)?;
    let mut s = String::from("ix,iy,xi1x,xi2y,jx,jy,jz,round_trip_error\n");
    let mut worst = 0.0_f64;
    for iy in 0..grid.ny() {
        for ix in 0..grid.nx() {
            let i = grid.index(ix as isize, iy as isize);
            let e = (back.xi1x[i] - xi.xi1x[i]).abs().max((back.xi2y[i] - xi.xi2y[i]).abs());
            worst = worst.max(e);
            let j = cf.cells[i];
            let _ = writeln!(s, "{ix},{iy},{},{},{},{},{},{}", f(xi.xi1x[i]), f(xi.xi2y[i]), f(j.jx), f(j.jy), f(j.jz), f(e));
        }
    }
    out.file("xi_to_j.csv", s);
    out.delta("round_trip_max_error", f(worst));
    Ok(())
}

fn diagonal_slab(cfg: &RunConfig, refine: usize) -> Res<SpacetimeSlab> {
    let field = BandLimited::random(cfg.seed, cfg.geometry.modes, cfg.geometry.kmax, cfg.geometry.amplitude, Components::Diagonal, box_len(cfg), None);
    Ok(field.slab(geometry_grid(cfg, refine)?, cfg.geometry.nt, cfg.geometry.ht / refine as f64, TimeBoundary::Open)?)
}

/// Torsion residual of the general solution and its largest deviation from the gauge-fixed form.
pub fn connection_errors(p: &ModelParams, slab: &SpacetimeSlab) -> gravlat::Result<(f64, f64)> {
    let v = spin_connection_general(p, slab);
    let torsion = torsion_residual(p, slab, &v)?;
    let mut agree = 0.0_f64;
    for t in 0..slab.nt() {
        agree = agree.max(spin_connection_gauge_fixed(p, &slab.diagonal_slice(t)).max_diff(&v.slice(t)));
    }
    Ok((torsion, agree))
}

fn spin_connection(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    let p = &cfg.params;
    let coarse = diagonal_slab(cfg, 1)?;
    let fine = diagonal_slab(cfg, 2)?;
    let (t1, a1) = connection_errors(p, &coarse)?;
    let (t2, a2) = connection_errors(p, &fine)?;
    let mut s = String::new();
    let _ = writeln!(s, "torsion_residual={}", f(t1));
    let _ = writeln!(s, "gauge_fixed_agreement={}", f(a1));
    let _ = writeln!(s, "refined.torsion_residual={}", f(t2));
    let _ = writeln!(s, "refined.gauge_fixed_agreement={}", f(a2));
    let _ = writeln!(s, "torsion_ratio={}", f(t1 / t2));
    let _ = writeln!(s, "agreement_ratio={}", f(a1 / a2));
    out.file("spin_connection.txt", s);
    let mid = coarse.nt() / 2;
    let v = spin_connection_gauge_fixed(p, &coarse.diagonal_slice(mid));
    let g = coarse.grid();
    for (name, comp) in [("v0x.csv", v.v0x()), ("v0y.csv", v.v0y()), ("v1y.csv", v.v1y()), ("v2x.csv", v.v2x())] {
        out.file(name, field_csv(g, comp));
    }
    Ok(())
}

/// `ix,iy,value` in storage order.
pub fn field_csv(g: &Grid2D, data: &[f64]) -> String {
    let mut s = String::from("ix,iy,value\n");
    for iy in 0..g.ny() {
        for ix in 0..g.nx() {
            let _ = writeln!(s, "{ix},{iy},{}", f(data[g.index(ix as isize, iy as isize)]));
        }
    }
    s
}

/// Seeded general configuration periodic in space and time.
pub fn periodic_general_slab(cfg: &RunConfig, seed: u64) -> gravlat::Result<SpacetimeSlab> {
    let g = &cfg.geometry;
    let period = g.nt as f64 * g.ht;
    let field = BandLimited::random(seed, g.modes.max(9), g.kmax, g.amplitude, Components::All, box_len(cfg), Some(period));
    field.slab(Grid2D::new(g.n, g.n, g.h)?, g.nt, g.ht, TimeBoundary::Periodic)
}

pub fn phase_space_points(seed: u64, count: usize) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0))).collect()
}

fn action_check(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    let p = &cfg.params;
    let xi = periodic_general_slab(cfg, cfg.seed)?;
    let v = spin_connection_general(p, &xi);
    let mut report = palatini_orders(p, &xi, &v)?;
    report.s_massive = Some(massive_fp_action(p, &xi));
    let b6 = fierz_pauli_quadratic(p, &xi);
    let fp = fierz_pauli_standard(p, &xi);
    let k = p.kappa();
    report.residuals.push(("quadratic_vs_fierz_pauli".into(), (k * report.s2 + b6).abs() / b6.abs().max(f64::MIN_POSITIVE)));
    report.residuals.push((
        "fierz_pauli_normalization".into(),
        (b6 - 2.0 * std::f64::consts::PI * p.g() * fp).abs() / b6.abs().max(f64::MIN_POSITIVE),
    ));
    report.residuals.push(("legendre".into(), legendre_residual(p, &phase_space_points(cfg.seed, cfg.geometry.samples))?));
    let mut s = report.to_key_value();
    let _ = writeln!(s, "fierz_pauli_quadratic={}", f(b6));
    let _ = writeln!(s, "fierz_pauli_standard={}", f(fp));
    let _ = writeln!(s, "torsion_residual={}", f(torsion_residual(p, &xi, &v)?));
    out.file("action.txt", s);
    Ok(())
}

fn graviton_modes(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    let form = hgr_quadratic_form(&cfg.params, cfg.model.mass_sign)?;
    let m = normal_modes(&form)?;
    let mut s = String::new();
    let _ = writeln!(s, "omega_plus={}", f(m.omega_plus));
    let _ = writeln!(s, "omega_minus={}", f(m.omega_minus));
    let _ = writeln!(s, "signature={}", m.signature_label());
    s.push_str(&form.coefficient_table());
    let w = mapped_frequency_squares(&cfg.params, cfg.model.mass_sign)?;
    let _ = writeln!(s, "mapped_omega_squared={},{}", f(w[0]), f(w[1]));
    out.file("graviton_modes.txt", s);
    Ok(())
}

fn hubbard_block(h: &HubbardIntegrals) -> String {
    let mut s = String::new();
    for (axis, t) in ["x", "y", "z"].iter().zip(h.t) {
        let _ = writeln!(s, "hubbard.t_{axis}={}  # {}", f(t), HubbardIntegrals::T_METHOD);
    }
    let _ = writeln!(s, "hubbard.U={}  # {}", f(h.u), HubbardIntegrals::U_METHOD);
    for (axis, w) in ["x", "y", "z"].iter().zip(h.sigma) {
        let _ = writeln!(s, "hubbard.sigma_{axis}={}", f(w));
    }
    let _ = writeln!(s, "hubbard.recoil_energy={}", f(h.recoil_energy));
    let _ = writeln!(s, "flag.tight_binding={}", h.tight_binding_ok);
    s
}

fn design(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    let d = &cfg.designer;
    let op = optical_params_with_offsets(&cfg.params, d.jx_offset, d.jz_offset)?;
    let mut s = design_sheet(&cfg.params, &op);
    s.push_str(&hubbard_block(&hubbard_integrals(d.v0, d.a_s, d.mass, d.spacing)?));
    out.file("design.txt", s);
    Ok(())
}

fn space(cfg: &RunConfig, n_max: usize) -> Res<(LatticeSpec, FockSpace)> {
    let spec = cfg.lattice.spec();
    let mut modes = Vec::new();
    for &cell in &cfg.truncation.boson_cells {
        modes.push(BosonMode { cell, species: Species::X });
        modes.push(BosonMode { cell, species: Species::Z });
    }
    let sector = cfg.truncation.sector.resolve(spec.n_modes());
    let s = FockSpace::with_cap(spec.n_modes(), modes, n_max, sector, cfg.truncation.dim_cap)?;
    Ok((spec, s))
}

fn options(cfg: &RunConfig) -> EigenOptions {
    EigenOptions { dense_cap: cfg.truncation.dense_cap, ..EigenOptions::default() }
}

fn hamiltonian(cfg: &RunConfig, n_max: usize) -> Res<(LatticeSpec, FockSpace, SparseOperator)> {
    let (spec, s) = space(cfg, n_max)?;
    let h = assemble(cfg.model.hamiltonian, &cfg.params, &spec, &s)?;
    Ok((spec, s, h))
}

fn solve(cfg: &RunConfig, out: &mut Outcome) -> Res<(FockSpace, GroundState)> {
    let (_, s, h) = hamiltonian(cfg, cfg.truncation.n_max)?;
    let gs = ground_state(&h, &options(cfg))?;
    if cfg.truncation.n_max > 0 {
        let (_, _, h2) = hamiltonian(cfg, cfg.truncation.n_max - 1)?;
        let e2 = ground_state(&h2, &options(cfg))?.energy;
        out.delta("truncation_delta.E0", f(gs.energy - e2));
    }
    out.delta("basis", s.manifest());
    Ok((s, gs))
}

fn spectrum(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    let n_max = cfg.truncation.n_max;
    let (_, s, h) = hamiltonian(cfg, n_max)?;
    let ev = lowest_eigenvalues(&h, cfg.model.levels, &options(cfg))?;
    let mut csv = String::from("index,energy\n");
    for (i, e) in ev.iter().enumerate() {
        let _ = writeln!(csv, "{i},{}", f(*e));
    }
    out.file("spectrum.csv", csv);
    if n_max > 0 {
        let (_, _, h2) = hamiltonian(cfg, n_max - 1)?;
        let e2 = lowest_eigenvalues(&h2, 1, &options(cfg))?;
        out.delta("truncation_delta.E0", f(ev[0] - e2[0]));
    }
    let mut summary = String::new();
    let _ = writeln!(summary, "basis={}", s.manifest());
    let _ = writeln!(summary, "temperature={}", f(cfg.model.temperature));
    if s.dim() <= cfg.truncation.dense_cap {
        let energy = thermal_expectation(&h, cfg.model.temperature, &h, &options(cfg))?;
        let number = thermal_expectation(&h, cfg.model.temperature, &s.fermion_number(), &options(cfg))?;
        let _ = writeln!(summary, "thermal_energy={}", f(energy));
        let _ = writeln!(summary, "thermal_fermion_number={}", f(number));
    }
    out.file("spectrum.txt", summary);
    Ok(())
}

fn ground(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    let (s, gs) = solve(cfg, out)?;
    out.file("state.csv", write_state(&s, gs.state()));
    let mut t = String::new();
    let _ = writeln!(t, "energy={}", f(gs.energy));
    let _ = writeln!(t, "degeneracy={}", gs.degeneracy());
    let _ = writeln!(t, "eigen_residual={}", f(gs.residual));
    let _ = writeln!(t, "iterations={}", gs.iterations);
    let _ = writeln!(t, "method={:?}", gs.method);
    if cfg.params.g() > 0.0 && !s.boson_modes().is_empty() {
        let op = optical_params_with_offsets(&cfg.params, cfg.designer.jx_offset, cfg.designer.jz_offset)?;
        let w = weak_fluctuation_check(gs.state(), &s, &op, cfg.designer.threshold)?;
        for (m, r) in &w.ratios {
            let _ = writeln!(t, "weak_fluctuation.{}{}={}", m.species, m.cell, f(*r));
        }
        let _ = writeln!(t, "weak_fluctuation.pass={}", w.passes());
    }
    out.file("ground_state.txt", t);
    Ok(())
}

fn correlators(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    let (s, gs) = solve(cfg, out)?;
    let r = correlators_and_wick(&gs.multiplet, &s, cfg.seed)?;
    let mut summary = format!("energy={}\n", f(gs.energy));
    summary.push_str(&r.to_key_value());
    out.file("correlators.txt", summary);
    out.file("boson_normal.csv", write_matrix(&r.boson_normal));
    out.file("boson_anomalous.csv", write_matrix(&r.boson_anomalous));
    out.file("fermion_two_point.csv", write_matrix(&r.fermion_two_point));
    let mut fp = String::from("i,j,k,l,re,im\n");
    for (q, v) in &r.four_point {
        let _ = writeln!(fp, "{},{},{},{},{},{}", q[0], q[1], q[2], q[3], f(v.re), f(v.im));
    }
    out.file("four_point.csv", fp);
    Ok(())
}

fn wick(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    let (spec, s) = space(cfg, cfg.truncation.n_max)?;
    let pts = wick_sweep(&cfg.sweep.g, &cfg.params, &spec, &s, cfg.model.hamiltonian, cfg.seed, &options(cfg))?;
    out.file("wick_sweep.csv", wick_table(&pts));
    let mut summary = String::new();
    let monotone = pts.windows(2).all(|w| w[1].wick_residual > w[0].wick_residual);
    let _ = writeln!(summary, "monotone_increasing={monotone}");
    let pos: Vec<_> = pts.iter().filter(|p| p.g > 0.0 && p.wick_residual > 0.0).collect();
    if pos.len() >= 2 {
        let x: Vec<f64> = pos.iter().map(|p| p.g).collect();
        let y: Vec<f64> = pos.iter().map(|p| p.wick_residual).collect();
        let _ = writeln!(summary, "loglog_slope={}", f(loglog_slope(&x, &y)?));
    }
    out.file("wick_summary.txt", summary);
    for p in &pts {
        if let Some(d) = p.truncation_delta {
            out.delta(&format!("truncation_delta.E0[G={:?}]", p.g), f(d));
        }
    }
    out.delta("basis", s.manifest());
    Ok(())
}

fn map_residual(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    let (spec, s) = space(cfg, cfg.truncation.n_max)?;
    let pts = map_residual_sweep(&cfg.sweep.g, &cfg.params, &spec, &s, cfg.model.mass_sign, cfg.truncation.window)?;
    out.file("map_residual.csv", map_table(&pts));
    let m = kinetic_piece_match();
    let mut summary = String::new();
    let _ = writeln!(summary, "kinetic_piece.exact={}", m.exact());
    let _ = writeln!(summary, "kinetic_piece.simulator={},{}", m.simulator[0], m.simulator[1]);
    let _ = writeln!(summary, "kinetic_piece.target={},{}", m.target[0], m.target[1]);
    for p in pts.iter().filter(|p| p.g > 0.0) {
        let q = ModelParams::new(p.g, cfg.params.l(), cfg.params.mu())?;
        let r = kinetic_piece_residual(&q, cfg.truncation.n_max, cfg.truncation.window)?;
        let _ = writeln!(summary, "kinetic_piece.residual[G={:?}]={}", p.g, f(r));
    }
    let pos: Vec<_> = pts.iter().filter(|p| p.g > 0.0 && p.residual > 0.0).collect();
    if pos.len() >= 2 {
        let x: Vec<f64> = pos.iter().map(|p| p.g).collect();
        let y: Vec<f64> = pos.iter().map(|p| p.residual).collect();
        let _ = writeln!(summary, "loglog_slope={}", f(loglog_slope(&x, &y)?));
    }
    out.file("map_summary.txt", summary);
    out.delta("basis", s.manifest());
    Ok(())
}

fn integrate_out(cfg: &RunConfig, out: &mut Outcome) -> Res<()> {
    let grid = Grid2D::new(4, 4, cfg.geometry.h)?;
    let [a, b] = cfg.model.currents;
    let currents = CurrentField::diagonal(grid, vec![a; grid.len()], vec![b; grid.len()])?;
    let mut s = String::new();
    for sign in [MassSign::Legendre, MassSign::Flipped] {
        let e = integrate_out_geometry(&currents, &cfg.params, sign)?;
        let tag = if sign == MassSign::Legendre { "legendre" } else { "flipped" };
        let _ = writeln!(s, "{tag}.coefficient={}", f(e.coefficient));
        let _ = writeln!(s, "{tag}.coefficient_exact={}", e.coefficient_exact);
        let _ = writeln!(s, "{tag}.density={}", f(e.density[0]));
    }
    let _ = writeln!(s, "selected={}", if cfg.model.mass_sign == MassSign::Legendre { "legendre" } else { "flipped" });
    out.file("integrate_out.txt", s);
    Ok(())
}
