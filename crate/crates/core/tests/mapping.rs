use gravlat::continuum::MassSign;
use gravlat::lattice::LatticeSpec;
use gravlat::manybody::eigen::{ground_state, EigenOptions};
use gravlat::manybody::fock::{BosonMode, FockSpace, Species};
use gravlat::manybody::hamiltonian::{assemble_simulator_hamiltonian, assemble_target_hamiltonian, mapping_residual};
use gravlat::ModelParams;

fn cell_space(n_max: usize, sector: Option<usize>) -> (LatticeSpec, FockSpace) {
    let modes = vec![BosonMode { cell: 0, species: Species::X }, BosonMode { cell: 0, species: Species::Z }];
    (LatticeSpec::new(1, 1).unwrap(), FockSpace::new(2, modes, n_max, sector).unwrap())
}

fn residual(g: f64, sign: MassSign) -> f64 {
    let p = ModelParams::new(g, 1.0, 1.0).unwrap();
    let (spec, space) = cell_space(3, None);
    let hs = assemble_simulator_hamiltonian(&p, &spec, &space).unwrap();
    let ht = assemble_target_hamiltonian(&p, &spec, &space, sign).unwrap();
    mapping_residual(&hs, &ht, &space, 2).unwrap().residual
}

#[test]
fn residual_shrinks_with_coupling() {
    for sign in [MassSign::Legendre, MassSign::Flipped] {
        let r: Vec<f64> = [1e-2, 1e-3].iter().map(|&g| residual(g, sign)).collect();
        println!("{sign:?} {r:?} ratio {}", r[0] / r[1]);
        assert!(r[0] > r[1]);
    }
}

#[test]
fn ground_energies_agree_within_bound() {
    let p = ModelParams::new(1e-3, 1.0, 1.0).unwrap();
    let (spec, space) = cell_space(2, None);
    let hs = assemble_simulator_hamiltonian(&p, &spec, &space).unwrap();
    let ht = assemble_target_hamiltonian(&p, &spec, &space, MassSign::Legendre).unwrap();
    let m = mapping_residual(&hs, &ht, &space, 2).unwrap();
    let opts = EigenOptions::default();
    let es = ground_state(&hs, &opts).unwrap().energy;
    let et = ground_state(&ht, &opts).unwrap().energy;
    println!("{es} {et} {m:?}");
    assert!((es - et - m.offset).abs() <= m.residual * (1.0 + 1e-9) + 1e-9);
}
