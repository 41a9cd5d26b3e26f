//! Finite-lattice many-body layer: Fock spaces, sparse operators,
//! eigen-solvers, the simulator and target Hamiltonians, and correlators.

pub mod correlators;
pub mod eigen;
pub mod fock;
pub mod hamiltonian;
pub mod io;
pub mod qmap;
pub mod sparse;
pub mod sweep;

pub use correlators::{correlators_and_wick, CorrelatorReport};
pub use eigen::{ground_state, thermal_expectation, EigenOptions, GroundState, Method};
pub use fock::{operator_algebra, BosonMode, FockSpace, Species};
pub use hamiltonian::{assemble_simulator_hamiltonian, assemble_target_hamiltonian, mapping_residual, MappingResidual};
pub use qmap::q_map_commutators;
pub use sparse::SparseOperator;
