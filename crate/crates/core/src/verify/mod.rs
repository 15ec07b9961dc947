//! Brute-force checks used by the test suites: a numeric prox oracle, the
//! saddle gap, the bound constant, the step-matrix eigenvalue and a
//! high-accuracy reference saddle point.

mod bound;
mod eigen;
mod gap;
mod oracle;
mod saddle;

pub use bound::compute_m0;
pub use eigen::{p_matrix_min_eig, symmetric_eigenvalues};
pub use gap::saddle_gap;
pub use oracle::{minimize_scalar, prox_oracle, resolvent_oracle, OracleTerm};
pub use saddle::{perturbation_violation, reference_optimum, reference_optimum_capped, SaddlePoint};
