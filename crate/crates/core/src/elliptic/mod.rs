//! Per-mode radial solvers for the chemoattractant and the stream function,
//! plus sampling verifiers for the associated elliptic estimates.

mod solvers;
mod tridiag;
mod verify;

pub use solvers::{
    laplacian_rows, solve_chemo_mode, solve_stream_mode, EllipticSolvers, LaplacianRows,
};
pub use tridiag::{TridiagonalFactor, TridiagonalSystem};
pub use verify::{
    random_smooth_profile, verify_lemma_c0, verify_lemma_ck, verify_lemma_phi0, verify_lemma_phik,
    LemmaReport, LemmaRow, PhiScaling, SLACK,
};
