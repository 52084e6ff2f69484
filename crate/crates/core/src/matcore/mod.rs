//! Dense real symmetric matrix kernel: eigendecomposition, spectral functional
//! calculus, block views, compressions, pinchings and majorization.

mod dense;
mod eigen;
mod io;
mod majorize;
mod sym;

pub use dense::Mat;
pub use eigen::{
    apply_spectral, clamp_tol, eig_sym, eigenvalues, trace_f, EigDecomp, MAX_SWEEPS, OFF_DIAG_TOL,
};
pub use io::{format_matrix, parse_matrix, read_matrix, write_matrix};
pub use majorize::{majorizes, Majorization};
pub use sym::{
    blocks, compress_b, compress_c, pinch, project_form, Blocks, Partition, Projector, SymMatrix,
};
