//! Synthetic stream generation, streaming preprocessing, dataset ingestion,
//! and design diagnostics.
//!
//! Generators are deterministic: a spec (including its seed) plus a substream
//! index pins the exact example sequence. The true weights are drawn once per
//! seed so every substream of one experiment shares them.

mod diagnostics;
mod io;
mod preprocess;
mod spec;
mod stream;

pub use diagnostics::{classic_irrep, irrep_rho, IrrepDiag, Sigma};
pub use io::{
    read_dense_csv, read_sparse_text, shuffle_examples, write_dense_csv, write_sparse_text,
    DataFormat,
};
pub use preprocess::StandardizeClip;
pub use spec::{make_wstar, Design, Placement, StreamSpec, TrueModel};
pub use stream::{substream, StreamGenerator, ROLE_FEATURES, ROLE_NOISE, ROLE_SHUFFLE, ROLE_WSTAR};
