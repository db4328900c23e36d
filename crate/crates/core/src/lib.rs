//! De-quantization of bosonic and spin operators into the Hamiltonian symbols
//! that weigh time-continuous coherent-state path integrals, together with the
//! numerical machinery (exact traces, spectral reduced sums, discrete transfer
//! matrices) that checks every produced symbol.

pub mod dequant;
pub mod error;
pub mod geom;
pub mod opalg;
pub mod pathint;
pub mod symcore;

pub use error::{Error, Result};
