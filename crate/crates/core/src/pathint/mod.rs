//! Partition functions: exact traces, reduced spectral sums of classical
//! symbols, and discrete transfer-matrix path integrals.

mod compare;
mod contour;
mod exact;
mod quadrature;
mod reduced;
mod transfer;

pub use compare::{slicing_compare, ComparisonRow, ComparisonTable};
pub use contour::{Method, PartitionResult, TimeContour, TransferMode};
pub use exact::{exact_partition, spectrum};
pub use quadrature::{gauss_laguerre, gauss_legendre_unit, GaussRule};
pub use reduced::{reduced_sum_partition, spectral_sum};
pub use transfer::{extrapolate_transfer, richardson, transfer_partition, TransferSource};
