//! The half-form quantization map on first-order differential forms, its
//! inverse, the extension to generator polynomials and tensor products, the
//! alternative (normal and symmetric-slicing) symbols, and the bracket checks.

mod dirac;
mod extended;
mod first_order;
mod spectral;
mod symbols;

pub use dirac::{
    check_dirac_bracket, gvh_matrix_deviation, gvh_obstruction, operator_commutator, GvhReport,
};
pub use extended::{dequantize_extended, ExtendedSymbol, SubsystemGenerator};
pub use first_order::{
    dequantize_first_order, dequantize_first_order_with, dequantize_operator, manifold_for,
    quantize, quantize_with, DequantResult, Metaplectic,
};
pub use spectral::{symbol_in_zeta, SpectralPolynomial};
pub use symbols::{normal_symbol, symmetric_slicing_symbol};
