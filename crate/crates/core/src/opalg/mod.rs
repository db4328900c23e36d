//! Exact operator algebra: normal-ordered boson words, `Sz` polynomials,
//! tensor products, matrix realizations and coordinate-induced differential
//! forms.

mod boson;
mod form;
mod matching;
mod spin;
mod tensor;

pub(crate) use boson::render_sum;
pub use boson::BosonOperator;
pub use form::{coordinate_form, DifferentialForm};
pub use matching::{match_generator_polynomial, GeneratorTemplate};
pub use spin::{Spin, SpinOperator};
pub use tensor::{LocalMono, LocalOperator, SystemKind, TensorOperator};
