//! Exact arithmetic for phase-space symbols: Gaussian-rational coefficients and
//! rational functions of `z`, `zb` with denominators `(1 + z zb)^k`.

mod linsolve;
mod scalar;
mod symbol;

pub use linsolve::{solve_exact, LinearSolution};
pub use scalar::{rat, GaussRational};
pub use symbol::{PhaseSymbol, SectorPart, Var};
