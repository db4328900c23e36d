use std::fmt;

use num::complex::Complex64;

use crate::error::{Error, Result};

/// Weight `exp(-tau H)` with `tau = beta + i * theta`. For a factorized time
/// dependence `f(t) H`, `theta` is `int_0^T f(t) dt`; it defaults to `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeContour {
    beta: f64,
    time: f64,
    profile_integral: f64,
}

impl TimeContour {
    pub fn new(beta: f64, time: f64) -> Result<Self> {
        Self::with_profile(beta, time, time)
    }

    pub fn with_profile(beta: f64, time: f64, profile_integral: f64) -> Result<Self> {
        if beta.is_nan() || beta < 0.0 || !time.is_finite() || !profile_integral.is_finite() {
            return Err(Error::InvalidInput(format!(
                "contour needs beta >= 0 and finite times, got beta={}, T={}, theta={}",
                beta, time, profile_integral
            )));
        }
        Ok(Self {
            beta,
            time,
            profile_integral,
        })
    }

    pub fn imaginary(beta: f64) -> Result<Self> {
        Self::new(beta, 0.0)
    }

    pub fn real(time: f64) -> Result<Self> {
        Self::new(0.0, time)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn profile_integral(&self) -> f64 {
        self.profile_integral
    }

    pub fn tau(&self) -> Complex64 {
        Complex64::new(self.beta, self.profile_integral)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransferMode {
    /// `exp(-eps H)` per slice.
    MatrixElementExp,
    /// `1 - eps H` per slice.
    MatrixElementLinear,
    /// Normal-ordered `exp(-eps H(ad, a))` per slice.
    NormalKernel,
    /// `int |z> exp(-eps H) <z| dmu` per slice.
    DiagonalKernel,
}

impl fmt::Display for TransferMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransferMode::MatrixElementExp => "matrix_element_exp",
            TransferMode::MatrixElementLinear => "matrix_element_linear",
            TransferMode::NormalKernel => "normal_kernel",
            TransferMode::DiagonalKernel => "diagonal_kernel",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Exact,
    ReducedSum,
    Transfer {
        mode: TransferMode,
        slices: usize,
    },
    Extrapolated {
        mode: TransferMode,
        schedule: Vec<usize>,
    },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Exact => write!(f, "exact"),
            Method::ReducedSum => write!(f, "reduced_sum"),
            Method::Transfer { mode, slices } => write!(f, "transfer:{}:N={}", mode, slices),
            Method::Extrapolated { mode, .. } => write!(f, "transfer:{}:richardson", mode),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult {
    pub value: Complex64,
    pub method: Method,
    /// Boson Fock truncation, where used.
    pub truncation: Option<usize>,
    /// Largest boson index summed in a reduced sum.
    pub cutoff: Option<u64>,
    pub error_estimate: f64,
}
