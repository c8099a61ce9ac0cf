//! `L^p` norms, the Mahler measure and the exponential Orlicz norm.

mod lp;
mod mahler;
mod orlicz;
pub mod roots;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use lp::{lp_norm, lp_norm_exact_even, lp_norm_quadrature};
pub use mahler::{
    log_mahler_of_coefficients, mahler_log_quadrature, mahler_measure, mahler_measure_with, mahler_univariate,
};
pub use orlicz::{orlicz_luxemburg_norm, OrliczSpec};
pub use roots::{roots_of_coefficients, roots_univariate, RootCluster, RootSet, DEFAULT_ROOT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactParseval,
    ExactEvenConvolution,
    ExactRoots,
    Quadrature,
    IteratedMixed,
    MonteCarlo,
}

impl Method {
    pub fn is_exact(self) -> bool {
        matches!(
            self,
            Method::ExactParseval | Method::ExactEvenConvolution | Method::ExactRoots
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactParseval => "exact-parseval",
            Method::ExactEvenConvolution => "exact-even-convolution",
            Method::ExactRoots => "exact-roots",
            Method::Quadrature => "quadrature",
            Method::IteratedMixed => "iterated-mixed",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormFlags {
    /// Grid nodes where `|P|` fell below the log clamp.
    pub clamped_nodes: usize,
    /// A root lies within `1e-9` of the unit circle.
    pub near_unit_roots: bool,
    /// The root finder failed somewhere and quadrature took over.
    pub fallback: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
    pub converged: bool,
    #[serde(default)]
    pub flags: NormFlags,
}

impl NormResult {
    pub fn exact(value: f64, method: Method) -> Self {
        NormResult {
            value,
            method,
            error_estimate: 8.0 * f64::EPSILON * value.abs(),
            converged: true,
            flags: NormFlags::default(),
        }
    }

    /// `error_estimate / value`, or the absolute error when the value is 0.
    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error_estimate
        } else {
            self.error_estimate / self.value.abs()
        }
    }
}
