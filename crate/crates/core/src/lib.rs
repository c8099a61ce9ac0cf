//! Norms, Mahler measures and comparison constants for polynomials in
//! several complex variables on the torus `T^n`.

// `!(x > 0.0)` is meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

/// `Display` and `FromStr` for fieldless enums with kebab-case names.
macro_rules! kebab_enum_str {
    ($ty:ty { $($variant:ident => $name:literal),* $(,)? }) => {
        impl std::fmt::Display for $ty {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(match self { $(<$ty>::$variant => $name),* })
            }
        }

        impl std::str::FromStr for $ty {
            type Err = $crate::error::Error;

            fn from_str(s: &str) -> $crate::error::Result<Self> {
                match s {
                    $($name => Ok(<$ty>::$variant),)*
                    _ => Err($crate::error::Error::UnknownId(s.to_string())),
                }
            }
        }
    };
}

pub mod cli;
pub mod constants;
pub mod corpus;
pub mod error;
pub mod polynomial;
pub mod norms;
pub mod quadrature;
pub mod symmetric;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as Complex;
pub use polynomial::{DegreeProfile, MultiIndex, Polynomial};
