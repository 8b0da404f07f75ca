//! Polynomial algebra over finite fields.

mod binary;
mod bivariate;
mod factor;
mod parse;
mod ternary;
mod univariate;

pub use binary::{BinaryForm, BinarySquarefree, P1Point, RootPattern};
pub use bivariate::BiPoly;
pub use factor::{distinct_degree, equal_degree, SquarefreeDecomposition, ROOT_SCAN_LIMIT};
pub use parse::{coefficient_text, parse_coefficients, parse_ternary, serialize_ternary};
pub use ternary::{monomial_count, monomial_index, monomials, TernaryForm, Var};
pub use univariate::UniPoly;
