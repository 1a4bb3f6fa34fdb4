//! Formal mappings as dense tensors and their composition algebra.

mod compositions;
mod formal;
mod tensor;

pub use compositions::{binomial, enumerate_compositions, CompositionIndex};
pub(crate) use formal::relative_gap;
pub use formal::{DiffusionFamily, DiffusionFamilyLiteral, FormalLiteral, FormalMapping};
pub(crate) use tensor::{check_finite, left_multiply, CompositionSum};
pub use tensor::{DiffusionLiteral, DiffusionMap, MultilinearMap, TensorLiteral};

/// `b o a`.
pub fn compose(b: &FormalMapping, a: &FormalMapping) -> crate::Result<FormalMapping> {
    b.compose(a)
}
