//! Exact arithmetic and canonical forms for the groups used by the reductions.

mod builders;
mod element;
mod finite;
mod json;
mod matrix;
mod spec;
mod word;

pub use builders::{
    build_cyclic_shift_group, build_prop3_group, wreath_basis, wreath_edge, wreath_path_value,
    wreath_shift, XsyChoice, XsyGroup,
};
pub use element::Element;
pub use finite::{FiniteMatrixGroup, DEFAULT_GROUP_CAP};
pub use matrix::IntMatrix;
pub use spec::{GroupSpec, Semidirect, TopGroup};
pub use word::{GeneratorWord, Letter};
