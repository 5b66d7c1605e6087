//! Numerical building blocks: quadrature, root refinement, fits, special functions.

pub mod fit;
pub mod quadrature;
pub mod roots;
pub mod special;
