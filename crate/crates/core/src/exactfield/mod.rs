//! Exact arithmetic: Q, prime fields and their extensions, polynomials,
//! matrices, factorization.

mod factor;
mod field;
mod matrix;
mod poly;

pub use factor::{factor, rational_roots, roots, splitting_degree, squarefree_decomposition, Embedding};
pub use field::{Field, FieldDescriptor, Scalar};
pub use matrix::Matrix;
pub use poly::Poly;
