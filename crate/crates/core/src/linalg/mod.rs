//! Dense linear algebra and seeded random generation.

mod matrix;
mod random;
mod solve;
mod vector;

pub use matrix::DenseMatrix;
pub use random::{gaussian_matrix, gaussian_matrix_from, gaussian_vector, RngSeed, SeededRng};
pub use solve::{
    conjugate_gradient, lu_solve, pseudo_inverse, symmetric_eigenvalues, CgOutcome, LuFactor,
    PIVOT_THRESHOLD,
};
pub use vector::DenseVector;
