//! Dense linear algebra kernels used by the solver modules.

pub mod eigen;
pub mod lu;
pub mod matrix;
pub mod poly;
pub mod symmetric;

pub use eigen::{complex_schur, eigen_general, eigenvalues, EigenDecomposition, EigenError, Schur};
pub use lu::{determinant, Lu};
pub use matrix::{max_abs_diff, CMatrix, Matrix, RMatrix};
pub use poly::polynomial_roots;
pub use symmetric::symmetric_eigenvalues;
