//! Discrete Dirichlet-to-Neumann and Robin operators for symmetric
//! divergence-form elliptic operators with bounded potentials on polygonal
//! domains in the plane, their spectral semigroups, and machine-checkable
//! structural properties (positivity, kernel laws, Perron structure).
//!
//! Pipeline: [`mesh`] builds a triangulation, [`fem::assemble`] produces the
//! P1 matrices, [`dtn`] forms the Schur complement and the Robin matrix,
//! [`spectral`] diagonalizes the pairs and evaluates semigroups and kernels,
//! and [`verify::run_suite`] checks the structural properties of a
//! [`scenario::Scenario`].
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix double precision, which is what the property
//! tolerances are calibrated for.

pub mod dtn;
pub mod error;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod scalar;
pub mod scenario;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Mesh64 = mesh::Mesh<f64>;
pub type Mesh32 = mesh::Mesh<f32>;
pub type DenseMatrix64 = linalg::DenseMatrix<f64>;
pub type DenseMatrix32 = linalg::DenseMatrix<f32>;
pub type CoefficientField64 = fem::CoefficientField<f64>;
pub type CoefficientField32 = fem::CoefficientField<f32>;
pub type OperatorBundle64 = fem::OperatorBundle<f64>;
pub type OperatorBundle32 = fem::OperatorBundle<f32>;
pub type DtnOperator64 = dtn::DtnOperator<f64>;
pub type DtnOperator32 = dtn::DtnOperator<f32>;
pub type RobinOperator64 = dtn::RobinOperator<f64>;
pub type RobinOperator32 = dtn::RobinOperator<f32>;
pub type SpectralDecomposition64 = spectral::SpectralDecomposition<f64>;
pub type SpectralDecomposition32 = spectral::SpectralDecomposition<f32>;
pub type SemigroupKernel64 = spectral::SemigroupKernel<f64>;
pub type SemigroupKernel32 = spectral::SemigroupKernel<f32>;
pub type Scenario64 = scenario::Scenario<f64>;
