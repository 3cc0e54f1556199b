//! Exact construction and verification of generalized Poisson structures
//! on compact simple Lie algebras.
//!
//! Layers, bottom-up: [`exact`] scalars in ℚ(√d), dense [`tensor`]s, matrix
//! [`oracle`]s, Lie algebra data in [`liealg`], polynomial multivector fields
//! in [`multivec`], the structures themselves in [`gps`], and numerical flows
//! in [`dynamics`].

pub mod dynamics;
pub mod exact;
pub mod gps;
pub mod liealg;
pub mod multivec;
pub mod oracle;
pub mod tensor;

pub use dynamics::{build_system, evolve, DynamicalSystem, DynamicsError, Trajectory};
pub use exact::{ExactComplex, ExactError, ExactScalar};
pub use gps::{compatibility_residual, gji_residual, GeneralizedPoissonStructure, GjiResidual, GpsCertificate, GpsError};
pub use liealg::{
    build_cocycle, build_cocycle_permsum, catalog_load, invariant_symmetric_tensor, CocycleTensor,
    InvariantSymmetricTensor, LieAlgebra, LieError,
};
pub use multivec::{parse_polynomial, Monomial, MultivecError, PolyMultivector};
pub use oracle::{MatrixRep, OracleError};
pub use tensor::{ExactTensor, SymmetryTag, TensorError};
