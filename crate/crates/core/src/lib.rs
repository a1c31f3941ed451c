//! Exact linear algebra, Lie triple systems, finite group actions, Yamaguti
//! cohomology and equivariant formal deformations.

pub mod cohomology;
pub mod deformation;
pub mod group;
pub mod kernel;
pub mod lts;
pub mod scalar;

pub use cohomology::{Caps, Cochain, CochainSpaceBasis, CohomologyError, CohomologyReport, YamagutiComplex};
pub use deformation::{
    apply_isomorphism, check_deformation_equations, infinitesimal, make_deformation, DeformationContext, DeformationError,
    DeformationReport, FormalIsomorphism, TruncatedDeformation,
};
pub use group::{GroupAction, GroupError, ModuleAction};
pub use kernel::{Echelon, KernelError, Matrix};
pub use lts::builders;
pub use lts::{
    verify_lts, verify_lts_with, verify_module, verify_module_with, ActionTensor, Axiom, AxiomReport,
    LieTripleSystem, LtsError, LtsModule, StructureTensor, Verbosity, Violation,
};
pub use scalar::{Fp, ParseScalarError, Rational, Scalar};
