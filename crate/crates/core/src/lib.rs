//! A∞-categories over exact fields: structures, functors, transfer,
//! Koszul-type duals, deformation complexes and determinantal data.

pub mod error;
pub mod graded;
pub mod linalg;
pub mod par;
pub mod scalar;

pub use error::{Error, Result};
pub use par::ExecMode;
pub use scalar::{FieldSpec, Scalar};
pub mod ainf;
pub mod basis;
pub mod combo;

pub use ainf::{check_ainf, opposite, representable_pair, AInfPair, AInfStructure, Report, Residual};
pub use basis::{Basis, Generator, Vector, Word};
pub use combo::Combo;
pub mod bar;
pub use bar::{bar_differential, check_bar_square, BarCoderivation, BarElement, BarMorphism};
pub mod functor;
pub use functor::{
    apply_homotopy, check_functor, check_morphism_homotopy, compose_functors, AInfFunctor, HomotopyData, MorphismHomotopy,
};
pub mod transfer;
pub use transfer::{contraction_from_dg, local_algebra_fixture, transfer, ContractionData, MinimalModel};
pub mod jet;
pub use jet::{ideal_jet_equal, linear_independence, minors, straighten, JetAutomorphism, JetIdeal, JetMatrix, JetPoly};
pub mod dual;
pub use dual::{abelianize, dual_algebra, dual_multiply, induced_dual_map, positive_part, CommutativeJetRing, DualElement, DualMap, TruncatedDualAlgebra};
pub mod fixtures;
pub mod deformation;
pub use deformation::{adapted_complex, deformed_differential, family_matrix, functor_component, specialize_first_order, AdaptedChain, AdaptedComplex, DeformedFunctor, DeformedModuleComplex, FamilyMatrix, FirstOrder};
pub mod kill;
pub use kill::{check_petri, kill_all, kill_stage, KillStep, KillTarget};
pub mod pipeline;
pub use pipeline::{bn_pipeline, MinorComparison, PipelineReport};
pub mod io;
