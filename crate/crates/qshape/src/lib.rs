//! Exact calculus for quiver-shaped homological algebra.
//!
//! The crate builds small k-linear categories from quivers with relations,
//! validates the structural conditions they must satisfy (hom finiteness,
//! local boundedness, a Serre functor, a nilpotent pseudoradical), and
//! computes with finitely supported module-valued representations: homology
//! functors indexed by objects, exactness and weak-equivalence predicates,
//! Ext groups, and the stable-category calculus of suspensions, cones, and
//! derived homs. Two closed-form oracles (classic chain-complex homology and
//! the generalized homology of N-complexes) cross-check the resolution-based
//! route on the linear kinds.
//!
//! Everything is exact: rationals with big integers, or a prime field.

pub mod category;
pub mod serre;
pub mod stable;
pub mod dsl;
pub mod error;
pub mod homology;
pub mod matrix;
pub mod rep;
pub mod representation;
pub mod scalar;

pub use category::{ArrowSpec, CatRef, KCategory, Label, QuiverKind, QuiverSpec, RelTerm, RelationScheme, Window};
pub use error::{Error, Result};
pub use homology::{ch_oracle, cohom, cohom_map, cohom_relevance, ext_qa, hom_tor, is_exact, is_weq, is_weq_on, nch_oracle, resolve_view, tor_map, tor_relevance, HomologyValue, ResolutionView, Variance};
pub use serre::{check_serre_naturality, find_serre, validate_setup, SerreData, SetupReport, Verdict};
pub use stable::{certify_semiinjective, certify_semiprojective, classify_morphism, cone, dq_hom, embed_projective, is_strictly_perfect, loop_rep, perfect_witness, semiproj_resolution, shift_flip, stable_hom, stable_hom_injective, stably_isomorphic, strip_projective_summands, suspend, suspension_power, suspension_shift_iso, Certificate, CertKind, CertReason, Conflation, ModelStructure, MorphismClass, SemiprojResolution, StableHom, Triangle};
pub use matrix::{subquotient_dim, Matrix, SpanReducer};
pub use rep::{find_isomorphism, Algebra, Context, DiagMap, Diagram, HomBasis, Layer, Resolution, SumLayout};
pub use representation::{act_value, cokernel, direct_sum, hom_space, image, induce, inj_rep, kernel, proj_rep, stalk_rep, yoneda, RepBuilder, RepMorphism, Representation, YonedaIso};
pub use scalar::{parse_scalar, FieldSpec, Scalar};
