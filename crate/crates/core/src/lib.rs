//! Subspace designs over finite fields via Kramer-Mesner matrices.
//!
//! The crate covers small finite fields, canonical forms of subspaces of
//! `F_q^n`, echelon-class enumeration, orbit computations under matrix
//! groups, Kramer-Mesner incidence matrices, an exact 0/1 solver, and design
//! construction and verification.

pub mod cli;
pub mod design;
pub mod enumerate;
pub mod error;
pub mod exchange;
pub mod field;
pub mod group;
pub mod incidence;
pub mod linalg;
pub mod poly;
pub mod solver;

pub use design::{
    alpha_beta, borel_family_selection, expand, lambda_max, q1_family, verify_design, BlockList, DesignParams,
    OrbitSelection, SetDesign, Verification,
};
pub use enumerate::{class_size, enum_pivot_sets, qbinom, qbinom_u64, standard_rep, PivotSet};
pub use error::{Error, Result};
pub use field::{make_field, Elem, FieldSpec, ModulusOverrides};
pub use group::{orbit, orbits, transversal, GroupKind, MatrixGroup, Orbit};
pub use incidence::{borel_km_matrix, km_concat, km_matrix, BorelBlockLayout, KmColumn, KmMatrix};
pub use linalg::{apply, canonicalize, contains, MatrixFq, Subspace};
pub use solver::{solve, IntMatrix, SolveOutcome, SolveRequest, SolveStatus};
