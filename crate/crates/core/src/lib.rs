//! ℤ₂-valued spectral flow for paths of real skew-adjoint operators, with
//! the index of a pair of orthogonal complex structures and the related
//! Toeplitz index for a real unitary with a spectral projection.
//!
//! All operators are finite real matrices; infinite-dimensional objects are
//! represented by finite truncations chosen by the caller.

pub mod error;
pub mod finite;
pub mod linalg;
pub mod ortho;
pub mod generators;
pub mod path;
pub mod toeplitz;

pub use error::{Result, Z2Error};
pub use finite::{
    minimal_kernel_completion, sf2_between_structures, sf2_segment, sf2_segment_oriented,
    structures_kernel_count, HalfKernelCount, SegmentResult,
};
pub use linalg::{
    canonical_form, complete_structure, eig_skew, kernel_parity, phase, projector_distance,
    skew_eigenvalues, subspace_identification, CanonicalForm, ComplexStructure, OrthogonalMatrix,
    SkewMatrix, SpectralData, Tolerance, Z2,
};
pub use path::{
    count_crossings, plan_partition, sf2_path_phase_sum, sf2_path_windowed, Method,
    OperatorPath, PartitionPlan, PathOptions, SF2Report, Smoothness,
};
