//! Measurement ensembles, the sampling operator, coherence and the tangent projector.

mod basis;
mod coherence;
mod gaussian;
mod rip;
mod sampling;
mod tangent;

pub use basis::{entry_basis_element, OperatorBasis};
pub use coherence::{coherence, CoherenceReport};
pub use gaussian::{
    apply_map, fixed_vector_bound, fixed_vector_isometry_experiment, gaussian_map_new,
    isometry_deviation_samples, GaussianMap,
};
pub use rip::{gaussian_rip_sample_count, matrix_rip_estimate, random_rank_r_unit, sparse_rip_constant};
pub use sampling::{sample_indices, sampling_apply, SamplingOperator};
pub use tangent::{tangent_project, TangentProjector};
