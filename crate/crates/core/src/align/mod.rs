//! Dynamic time warping, averaged local-cost profiles, target extraction and
//! DTW-aligned similarity matrices.

mod dtw;
mod profile;
mod similarity;

pub use dtw::{cosine_similarity, dtw, AlignmentResult, CostMetric};
pub use profile::{argmax_earliest, avg_local_cost_profile, extract_target, TargetPoint};
pub use similarity::{similarity_matrix, SimilarityMatrix, SpeakerSample};
