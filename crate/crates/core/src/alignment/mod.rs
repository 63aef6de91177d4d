//! Hypothesis generation by face matching across two arrangements: exact
//! shape-descriptor matching with similarity estimation, and the simplified
//! bounding-box pairing with affine estimation and false-positive rejection.

mod descriptor;
mod hypothesis;

pub use descriptor::{
    match_descriptors, shape_descriptor, shape_descriptor_with, DescriptorEntry, ShapeDescriptor,
    CORNER_EPS,
};
pub use hypothesis::{
    generate_hypotheses_exact, generate_hypotheses_ombb, is_plausible, reject_false_positives,
    Hypothesis, HypothesisKind, MatchTolerances,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlignmentError {
    #[error("shape has {0} corners, need at least 3")]
    TooFewCorners(usize),
}
