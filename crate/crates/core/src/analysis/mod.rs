//! Quantities used to analyse the rounding. The harmonic bounds give the
//! expected approximation factors; witness trees are sampled to check the
//! marking probabilities those bounds rest on.

mod binary;
mod classify;
mod delta;
mod witness;

pub use binary::{build_binary_tree, build_binary_tree_split, BinNode, MarkedBinaryTree};
pub use classify::{classify_edges, EdgeClassification};
pub use delta::{
    check_delta_properties, delta_spanning, delta_steiner, delta_value, harmonic, theoretical_factor,
    DeltaKind, DeltaReport, HARMONIC_MAX, PROPERTY_MAX,
};
pub use witness::{sample_witness, witness_from_marks, witness_stats, WitnessReport, WitnessStructure, MIN_TRIALS};
