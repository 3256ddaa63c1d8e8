//! Polyhedral toolkit for equidistant circular split networks.
//!
//! Taxa are `0..=n` with `0` as the root. Every circular split is stored by
//! its root-free side, an interval `[lo, hi]` of `1..=n`. Dissimilarity
//! matrices, weights, cone facets and rays, X-diagrams and the
//! Chan-Robbins-Yuen correspondence all use exact rational arithmetic.

pub mod cone;
pub mod cry;
pub mod io;
pub mod linalg;
pub mod metric;
pub mod netviz;
pub mod rational;
pub mod split;
pub mod xdiagram;

pub use cone::{Facet, Membership, OrderedPartition};
pub use cry::{CryMatrix, PedcPoint};
pub use metric::{DissimilarityMatrix, WeightVector};
pub use netviz::SplitNetwork;
pub use rational::Rational;
pub use split::{GeneralSplit, Split, SplitSystem};
pub use xdiagram::{BorderedMatrix, XDiagram};
