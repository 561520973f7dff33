//! Multi-dimensional order-preserving matching attacks on databases encrypted
//! with order-preserving encryption.
//!
//! Given a plaintext auxiliary dataset P and a target dataset Q known only
//! through per-dimension order and value frequencies, the algorithms here
//! recover plaintext assignments: an exact branch-and-bound solver, a greedy
//! min-conflict matcher, a monotone-chain matcher backed by orthogonal range
//! search, and the per-axis 1-D non-crossing baseline. Evaluation metrics and
//! synthetic instance generation round out the toolkit.

pub mod dataio;
pub mod datagen;
pub mod error;
pub mod exact;
pub mod metrics;
pub mod minconflict;
pub mod model;
pub mod monotone;
pub mod oned;
pub mod oracle;
pub mod rangeindex;

pub use error::{Error, Result};
pub use model::{Coord, Dataset, Edge, Matching, Point, Rat, WeightKind, WeightSpec};
