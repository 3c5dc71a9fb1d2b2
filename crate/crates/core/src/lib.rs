//! Rate-region computations for the cognitive interference channel with
//! unidirectional destination cooperation.
//!
//! The crate evaluates achievable rate regions, an outer bound, and capacity
//! results for small discrete memoryless channels where sender 2 knows sender
//! 1's message and destination 2 transmits a cooperation signal `x3`. Regions
//! are parameterized by factored auxiliary-variable distributions, turned into
//! linear rate-inequality systems whose constants are exact conditional mutual
//! informations, and projected onto the `(R1, R2)` plane with Fourier-Motzkin
//! elimination. A Monte Carlo simulator validates the two covering lemmas
//! (single-codeword binning and pair binning) behind the coding scheme.
//!
//! Modules:
//! - [`channel`]: channel validation, Z-channel lifting, degradations.
//! - [`pmf`]: dense joint pmfs and information measures in bits.
//! - [`factored`]: scheme-shaped auxiliary distributions and sampling.
//! - [`terms`]: the thirteen-term information set of the main region.
//! - [`fme`]: rate-inequality systems and Fourier-Motzkin elimination.
//! - [`geometry`]: 2-D rate polytopes, hulls, containment, Hausdorff.
//! - [`region`]: per-mode system builders and polytope projection.
//! - [`bounds`]: outer bound and degraded-Z capacity verification.
//! - [`corollaries`]: identity suite and inclusion harnesses.
//! - [`covering`]: typicality and covering-lemma experiments.

pub mod bounds;
pub mod channel;
pub mod corollaries;
pub mod covering;
pub mod error;
pub mod factored;
pub mod fme;
pub mod geometry;
pub mod pmf;
pub mod region;
pub mod simplex;
pub mod terms;

pub use channel::{ChannelSpec, DegradeMode, ZChannelSpec};
pub use error::{Error, Result};
pub use factored::{sample_factored, verify_factorization, FactoredDistribution, Scheme};


pub use pmf::JointPmf;

pub use fme::InequalitySystem;
pub use geometry::RatePolytope;
pub use region::Mode;
pub use terms::InfoTermSet;
