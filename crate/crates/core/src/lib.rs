//! Fixed-budget best-arm identification in linear bandits under
//! differential privacy.
//!
//! The crate is `no_std` (it needs `alloc`) and contains every algorithmic
//! piece of the simulator:
//!
//! - [`model`]: problem instances, reward laws, sub-optimality gaps and the
//!   hardness parameter `H = H_BAI + H_pri`.
//! - [`maxdet`]: absolute determinants, Max-Det subset selection, basis
//!   coordinates and per-phase dimensionality reduction.
//! - [`schedule`]: the phase timetable (`λ`, the `g`/`h` sequences, phase
//!   sizes `s_p`, `M_1`, `M` and the adjusted budget `T'`).
//! - [`privacy`]: Laplace and Gaussian mechanisms with fixed uniform
//!   consumption.
//! - [`policy`]: DP-BAI, its Gaussian variant, the Baseline, OD-LinBAI,
//!   DP-OD and the early-stopping wrapper.
//! - [`bandit`] and [`rng`]: the pull recorder and the counter-based random
//!   streams that make runs reproducible and couplable.
//!
//! Arm indices are 0-based in the Rust API. Transcripts, like every external
//! format, use labels: `1..=K` for real arms and `0` for the auxiliary arm of
//! the early-stopping wrapper.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod bandit;
pub mod design;
mod error;
pub mod maxdet;
pub mod matrix;
pub mod model;
mod num;
pub mod policy;
pub mod privacy;
pub mod rng;
pub mod schedule;

pub use error::{Error, Result};
pub use model::{GapProfile, Hardness, Instance, Privacy, RewardLaw};
pub use policy::{PolicyKind, Transcript};
pub use rng::{TrialStreams, UniformStream};
pub use schedule::Schedule;
