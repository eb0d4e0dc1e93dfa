//! Uplink cell-free massive MIMO over a sequential fronthaul with
//! memory-limited access points.
//!
//! Every access point (AP) buffers its received signal vectors until the
//! running estimate of the users' symbols arrives from the previous AP. With a
//! finite memory the buffered vectors are compressed, which adds noise to the
//! observations that later APs fuse. This crate models that pipeline:
//!
//! - [`scenario`]: geometry, path loss, Rayleigh channels and pilot-contaminated
//!   channel estimates.
//! - [`compression`]: rate-distortion optimal compression noise for a per-vector
//!   bit budget (vector-wise, element-wise, PCA + element-wise) via reverse
//!   water-filling.
//! - [`estimation`]: the sequential RLS estimator, the batch least-squares
//!   reference and the sum spectral-efficiency metrics.
//! - [`resources`]: daisy-chain / fan-in tree topologies, memory allocation
//!   models and fronthaul link rates.
//! - [`experiments`]: seeded Monte-Carlo sweeps producing average per-user SE.
//!
//! The crate is `no_std` (it needs `alloc`); file formats, the parallel runner
//! and the command line live in the companion `seqfront` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod compression;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod linalg;
pub mod resources;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, Complex64};
