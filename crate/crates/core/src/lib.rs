//! Multi-block interleaved codes over GF(p^w).
//!
//! A write unit of `3k` symbols is encoded into a write block of three length-`n`
//! sub-blocks. Each sub-unit of `k` symbols can be read back from its own sub-block
//! alone (local read); when a sub-block has too many erasures the whole block is
//! decoded instead (global decode).
//!
//! Modules:
//! - [`galois`]: table-driven finite-field arithmetic.
//! - [`rscodes`]: Reed-Solomon codes on cyclic power intervals, spectra, erasure decoding.
//! - [`mbic`]: the two constructions, encoding, local read, global decoders, distances.
//! - [`verify`]: brute-force and algebraic oracles for the distance claims.
//! - [`container`]: on-disk block container and erasure sidecar.
//! - [`sim`]: erasure-channel read simulation.

pub mod container;
pub mod error;
pub mod galois;
pub mod linalg;
pub mod mbic;
pub mod presets;
pub mod rscodes;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
pub use galois::{Elem, Field};
pub use mbic::{
    Construction, DistanceReport, ErasurePattern, Layout, MbicParams, Message, WriteBlock,
};
