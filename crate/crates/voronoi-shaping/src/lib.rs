//! Lattice-based Voronoi constellations for geometric shaping.
//!
//! A Voronoi constellation is the set of `M = r^N` lattice points falling
//! inside an `r`-times-scaled, shifted Voronoi region of the same lattice.
//! Because membership is decided algebraically, modulation and demodulation
//! never touch a stored point table: both reduce to a closest-point search
//! in the underlying infinite lattice plus exact integer arithmetic, so the
//! same code handles a 4-point constellation and one with 10^28 points.
//!
//! The crate is organised around that pipeline:
//!
//! * [`lattice`] — supported lattices (`Z^N`, `A2`, `D4`, `E8`, `Leech24`)
//!   with exact generator matrices and enumeration utilities.
//! * [`cpa`] — exact closest-point algorithms for each lattice, plus a
//!   brute-force oracle for validation.
//! * [`golay`] — the extended binary Golay code backing the Leech decoder.
//! * [`codec`] — index-to-point modulation and point-to-index demodulation,
//!   together with natural-binary and quasi-Gray bit labelings.
//! * [`shaping`] — shift-vector sampling and iterative energy optimisation.
//! * [`metrics`] — spectral efficiency, power efficiency, union bounds and
//!   kissing statistics.
//! * [`awgn`] — deterministic Monte-Carlo error-rate engine with QAM
//!   baselines and maximum-likelihood reference detection.
//! * [`fiber`] — dual-polarization WDM split-step simulator with EDFA noise
//!   and an idealised coherent receiver.
//! * [`harness`] — config-file driven command line entry points and CSV
//!   output.
//!
//! The `examples/` directory has one runnable program per capability; start
//! with `encode_decode`.

pub mod awgn;
pub mod codec;
pub mod cpa;
pub mod error;
pub mod fiber;
pub mod golay;
pub mod harness;
pub mod lattice;
pub mod metrics;
pub mod rng;
pub mod shaping;

pub use codec::{Labeling, VoronoiConstellation};
pub use error::Error;
pub use lattice::{LatticeFamily, LatticeSpec};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
