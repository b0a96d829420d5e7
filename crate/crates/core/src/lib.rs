//! Partition functions, pressure sequences and asymptotic-pressure diagnostics
//! for nearest-neighbor tree shifts of finite type on restricted trees.
//!
//! A restricted tree `S(k, R)` is the set of generator strings `g_{i1} ... g_{in}`
//! in which no succession `g_i g_j` with `R[i][j] = 0` occurs. Its vertices are
//! labeled by symbols `1..=d`; a parent labeled `i` over a child labeled `j`
//! contributes the weight `E(i, j) = a_ij * w_j`.
//!
//! Modules:
//! - [`restriction`]: restriction matrices, classification, Perron data, level counts.
//! - [`interaction`]: pair interactions, site energies, the derived matrix `E`.
//! - [`numeric`]: exact-rational and log-domain weight backends.
//! - [`transfer`]: the level recursion computing `Z_n` and `P_n`.
//! - [`oracle`]: brute-force enumeration of `Δ_n` and its labelings.
//! - [`asymptotics`]: last-row ratios, pressure bounds, limit estimates and k-sweeps.
//! - [`cli`]: JSON-configured batch commands writing CSV/JSON.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod format;
pub mod interaction;
pub mod numeric;
pub mod oracle;
pub mod restriction;
pub mod transfer;

pub use error::{Error, Result};
pub use interaction::{InteractionSpec, PotentialSpec};
pub use restriction::{Classification, LevelCounts, RestrictionMatrix, SpectralInfo};
pub use transfer::{Backend, Mode, PartitionResult};
