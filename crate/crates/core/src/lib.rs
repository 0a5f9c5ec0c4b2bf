//! Floquet-Lindblad simulation of dephasing-driven time-crystal growth in
//! small spin networks.
//!
//! The network is driven by a two-segment Hamiltonian: a global spin kick
//! followed by XY interactions with on-site disorder, with local dephasing
//! acting during the interaction segment. The crate builds the one- and
//! two-period dynamical maps, evolves density matrices stroboscopically,
//! extracts Liouvillian spectra, gaps and steady states, and carries the
//! closed-form two-site results used to check the numerics.
//!
//! Conventions used throughout:
//!
//! - `hbar = 1`; with the default drive the period is `T = 1`.
//! - Basis index `i` stores site `l` in bit `N - 1 - l`, so site 0 is the
//!   leftmost tensor factor. A set bit is `|1>`, the `+1` eigenvector of
//!   `sigma_z`.
//! - Density matrices are vectorized by row stacking: component `i * D + j`
//!   holds `rho[i][j]`, and `vec(A rho B) = (A ⊗ B^T) vec(rho)`.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod config;
pub mod error;
pub mod experiments;
pub mod floquet;
pub mod linalg;
pub mod observables;
pub mod operators;
pub mod sectors;
pub mod spectra;
pub mod superop;
pub mod twosite_oracle;

pub use config::SpinNetworkConfig;
pub use error::{Error, Result};
pub use faer::{Col, Mat, MatRef, Scale};
pub use num_complex::Complex64 as c64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

mod prelude {
    pub use alloc::string::String;
    pub use alloc::vec;
    pub use alloc::vec::Vec;

    pub use faer::{Col, Mat, MatRef};
    pub use num_traits::Float;

    pub use crate::c64;
    pub use crate::error::{Error, Result};
}
