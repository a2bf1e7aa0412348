//! Chebyshev interpolation toolkit.
//!
//! * [`cheb`]: nodes, polynomials, the DCT coefficient route and cardinal
//!   (time-domain) interpolation.
//! * [`bench`]: equispaced baseline and reconstruction-error experiments.
//! * [`systolic`]: cycle-accurate word-serial interpolation datapath.
//! * [`adc`]: Flash/SAR hybrid sampling split and comparator power model.
//! * [`repro`]: the acceptance checks, shared by the test suite and the CLI.

pub mod adc;
pub mod bench;
pub mod cheb;
pub mod config;
pub mod error;
pub mod repro;
pub mod signal;
pub mod systolic;

pub use cheb::{
    cheb_eval, cheb_eval_normalized, cheb_nodes, compute_coeffs, ctif, dct_matrix, interpolate_ctif,
    power_basis_matrix, ChebyshevWindow, CoefficientMatrix, CoefficientSet, Interval, PowerBasisMatrix,
};
pub use error::{Error, Result};
pub use signal::SignalSpec;
