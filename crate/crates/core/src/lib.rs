//! q-Fourier analysis on the geometric lattice `{q^n}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcalc`]: lattice windows, tabulated even functions, q-Pochhammer
//!   symbols, Jackson integrals and the weighted `L_{q,p,v}` structure.
//! * [`qbessel`]: the normalized Hahn-Exton q-Bessel function `j_v(z, q^2)`
//!   and the product-integral identity it satisfies on `[0, a]_q`.
//! * [`qfourier`]: the q-Bessel Fourier transform, q-translation and
//!   q-convolution on a truncated lattice.
//! * [`pswf`]: the time-and-band limiting operator `T_a^v`, its eigenfunctions
//!   (q-prolate spheroidal wave functions) and the reproducing kernel of the
//!   q-Paley-Wiener space.
//! * [`sampling`]: reconstruction of q-bandlimited functions from their values
//!   at `q^k`, and projection onto the q-Paley-Wiener space.
//! * [`cli`] and [`report`]: the command-line driver and its file formats.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod pswf;
pub mod qbessel;
pub mod qcalc;
pub mod qfourier;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
pub use pswf::{Bandlimit, KernelEvaluator, KernelMode, OperatorMatrix, PswfBasis};
pub use qbessel::BesselEvalReport;
pub use qcalc::{LatticeFunction, LatticeWindow, QParams};
pub use qfourier::TransformPlan;
pub use sampling::SamplingGrid;
