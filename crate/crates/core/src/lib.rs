//! Exact, desk-scale Fourier analysis on small finite abelian groups:
//! large spectra, additive energies, dissociation and covering structure,
//! Bohr sets with verified regularity, and density-increment drivers that
//! produce checkable traces.
//!
//! Everything here favours verifiability over asymptotic speed. Group
//! orders are capped (2^20), every randomized search is seeded, and each
//! nontrivial quantity has either a second independent evaluation route or
//! an explicit certificate that a checker can replay.

#![forbid(unsafe_code)]

pub mod bohr;
pub mod density;
pub mod dissociation;
pub mod energy;
pub mod error;
pub mod fourier;
pub mod group;
pub mod increment;
pub mod progfree;
pub mod setops;
pub mod spectra;
pub mod sumset;

pub use error::{CoreError, Result};
