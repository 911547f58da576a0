//! Numerical laboratory for degenerate dispersive MHD.
//!
//! The crate is organized around the objects it simulates:
//!
//! - [`grid`] / [`field`] / [`calculus`] / [`norms`]: cylindrical grids,
//!   vector fields in the coordinate basis, discrete vector calculus and the
//!   weighted Sobolev / mixed Lebesgue norms used by every experiment.
//! - [`profile`] / [`background`]: degenerate radial profiles `f(r)` and the
//!   axisymmetric E-MHD (inviscid Burgers) and Hall-MHD background flows.
//! - [`chart`] / [`packet`]: the logarithmic radial chart, Hamilton-Jacobi
//!   phase, transport envelope and the assembled degenerating wave packets.
//! - [`bogovskii`]: compactly supported right inverse of the divergence on
//!   axis-centered cylinders and the divergence-free initial-data assembler.
//! - [`linsolver`]: single-angular-mode evolution of the linearized E-MHD and
//!   Hall-MHD systems, pairing traces and growth certificates.
//! - [`bichar`]: Hamiltonian ray tracing for the symbol `B(x) . xi |xi|`.
//! - [`acceptance`]: the scripted experiment battery used by the test suite
//!   and the `suite` CLI subcommand.

pub mod acceptance;
pub mod background;
pub mod bichar;
pub mod bogovskii;
pub mod bump;
pub mod calculus;
pub mod chart;
pub mod config;
pub mod field;
pub mod fit;
pub mod grid;
pub mod io;
pub mod linsolver;
pub mod norms;
pub mod packet;
pub mod profile;
pub mod svgplot;

pub use field::{AxiVectorField, RadialMode, ScalarField};
pub use grid::{RGrid, RZGrid};
pub use profile::RadialProfile;
