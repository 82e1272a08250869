//! Spectra of Laplacians on Z^2-periodic discrete graphs.
//!
//! A periodic graph is described by its finite fundamental graph: `nu`
//! vertices plus unoriented edges, each carrying an integer index
//! `tau = (t1, t2)` recording which lattice cell the edge crosses into.
//! The Laplacian decomposes over the torus of quasimomenta into `nu x nu`
//! Hermitian fiber matrices; sampling their eigenvalues yields spectral
//! bands, flat bands, gaps and the Lebesgue measure of the spectrum.

pub mod analysis;
pub mod floquet;
pub mod graph_model;
pub mod oracle;
pub mod spectrum;

pub use floquet::{FloquetMatrix, Theta};
pub use graph_model::{EdgeSpec, FundamentalGraph};
pub use spectrum::{BandStructure, SpectrumReport};
