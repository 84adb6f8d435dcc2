//! Spectral sequences of first-quadrant double complexes.

pub mod double;
pub mod pages;
pub mod tor;

pub use double::DoubleComplex;
pub use pages::{spectral_sequence, ConvergenceEntry, ConvergenceReport, Direction, Page, SpectralSequence};
pub use tor::{edge_homomorphism, tor_spectral_sequence, tor_spectral_sequence_with, E2Mismatch, EdgeMaps, TorSpectralSequence, TorSsReport};
