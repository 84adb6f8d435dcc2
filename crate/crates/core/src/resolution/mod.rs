//! Semifree replacements, free resolutions of graded modules, derived tensor
//! products and graded Tor.

pub mod cover;
pub mod derived;
pub mod dgres;
pub mod graded;
pub mod replace;

pub use cover::{cover, Cover, StageLog};
pub use derived::{derived_tensor, derived_tensor_from, derived_tensor_with, homology_tensor_map, one_sided_check, DerivedTensor, OneSidedReport};
pub use dgres::{dg_resolution_for_ss, DgResolution};
pub use graded::{graded_free_resolution, graded_tor, tor_from_resolution, GradedFreeResolution, TorTable};
pub use replace::{semifree_replace, semifree_replace_with, SemifreeReplacement};
