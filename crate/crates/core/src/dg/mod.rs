//! DG algebras, DG modules and their tensor products.

mod algebra;
pub mod examples;
mod module;
pub mod semifree;
pub mod tensor;

pub use algebra::{h0_algebra, homology_algebra, truncate_algebra, DgAlgebra, HomologyAlgebra};
pub use module::{combined_bound, homology_module, inflate, DgModule, HomologyModule};
pub use tensor::{tensor_complexes, tensor_over_algebra, IsoCertificate, TensorLayout, TensorProduct};
pub use semifree::{free_tensor, morphism_from_free, CellKind, FreeElement, FreeTensor, GenLayout, Generator, SemifreeModule, SphereBasis};
