//! Homotopy pullbacks, model squares, fiber sequences and Postnikov towers.

pub mod path;
pub mod postnikov;
pub mod square;

pub use path::{homotopy_pullback, strict_pullback, two_sided_path_object, HomotopyPullback, Leg, PathObject, StrictPullback};
pub use postnikov::{postnikov_tower, PostnikovReport, PostnikovTower};
pub use square::{
    based_path, fiber_square, is_homotopy_fiber_sequence, is_model_square, kernel_square, mapping_fiber_square, pasting_check,
    FiberSequenceVerdict, ModelSquareVerdict, PastingVerdict, Square, SquareEvidence,
};
