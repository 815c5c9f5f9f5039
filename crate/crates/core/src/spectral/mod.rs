//! Discretization, Fourier analysis, frequency cutoffs and the free
//! Schrodinger group.

pub mod field;
pub mod fourier;
pub mod grid;
pub mod projector;
pub mod propagator;

pub use field::Field;
pub use fourier::{forward_transform, inverse_transform, Spectrum};
pub use grid::Grid;
pub use projector::{bump, project, ProjectorSpec};
pub use propagator::free_propagate;
