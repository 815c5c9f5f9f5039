//! Numerical laboratory for the one-dimensional quintic nonlinear
//! Schrodinger equation `i u_t + u_xx = mu |u|^4 u` on a periodic box.

pub mod concentration;
pub mod error;
pub mod functionals;
pub mod ground_state;
pub mod integrator;
pub mod morawetz;
pub mod quadrature;
pub mod spectral;
pub mod strichartz;
pub mod symmetry;

pub use error::{Error, Result};
pub use integrator::{solve, IntegratorConfig, Nonlinearity, Termination, Trajectory};
pub use spectral::{Field, Grid};
