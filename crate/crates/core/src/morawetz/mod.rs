//! Interaction Morawetz action, its frequency-truncated form and the
//! associated error terms.

pub mod action;
pub mod commutator;
pub mod ioperator;
pub mod kernel;
pub mod monitor;

pub use action::{action_with, interaction_action, momentum_density, KernelConvolver};
pub use commutator::{commutator_error_terms, error_integrands, ErrorTerms};
pub use ioperator::{apply_i, IOperator};
pub use kernel::{check_admissibility, kernel_admissibility, kernel_eval, AdmissibilityReport, KernelProfile, KernelVariant, MorawetzKernel};
pub use monitor::{action_series, l8_bound_monitor, truncated_action, L8Ratios};
