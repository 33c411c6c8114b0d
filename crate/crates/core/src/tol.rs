//! Central tolerance configuration.
//!
//! Every numerical threshold used by the library lives here so that the
//! contracts stay auditable in one place. Values are absolute unless the
//! name says otherwise.

/// Hermiticity check, relative to the largest entry magnitude.
pub const HERMITICITY: f64 = 1e-10;

/// Looser Hermiticity bound accepted by `psd_project` and `eig_hermitian`
/// before symmetrizing.
pub const HERMITICITY_INPUT: f64 = 1e-8;

/// Allowed negative eigenvalue on density operators and effects.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Slack on trace and effect-norm upper bounds (`tr <= 1 + TRACE_SLACK`).
pub const TRACE_SLACK: f64 = 1e-10;

/// Eigenvector residual `|A v - lambda v|` relative to `|A|`.
pub const EIG_RESIDUAL: f64 = 1e-9;

/// Orthonormality of eigenvector sets.
pub const EIG_ORTHONORMALITY: f64 = 1e-10;

/// Kraus completeness: `sum K' K = support` within this bound.
pub const COMPLETENESS: f64 = 1e-9;

/// Unitarity checks on constructed gates.
pub const UNITARITY: f64 = 1e-10;

/// Effects within one measurement setting must sum to the identity.
pub const SETTING_COMPLETENESS: f64 = 1e-10;

/// Reconstructed Choi operators may violate positivity by at most this
/// much before being flagged unphysical.
pub const CHOI_PSD: f64 = 1e-8;

/// Relative objective change at which the PSD least-squares solver
/// declares convergence.
pub const SOLVER_REL_OBJECTIVE: f64 = 1e-10;

/// Residual PSD violation accepted by the solver.
pub const SOLVER_PSD_VIOLATION: f64 = 1e-9;

/// Probabilities may carry this much negative numerical residue.
pub const PROBABILITY_FLOOR: f64 = -1e-9;

/// Imaginary residue allowed on quantities that must be real.
pub const IMAGINARY_RESIDUE: f64 = 1e-10;

/// Normalization check on coherent-mode state vectors.
pub const STATE_NORM: f64 = 1e-9;
