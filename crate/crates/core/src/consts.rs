//! Numerical tolerances shared by the geometry kernels and their tests.

/// Membership tolerance: `|‖x‖ - 1|` on the sphere, `|⟨x,x⟩_L + 1|` on the
/// hyperboloid. Scaled by the squared coordinate magnitude for large points.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Tangency tolerance for `⟨x, v⟩` (or `⟨x, v⟩_L`), relative to `‖x‖·‖v‖`.
pub const TANGENT_TOL: f64 = 1e-9;

/// Tangent vectors shorter than this leave the base point unchanged in `exp_map`.
pub const SHORT_VECTOR: f64 = 1e-12;

/// Squared gradient-direction norm below which a distance gradient is undefined.
pub const DEGENERATE_SQ: f64 = 1e-24;

/// Residual tolerance of the nonnegative least-squares conic-hull check.
pub const CONIC_TOL: f64 = 1e-9;

/// Largest ambient dimension accepted for polyhedral generators.
pub const MAX_POLYHEDRAL_DIM: usize = 64;

/// Projection leaves points this close to the manifold untouched, which makes
/// it exactly idempotent.
pub const IDEMPOTENT_SLACK: f64 = 8.0 * f64::EPSILON;
