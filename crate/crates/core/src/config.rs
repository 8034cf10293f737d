//! Numerical tolerances and knobs, with the defaults used throughout.

use serde::{Deserialize, Serialize};

/// Tolerance bundle threaded through constructors and the boundary analysis.
///
/// All fields are strictly positive except `divergence_cutoff`, which is the
/// (negative) value below which a sampled log-integral is treated as divergent.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Tolerances {
    /// Slack allowed on sup_T |b| <= 1 when validating a symbol.
    pub eps_sup: f64,
    /// Residual bound scale for polynomial root finding.
    pub eps_root: f64,
    /// Root-matching distance for numerical gcd cancellation.
    pub eps_cancel: f64,
    /// Poles within this distance of the closed disk count as inside it.
    pub eps_pole: f64,
    /// Allowed negative dip when validating nonnegativity on the circle.
    pub eps_psd: f64,
    /// Band |.|-1 within which roots are treated as unimodular clusters.
    pub unimodular_cluster: f64,
    /// Roots this close to the circle are snapped onto it.
    pub unimodular_snap: f64,
    /// Sampled log-integrals below this value are treated as divergent.
    pub divergence_cutoff: f64,
    /// Pseudo-inverse threshold, relative to the largest defect eigenvalue.
    pub tau_rel: f64,
    /// Default tolerance for curvature-invariant equality on a grid.
    pub tol_equiv: f64,
    /// Default step of the five-point curvature stencil.
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_sup: 1e-10,
            eps_root: 1e-8,
            eps_cancel: 1e-7,
            eps_pole: 1e-8,
            eps_psd: 1e-10,
            unimodular_cluster: 1e-6,
            unimodular_snap: 1e-7,
            divergence_cutoff: -40.0,
            tau_rel: 1e-10,
            tol_equiv: 1e-9,
            fd_step: 1e-3,
        }
    }
}
