//! Error type shared by every module of the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Everything that can go wrong in the toolkit.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,

    #[error("denominator is the zero polynomial")]
    ZeroDenominator,

    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,

    #[error("root residual {residual:.3e} exceeds tolerance {bound:.3e}")]
    RootResidual { residual: f64, bound: f64 },

    #[error("symbol is not bounded by one on the circle (sup = {sup})")]
    SupNormExceeded { sup: f64 },

    #[error("denominator has a root at {root} inside or too close to the closed unit disk")]
    PoleInClosedDisk { root: Complex64 },

    #[error("point {point} lies outside the open unit disk")]
    NotInDisk { point: Complex64 },

    #[error("sampled symbol exceeds modulus one (max |b| = {max_modulus})")]
    InvalidSymbol { max_modulus: f64 },

    #[error("sampler needs a power-of-two node count >= 16, got {m}")]
    BadSamplerSize { m: usize },

    #[error("Laurent coefficients are not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("trigonometric polynomial dips below zero on the circle (min sample {min:.3e})")]
    NotNonnegative { min: f64 },

    #[error("trigonometric polynomial is identically zero")]
    ZeroTrigPolynomial,

    #[error("unimodular root cluster has odd multiplicity {count} near angle {angle}")]
    OddUnimodularMultiplicity { count: usize, angle: f64 },

    #[error("spectral factorization failed: {0}")]
    FactorizationFailure(String),

    #[error("log-modulus integral diverges under the quadrature cutoff")]
    DivergentLogIntegral,

    #[error("symbol is an extreme point; operation requires a non-extreme symbol")]
    ExtremeSymbol,

    #[error("symbol is inner; contact-point analysis requires a non-inner symbol")]
    InnerSymbol,

    #[error("evaluation point {point} is a pole of the rational function")]
    PoleAtPoint { point: Complex64 },

    #[error("|phi| must stay below one at the evaluation point (got {modulus})")]
    ModulusNotBelowOne { modulus: f64 },

    #[error("|b| equals one at the evaluation point within tolerance")]
    ModulusOne,

    #[error("point {zeta} is not a contact point: |b| deviates from one by {deviation:.3e}")]
    NotContactPoint { zeta: Complex64, deviation: f64 },

    #[error("angular derivative has non-real value {value} (imaginary part too large)")]
    NonRealAngularDerivative { value: Complex64 },

    #[error("five-point stencil of width {h} leaves the unit disk at {point}")]
    StencilOutsideDisk { point: Complex64, h: f64 },

    #[error("vector lies outside the numerical range of the defect operator (projection residual {residual:.3e})")]
    OutOfRange { residual: f64 },

    #[error("coefficient vector has length {got}, model order is {expected}")]
    OrderMismatch { got: usize, expected: usize },

    #[error("defect operator is not positive semi-definite (min eigenvalue {min:.3e})")]
    NotPositiveSemiDefinite { min: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
