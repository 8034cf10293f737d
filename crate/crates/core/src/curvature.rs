//! Curvature of the eigenvector line bundles of X_b and S_b*, the scalar
//! unitary invariants, a finite-difference oracle for both, and grid-based
//! unitary-equivalence decisions.
//!
//! The curvature of an operator with eigensection gamma is
//! -d^2/(dw d conj(w)) log ||gamma_w||^2. Closed forms, with Phi = b/a for
//! the Pythagorean pair (a, b):
//!
//!   K_X(w)  = -|Phi'(w)|^2 / (1 + |Phi(w)|^2)^2 - 1/(1 - |w|^2)^2
//!   K_S*(w) = +|b'(w)|^2   / (1 - |b(w)|^2)^2   - 1/(1 - |w|^2)^2
//!
//! The -1/(1 - |w|^2)^2 term is the curvature of the Szego line bundle of
//! the plain backward shift (negative, as classical). Both the sign and the
//! 1 - |w|^2 denominator convention are pinned by the five-point
//! finite-difference oracle below, which discretizes the definition
//! directly. Equality of curvatures across two symbols reduces to equality
//! of the scalar invariants |Phi'|/(1 + |Phi|^2) and |b'|/(1 - |b|^2), on
//! which the equivalence decisions are based.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::pythagorean::PythagoreanPair;
use crate::ratfun::{C64, DiskPoint, RationalSymbol};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// A curvature value together with where and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub omega: DiskPoint,
    pub value: f64,
    pub source: CurvatureSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureSource {
    ClosedForm,
    FiniteDifference,
}

/// Mixed second derivative of log(1 + |phi|^2):
/// |phi'(w)|^2 / (1 + |phi(w)|^2)^2.
pub fn lemma33_plus(phi: &RationalSymbol, omega: DiskPoint, tol: &Tolerances) -> Result<f64> {
    let w = omega.value();
    let val = phi.eval_checked(w)?;
    let der = phi.derivative(tol)?.eval_checked(w)?;
    Ok(der.norm_sqr() / (1.0 + val.norm_sqr()).powi(2))
}

/// Mixed second derivative of log(1 - |phi|^2):
/// -|phi'(w)|^2 / (1 - |phi(w)|^2)^2, requiring |phi(w)| < 1.
pub fn lemma33_minus(phi: &RationalSymbol, omega: DiskPoint, tol: &Tolerances) -> Result<f64> {
    let w = omega.value();
    let val = phi.eval_checked(w)?;
    if val.norm() >= 1.0 {
        return Err(Error::ModulusNotBelowOne { modulus: val.norm() });
    }
    let der = phi.derivative(tol)?.eval_checked(w)?;
    Ok(-der.norm_sqr() / (1.0 - val.norm_sqr()).powi(2))
}

/// Curvature of the Szego line bundle: -d^2/(dw d conj(w)) of
/// -log(1 - |w|^2), which is -1/(1 - |w|^2)^2.
fn szego_curvature(omega: DiskPoint) -> f64 {
    -1.0 / (1.0 - omega.value().norm_sqr()).powi(2)
}

/// Curvature of X_b at w, composed exactly as
/// -lemma33_plus(Phi, w) - 1/(1 - |w|^2)^2.
pub fn curv_x(pair: &PythagoreanPair, omega: DiskPoint, tol: &Tolerances) -> Result<f64> {
    Ok(-lemma33_plus(&pair.phi, omega, tol)? + szego_curvature(omega))
}

/// Curvature of S_b* at w:
/// -lemma33_minus(b, w) - 1/(1 - |w|^2)^2, the first term being
/// +|b'(w)|^2/(1 - |b(w)|^2)^2.
pub fn curv_s(b: &RationalSymbol, omega: DiskPoint, tol: &Tolerances) -> Result<f64> {
    let w = omega.value();
    let bw = b.eval(w);
    if bw.norm() >= 1.0 - 1e-12 {
        return Err(Error::ModulusOne);
    }
    Ok(-lemma33_minus(b, omega, tol)? + szego_curvature(omega))
}

/// Scalar unitary invariant of X_b: |Phi'(w)| / (1 + |Phi(w)|^2).
pub fn inv_x(pair: &PythagoreanPair, omega: DiskPoint, tol: &Tolerances) -> Result<f64> {
    let w = omega.value();
    let val = pair.phi.eval_checked(w)?;
    let der = pair.phi.derivative(tol)?.eval_checked(w)?;
    Ok(der.norm() / (1.0 + val.norm_sqr()))
}

/// Scalar unitary invariant of S_b: |b'(w)| / (1 - |b(w)|^2).
pub fn inv_s(b: &RationalSymbol, omega: DiskPoint, tol: &Tolerances) -> Result<f64> {
    let w = omega.value();
    let bw = b.eval(w);
    if bw.norm() >= 1.0 - 1e-12 {
        return Err(Error::ModulusOne);
    }
    let der = b.derivative(tol)?.eval_checked(w)?;
    Ok(der.norm() / (1.0 - bw.norm_sqr()))
}

/// Five-point discrete Laplacian realization of
/// -d^2/(dw d conj(w)) g = -(1/4) Delta g:
/// -(g(w+h) + g(w-h) + g(w+ih) + g(w-ih) - 4 g(w)) / (4 h^2).
pub fn fd_curvature<F>(g: F, omega: DiskPoint, h: f64) -> Result<f64>
where
    F: Fn(DiskPoint) -> Result<f64>,
{
    let w = omega.value();
    if w.norm() + h >= 1.0 {
        return Err(Error::StencilOutsideDisk { point: w, h });
    }
    let p = |re: f64, im: f64| DiskPoint::new(w + C64::new(re, im)).unwrap();
    let sum = g(p(h, 0.0))? + g(p(-h, 0.0))? + g(p(0.0, h))? + g(p(0.0, -h))? - 4.0 * g(omega)?;
    Ok(-0.25 * sum / (h * h))
}

/// Finite-difference curvature with a Richardson confirmation step: the
/// stencil is evaluated at h and h/2 and the halved-step value is returned
/// along with the inter-step difference (large differences flag
/// ill-conditioning; for a smooth g the difference is O(h^2)).
pub fn fd_curvature_checked<F>(g: F, omega: DiskPoint, h: f64) -> Result<(f64, f64)>
where
    F: Fn(DiskPoint) -> Result<f64> + Copy,
{
    let coarse = fd_curvature(g, omega, h)?;
    let fine = fd_curvature(g, omega, 0.5 * h)?;
    Ok((fine, (coarse - fine).abs()))
}

/// Which operator a curvature table describes.
#[derive(Debug, Clone, Copy)]
pub enum CurvatureData<'a> {
    X(&'a PythagoreanPair),
    S(&'a RationalSymbol),
}

/// Tabulates closed-form against finite-difference curvature over a grid.
/// Grid points where either route fails (poles, stencil leaving the disk)
/// are skipped.
pub fn curvature_table(
    data: CurvatureData<'_>,
    grid: &DiskGrid,
    h: f64,
    tol: &Tolerances,
) -> Vec<(CurvatureSample, CurvatureSample)> {
    let evaluate = |omega: DiskPoint| -> Result<(f64, f64)> {
        match data {
            CurvatureData::X(pair) => {
                let closed = curv_x(pair, omega, tol)?;
                let (fd, _) =
                    fd_curvature_checked(|w| Ok(crate::kernels::norm_cauchy_sq(pair, w).ln()), omega, h)?;
                Ok((closed, fd))
            }
            CurvatureData::S(b) => {
                let closed = curv_s(b, omega, tol)?;
                let (fd, _) =
                    fd_curvature_checked(|w| Ok(crate::kernels::norm_kb_sq(b, w).ln()), omega, h)?;
                Ok((closed, fd))
            }
        }
    };
    grid.points()
        .into_par_iter()
        .filter_map(|omega| {
            evaluate(omega).ok().map(|(closed, fd)| {
                (
                    CurvatureSample { omega, value: closed, source: CurvatureSource::ClosedForm },
                    CurvatureSample { omega, value: fd, source: CurvatureSource::FiniteDifference },
                )
            })
        })
        .collect()
}

/// Evaluation grid for "for every w in D" decisions: a polar grid of
/// `radii` x `angles` points with radius at most `max_radius`, plus
/// `random_points` seeded pseudo-random points.
#[derive(Debug, Clone, Serialize)]
pub struct DiskGrid {
    pub radii: usize,
    pub angles: usize,
    pub random_points: usize,
    pub random_seed: u64,
    pub max_radius: f64,
}

impl Default for DiskGrid {
    fn default() -> Self {
        DiskGrid { radii: 24, angles: 64, random_points: 200, random_seed: 7, max_radius: 0.95 }
    }
}

impl DiskGrid {
    pub fn points(&self) -> Vec<DiskPoint> {
        let mut pts = Vec::with_capacity(self.radii * self.angles + self.random_points);
        for i in 0..self.radii {
            let r = self.max_radius * (i + 1) as f64 / self.radii as f64;
            for j in 0..self.angles {
                let theta = 2.0 * PI * j as f64 / self.angles as f64;
                pts.push(DiskPoint::new(C64::from_polar(r, theta)).unwrap());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.random_seed);
        for _ in 0..self.random_points {
            let r = self.max_radius * rng.random::<f64>().sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            pts.push(DiskPoint::new(C64::from_polar(r, theta)).unwrap());
        }
        pts
    }
}

/// Verdict of a grid-based equality test of two invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivalenceVerdict {
    Equivalent,
    NotEquivalent,
    /// More than a tenth of the grid was skipped (poles etc.), so the
    /// sampled evidence is too thin to call.
    Inconclusive,
}

/// Outcome of a unitary-equivalence decision over a grid.
///
/// Equality over the full disk is undecidable by sampling; the report states
/// exactly which grid was used and the largest observed discrepancy so
/// callers can tighten the evidence.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub verdict: EquivalenceVerdict,
    pub witness: Option<DiskPoint>,
    pub max_discrepancy: f64,
    pub grid: GridDescription,
    pub tolerance: f64,
    #[serde(skip)]
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridDescription {
    pub radii: usize,
    pub angles: usize,
    pub random_seed: u64,
}

fn decide_on_grid<F>(invariant_gap: F, grid: &DiskGrid, tol_equiv: f64) -> EquivalenceReport
where
    F: Fn(DiskPoint) -> Result<f64> + Sync,
{
    let points = grid.points();
    let gaps: Vec<(DiskPoint, Option<f64>)> = points
        .par_iter()
        .map(|&w| (w, invariant_gap(w).ok()))
        .collect();
    let skipped = gaps.iter().filter(|(_, g)| g.is_none()).count();
    let mut max_discrepancy = 0.0;
    let mut witness_at_max = None;
    for (w, gap) in gaps.iter() {
        if let Some(g) = gap {
            if *g >= max_discrepancy {
                max_discrepancy = *g;
                witness_at_max = Some(*w);
            }
        }
    }
    let verdict = if skipped * 10 > points.len() {
        EquivalenceVerdict::Inconclusive
    } else if max_discrepancy <= tol_equiv {
        EquivalenceVerdict::Equivalent
    } else {
        EquivalenceVerdict::NotEquivalent
    };
    EquivalenceReport {
        verdict,
        witness: if verdict == EquivalenceVerdict::NotEquivalent { witness_at_max } else { None },
        max_discrepancy,
        grid: GridDescription {
            radii: grid.radii,
            angles: grid.angles,
            random_seed: grid.random_seed,
        },
        tolerance: tol_equiv,
        skipped,
    }
}

/// Decides unitary equivalence of X_{b1} and X_{b2} by comparing the scalar
/// invariant |Phi'|/(1 + |Phi|^2) of both pairs over the grid.
pub fn decide_equiv_x(
    p1: &PythagoreanPair,
    p2: &PythagoreanPair,
    grid: &DiskGrid,
    tol_equiv: f64,
    tol: &Tolerances,
) -> Result<EquivalenceReport> {
    let d1 = p1.phi.derivative(tol)?;
    let d2 = p2.phi.derivative(tol)?;
    let gap = |w: DiskPoint| -> Result<f64> {
        let z = w.value();
        let i1 = d1.eval_checked(z)?.norm() / (1.0 + p1.phi.eval_checked(z)?.norm_sqr());
        let i2 = d2.eval_checked(z)?.norm() / (1.0 + p2.phi.eval_checked(z)?.norm_sqr());
        Ok((i1 - i2).abs())
    };
    Ok(decide_on_grid(gap, grid, tol_equiv))
}

/// Decides unitary equivalence of S_{b1} and S_{b2} by comparing
/// |b'|/(1 - |b|^2) over the grid.
pub fn decide_equiv_s(
    b1: &RationalSymbol,
    b2: &RationalSymbol,
    grid: &DiskGrid,
    tol_equiv: f64,
    tol: &Tolerances,
) -> Result<EquivalenceReport> {
    let d1 = b1.derivative(tol)?;
    let d2 = b2.derivative(tol)?;
    let gap = |w: DiskPoint| -> Result<f64> {
        let z = w.value();
        let m1 = b1.eval(z).norm_sqr();
        let m2 = b2.eval(z).norm_sqr();
        if m1 >= 1.0 || m2 >= 1.0 {
            return Err(Error::ModulusOne);
        }
        let i1 = d1.eval_checked(z)?.norm() / (1.0 - m1);
        let i2 = d2.eval_checked(z)?.norm() / (1.0 - m2);
        Ok((i1 - i2).abs())
    };
    Ok(decide_on_grid(gap, grid, tol_equiv))
}
