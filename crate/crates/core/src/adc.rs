//! Caratheodory angular derivatives of rational symbols.
//!
//! A rational non-inner symbol touches the circle, |b(zeta)| = 1, at the
//! circle zeros of its Pythagorean mate; every such contact point carries an
//! angular derivative with value c = zeta b'(zeta) conj(b(zeta)), real and
//! positive. Sharing the set of contact points is a necessary condition for
//! unitary equivalence of the restricted forward shifts.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::pythagorean::mate;
use crate::ratfun::{C64, RationalSymbol};
use serde::Serialize;

/// A boundary point where the symbol has a Caratheodory angular derivative.
#[derive(Debug, Clone, Copy)]
pub struct AdcPoint {
    /// Unimodular contact point.
    pub zeta: C64,
    /// Angular-derivative value, real and positive.
    pub c: f64,
    /// Boundary value b(zeta) with |b(zeta)| = 1.
    pub b_at_zeta: C64,
}

impl Serialize for AdcPoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            zeta: [f64; 2],
            c: f64,
            b_at_zeta: [f64; 2],
        }
        Repr {
            zeta: [self.zeta.re, self.zeta.im],
            c: self.c,
            b_at_zeta: [self.b_at_zeta.re, self.b_at_zeta.im],
        }
        .serialize(serializer)
    }
}

/// All angular-derivative points of a rational, non-inner symbol.
///
/// Contact points are found algebraically as the unimodular zeros of the
/// spectral factor of 1 - |b|^2 (the mate's numerator), so the set is exact
/// for rational data and immune to grid resolution.
pub fn adc_points(b: &RationalSymbol, tol: &Tolerances) -> Result<Vec<AdcPoint>> {
    if b.is_inner(1e-10) {
        return Err(Error::InnerSymbol);
    }
    let pair = mate(b, tol)?;
    let mut zetas: Vec<C64> = pair
        .a
        .num()
        .roots(tol)?
        .into_iter()
        .filter(|z| (z.norm() - 1.0).abs() <= tol.unimodular_snap)
        .map(|z| z / C64::new(z.norm(), 0.0))
        .collect();
    // distinct contact points only: a circle zero of multiplicity m yields a
    // root cluster of radius up to eps^(1/m)
    zetas.sort_by(|x, y| x.arg().partial_cmp(&y.arg()).unwrap());
    zetas.dedup_by(|x, y| (*x - *y).norm() <= 1e-6);
    zetas.iter().map(|&zeta| adc_point_at(b, zeta, tol)).collect()
}

fn adc_point_at(b: &RationalSymbol, zeta: C64, tol: &Tolerances) -> Result<AdcPoint> {
    let c = adc_value(b, zeta, tol)?;
    Ok(AdcPoint { zeta, c, b_at_zeta: b.eval(zeta) })
}

/// The angular-derivative value c = zeta b'(zeta) conj(b(zeta)) at a
/// unimodular contact point.
pub fn adc_value(b: &RationalSymbol, zeta: C64, tol: &Tolerances) -> Result<f64> {
    let b_zeta = b.eval(zeta);
    let deviation = (b_zeta.norm() - 1.0).abs();
    if deviation > 1e-8 {
        return Err(Error::NotContactPoint { zeta, deviation });
    }
    let c = zeta * b.derivative(tol)?.eval(zeta) * b_zeta.conj();
    if c.im.abs() > 1e-8 * c.norm().max(1e-300) {
        return Err(Error::NonRealAngularDerivative { value: c });
    }
    Ok(c.re)
}

/// The radial difference quotient (1 - |b(r zeta)|^2) / (1 - r^2); it
/// converges to the angular-derivative value as r -> 1 when one exists.
pub fn radial_quotient(b: &RationalSymbol, zeta: C64, r: f64) -> f64 {
    let z = zeta / C64::new(zeta.norm(), 0.0) * C64::new(r, 0.0);
    (1.0 - b.eval(z).norm_sqr()) / (1.0 - r * r)
}

/// Set equality of the angular-derivative points of two symbols, matched
/// within 1e-8 on the circle. `false` certifies that the restricted shifts
/// are not unitarily equivalent; `true` certifies nothing.
pub fn same_adc(b1: &RationalSymbol, b2: &RationalSymbol, tol: &Tolerances) -> Result<bool> {
    let z1 = adc_points(b1, tol)?;
    let z2 = adc_points(b2, tol)?;
    let covered = |from: &[AdcPoint], by: &[AdcPoint]| {
        from.iter().all(|p| by.iter().any(|q| (p.zeta - q.zeta).norm() <= 1e-8))
    };
    Ok(covered(&z1, &z2) && covered(&z2, &z1))
}
