//! Pythagorean pairs (a, b) with |a|^2 + |b|^2 = 1 on the circle.
//!
//! For a non-extreme rational symbol b = p/q the unique outer mate a with
//! a(0) > 0 comes out of the spectral factorization of |q|^2 - |p|^2, and
//! the ratio Phi = b/a drives the curvature invariants of the backward
//! shift.

use crate::boundary::{extreme_test, fejer_riesz, ExtremeVerdict, TrigPolynomial};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::ratfun::{C64, Poly, RationalSymbol};
use serde::Serialize;
use std::f64::consts::PI;

/// A non-extreme symbol b, its outer mate a, and the ratio Phi = b/a.
#[derive(Debug, Clone, Serialize)]
pub struct PythagoreanPair {
    pub b: RationalSymbol,
    pub a: RationalSymbol,
    pub phi: RationalSymbol,
}

/// Builds the Pythagorean mate of a non-extreme rational symbol.
///
/// With b = p/q reduced, the trig polynomial u = |q|^2 - |p|^2 is
/// nonnegative on the circle; its spectral factor r gives a = r/q, rotated
/// by a unimodular constant so that a(0) > 0.
pub fn mate(b: &RationalSymbol, tol: &Tolerances) -> Result<PythagoreanPair> {
    match extreme_test(b, tol)?.0 {
        ExtremeVerdict::Extreme => return Err(Error::ExtremeSymbol),
        ExtremeVerdict::NonExtreme { .. } => {}
    }
    let u = TrigPolynomial::modulus_sq(b.den()).try_sub(&TrigPolynomial::modulus_sq(b.num()), tol)?;
    let r = fejer_riesz(&u, tol)?;
    // rotate so a(0) = r(0)/q(0) is real and positive
    let a0 = r.eval(C64::new(0.0, 0.0)) / b.den().eval(C64::new(0.0, 0.0));
    if a0.norm() == 0.0 {
        return Err(Error::FactorizationFailure("mate vanishes at the origin".into()));
    }
    let rot = a0.conj() / C64::new(a0.norm(), 0.0);
    let r = r.scale(rot);
    let a = RationalSymbol::new(r.clone(), b.den().clone(), tol)?;
    let phi = RationalSymbol::quotient(b.num().clone(), r, tol)?;
    let pair = PythagoreanPair { b: b.clone(), a, phi };
    validate_pair(&pair)?;
    Ok(pair)
}

fn validate_pair(pair: &PythagoreanPair) -> Result<()> {
    let a0 = pair.a.eval(C64::new(0.0, 0.0));
    if a0.re <= 0.0 || a0.im.abs() > 1e-10 * a0.re {
        return Err(Error::FactorizationFailure(format!("a(0) = {a0} is not real positive")));
    }
    let mut worst: f64 = 0.0;
    for j in 0..512 {
        let z = C64::from_polar(1.0, 2.0 * PI * j as f64 / 512.0);
        let s = pair.a.eval(z).norm_sqr() + pair.b.eval(z).norm_sqr();
        worst = worst.max((s - 1.0).abs());
    }
    if worst > 1e-8 {
        return Err(Error::FactorizationFailure(format!(
            "|a|^2 + |b|^2 deviates from 1 by {worst:.3e} on the circle"
        )));
    }
    Ok(())
}

/// Pointwise mate for a boundary-sampled symbol: no coefficient data, only
/// an evaluator backed by the Herglotz-exponential reconstruction of the
/// outer function with squared boundary modulus 1 - |b|^2.
pub struct SampledMate {
    log_defect: crate::boundary::BoundarySampler,
    tolerances: Tolerances,
}

impl SampledMate {
    pub fn eval(&self, z: crate::ratfun::DiskPoint) -> Result<C64> {
        crate::boundary::outer_from_modulus(&self.log_defect, z, &self.tolerances)
    }
}

/// Builds the pointwise mate of a sampled symbol. The samples are values of
/// b itself; the mate is only defined when the sampled extreme-point
/// heuristic reports non-extreme.
pub fn mate_sampled(
    samples: &crate::boundary::BoundarySampler,
    tol: &Tolerances,
) -> Result<SampledMate> {
    match crate::boundary::extreme_test_sampled(samples, tol)?.0 {
        ExtremeVerdict::Extreme => return Err(Error::ExtremeSymbol),
        ExtremeVerdict::NonExtreme { .. } => {}
    }
    let log_defect = crate::boundary::BoundarySampler::new(
        samples
            .values()
            .iter()
            .map(|v| {
                let d = 1.0 - v.norm_sqr();
                C64::new(if d <= 0.0 { f64::NEG_INFINITY } else { d.ln() }, 0.0)
            })
            .collect(),
    )?;
    Ok(SampledMate { log_defect, tolerances: tol.clone() })
}

/// Decides membership of a rational quotient num/den in H-infinity: after
/// numerical gcd reduction, membership fails exactly when a pole lies in or
/// within eps_pole of the closed unit disk.
pub fn in_hinfty(num: &Poly, den: &Poly, tol: &Tolerances) -> Result<bool> {
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let reduced = RationalSymbol::quotient(num.clone(), den.clone(), tol)?;
    if reduced.den().degree() == Some(0) {
        return Ok(true);
    }
    for pole in reduced.den().roots(tol)? {
        if pole.norm() <= 1.0 + tol.eps_pole {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the necessary condition for H(b1) = H(b2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict", content = "failing")]
pub enum SpaceEquality {
    /// Both quotients a1/a2 and a2/a1 lie in H-infinity; the (necessary)
    /// test cannot separate the spaces.
    MayBeEqual,
    /// At least one quotient leaves H-infinity, so H(b1) != H(b2).
    NotEqual(QuotientDirection),
}

/// Which of the mate quotients fails to be in H-infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuotientDirection {
    A1OverA2,
    A2OverA1,
    Both,
}

/// Necessary condition for H(b1) = H(b2): equality of the spaces forces
/// a1/a2 and a2/a1 into H-infinity. Only NotEqual is conclusive.
pub fn space_equality_necessary(
    b1: &RationalSymbol,
    b2: &RationalSymbol,
    tol: &Tolerances,
) -> Result<SpaceEquality> {
    let p1 = mate(b1, tol)?;
    let p2 = mate(b2, tol)?;
    // a1/a2 = (r1/q1)/(r2/q2) = r1 q2 / (q1 r2)
    let fwd_num = &p1.a.num().clone() * p2.a.den();
    let fwd_den = &p1.a.den().clone() * p2.a.num();
    let fwd = in_hinfty(&fwd_num, &fwd_den, tol)?;
    let bwd = in_hinfty(&fwd_den, &fwd_num, tol)?;
    Ok(match (fwd, bwd) {
        (true, true) => SpaceEquality::MayBeEqual,
        (false, true) => SpaceEquality::NotEqual(QuotientDirection::A1OverA2),
        (true, false) => SpaceEquality::NotEqual(QuotientDirection::A2OverA1),
        (false, false) => SpaceEquality::NotEqual(QuotientDirection::Both),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn b1() -> RationalSymbol {
        RationalSymbol::from_real(&[0.5, 0.5], &[1.0], &tol()).unwrap()
    }

    fn b2() -> RationalSymbol {
        RationalSymbol::from_real(&[0.5, -0.5], &[1.0], &tol()).unwrap()
    }

    #[test]
    fn mate_of_b1_is_b2() {
        let pair = mate(&b1(), &tol()).unwrap();
        let a = pair.a.canonical();
        assert_eq!(a.num().degree(), Some(1));
        assert_abs_diff_eq!(a.num().coeff(0).re, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(a.num().coeff(1).re, -0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(a.num().coeff(0).im, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(a.num().coeff(1).im, 0.0, epsilon = 1e-10);

        // Phi_1 = (1+z)/(1-z)
        let phi = pair.phi.canonical();
        assert_abs_diff_eq!(phi.num().coeff(0).re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(phi.num().coeff(1).re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(phi.den().coeff(0).re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(phi.den().coeff(1).re, -1.0, epsilon = 1e-10);
    }

    #[test]
    fn mate_of_zero_is_one() {
        let b = RationalSymbol::from_real(&[0.0], &[1.0], &tol()).unwrap();
        let pair = mate(&b, &tol()).unwrap();
        assert_eq!(pair.a.num().degree(), Some(0));
        assert_abs_diff_eq!(pair.a.eval(C64::new(0.3, 0.2)).re, 1.0, epsilon = 1e-12);
        assert!(pair.phi.is_zero());
    }

    #[test]
    fn mate_of_half_z_is_constant() {
        let b = RationalSymbol::from_real(&[0.0, 0.5], &[1.0], &tol()).unwrap();
        let pair = mate(&b, &tol()).unwrap();
        assert_eq!(pair.a.num().degree(), Some(0));
        assert_abs_diff_eq!(pair.a.num().coeff(0).re, 0.75f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn mate_rejects_inner_symbols() {
        let z = RationalSymbol::from_real(&[0.0, 1.0], &[1.0], &tol()).unwrap();
        assert_eq!(mate(&z, &tol()).unwrap_err(), Error::ExtremeSymbol);
    }

    #[test]
    fn mate_is_idempotent_on_coefficients() {
        let t = tol();
        let b = RationalSymbol::from_real(&[0.1, 0.3, 0.2], &[1.0, 0.0, 0.1], &t).unwrap();
        let first = mate(&b, &t).unwrap();
        let second = mate(&b, &t).unwrap();
        for k in 0..=first.a.num().degree().unwrap() {
            assert!((first.a.num().coeff(k) - second.a.num().coeff(k)).norm() <= 1e-10);
        }
    }

    #[test]
    fn pythagorean_identity_on_circle() {
        let t = tol();
        for b in [b1(), b2(), RationalSymbol::from_real(&[0.2, 0.1, 0.3], &[1.0], &t).unwrap()] {
            let pair = mate(&b, &t).unwrap();
            for j in 0..512 {
                let z = C64::from_polar(1.0, 2.0 * PI * j as f64 / 512.0);
                let s = pair.a.eval(z).norm_sqr() + pair.b.eval(z).norm_sqr();
                assert!((s - 1.0).abs() <= 1e-8, "identity off by {:.3e}", (s - 1.0).abs());
            }
        }
    }

    #[test]
    fn hinfty_membership() {
        let t = tol();
        // (1-z)/(1+z) has a pole on the circle
        assert!(!in_hinfty(&Poly::from_real(&[1.0, -1.0]), &Poly::from_real(&[1.0, 1.0]), &t).unwrap());
        // constants are bounded
        assert!(in_hinfty(&Poly::from_real(&[5.0]), &Poly::one(), &t).unwrap());
        // pole outside the closed disk
        assert!(in_hinfty(&Poly::one(), &Poly::from_real(&[2.0, -1.0]), &t).unwrap());
        // zero denominator is an error
        assert_eq!(
            in_hinfty(&Poly::one(), &Poly::zero(), &t).unwrap_err(),
            Error::ZeroDenominator
        );
        // removable singularity: (1-z^2)/(1+z) = 1 - z is bounded
        assert!(in_hinfty(
            &Poly::from_real(&[1.0, 0.0, -1.0]),
            &Poly::from_real(&[1.0, 1.0]),
            &t
        )
        .unwrap());
    }

    #[test]
    fn space_equality_on_the_worked_pair() {
        let t = tol();
        let v = space_equality_necessary(&b1(), &b2(), &t).unwrap();
        assert_eq!(v, SpaceEquality::NotEqual(QuotientDirection::Both));
        // symmetric verdict class
        let w = space_equality_necessary(&b2(), &b1(), &t).unwrap();
        assert!(matches!(w, SpaceEquality::NotEqual(_)));
    }

    #[test]
    fn sampled_mate_matches_rational_mate() {
        use crate::boundary::BoundarySampler;
        use crate::ratfun::DiskPoint;
        let t = tol();
        // b1 sampled on 4096 nodes; the mate evaluator must reproduce the
        // rational mate (1-z)/2 even though the contact point z = 1 makes
        // the log-defect sample at node 0 infinite
        let s = BoundarySampler::from_fn(4096, |th| {
            let z = C64::from_polar(1.0, th);
            (C64::new(1.0, 0.0) + z) / C64::new(2.0, 0.0)
        })
        .unwrap();
        let m = mate_sampled(&s, &t).unwrap();
        for (re, im) in [(0.0, 0.0), (0.3, 0.0), (0.0, 0.5), (0.7, 0.0), (-0.69, 0.0), (0.0, -0.7)] {
            let z = DiskPoint::from_re_im(re, im).unwrap();
            let got = m.eval(z).unwrap();
            let want = (C64::new(1.0, 0.0) - z.value()) / C64::new(2.0, 0.0);
            assert!((got - want).norm() <= 1e-4, "sampled mate off at {re}+{im}i: {got} vs {want}");
        }

        // constant symbol: mate is the constant sqrt(3)/2
        let s = BoundarySampler::from_fn(64, |_| C64::new(0.5, 0.0)).unwrap();
        let m = mate_sampled(&s, &t).unwrap();
        let got = m.eval(DiskPoint::from_re_im(0.2, -0.4).unwrap()).unwrap();
        assert!((got - C64::new(0.75f64.sqrt(), 0.0)).norm() <= 1e-10);

        // inner sampled symbol rejected
        let s = BoundarySampler::from_fn(64, |th| C64::from_polar(1.0, th)).unwrap();
        assert!(matches!(mate_sampled(&s, &t), Err(Error::ExtremeSymbol)));
    }

    #[test]
    fn space_equality_inconclusive_cases() {
        let t = tol();
        let half_z = RationalSymbol::from_real(&[0.0, 0.5], &[1.0], &t).unwrap();
        assert_eq!(
            space_equality_necessary(&half_z, &half_z, &t).unwrap(),
            SpaceEquality::MayBeEqual
        );
        // z/2 and 1/2 both have constant mates sqrt(3)/2
        let half = RationalSymbol::from_real(&[0.5], &[1.0], &t).unwrap();
        assert_eq!(
            space_equality_necessary(&half_z, &half, &t).unwrap(),
            SpaceEquality::MayBeEqual
        );
    }
}
