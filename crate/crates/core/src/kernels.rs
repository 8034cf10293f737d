//! Reproducing kernels of H^2 and H(b) and the holomorphic eigensections of
//! the two shift operators.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::pythagorean::PythagoreanPair;
use crate::ratfun::{C64, DiskPoint, RationalSymbol};
use crate::boundary::{extreme_test, ExtremeVerdict};
use serde::Serialize;

/// Szego kernel k_w(z) = 1/(1 - conj(w) z).
pub fn szego(omega: DiskPoint, z: DiskPoint) -> C64 {
    C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - omega.value().conj() * z.value())
}

/// de Branges-Rovnyak kernel k^b_w(z) = (1 - conj(b(w)) b(z)) / (1 - conj(w) z).
pub fn kb_eval(b: &RationalSymbol, omega: DiskPoint, z: DiskPoint) -> C64 {
    let bw = b.eval(omega.value());
    let bz = b.eval(z.value());
    (C64::new(1.0, 0.0) - bw.conj() * bz)
        / (C64::new(1.0, 0.0) - omega.value().conj() * z.value())
}

/// Squared H(b)-norm of the kernel at w: (1 - |b(w)|^2) / (1 - |w|^2).
pub fn norm_kb_sq(b: &RationalSymbol, omega: DiskPoint) -> f64 {
    let w = omega.value();
    (1.0 - b.eval(w).norm_sqr()) / (1.0 - w.norm_sqr())
}

/// Squared H(b)-norm of the Cauchy (Szego) kernel for a non-extreme symbol:
/// (1 + |Phi(w)|^2) / (1 - |w|^2) with Phi = b/a.
pub fn norm_cauchy_sq(pair: &PythagoreanPair, omega: DiskPoint) -> f64 {
    let w = omega.value();
    (1.0 + pair.phi.eval(w).norm_sqr()) / (1.0 - w.norm_sqr())
}

/// Which operator an eigensection belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OperatorTag {
    /// Backward shift on H(b); sections exist only for non-extreme b.
    Xb,
    /// Adjoint of the forward shift on H(b).
    SbStar,
}

/// A holomorphic cross-section of the eigenvector line bundle at a point.
///
/// For Xb the section at w is the Szego kernel at conj(w); for Sb* it is the
/// kernel k^b at conj(w). Squared norms are evaluated at the conjugate point,
/// so downstream curvature code applies no further conjugation.
#[derive(Debug, Clone)]
pub struct CrossSection {
    tag: OperatorTag,
    base: DiskPoint,
    b: RationalSymbol,
    pair: Option<PythagoreanPair>,
}

impl CrossSection {
    pub fn tag(&self) -> OperatorTag {
        self.tag
    }

    pub fn base(&self) -> DiskPoint {
        self.base
    }

    /// Section value at z.
    pub fn value(&self, z: DiskPoint) -> C64 {
        match self.tag {
            OperatorTag::Xb => szego(self.base.conj(), z),
            OperatorTag::SbStar => kb_eval(&self.b, self.base.conj(), z),
        }
    }

    /// Squared H(b)-norm of the section.
    pub fn norm_sq(&self) -> f64 {
        match self.tag {
            OperatorTag::Xb => norm_cauchy_sq(self.pair.as_ref().unwrap(), self.base.conj()),
            OperatorTag::SbStar => norm_kb_sq(&self.b, self.base.conj()),
        }
    }
}

/// Builds the eigensection of Xb at the base point; requires the Pythagorean
/// pair because the section norm involves Phi = b/a.
pub fn cross_section_xb(pair: &PythagoreanPair, omega: DiskPoint) -> CrossSection {
    CrossSection {
        tag: OperatorTag::Xb,
        base: omega,
        b: pair.b.clone(),
        pair: Some(pair.clone()),
    }
}

/// Builds the eigensection of Sb* at the base point. Inner symbols are
/// rejected: the extreme case has no eigensections on any open set.
pub fn cross_section(
    tag: OperatorTag,
    b: &RationalSymbol,
    pair: Option<&PythagoreanPair>,
    omega: DiskPoint,
    tol: &Tolerances,
) -> Result<CrossSection> {
    if matches!(tag, OperatorTag::Xb) {
        match extreme_test(b, tol)?.0 {
            ExtremeVerdict::Extreme => return Err(Error::ExtremeSymbol),
            ExtremeVerdict::NonExtreme { .. } => {}
        }
        let pair = pair.ok_or_else(|| {
            Error::FactorizationFailure("Xb section needs the Pythagorean pair".into())
        })?;
        return Ok(cross_section_xb(pair, omega));
    }
    Ok(CrossSection { tag, base: omega, b: b.clone(), pair: pair.cloned() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pythagorean::mate;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn pt(re: f64, im: f64) -> DiskPoint {
        DiskPoint::from_re_im(re, im).unwrap()
    }

    fn b1() -> RationalSymbol {
        RationalSymbol::from_real(&[0.5, 0.5], &[1.0], &tol()).unwrap()
    }

    #[test]
    fn szego_values() {
        assert_abs_diff_eq!(szego(pt(0.0, 0.0), pt(0.7, -0.1)).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(szego(pt(0.5, 0.0), pt(0.5, 0.0)).re, 4.0 / 3.0, epsilon = 1e-15);
        // omega = i/2, z = 1/2: 1/(1 + i/4)
        let v = szego(pt(0.0, 0.5), pt(0.5, 0.0));
        let want = C64::new(1.0, 0.0) / C64::new(1.0, 0.25);
        assert!((v - want).norm() < 1e-15);
    }

    #[test]
    fn kb_reduces_to_szego_for_zero_symbol() {
        let b = RationalSymbol::from_real(&[0.0], &[1.0], &tol()).unwrap();
        let (w, z) = (pt(0.3, 0.2), pt(-0.1, 0.6));
        assert!((kb_eval(&b, w, z) - szego(w, z)).norm() < 1e-15);
    }

    #[test]
    fn kb_for_worked_symbol_at_origin() {
        // b1(0) = 1/2, so k^b1_0(z) = (3 - z)/4... value 3/4 at z = 0
        let v = kb_eval(&b1(), pt(0.0, 0.0), pt(0.0, 0.0));
        assert_abs_diff_eq!(v.re, 0.75, epsilon = 1e-15);
        let v = kb_eval(&b1(), pt(0.0, 0.0), pt(0.5, 0.0));
        assert_abs_diff_eq!(v.re, (3.0 - 0.5) / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn kb_constant_one_for_identity_symbol() {
        let z = RationalSymbol::from_real(&[0.0, 1.0], &[1.0], &tol()).unwrap();
        for (w, x) in [(pt(0.3, 0.1), pt(0.2, -0.4)), (pt(-0.5, 0.2), pt(0.0, 0.0))] {
            assert!((kb_eval(&z, w, x) - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn kernel_norm_values() {
        assert_abs_diff_eq!(norm_kb_sq(&b1(), pt(0.0, 0.0)), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(norm_kb_sq(&b1(), pt(0.5, 0.0)), 7.0 / 12.0, epsilon = 1e-14);
        let zero = RationalSymbol::from_real(&[0.0], &[1.0], &tol()).unwrap();
        let w = pt(0.3, -0.4);
        assert_abs_diff_eq!(
            norm_kb_sq(&zero, w),
            1.0 / (1.0 - w.value().norm_sqr()),
            epsilon = 1e-14
        );
    }

    #[test]
    fn cauchy_norm_values() {
        let pair = mate(&b1(), &tol()).unwrap();
        assert_abs_diff_eq!(norm_cauchy_sq(&pair, pt(0.0, 0.0)), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(norm_cauchy_sq(&pair, pt(0.5, 0.0)), 40.0 / 3.0, epsilon = 1e-10);
        let zero = RationalSymbol::from_real(&[0.0], &[1.0], &tol()).unwrap();
        let zpair = mate(&zero, &tol()).unwrap();
        let w = pt(0.2, 0.6);
        assert_abs_diff_eq!(
            norm_cauchy_sq(&zpair, w),
            1.0 / (1.0 - w.value().norm_sqr()),
            epsilon = 1e-12
        );
    }

    #[test]
    fn hermitian_symmetry_and_diagonal_positivity() {
        let t = tol();
        let symbols = [
            b1(),
            RationalSymbol::from_real(&[0.1, 0.2, 0.3], &[1.0], &t).unwrap(),
            RationalSymbol::from_real(&[0.3, 0.0, -0.2], &[1.0, 0.0, 0.25], &t).unwrap(),
        ];
        let mut k = 0u32;
        for b in &symbols {
            for _ in 0..33 {
                k += 1;
                let w = pt(0.8 * ((k as f64 * 0.37).sin()) * 0.9, 0.7 * ((k as f64 * 0.61).cos()) * 0.9);
                let z = pt(0.6 * ((k as f64 * 0.23).cos()), 0.5 * ((k as f64 * 0.83).sin()));
                let forward = kb_eval(b, w, z);
                let backward = kb_eval(b, z, w);
                assert!((forward - backward.conj()).norm() <= 1e-12);
                let diag = kb_eval(b, w, w);
                assert!(diag.im.abs() <= 1e-12);
                assert!(diag.re > 0.0);
                assert_abs_diff_eq!(diag.re, norm_kb_sq(b, w), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sections_at_origin() {
        let t = tol();
        let pair = mate(&b1(), &t).unwrap();
        let s = cross_section(OperatorTag::Xb, &b1(), Some(&pair), pt(0.0, 0.0), &t).unwrap();
        assert!((s.value(pt(0.3, 0.2)) - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert_abs_diff_eq!(s.norm_sq(), 2.0, epsilon = 1e-12);

        let s = cross_section(OperatorTag::SbStar, &b1(), None, pt(0.0, 0.0), &t).unwrap();
        assert_abs_diff_eq!(s.value(pt(0.0, 0.0)).re, 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(s.norm_sq(), 0.75, epsilon = 1e-14);
    }

    #[test]
    fn xb_section_rejected_for_inner_symbol() {
        let t = tol();
        let z = RationalSymbol::from_real(&[0.0, 1.0], &[1.0], &t).unwrap();
        let err = cross_section(OperatorTag::Xb, &z, None, pt(0.1, 0.1), &t).unwrap_err();
        assert_eq!(err, Error::ExtremeSymbol);
    }
}
