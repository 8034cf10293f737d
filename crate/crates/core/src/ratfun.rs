//! Complex polynomial and rational-function arithmetic.
//!
//! `Poly` stores dense Taylor coefficients (index = power of z) and is the
//! substrate for every symbol in the toolkit. `RationalSymbol` is a reduced
//! quotient of two polynomials; the `new` constructor additionally validates
//! the H-infinity-ball invariants (no poles in the closed disk, sup-norm on
//! the circle at most one), while `quotient` builds an unconstrained rational
//! function such as a derivative or a ratio of symbols.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type C64 = Complex64;

/// Dense complex polynomial; coefficient `k` multiplies `z^k`.
///
/// The zero polynomial is canonicalized as an empty coefficient sequence, and
/// the trailing stored coefficient is always nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    /// Builds a polynomial, dropping trailing zero coefficients.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Poly::new(vec![c])
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Monic polynomial with the given roots (with multiplicity).
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut coeffs = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= r * c;
            }
            coeffs = next;
        }
        Poly::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `z^k` (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_else(|| C64::new(0.0, 0.0))
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * C64::new(k as f64, 0.0))
                .collect(),
        )
    }

    /// The conjugate-reciprocal p~(z) = z^deg(p) * conj(p(1/conj(z))):
    /// coefficients reversed and conjugated. On the circle |p~| = |p|.
    pub fn conj_reciprocal(&self) -> Poly {
        Poly::new(self.coeffs.iter().rev().map(|c| c.conj()).collect())
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Synthetic division by (z - root). The remainder p(root) is discarded,
    /// so this is only exact when `root` actually is a root.
    pub fn deflate(&self, root: C64) -> Poly {
        let n = self.coeffs.len();
        if n <= 1 {
            return Poly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); n - 1];
        let mut carry = self.coeffs[n - 1];
        for k in (1..n).rev() {
            out[k - 1] = carry;
            carry = self.coeffs[k - 1] + root * carry;
        }
        Poly::new(out)
    }

    /// All deg(p) roots with multiplicity, via Aberth-Ehrlich simultaneous
    /// iteration followed by one guarded Newton polish step.
    pub fn roots(&self, tol: &Tolerances) -> Result<Vec<C64>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut coeffs = self.coeffs.clone();
        // exact zero roots come from exactly-zero low coefficients
        let mut zeros_at_origin = 0usize;
        while coeffs.len() > 1 && coeffs[0].norm() == 0.0 {
            coeffs.remove(0);
            zeros_at_origin += 1;
        }
        let n = coeffs.len() - 1;
        let mut roots = Vec::with_capacity(n + zeros_at_origin);
        roots.extend(std::iter::repeat_n(C64::new(0.0, 0.0), zeros_at_origin));
        if n == 0 {
            return Ok(roots);
        }
        if n == 1 {
            roots.push(-coeffs[0] / coeffs[1]);
        } else {
            roots.extend(aberth(&coeffs)?);
        }
        let deriv = self.derivative();
        for r in roots.iter_mut() {
            *r = newton_polish(self, &deriv, *r);
        }
        self.check_root_residuals(&roots, tol)?;
        Ok(roots)
    }

    fn check_root_residuals(&self, roots: &[C64], tol: &Tolerances) -> Result<()> {
        let deg = self.degree().unwrap_or(0) as i32;
        let scale = self.max_coeff_norm();
        for &r in roots {
            let bound = tol.eps_root * (1.0 + r.norm()).powi(deg) * scale;
            let residual = self.eval(r).norm();
            if residual > bound {
                return Err(Error::RootResidual { residual, bound });
            }
        }
        Ok(())
    }
}

/// Aberth-Ehrlich simultaneous root iteration on a polynomial with nonzero
/// constant term. Cubically convergent for simple roots; clusters of
/// multiple roots settle at the usual eps^(1/m) radius, which downstream
/// consumers absorb by clustering.
fn aberth(coeffs: &[C64]) -> Result<Vec<C64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let monic: Vec<C64> = coeffs.iter().map(|&c| c / lead).collect();
    let eval = |z: C64| -> (C64, C64) {
        // value and derivative by a joint Horner pass
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    // initial guesses on a circle of the Cauchy-bound radius, with an angle
    // offset that breaks coefficient symmetries
    let radius = 1.0 + monic.iter().take(n).map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.376) / n as f64 + 0.5))
        .collect();
    let scale = monic.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for _ in 0..200 {
        let mut moved: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = eval(z[k]);
            if p.norm() <= 1e-15 * scale * (1.0 + z[k].norm()).powi(n as i32) {
                continue;
            }
            let newton = if dp.norm() > 1e-300 { p / dp } else { C64::new(1e-8, 0.0) };
            let repulsion: C64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| C64::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let denom = C64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 1e-300 { newton / denom } else { newton };
            z[k] -= step;
            moved = moved.max(step.norm() / (1.0 + z[k].norm()));
        }
        if moved <= 1e-14 {
            break;
        }
    }
    Ok(z)
}

fn newton_polish(p: &Poly, dp: &Poly, z: C64) -> C64 {
    let pz = p.eval(z);
    let dpz = dp.eval(z);
    if dpz.norm() < 1e-300 {
        return z;
    }
    let cand = z - pz / dpz;
    if p.eval(cand).norm() < pz.norm() {
        cand
    } else {
        z
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "({:.6}{:+.6}i)", c.re, c.im)?;
            } else {
                write!(f, "({:.6}{:+.6}i)z^{}", c.re, c.im, k)?;
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&[c.re, c.im])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct PolyVisitor;

        // each entry is either a real number or an [re, im] pair
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Entry {
            Real(f64),
            Pair([f64; 2]),
        }

        impl<'de> Visitor<'de> for PolyVisitor {
            type Value = Poly;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a sequence of numbers or [re, im] pairs")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Poly, A::Error> {
                let mut coeffs = Vec::new();
                while let Some(entry) = seq.next_element::<Entry>()? {
                    coeffs.push(match entry {
                        Entry::Real(x) => C64::new(x, 0.0),
                        Entry::Pair([re, im]) => C64::new(re, im),
                    });
                }
                Ok(Poly::new(coeffs))
            }
        }
        deserializer.deserialize_seq(PolyVisitor)
    }
}

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    value: C64,
}

impl DiskPoint {
    pub fn new(value: C64) -> Result<Self> {
        if value.norm() < 1.0 {
            Ok(DiskPoint { value })
        } else {
            Err(Error::NotInDisk { point: value })
        }
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        DiskPoint::new(C64::new(re, im))
    }

    pub fn value(&self) -> C64 {
        self.value
    }

    pub fn conj(&self) -> DiskPoint {
        DiskPoint { value: self.value.conj() }
    }

    /// Squared-norm denominators blow up like (1-|w|^2)^-2 past this radius.
    pub fn is_near_boundary(&self) -> bool {
        self.value.norm() > 0.99
    }
}

impl Serialize for DiskPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.value.re, self.value.im].serialize(serializer)
    }
}

/// A reduced rational function p/q.
///
/// Values built with [`RationalSymbol::new`] additionally satisfy the symbol
/// invariants: q has no roots in (or numerically near) the closed unit disk
/// and sup_T |p/q| <= 1 + eps_sup. Values built with
/// [`RationalSymbol::quotient`] (derivatives, ratios like b/a) carry no such
/// guarantee and may have circle poles.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSymbol {
    num: Poly,
    den: Poly,
    normalized: bool,
}

impl RationalSymbol {
    /// Validated symbol in the closed unit ball of H-infinity.
    pub fn new(num: Poly, den: Poly, tol: &Tolerances) -> Result<Self> {
        let sym = Self::quotient(num, den, tol)?;
        for root in sym.den.roots(tol)? {
            if root.norm() <= 1.0 + tol.eps_pole {
                return Err(Error::PoleInClosedDisk { root });
            }
        }
        let sup = sym.sup_on_circle(circle_sample_count(&sym));
        if sup > 1.0 + tol.eps_sup {
            return Err(Error::SupNormExceeded { sup });
        }
        Ok(sym)
    }

    /// Reduced rational function without the boundedness validation.
    pub fn quotient(num: Poly, den: Poly, tol: &Tolerances) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (num, den) = cancel_common_roots(num, den, tol)?;
        Ok(RationalSymbol { num, den, normalized: true })
    }

    /// Convenience constructor from real coefficient slices.
    pub fn from_real(num: &[f64], den: &[f64], tol: &Tolerances) -> Result<Self> {
        RationalSymbol::new(Poly::from_real(num), Poly::from_real(den), tol)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Evaluation that reports a pole when the denominator nearly vanishes.
    pub fn eval_checked(&self, z: C64) -> Result<C64> {
        let d = self.den.eval(z);
        if d.norm() <= 1e-13 * self.den.max_coeff_norm().max(1.0) {
            return Err(Error::PoleAtPoint { point: z });
        }
        Ok(self.num.eval(z) / d)
    }

    /// Quotient-rule derivative (p'q - pq')/q^2, reduced.
    pub fn derivative(&self, tol: &Tolerances) -> Result<RationalSymbol> {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let den = &self.den * &self.den;
        RationalSymbol::quotient(num, den, tol)
    }

    pub fn sup_on_circle(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|j| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
                self.eval(C64::from_polar(1.0, theta)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// True when the symbol is inner (a finite Blaschke product): the reduced
    /// numerator equals a unimodular constant times z^m times the
    /// conjugate-reciprocal of the denominator.
    pub fn is_inner(&self, check_tol: f64) -> bool {
        if self.num.is_zero() {
            return false;
        }
        let qr = self.den.conj_reciprocal();
        let (dp, dq) = (self.num.degree().unwrap(), qr.degree().unwrap());
        if dp < dq {
            return false;
        }
        let shift = dp - dq;
        let c = self.num.coeff(dp) / qr.coeff(dq);
        if (c.norm() - 1.0).abs() > check_tol {
            return false;
        }
        let scale = self.num.max_coeff_norm();
        for k in 0..=dp {
            let expected = if k >= shift { c * qr.coeff(k - shift) } else { C64::new(0.0, 0.0) };
            if (self.num.coeff(k) - expected).norm() > check_tol * scale {
                return false;
            }
        }
        true
    }

    /// Rescales num and den so the lowest-order nonzero denominator
    /// coefficient becomes one. Gives a canonical representative for
    /// coefficientwise comparison of rational functions.
    pub fn canonical(&self) -> RationalSymbol {
        let pivot = self.den.coeffs().iter().find(|c| c.norm() > 0.0);
        match pivot {
            Some(&p) => RationalSymbol {
                num: self.num.scale(C64::new(1.0, 0.0) / p),
                den: self.den.scale(C64::new(1.0, 0.0) / p),
                normalized: self.normalized,
            },
            None => self.clone(),
        }
    }
}

impl Serialize for RationalSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            num: &'a Poly,
            den: &'a Poly,
        }
        Repr { num: &self.num, den: &self.den }.serialize(serializer)
    }
}

fn circle_sample_count(sym: &RationalSymbol) -> usize {
    let deg = sym.num.coeffs().len() + sym.den.coeffs().len();
    (16 * (deg + 2)).max(1024)
}

/// Numerical gcd cancellation: roots of num and den matched within
/// `eps_cancel` are deflated from both sides. When nothing matches the
/// original coefficients are returned untouched, so exact inputs stay exact.
fn cancel_common_roots(num: Poly, den: Poly, tol: &Tolerances) -> Result<(Poly, Poly)> {
    if num.is_zero() {
        return Ok((Poly::zero(), Poly::one()));
    }
    if den.degree() == Some(0) || num.degree() == Some(0) {
        return Ok((num, den));
    }
    let nroots = num.roots(tol)?;
    let droots = den.roots(tol)?;
    let mut used = vec![false; droots.len()];
    let mut matched = Vec::new();
    for &nr in &nroots {
        let hit = droots
            .iter()
            .enumerate()
            .filter(|(i, dr)| !used[*i] && (nr - **dr).norm() <= tol.eps_cancel)
            .min_by(|(_, a), (_, b)| {
                (nr - **a).norm().partial_cmp(&(nr - **b).norm()).unwrap()
            });
        if let Some((i, &dr)) = hit {
            used[i] = true;
            matched.push((nr, dr));
        }
    }
    if matched.is_empty() {
        return Ok((num, den));
    }
    let mut num = num;
    let mut den = den;
    for (nr, dr) in matched {
        num = num.deflate(nr);
        den = den.deflate(dr);
    }
    Ok((num, den))
}
