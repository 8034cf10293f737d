//! Analysis on the unit circle.
//!
//! Hosts the Hermitian Laurent polynomials that represent |p|^2-type data on
//! the circle, spectral factorization of nonnegative trigonometric
//! polynomials, the extreme-point log-integral test, and reconstruction of an
//! outer function from its boundary modulus.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::ratfun::{C64, DiskPoint, Poly, RationalSymbol};
use serde::Serialize;
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// Hermitian Laurent polynomial sum_{k=-n..n} c_k e^{ik theta}, real-valued
/// and (validated) nonnegative on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    /// Coefficients for k = 0..=n; negative indices follow from Hermitian
    /// symmetry c_{-k} = conj(c_k).
    coeffs: Vec<C64>,
}

impl TrigPolynomial {
    /// Builds from the full coefficient list c_{-n}..c_n, validating the
    /// Hermitian symmetry and nonnegativity on the circle.
    pub fn new(full: &[C64], tol: &Tolerances) -> Result<Self> {
        if full.len().is_multiple_of(2) || full.is_empty() {
            return Err(Error::NotHermitian { asymmetry: f64::INFINITY });
        }
        let n = full.len() / 2;
        let scale = full.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let mut asym: f64 = 0.0;
        for k in 0..=n {
            asym = asym.max((full[n - k] - full[n + k].conj()).norm());
        }
        if asym > 1e-12 * scale {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        let t = TrigPolynomial { coeffs: full[n..].to_vec() };
        t.validate_nonnegative(tol)?;
        Ok(t)
    }

    /// Builds from nonnegative-index coefficients c_0..c_n (c_0 must be
    /// essentially real); the negative side is filled in by symmetry.
    pub fn from_half(half: Vec<C64>, tol: &Tolerances) -> Result<Self> {
        let scale = half.iter().map(|c| c.norm()).fold(1.0, f64::max);
        if half.first().map(|c| c.im.abs()).unwrap_or(0.0) > 1e-12 * scale {
            return Err(Error::NotHermitian { asymmetry: half[0].im.abs() });
        }
        let t = TrigPolynomial { coeffs: half };
        t.validate_nonnegative(tol)?;
        Ok(t)
    }

    /// Laurent data of |p(e^{i theta})|^2: the coefficient autocorrelation.
    /// Always Hermitian and nonnegative by construction.
    pub fn modulus_sq(p: &Poly) -> Self {
        let c = p.coeffs();
        if c.is_empty() {
            return TrigPolynomial { coeffs: vec![C64::new(0.0, 0.0)] };
        }
        let n = c.len() - 1;
        let coeffs = (0..=n)
            .map(|k| (0..c.len() - k).map(|j| c[j + k] * c[j].conj()).sum())
            .collect();
        TrigPolynomial { coeffs }
    }

    /// Difference of two trig polynomials, revalidated for nonnegativity.
    pub fn try_sub(&self, rhs: &TrigPolynomial, tol: &Tolerances) -> Result<TrigPolynomial> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff_at(k as i64) - rhs.coeff_at(k as i64)).collect();
        let t = TrigPolynomial { coeffs };
        t.validate_nonnegative(tol)?;
        Ok(t)
    }

    /// Laurent coefficient c_k for any k (Hermitian symmetry built in).
    pub fn coeff_at(&self, k: i64) -> C64 {
        let idx = k.unsigned_abs() as usize;
        let c = self.coeffs.get(idx).copied().unwrap_or_else(|| C64::new(0.0, 0.0));
        if k < 0 { c.conj() } else { c }
    }

    /// Half-bandwidth n after trimming negligible top coefficients.
    pub fn effective_degree(&self) -> usize {
        let scale = self.scale();
        let mut n = self.coeffs.len() - 1;
        while n > 0 && self.coeffs[n].norm() <= 1e-14 * scale {
            n -= 1;
        }
        n
    }

    fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.scale() == 0.0
    }

    /// Real value at angle theta.
    pub fn eval(&self, theta: f64) -> f64 {
        let mut acc = self.coeffs[0].re;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let e = C64::from_polar(1.0, k as f64 * theta);
            acc += 2.0 * (c * e).re;
        }
        acc
    }

    fn validate_nonnegative(&self, tol: &Tolerances) -> Result<()> {
        let n = self.coeffs.len() - 1;
        let samples = 8 * n + 16;
        let mut min = f64::INFINITY;
        for j in 0..samples {
            min = min.min(self.eval(TWO_PI * j as f64 / samples as f64));
        }
        if min < -tol.eps_psd * self.scale().max(1.0) {
            return Err(Error::NotNonnegative { min });
        }
        Ok(())
    }
}

impl Serialize for TrigPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            coeffs: Vec<[f64; 2]>,
        }
        let n = self.coeffs.len() - 1;
        let coeffs = (-(n as i64)..=n as i64)
            .map(|k| {
                let c = self.coeff_at(k);
                [c.re, c.im]
            })
            .collect();
        Repr { n, coeffs }.serialize(serializer)
    }
}

/// Equispaced samples of a circle function at theta_j = 2 pi j / M.
#[derive(Debug, Clone)]
pub struct BoundarySampler {
    values: Vec<C64>,
}

impl BoundarySampler {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        let m = values.len();
        if m < 16 || !m.is_power_of_two() {
            return Err(Error::BadSamplerSize { m });
        }
        Ok(BoundarySampler { values })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        BoundarySampler::new((0..m).map(|j| f(TWO_PI * j as f64 / m as f64)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Samples decimated by `stride` (must divide M), for node-halving trends.
    fn decimate(&self, stride: usize) -> Vec<C64> {
        self.values.iter().step_by(stride).copied().collect()
    }
}

/// Rectangle-rule mean over the circle; exact for trig polynomials of degree
/// below M/2. Returns the real part (inputs are real-valued circle data).
pub fn circle_mean(s: &BoundarySampler) -> f64 {
    s.values.iter().map(|v| v.re).sum::<f64>() / s.values.len() as f64
}

fn complex_mean(values: &[C64]) -> C64 {
    values.iter().sum::<C64>() / C64::new(values.len() as f64, 0.0)
}

/// Extreme-point verdict for a symbol of the closed unit ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum ExtremeVerdict {
    /// The log-integral is -infinity (inner symbol, or heuristic divergence).
    Extreme,
    /// Finite value of the integral of log(1 - |b|^2) over the circle.
    NonExtreme { value: f64 },
}

/// How trustworthy the verdict is: rational symbols are decided exactly,
/// sampled symbols by a divergence heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    Exact,
    Heuristic,
}

/// Extreme-point test for a rational symbol.
///
/// A rational symbol is extreme iff it is inner, which is decided
/// algebraically. Otherwise the integral of log(1 - |b|^2) is finite and is
/// computed by quadrature that splits the circle at the contact points
/// |b| = 1 and refines with a tanh-sinh substitution near each of them.
pub fn extreme_test(b: &RationalSymbol, tol: &Tolerances) -> Result<(ExtremeVerdict, Certainty)> {
    if b.is_inner(1e-10) {
        return Ok((ExtremeVerdict::Extreme, Certainty::Exact));
    }
    if b.is_zero() {
        return Ok((ExtremeVerdict::NonExtreme { value: 0.0 }, Certainty::Exact));
    }
    let q_sq = TrigPolynomial::modulus_sq(b.den());
    let p_sq = TrigPolynomial::modulus_sq(b.num());
    let u = q_sq.try_sub(&p_sq, tol)?; // |q|^2 (1 - |b|^2) on the circle
    let factor = fejer_riesz(&u, tol)?;
    let singular = unimodular_root_angles(&factor, tol)?;
    // 1 - |b|^2 = |factor/q|^2 on the circle; evaluating the polynomials
    // directly stays accurate next to the boundary zeros, where the trig
    // form of u loses all significant digits
    let integrand = |theta: f64| {
        let z = C64::from_polar(1.0, theta);
        2.0 * (factor.eval(z).norm().ln() - b.den().eval(z).norm().ln())
    };
    let value = if singular.is_empty() {
        periodic_mean(&integrand)
    } else {
        split_singular_mean(&integrand, &singular)
    };
    Ok((ExtremeVerdict::NonExtreme { value }, Certainty::Exact))
}

/// Extreme-point heuristic for a boundary-sampled symbol: the quadrature
/// value of log(1 - |b|^2) under node halving. A value below the divergence
/// cutoff that keeps decreasing as nodes double is reported Extreme.
pub fn extreme_test_sampled(
    s: &BoundarySampler,
    tol: &Tolerances,
) -> Result<(ExtremeVerdict, Certainty)> {
    let max_mod = s.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max_mod > 1.0 + tol.eps_sup {
        return Err(Error::InvalidSymbol { max_modulus: max_mod });
    }
    let log_defect = |vals: &[C64]| -> f64 {
        let logs: Vec<C64> = vals
            .iter()
            .map(|v| {
                let d = 1.0 - v.norm_sqr();
                C64::new(if d <= 0.0 { f64::NEG_INFINITY } else { d.ln() }, 0.0)
            })
            .collect();
        match patch_singular_nodes(&logs) {
            Some(p) => p.iter().map(|c| c.re).sum::<f64>() / p.len() as f64,
            None => f64::NEG_INFINITY,
        }
    };
    let coarse = log_defect(&s.decimate(4));
    let mid = log_defect(&s.decimate(2));
    let fine = log_defect(&s.values);
    let diverges = fine < tol.divergence_cutoff && fine <= mid && mid <= coarse;
    if diverges || !fine.is_finite() {
        Ok((ExtremeVerdict::Extreme, Certainty::Heuristic))
    } else {
        Ok((ExtremeVerdict::NonExtreme { value: fine }, Certainty::Heuristic))
    }
}

/// Angles of the unimodular roots of a spectral factor: the points where the
/// factored trig polynomial touches zero on the circle.
fn unimodular_root_angles(factor: &Poly, tol: &Tolerances) -> Result<Vec<f64>> {
    let mut angles: Vec<f64> = factor
        .roots(tol)?
        .into_iter()
        .filter(|z| (z.norm() - 1.0).abs() <= 10.0 * tol.unimodular_snap)
        .map(|z| z.arg().rem_euclid(TWO_PI))
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(angles)
}

/// Trapezoid mean of a smooth periodic function with node doubling until the
/// estimate stabilizes.
fn periodic_mean(f: &impl Fn(f64) -> f64) -> f64 {
    let mut m = 256usize;
    let mut prev = f64::NAN;
    loop {
        let mean = (0..m).map(|j| f(TWO_PI * j as f64 / m as f64)).sum::<f64>() / m as f64;
        if (mean - prev).abs() <= 1e-12 * mean.abs().max(1.0) || m >= 1 << 16 {
            return mean;
        }
        prev = mean;
        m *= 2;
    }
}

/// Mean of a function with integrable log singularities at the given sorted
/// angles: tanh-sinh quadrature on each segment between consecutive
/// singularities.
fn split_singular_mean(f: &impl Fn(f64) -> f64, singular: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, &a) in singular.iter().enumerate() {
        let b = if i + 1 < singular.len() { singular[i + 1] } else { singular[0] + TWO_PI };
        total += tanh_sinh(f, a, b);
    }
    total / TWO_PI
}

/// Tanh-sinh (double-exponential) quadrature over (a, b); endpoint
/// singularities of log type are handled by the substitution. Levels double
/// until two estimates agree.
fn tanh_sinh(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |h: f64| -> f64 {
        let t_max = 6.5;
        let n = (t_max / h).floor() as i64;
        let mut acc = 0.0;
        for k in -n..=n {
            let t = k as f64 * h;
            let u = 0.5 * PI * t.sinh();
            let x = u.tanh();
            let w = h * 0.5 * PI * t.cosh() / u.cosh().powi(2);
            if !w.is_finite() || w == 0.0 {
                continue;
            }
            let v = f(mid + half * x);
            if v.is_finite() {
                acc += w * v;
            }
        }
        half * acc
    };
    let mut h = 0.5;
    let mut prev = eval(h);
    for _ in 0..8 {
        h *= 0.5;
        let cur = eval(h);
        if (cur - prev).abs() <= 1e-13 * cur.abs().max(1.0) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Spectral (Fejer-Riesz) factor of a nonnegative trig polynomial t: the
/// polynomial r of degree n with no roots in the open unit disk, r(0) > 0,
/// and |r|^2 = t on the circle.
///
/// The factorization lifts t to P(z) = z^n t(z), pairs the roots of P under
/// the reflection z -> 1/conj(z), keeps the outside-or-on-circle half, and
/// fixes the scalar by matching the top Laurent coefficient.
pub fn fejer_riesz(t: &TrigPolynomial, tol: &Tolerances) -> Result<Poly> {
    if t.is_zero() {
        return Err(Error::ZeroTrigPolynomial);
    }
    let n = t.effective_degree();
    if n == 0 {
        let c0 = t.coeff_at(0).re;
        if c0 < 0.0 {
            return Err(Error::NotNonnegative { min: c0 });
        }
        return Ok(Poly::constant(C64::new(c0.sqrt(), 0.0)));
    }
    // P(z) = z^n t(z), degree 2n, self-inversive
    let lifted = Poly::new((0..=2 * n).map(|k| t.coeff_at(k as i64 - n as i64)).collect());
    let roots = lifted.roots(tol)?;

    let mut selected: Vec<C64> = Vec::with_capacity(n);
    let mut circle_band: Vec<C64> = Vec::new();
    for z in roots {
        let d = (z.norm() - 1.0).abs();
        if d <= tol.unimodular_cluster {
            circle_band.push(z);
        } else if z.norm() > 1.0 {
            selected.push(z);
        }
        // inside roots are the reflections of the selected ones; dropped
    }
    for cluster in cluster_roots(&circle_band, 4.0 * tol.unimodular_cluster) {
        if cluster.len() % 2 != 0 {
            let centroid = complex_mean(&cluster);
            return Err(Error::OddUnimodularMultiplicity {
                count: cluster.len(),
                angle: centroid.arg(),
            });
        }
        let centroid = complex_mean(&cluster);
        let refined = refine_multiple_root(&lifted, centroid, cluster.len(), tol);
        let snapped = refined / C64::new(refined.norm(), 0.0);
        selected.extend(std::iter::repeat_n(snapped, cluster.len() / 2));
    }
    if selected.len() != n {
        return Err(Error::FactorizationFailure(format!(
            "root pairing selected {} of {} factor roots",
            selected.len(),
            n
        )));
    }

    let monic = Poly::from_roots(&selected);
    let m0 = monic.coeff(0);
    let gamma_sq = t.coeff_at(n as i64) / m0.conj();
    if gamma_sq.re <= 0.0 || gamma_sq.im.abs() > 1e-8 * gamma_sq.re.abs().max(1e-300) {
        return Err(Error::FactorizationFailure(format!(
            "scalar matching produced non-positive |gamma|^2 = {gamma_sq}"
        )));
    }
    // phase chosen so r(0) = gamma * m0 is real and positive
    let gamma = C64::new(gamma_sq.re.sqrt(), 0.0) * m0.conj() / C64::new(m0.norm(), 0.0);
    Ok(monic.scale(gamma))
}

/// Sharpens the location of a root of multiplicity m: the point is a simple
/// root of the (m-1)-th derivative, where Newton converges quadratically.
/// The refined point is kept only if it stays near the starting cluster.
fn refine_multiple_root(p: &Poly, start: C64, multiplicity: usize, tol: &Tolerances) -> C64 {
    let mut d = p.clone();
    for _ in 1..multiplicity {
        d = d.derivative();
    }
    let dd = d.derivative();
    let mut z = start;
    for _ in 0..6 {
        let dz = dd.eval(z);
        if dz.norm() < 1e-300 {
            return start;
        }
        z -= d.eval(z) / dz;
    }
    if (z - start).norm() <= 8.0 * tol.unimodular_cluster {
        z
    } else {
        start
    }
}

/// Greedy transitive clustering of nearby points.
fn cluster_roots(points: &[C64], radius: f64) -> Vec<Vec<C64>> {
    let mut unused: Vec<C64> = points.to_vec();
    let mut clusters = Vec::new();
    while let Some(seed) = unused.pop() {
        let mut cluster = vec![seed];
        let mut grew = true;
        while grew {
            grew = false;
            let mut i = 0;
            while i < unused.len() {
                if cluster.iter().any(|c| (c - unused[i]).norm() <= radius) {
                    cluster.push(unused.swap_remove(i));
                    grew = true;
                } else {
                    i += 1;
                }
            }
        }
        clusters.push(cluster);
    }
    clusters
}

/// Evaluates at z the outer function with boundary modulus exp(logw / 2),
/// via the Herglotz-exponential representation
/// a(z) = exp( mean_theta[ (e^{i theta} + z)/(e^{i theta} - z) * logw/2 ] ).
///
/// Non-finite samples (log of a boundary zero at a grid node) are patched by
/// fitting the local log singularity from neighboring nodes, keeping the
/// rectangle rule consistent with the integrable singularity.
pub fn outer_from_modulus(logw: &BoundarySampler, z: DiskPoint, tol: &Tolerances) -> Result<C64> {
    let patched = patch_singular_nodes(logw.values()).ok_or(Error::DivergentLogIntegral)?;
    let mean_log = patched.iter().map(|c| c.re).sum::<f64>() / patched.len() as f64;
    if mean_log < tol.divergence_cutoff {
        return Err(Error::DivergentLogIntegral);
    }
    let m = patched.len();
    let zz = z.value();
    let kernel_weighted: Vec<C64> = (0..m)
        .map(|j| {
            let e = C64::from_polar(1.0, TWO_PI * j as f64 / m as f64);
            (e + zz) / (e - zz) * C64::new(0.5, 0.0) * patched[j]
        })
        .collect();
    Ok(complex_mean(&kernel_weighted).exp())
}

/// Replaces non-finite log samples by the value that makes the rectangle
/// rule reproduce the integral of the local model 2m log|t - t0| + c over
/// the singular cell, with m and c fitted from the four nearest neighbors.
/// Returns None when a singular node has no finite neighbors to fit from.
fn patch_singular_nodes(values: &[C64]) -> Option<Vec<C64>> {
    let m = values.len();
    let h = TWO_PI / m as f64;
    let mut out = values.to_vec();
    for j in 0..m {
        if out[j].re.is_finite() {
            continue;
        }
        let at = |off: i64| values[((j as i64 + off).rem_euclid(m as i64)) as usize];
        let (p1, m1, p2, m2) = (at(1), at(-1), at(2), at(-2));
        if ![p1, m1, p2, m2].iter().all(|v| v.re.is_finite()) {
            return None;
        }
        let v1 = 0.5 * (p1.re + m1.re);
        let v2 = 0.5 * (p2.re + m2.re);
        let slope = (v2 - v1) / std::f64::consts::LN_2; // 2m of the log model
        let offset = v1 - slope * h.ln();
        out[j] = C64::new(slope * ((0.5 * h).ln() - 1.0) + offset, 0.0);
    }
    Some(out)
}
