//! Finite-section model of H(b): truncated Toeplitz operators, the defect
//! operator D = I - T T*, and numerical verification of the structural
//! identities of the backward and forward shifts on H(b).
//!
//! All verification routines report residuals that should decrease as the
//! truncation order N grows; none of them proves anything at a fixed N.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::ratfun::{C64, DiskPoint, RationalSymbol};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

/// Taylor coefficients of f in the truncated monomial basis 1, z, ..., z^{N-1}.
pub type CoefVector = Vec<C64>;

/// First `n` Taylor coefficients of a rational symbol, by series division.
pub fn taylor_coefficients(b: &RationalSymbol, n: usize) -> CoefVector {
    let p = b.num();
    let q = b.den();
    let q0 = q.coeff(0);
    let mut out = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        let mut acc = p.coeff(k);
        for i in 1..=k.min(q.degree().unwrap_or(0)) {
            acc -= q.coeff(i) * out[k - i];
        }
        out[k] = acc / q0;
    }
    out
}

/// N x N lower-triangular Toeplitz section of T_b: entry (j, k) is the
/// Taylor coefficient of z^{j-k} in b.
pub fn toeplitz_section(b: &RationalSymbol, n: usize) -> DMatrix<C64> {
    let taylor = taylor_coefficients(b, n);
    DMatrix::from_fn(n, n, |j, k| {
        if j >= k { taylor[j - k] } else { C64::new(0.0, 0.0) }
    })
}

/// Coefficient backward shift: (f - f(0))/z, i.e. a left shift.
pub fn apply_backward_shift(f: &[C64]) -> CoefVector {
    let mut out: CoefVector = f[1..].to_vec();
    out.push(C64::new(0.0, 0.0));
    out
}

/// Coefficient forward shift z*f: a right shift that drops the top
/// coefficient at the truncation order. The flag reports whether anything
/// nonzero was lost.
pub fn apply_forward_shift(f: &[C64]) -> (CoefVector, bool) {
    let mut out = vec![C64::new(0.0, 0.0)];
    out.extend_from_slice(&f[..f.len() - 1]);
    (out, f[f.len() - 1].norm() != 0.0)
}

/// The divided difference Q_w f = (f - f(w))/(z - w) by synthetic division.
pub fn apply_q(f: &[C64], omega: DiskPoint) -> CoefVector {
    let w = omega.value();
    let n = f.len();
    let mut out = vec![C64::new(0.0, 0.0); n];
    let mut carry = C64::new(0.0, 0.0);
    for k in (1..n).rev() {
        carry = f[k] + w * carry;
        out[k - 1] = carry;
    }
    out
}

/// Horner evaluation of a coefficient vector.
pub fn eval_coef(f: &[C64], z: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &c in f.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Finite-section model of H(b) at order N.
///
/// Carries the defect operator D = I - T T* together with its spectral
/// decomposition; the H(b) inner product is realized as <D+ f, g> with a
/// pseudo-inverse thresholded at tau relative to the largest eigenvalue.
pub struct DefectModel {
    order: usize,
    symbol: RationalSymbol,
    taylor: CoefVector,
    /// Eigenvalues of D, descending.
    eigenvalues: Vec<f64>,
    /// Matching eigenvectors as columns.
    eigenvectors: DMatrix<C64>,
    tau: f64,
    pinv: DMatrix<C64>,
}

/// Builds the defect model. Works for extreme symbols too; those simply
/// produce a defect operator of low numerical rank.
pub fn build_defect_model(b: &RationalSymbol, n: usize, tol: &Tolerances) -> Result<DefectModel> {
    assert!(n >= 2, "model order must be at least 2");
    let t = toeplitz_section(b, n);
    let d = DMatrix::<C64>::identity(n, n) - &t * t.adjoint();
    let asym = (&d - d.adjoint()).norm();
    if asym > 1e-12 * d.norm().max(1.0) {
        return Err(Error::FactorizationFailure(format!(
            "defect operator asymmetry {asym:.3e}"
        )));
    }
    let d = (d.clone() + d.adjoint()).scale(0.5);
    let eig = d.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors =
        DMatrix::<C64>::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    let lambda_max = eigenvalues.first().copied().unwrap_or(0.0);
    if let Some(&min) = eigenvalues.last() {
        if min < -1e-10 * lambda_max.max(1.0) {
            return Err(Error::NotPositiveSemiDefinite { min });
        }
    }
    let tau = tol.tau_rel * lambda_max;
    let mut pinv = DMatrix::<C64>::zeros(n, n);
    for (i, &lam) in eigenvalues.iter().enumerate() {
        if lam > tau {
            let v = eigenvectors.column(i);
            pinv += (v * v.adjoint()).scale(1.0 / lam);
        }
    }
    Ok(DefectModel {
        order: n,
        symbol: b.clone(),
        taylor: taylor_coefficients(b, n),
        eigenvalues,
        eigenvectors,
        tau,
        pinv,
    })
}

impl DefectModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn symbol(&self) -> &RationalSymbol {
        &self.symbol
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn numerical_rank(&self) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > self.tau).count()
    }

    fn check_len(&self, f: &[C64]) -> Result<()> {
        if f.len() != self.order {
            return Err(Error::OrderMismatch { got: f.len(), expected: self.order });
        }
        Ok(())
    }

    fn to_vec(&self, f: &[C64]) -> DVector<C64> {
        DVector::from_column_slice(f)
    }

    /// Orthogonal projection onto the numerical range of D.
    pub fn project(&self, f: &[C64]) -> CoefVector {
        let v = self.to_vec(f);
        let mut out = DVector::<C64>::zeros(self.order);
        for (i, &lam) in self.eigenvalues.iter().enumerate() {
            if lam > self.tau {
                let col = self.eigenvectors.column(i);
                out += col * (col.adjoint() * &v)[(0, 0)];
            }
        }
        out.as_slice().to_vec()
    }

    /// Relative distance of f from the numerical range of D.
    pub fn projection_residual(&self, f: &[C64]) -> f64 {
        let norm = self.to_vec(f).norm();
        if norm == 0.0 {
            return 0.0;
        }
        let proj = self.to_vec(&self.project(f));
        (self.to_vec(f) - proj).norm() / norm
    }

    /// The H(b) inner product <D+ f, g>_l2, guarded by the range check: both
    /// arguments must project onto the numerical range of D with relative
    /// residual at most 1e-6.
    pub fn hb_inner(&self, f: &[C64], g: &[C64]) -> Result<C64> {
        self.check_len(f)?;
        self.check_len(g)?;
        for v in [f, g] {
            let residual = self.projection_residual(v);
            if residual > 1e-6 {
                return Err(Error::OutOfRange { residual });
            }
        }
        Ok(self.hb_inner_raw(f, g))
    }

    /// Unguarded inner product; null-space components are annihilated by the
    /// pseudo-inverse, so this equals the inner product of the projections.
    pub fn hb_inner_raw(&self, f: &[C64], g: &[C64]) -> C64 {
        let df = &self.pinv * self.to_vec(f);
        (self.to_vec(g).adjoint() * df)[(0, 0)]
    }

    pub fn hb_norm_raw(&self, f: &[C64]) -> f64 {
        self.hb_inner_raw(f, f).re.max(0.0).sqrt()
    }

    /// Truncated Taylor coefficients of the kernel k^b_w.
    pub fn kb_coeffs(&self, omega: DiskPoint) -> CoefVector {
        let w = omega.value();
        let bw = self.symbol.eval(w);
        let mut geo = Vec::with_capacity(self.order);
        let mut acc = C64::new(1.0, 0.0);
        for _ in 0..self.order {
            geo.push(acc);
            acc *= w.conj();
        }
        // (1 - conj(b(w)) b(z)) * szego, truncated convolution
        let mut top = vec![C64::new(0.0, 0.0); self.order];
        for (k, t) in top.iter_mut().enumerate() {
            *t = -bw.conj() * self.taylor[k];
        }
        top[0] += C64::new(1.0, 0.0);
        (0..self.order)
            .map(|k| (0..=k).map(|j| top[j] * geo[k - j]).sum())
            .collect()
    }

    /// Truncated Taylor coefficients of the Szego kernel k_w.
    pub fn cauchy_coeffs(&self, omega: DiskPoint) -> CoefVector {
        let w = omega.value().conj();
        let mut out = Vec::with_capacity(self.order);
        let mut acc = C64::new(1.0, 0.0);
        for _ in 0..self.order {
            out.push(acc);
            acc *= w;
        }
        out
    }

    /// Residual of the reproducing property |f(w) - <f, k^b_w>_b|.
    pub fn check_reproducing(&self, f: &[C64], omega: DiskPoint) -> Result<f64> {
        self.check_len(f)?;
        let kb = self.kb_coeffs(omega);
        let inner = self.hb_inner(f, &kb)?;
        Ok((eval_coef(f, omega.value()) - inner).norm())
    }

    /// Residual of the adjoint identity X_b* = S_b - b (x) S*b.
    ///
    /// Route one reconstructs X_b* f from its inner products against a fixed
    /// low-degree monomial test basis, solving the Gram system by a
    /// thresholded least-squares solve. Route two applies the right-hand
    /// side directly: S_b f - <f, S*b>_b b. Returns the relative H(b)-norm
    /// of the difference.
    pub fn check_adjoint_identity(&self, f: &[C64]) -> Result<f64> {
        self.check_len(f)?;
        let f = self.project(f);
        let n = self.order;
        let f_degree = f.iter().rposition(|c| c.norm() > 1e-12).unwrap_or(0);
        let taylor_len = self.taylor.iter().rposition(|c| c.norm() > 1e-12).unwrap_or(0) + 1;
        let m = (f_degree + 2).max(taylor_len + 1).max(16).min(n / 2);

        // route one: Gram reconstruction of the adjoint applied to f
        let gram = DMatrix::<C64>::from_fn(m, m, |i, j| self.pinv[(i, j)]);
        let rhs = DVector::<C64>::from_fn(m, |i, _| {
            // <e_i, y>_b must equal <X e_i, f>_b; X e_i = e_{i-1}
            if i == 0 {
                C64::new(0.0, 0.0)
            } else {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[i - 1] = C64::new(1.0, 0.0);
                self.hb_inner_raw(&e, &f).conj()
            }
        });
        let coeffs = hermitian_lstsq(&gram, &rhs);
        let mut route_one = vec![C64::new(0.0, 0.0); n];
        route_one[..m].copy_from_slice(coeffs.as_slice());

        // route two: S_b f - <f, S*b>_b b
        let sstar_b = apply_backward_shift(&self.taylor);
        let scalar = self.hb_inner_raw(&f, &sstar_b);
        let (sf, _) = apply_forward_shift(&f);
        let route_two: CoefVector =
            (0..n).map(|k| sf[k] - scalar * self.taylor[k]).collect();

        let diff: CoefVector = (0..n).map(|k| route_one[k] - route_two[k]).collect();
        let denom = self.hb_norm_raw(&route_two).max(1e-300);
        Ok(self.hb_norm_raw(&diff) / denom)
    }

    /// Verifies the two constructive identities behind the Fredholm property
    /// of S_b - w I: range orthogonality <(S_b - w)g, k^b_w>_b = 0 and the
    /// reconstruction f = (S_b - w) Q_w f for f vanishing at w.
    pub fn check_lemma21(
        &self,
        omega: DiskPoint,
        trials: usize,
        rng: &mut impl Rng,
    ) -> Result<Lemma21Residuals> {
        let n = self.order;
        let w = omega.value();
        let kb = self.kb_coeffs(omega);
        let kb_norm = self.hb_norm_raw(&kb).max(1e-300);
        let mut orthogonality: f64 = 0.0;
        let mut reconstruction: f64 = 0.0;
        for _ in 0..trials {
            let g = self.project(&random_poly(n, 8, rng));
            let (sg, _) = apply_forward_shift(&g);
            let shifted: CoefVector = (0..n).map(|k| sg[k] - w * g[k]).collect();
            let inner = self.hb_inner_raw(&shifted, &kb).norm();
            orthogonality =
                orthogonality.max(inner / (self.hb_norm_raw(&g).max(1e-300) * kb_norm));

            // f = (z - w) h vanishes at w; Q_w f recovers h
            let h = random_poly(n, 8, rng);
            let mut f = vec![C64::new(0.0, 0.0); n];
            for k in 0..n - 1 {
                f[k + 1] += h[k];
                f[k] -= w * h[k];
            }
            let q = apply_q(&f, omega);
            let (sq, _) = apply_forward_shift(&q);
            let rebuilt: CoefVector = (0..n).map(|k| sq[k] - w * q[k]).collect();
            let diff: CoefVector = (0..n).map(|k| rebuilt[k] - f[k]).collect();
            reconstruction =
                reconstruction.max(self.hb_norm_raw(&diff) / self.hb_norm_raw(&f).max(1e-300));
        }
        Ok(Lemma21Residuals { orthogonality, reconstruction })
    }

    /// Largest observed ratio ||X_b f||_b / ||f||_b over random trial
    /// vectors projected into the model.
    pub fn check_contraction(&self, trials: usize, rng: &mut impl Rng) -> f64 {
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let f = self.project(&random_poly(self.order, 16, rng));
            let nf = self.hb_norm_raw(&f);
            if nf < 1e-12 {
                continue;
            }
            let xf = apply_backward_shift(&f);
            worst = worst.max(self.hb_norm_raw(&xf) / nf);
        }
        worst
    }

    /// Serializable summary: order, rank, leading spectrum, residuals.
    pub fn summary(&self, seed_rng: &mut impl Rng, omega: DiskPoint) -> Result<ModelSummary> {
        let mut reproducing: f64 = 0.0;
        let mut adjoint: f64 = 0.0;
        for _ in 0..10 {
            let f = random_poly(self.order, 8, seed_rng);
            reproducing = reproducing.max(self.check_reproducing(&f, omega)?);
            adjoint = adjoint.max(self.check_adjoint_identity(&f)?);
        }
        let lemma21 = self.check_lemma21(omega, 10, seed_rng)?;
        let contraction = self.check_contraction(20, seed_rng);
        Ok(ModelSummary {
            n: self.order,
            numerical_rank: self.numerical_rank(),
            spectrum_head: self.eigenvalues.iter().take(8).copied().collect(),
            residual_table: ResidualTable {
                reproducing,
                adjoint,
                lemma21_orthogonality: lemma21.orthogonality,
                lemma21_reconstruction: lemma21.reconstruction,
                contraction_max_ratio: contraction,
            },
        })
    }
}

/// Residuals of the two Fredholm-structure identities.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Lemma21Residuals {
    pub orthogonality: f64,
    pub reconstruction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelSummary {
    pub n: usize,
    pub numerical_rank: usize,
    pub spectrum_head: Vec<f64>,
    pub residual_table: ResidualTable,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualTable {
    pub reproducing: f64,
    pub adjoint: f64,
    pub lemma21_orthogonality: f64,
    pub lemma21_reconstruction: f64,
    pub contraction_max_ratio: f64,
}

fn random_poly(n: usize, max_degree: usize, rng: &mut impl Rng) -> CoefVector {
    let mut f = vec![C64::new(0.0, 0.0); n];
    for c in f.iter_mut().take(max_degree.min(n - 1) + 1) {
        *c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    f
}

/// Least-squares solve of a Hermitian PSD system via its spectral
/// pseudo-inverse with a relative threshold.
fn hermitian_lstsq(g: &DMatrix<C64>, rhs: &DVector<C64>) -> DVector<C64> {
    let eig = g.clone().symmetric_eigen();
    let lam_max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let cut = 1e-13 * lam_max;
    let mut out = DVector::<C64>::zeros(g.nrows());
    for i in 0..g.nrows() {
        let lam = eig.eigenvalues[i];
        if lam > cut {
            let v = eig.eigenvectors.column(i);
            out += v * ((v.adjoint() * rhs)[(0, 0)].scale(1.0 / lam));
        }
    }
    out
}
