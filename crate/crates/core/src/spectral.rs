//! Spectral calculus for symmetric pairs `(S, M)` with a positive diagonal
//! mass: decomposition, semigroup and resolvent evaluation, and kernel
//! matrices of `e^{-tL}` with `L = M⁻¹S`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dot, symmetric_eigen, symmetric_eigenvalues, DenseMatrix};
use crate::scalar::Scalar;

/// Smallest admissible `|λ + λ_i|` for a resolvent evaluation.
pub const RESOLVENT_MIN_GAP: f64 = 1e-12;

/// Ascending eigenvalues and `M`-orthonormal eigenvectors of a symmetric
/// pair `(S, M)`, `M` diagonal and positive.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition<T> {
    values: Vec<T>,
    vectors: DenseMatrix<T>,
    mass: Vec<T>,
}

/// Solves `S φ = λ M φ`.
pub fn eigensolve<T: Scalar>(s: &DenseMatrix<T>, mass: &[T]) -> Result<SpectralDecomposition<T>> {
    let n = s.rows();
    let scaled = mass_scaled(s, mass)?;
    let inv_sqrt: Vec<T> = mass.iter().map(|&m| m.sqrt().recip()).collect();
    let (values, y) = symmetric_eigen(&scaled)?;
    let vectors = DenseMatrix::from_fn(n, n, |i, j| y[(i, j)] * inv_sqrt[i]);
    Ok(SpectralDecomposition { values, vectors, mass: mass.to_vec() })
}

/// Eigenvalues of `S φ = λ M φ` only.
pub fn eigenvalues<T: Scalar>(s: &DenseMatrix<T>, mass: &[T]) -> Result<Vec<T>> {
    symmetric_eigenvalues(&mass_scaled(s, mass)?)
}

/// `M^{-1/2} S M^{-1/2}`, symmetrized, after validating the pair.
fn mass_scaled<T: Scalar>(s: &DenseMatrix<T>, mass: &[T]) -> Result<DenseMatrix<T>> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch { expected: s.rows(), found: s.cols() });
    }
    let n = s.rows();
    if mass.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: mass.len() });
    }
    if let Some(i) = mass.iter().position(|&m| !(m > T::zero() && m.is_finite())) {
        return Err(Error::NonPositiveMass { index: i, value: mass[i].as_f64() });
    }
    let inv_sqrt: Vec<T> = mass.iter().map(|&m| m.sqrt().recip()).collect();
    let mut scaled = DenseMatrix::from_fn(n, n, |i, j| s[(i, j)] * inv_sqrt[i] * inv_sqrt[j]);
    scaled.symmetrize();
    Ok(scaled)
}

impl<T: Scalar> SpectralDecomposition<T> {
    /// Assembles a decomposition from parts without checking them. Intended
    /// for fixtures that exercise the property checks.
    pub fn from_parts(values: Vec<T>, vectors: DenseMatrix<T>, mass: Vec<T>) -> Self {
        Self { values, vectors, mass }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Eigenvectors as columns.
    pub fn vectors(&self) -> &DenseMatrix<T> {
        &self.vectors
    }

    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    /// Smallest eigenvalue.
    pub fn ground_value(&self) -> T {
        self.values[0]
    }

    pub fn eigenvector(&self, i: usize) -> Vec<T> {
        self.vectors.column(i)
    }

    /// Ground state normalized so that its entry of largest magnitude is
    /// positive.
    pub fn ground_state(&self) -> Vec<T> {
        let mut v = self.eigenvector(0);
        let pivot = v.iter().fold(T::zero(), |m, &x| if x.abs() > m.abs() { x } else { m });
        if pivot < T::zero() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    }

    /// `Φᵀ M φ`.
    pub fn coefficients(&self, phi: &[T]) -> Vec<T> {
        let weighted: Vec<T> = phi.iter().zip(&self.mass).map(|(&p, &m)| p * m).collect();
        let n = self.len();
        let mut c = vec![T::zero(); n];
        for i in 0..n {
            let row = self.vectors.row(i);
            let w = weighted[i];
            for (ck, &v) in c.iter_mut().zip(row) {
                *ck += v * w;
            }
        }
        c
    }

    /// `Σ f(λ_k) c_k Φ_k` for spectral coefficients `c`.
    fn synthesize(&self, c: &[T], f: impl Fn(T) -> T) -> Vec<T> {
        let scaled: Vec<T> = c.iter().zip(&self.values).map(|(&ck, &l)| ck * f(l)).collect();
        (0..self.len()).map(|i| dot(self.vectors.row(i), &scaled)).collect()
    }

    fn check_len(&self, v: &[T]) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: v.len() });
        }
        Ok(())
    }

    /// `e^{-tL} φ`.
    pub fn semigroup_apply(&self, t: T, phi: &[T]) -> Result<Vec<T>> {
        if t < T::zero() {
            return Err(Error::NegativeTime(t.as_f64()));
        }
        self.check_len(phi)?;
        let c = self.coefficients(phi);
        Ok(self.synthesize(&c, |l| (-l * t).exp()))
    }

    /// `(λI + L)⁻¹ ψ`.
    pub fn resolvent_apply(&self, lambda: T, psi: &[T]) -> Result<Vec<T>> {
        self.check_len(psi)?;
        let gap = T::lit(RESOLVENT_MIN_GAP);
        if let Some(&l) = self.values.iter().find(|&&l| (lambda + l).abs() < gap) {
            return Err(Error::ResolventPole {
                lambda: lambda.as_f64(),
                eigenvalue: l.as_f64(),
                gap: RESOLVENT_MIN_GAP,
            });
        }
        let c = self.coefficients(psi);
        Ok(self.synthesize(&c, |l| (lambda + l).recip()))
    }

    /// `L φ = M⁻¹ S φ`, evaluated spectrally.
    pub fn generator_apply(&self, phi: &[T]) -> Result<Vec<T>> {
        self.check_len(phi)?;
        let c = self.coefficients(phi);
        Ok(self.synthesize(&c, |l| l))
    }

    /// Kernel `K_t = Φ e^{-tΛ} Φᵀ` of `e^{-tL}` with respect to the lumped
    /// measure `M`.
    pub fn kernel_matrix(&self, t: T) -> Result<SemigroupKernel<T>> {
        if !(t > T::zero()) {
            return Err(Error::NonPositiveTime(t.as_f64()));
        }
        let n = self.len();
        let decay: Vec<T> = self.values.iter().map(|&l| (-l * t).exp()).collect();
        let mut k = DenseMatrix::zeros(n, n);
        for x in 0..n {
            let rx: Vec<T> = self.vectors.row(x).iter().zip(&decay).map(|(&v, &d)| v * d).collect();
            for y in x..n {
                let v = dot(&rx, self.vectors.row(y));
                k[(x, y)] = v;
                k[(y, x)] = v;
            }
        }
        Ok(SemigroupKernel { t, values: k, weights: self.mass.clone() })
    }

    /// Kernels on a time grid, evaluated in parallel; output order follows
    /// `times`.
    pub fn kernels(&self, times: &[T]) -> Result<Vec<SemigroupKernel<T>>> {
        times.par_iter().map(|&t| self.kernel_matrix(t)).collect()
    }

    /// `Σ_k e^{-λ_k t}`.
    pub fn spectral_trace(&self, t: T) -> T {
        self.values.iter().map(|&l| (-l * t).exp()).sum()
    }

    /// `‖SΦ − MΦΛ‖_max`.
    pub fn residual(&self, s: &DenseMatrix<T>) -> T {
        let sphi = s.matmul(&self.vectors);
        let n = self.len();
        let mut worst = T::zero();
        for i in 0..n {
            for k in 0..n {
                let r = sphi[(i, k)] - self.mass[i] * self.vectors[(i, k)] * self.values[k];
                worst = worst.max(r.abs());
            }
        }
        worst
    }

    /// `‖ΦᵀMΦ − I‖_max`.
    pub fn orthonormality_error(&self) -> T {
        let gram = self.vectors.transpose().matmul(&self.vectors.scale_rows(&self.mass));
        gram.max_abs_diff(&DenseMatrix::identity(self.len()))
    }
}

impl<T: Scalar> DenseMatrix<T> {
    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.rows());
        Self::from_fn(self.rows(), self.cols(), |i, j| self[(i, j)] * d[i])
    }
}

/// Which weighted operator norm to take.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PNorm {
    One,
    Two,
    Infinity,
    /// `1 < p < ∞`, `p ≠ 2`; bounded by Riesz–Thorin interpolation.
    Interpolated(f64),
}

impl PNorm {
    pub fn from_exponent(p: f64) -> Option<Self> {
        match p {
            1.0 => Some(PNorm::One),
            2.0 => Some(PNorm::Two),
            f64::INFINITY => Some(PNorm::Infinity),
            p if p > 1.0 && p.is_finite() => Some(PNorm::Interpolated(p)),
            _ => None,
        }
    }

    pub fn exponent(self) -> f64 {
        match self {
            PNorm::One => 1.0,
            PNorm::Two => 2.0,
            PNorm::Infinity => f64::INFINITY,
            PNorm::Interpolated(p) => p,
        }
    }
}

/// Kernel matrix `k_t(x, y)` of a semigroup on a lumped measure space:
/// `(S_t φ)(x) = Σ_y k_t(x, y) m_y φ(y)`.
#[derive(Debug, Clone)]
pub struct SemigroupKernel<T> {
    pub t: T,
    pub values: DenseMatrix<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> SemigroupKernel<T> {
    pub fn apply(&self, phi: &[T]) -> Vec<T> {
        let w: Vec<T> = phi.iter().zip(&self.weights).map(|(&p, &m)| p * m).collect();
        self.values.matvec(&w)
    }

    pub fn symmetry_error(&self) -> T {
        self.values.asymmetry()
    }

    /// `K diag(m) K`, the kernel of the composed operator.
    pub fn compose(&self, other: &Self) -> DenseMatrix<T> {
        self.values.scale_columns(&self.weights).matmul(&other.values)
    }

    /// `Σ_x k(x, x) m_x`.
    pub fn trace(&self) -> T {
        self.values.diagonal().iter().zip(&self.weights).map(|(&k, &m)| k * m).sum()
    }

    /// `Σ_y k(x, y) m_y` for every `x`, i.e. `S_t 𝟙`.
    pub fn weighted_row_sums(&self) -> Vec<T> {
        self.apply(&vec![T::one(); self.weights.len()])
    }

    pub fn min_entry(&self) -> T {
        self.values.min_entry()
    }

    pub fn max_entry(&self) -> T {
        self.values.max_entry()
    }

    /// Operator norm of `S_t` on `L_p(m)`.
    ///
    /// `p = 1, ∞` are exact column/row sums, `p = 2` is the spectral norm of
    /// `M^{1/2} K M^{1/2}` computed by a fresh eigensolve, and other `p` are
    /// bounded by `‖S‖₁^{1/p} ‖S‖_∞^{1−1/p}`.
    pub fn operator_norm(&self, p: PNorm) -> Result<T> {
        let n = self.weights.len();
        let abs = |x: usize, y: usize| self.values[(x, y)].abs();
        Ok(match p {
            PNorm::Infinity => (0..n)
                .map(|x| (0..n).map(|y| abs(x, y) * self.weights[y]).sum::<T>())
                .fold(T::zero(), T::max),
            PNorm::One => (0..n)
                .map(|y| (0..n).map(|x| self.weights[x] * abs(x, y)).sum::<T>())
                .fold(T::zero(), T::max),
            PNorm::Two => {
                let sq: Vec<T> = self.weights.iter().map(|m| m.sqrt()).collect();
                let mut b = DenseMatrix::from_fn(n, n, |x, y| sq[x] * self.values[(x, y)] * sq[y]);
                b.symmetrize();
                let vals = symmetric_eigenvalues(&b)?;
                vals.iter().fold(T::zero(), |m, v| m.max(v.abs()))
            }
            PNorm::Interpolated(q) => {
                let one = self.operator_norm(PNorm::One)?;
                let inf = self.operator_norm(PNorm::Infinity)?;
                let theta = T::lit(1.0 / q);
                one.powf(theta) * inf.powf(T::one() - theta)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_pair(n: usize) -> (DenseMatrix<f64>, Vec<f64>) {
        let s = DenseMatrix::from_fn(n, n, |i, j| {
            if i == j {
                if i == 0 || i == n - 1 { 1.0 } else { 2.0 }
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        });
        let m = (0..n).map(|i| 0.5 + 0.1 * i as f64).collect();
        (s, m)
    }

    #[test]
    fn mass_pair_has_unit_spectrum() {
        let m = vec![2.0f64, 0.5, 4.0];
        let s = DenseMatrix::from_diagonal(&m);
        let dec = eigensolve(&s, &m).unwrap();
        for &l in dec.values() {
            assert!((l - 1.0).abs() < 1e-15);
        }
        assert!(dec.orthonormality_error() < 1e-15);
    }

    #[test]
    fn scalar_pair() {
        let dec = eigensolve(&DenseMatrix::from_diagonal(&[3.0]), &[4.0]).unwrap();
        assert_eq!(dec.values(), &[0.75]);
    }

    #[test]
    fn rejects_nonpositive_mass() {
        let s = DenseMatrix::<f64>::identity(2);
        assert!(matches!(eigensolve(&s, &[1.0, 0.0]), Err(Error::NonPositiveMass { index: 1, .. })));
    }

    #[test]
    fn invariants_on_weighted_path() {
        let (s, m) = path_pair(30);
        let dec = eigensolve(&s, &m).unwrap();
        let lmax = dec.values().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        assert!(dec.residual(&s) <= 1e-9 * (s.max_abs() + 4.9 * lmax));
        assert!(dec.orthonormality_error() < 1e-10);
        assert!(dec.values().windows(2).all(|w| w[0] <= w[1]));
        assert!(dec.ground_value().abs() < 1e-13);
    }

    #[test]
    fn semigroup_identity_law_and_constants() {
        let (s, m) = path_pair(20);
        let dec = eigensolve(&s, &m).unwrap();
        let phi: Vec<f64> = (0..20).map(|i| (i as f64 * 0.7).sin()).collect();
        let at0 = dec.semigroup_apply(0.0, &phi).unwrap();
        for (a, b) in at0.iter().zip(&phi) {
            assert!((a - b).abs() < 1e-12);
        }
        let one = vec![1.0; 20];
        let s1 = dec.semigroup_apply(3.0, &one).unwrap();
        assert!(s1.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let ts = dec.semigroup_apply(0.3, &dec.semigroup_apply(0.4, &phi).unwrap()).unwrap();
        let direct = dec.semigroup_apply(0.7, &phi).unwrap();
        for (a, b) in ts.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(dec.semigroup_apply(-1.0, &phi), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn resolvent_inverts_shifted_generator() {
        let (mut s, m) = path_pair(15);
        s.add_to_diagonal(&vec![0.3; 15]);
        let dec = eigensolve(&s, &m).unwrap();
        let psi: Vec<f64> = (0..15).map(|i| 1.0 + (i as f64).cos()).collect();
        let lambda = 0.5;
        let r = dec.resolvent_apply(lambda, &psi).unwrap();
        // (λ M + S) r = M ψ
        let sr = s.matvec(&r);
        for i in 0..15 {
            assert!((lambda * m[i] * r[i] + sr[i] - m[i] * psi[i]).abs() < 1e-10);
        }
        let phi1 = dec.eigenvector(0);
        let r1 = dec.resolvent_apply(0.0, &phi1).unwrap();
        for (a, b) in r1.iter().zip(&phi1) {
            assert!((a - b / dec.ground_value()).abs() < 1e-10);
        }
        let big = 1e8;
        let r = dec.resolvent_apply(big, &psi).unwrap();
        for (a, b) in r.iter().zip(&psi) {
            assert!((big * a - b).abs() < 1e-6);
        }
        let pole = -dec.values()[3];
        assert!(matches!(dec.resolvent_apply(pole, &psi), Err(Error::ResolventPole { .. })));
    }

    #[test]
    fn kernel_laws_on_weighted_path() {
        let (s, m) = path_pair(25);
        let dec = eigensolve(&s, &m).unwrap();
        let k = dec.kernel_matrix(0.5).unwrap();
        let k2 = dec.kernel_matrix(1.0).unwrap();
        assert_eq!(k.symmetry_error(), 0.0);
        let ck = k.compose(&k).max_abs_diff(&k2.values);
        assert!(ck <= 1e-10 * k2.values.max_abs());
        assert!((k.trace() - dec.spectral_trace(0.5)).abs() < 1e-10);
        assert!(k.weighted_row_sums().iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(dec.kernel_matrix(0.0).is_err());
    }

    #[test]
    fn operator_norms_of_markov_kernel() {
        let (s, m) = path_pair(12);
        let dec = eigensolve(&s, &m).unwrap();
        let k = dec.kernel_matrix(0.2).unwrap();
        let inf = k.operator_norm(PNorm::Infinity).unwrap();
        let one = k.operator_norm(PNorm::One).unwrap();
        let two = k.operator_norm(PNorm::Two).unwrap();
        assert!((inf - 1.0).abs() < 1e-12);
        assert!((one - inf).abs() < 1e-12);
        assert!((two - 1.0).abs() < 1e-12);
        let p3 = k.operator_norm(PNorm::Interpolated(3.0)).unwrap();
        assert!((p3 - 1.0).abs() < 1e-12);
        assert_eq!(PNorm::from_exponent(0.5), None);
    }

    #[test]
    fn single_precision_decomposition() {
        let s = DenseMatrix::<f32>::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let dec = eigensolve(&s, &[1.0, 1.0]).unwrap();
        assert!((dec.values()[0] - 1.0).abs() < 1e-6);
        assert!((dec.values()[1] - 3.0).abs() < 1e-6);
    }
}
