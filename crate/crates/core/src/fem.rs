//! P1 assembly of the forms `a`, `a_V`, `a_{V,β}` and the lumped L₂ inner
//! products on a triangulation, plus the Dirichlet block and spectral gate.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::mesh::{BoundaryMeasure, Mesh};
use crate::scalar::Scalar;
use crate::spectral::{eigensolve, eigenvalues, SpectralDecomposition};

/// Symmetric 2×2 coefficient matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor<T> {
    pub a11: T,
    pub a12: T,
    pub a22: T,
}

impl<T: Scalar> SymTensor<T> {
    pub fn new(a11: T, a12: T, a22: T) -> Self {
        Self { a11, a12, a22 }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::one())
    }

    /// `R(angle) diag(1, ratio) R(angle)ᵀ`.
    pub fn anisotropic(ratio: T, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * c + ratio * s * s, (T::one() - ratio) * c * s, s * s + ratio * c * c)
    }

    pub fn scaled(self, k: T) -> Self {
        Self::new(self.a11 * k, self.a12 * k, self.a22 * k)
    }

    pub fn min_eigenvalue(self) -> T {
        let mean = (self.a11 + self.a22) * T::lit(0.5);
        let half_diff = (self.a11 - self.a22) * T::lit(0.5);
        mean - half_diff.hypot(self.a12)
    }

    pub fn apply(self, v: [T; 2]) -> [T; 2] {
        [self.a11 * v[0] + self.a12 * v[1], self.a12 * v[0] + self.a22 * v[1]]
    }

    fn is_finite(self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }
}

/// Piecewise-constant coefficients: `a` and `V` per triangle, `β` per
/// boundary edge. Construction enforces uniform ellipticity and records the
/// exact constant `μ`.
#[derive(Debug, Clone)]
pub struct CoefficientField<T> {
    a: Vec<SymTensor<T>>,
    potential: Vec<T>,
    beta: Vec<T>,
    mu: T,
}

impl<T: Scalar> CoefficientField<T> {
    pub fn new(mesh: &Mesh<T>, a: Vec<SymTensor<T>>, potential: Vec<T>, beta: Vec<T>) -> Result<Self> {
        let nt = mesh.triangle_count();
        let ne = mesh.boundary_edges().len();
        let mismatch = |what: &str, expected: usize, found: usize| {
            Err(Error::InvalidCoefficients(format!("{what} has {found} entries, mesh needs {expected}")))
        };
        if a.len() != nt {
            return mismatch("a", nt, a.len());
        }
        if potential.len() != nt {
            return mismatch("V", nt, potential.len());
        }
        if beta.len() != ne {
            return mismatch("beta", ne, beta.len());
        }
        if let Some(t) = potential.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidCoefficients(format!("V on triangle {t} is not finite")));
        }
        if let Some(k) = beta.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidCoefficients(format!("beta on boundary edge {k} is not finite")));
        }
        let mut mu = T::infinity();
        for (t, tensor) in a.iter().enumerate() {
            let lmin = tensor.min_eigenvalue();
            if !tensor.is_finite() || !(lmin > T::zero()) {
                return Err(Error::Ellipticity { triangle: t, min_eigenvalue: lmin.as_f64() });
            }
            mu = mu.min(lmin);
        }
        Ok(Self { a, potential, beta, mu })
    }

    pub fn uniform(mesh: &Mesh<T>, a: SymTensor<T>, potential: T, beta: T) -> Result<Self> {
        Self::new(
            mesh,
            vec![a; mesh.triangle_count()],
            vec![potential; mesh.triangle_count()],
            vec![beta; mesh.boundary_edges().len()],
        )
    }

    /// `a = I`, `V = 0`, `β = 0`.
    pub fn laplacian(mesh: &Mesh<T>) -> Self {
        Self::uniform(mesh, SymTensor::identity(), T::zero(), T::zero()).expect("identity is elliptic")
    }

    pub fn with_potential(mut self, potential: Vec<T>) -> Result<Self> {
        if potential.len() != self.potential.len() || potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCoefficients("V must be finite with one value per triangle".into()));
        }
        self.potential = potential;
        Ok(self)
    }

    pub fn with_uniform_potential(mut self, v: T) -> Self {
        self.potential.iter_mut().for_each(|p| *p = v);
        self
    }

    pub fn with_beta(mut self, beta: Vec<T>) -> Result<Self> {
        if beta.len() != self.beta.len() || beta.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCoefficients("beta must be finite with one value per boundary edge".into()));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn with_uniform_beta(mut self, b: T) -> Self {
        self.beta.iter_mut().for_each(|p| *p = b);
        self
    }

    /// Scales `a`, `V` and `β` together by `k > 0`.
    pub fn scaled(&self, k: T) -> Self {
        Self {
            a: self.a.iter().map(|t| t.scaled(k)).collect(),
            potential: self.potential.iter().map(|&v| v * k).collect(),
            beta: self.beta.iter().map(|&b| b * k).collect(),
            mu: self.mu * k,
        }
    }

    pub fn a(&self) -> &[SymTensor<T>] {
        &self.a
    }

    pub fn potential(&self) -> &[T] {
        &self.potential
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn potential_nonnegative(&self) -> bool {
        self.potential.iter().all(|&v| v >= T::zero())
    }

    pub fn potential_is_zero(&self) -> bool {
        self.potential.iter().all(|&v| v == T::zero())
    }

    pub fn beta_nonnegative(&self) -> bool {
        self.beta.iter().all(|&b| b >= T::zero())
    }
}

/// Assembled matrices over all mesh nodes together with the interior /
/// boundary partition. Boundary-indexed vectors follow the ascending order
/// of [`OperatorBundle::boundary`].
#[derive(Debug, Clone)]
pub struct OperatorBundle<T> {
    mesh: Mesh<T>,
    coeffs: CoefficientField<T>,
    stiffness: DenseMatrix<T>,
    full: DenseMatrix<T>,
    domain_mass: Vec<T>,
    potential_mass: Vec<T>,
    boundary_mass: Vec<T>,
    beta_mass: Vec<T>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
}

/// Exact P1 stiffness of one triangle, `area · ∇φ_iᵀ a ∇φ_j`.
pub fn local_stiffness<T: Scalar>(mesh: &Mesh<T>, t: usize, a: SymTensor<T>) -> [[T; 3]; 3] {
    let g = mesh.hat_gradients(t);
    let area = mesh.triangle_area(t);
    let mut k = [[T::zero(); 3]; 3];
    for i in 0..3 {
        let ag = a.apply(g[i]);
        for j in 0..3 {
            k[i][j] = area * (ag[0] * g[j][0] + ag[1] * g[j][1]);
        }
    }
    k
}

pub fn assemble<T: Scalar>(mesh: &Mesh<T>, coeffs: &CoefficientField<T>) -> Result<OperatorBundle<T>> {
    if coeffs.a().len() != mesh.triangle_count() || coeffs.beta().len() != mesh.boundary_edges().len() {
        return Err(Error::InvalidCoefficients("coefficient field does not match the mesh".into()));
    }
    if let Some(t) = coeffs.a().iter().position(|a| !(a.min_eigenvalue() > T::zero())) {
        return Err(Error::Ellipticity { triangle: t, min_eigenvalue: coeffs.a()[t].min_eigenvalue().as_f64() });
    }
    let n = mesh.vertex_count();
    let third = T::one() / T::lit(3.0);
    let mut stiffness = DenseMatrix::zeros(n, n);
    let mut domain_mass = vec![T::zero(); n];
    let mut potential_mass = vec![T::zero(); n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let k = local_stiffness(mesh, t, coeffs.a()[t]);
        // off-diagonal entries only; the diagonal is closed from the row sums
        for i in 0..3 {
            for j in (i + 1)..3 {
                stiffness[(tri[i], tri[j])] += k[i][j];
                stiffness[(tri[j], tri[i])] += k[i][j];
            }
        }
        let lumped = mesh.triangle_area(t) * third;
        for &v in tri {
            domain_mass[v] += lumped;
            potential_mass[v] += lumped * coeffs.potential()[t];
        }
    }
    for i in 0..n {
        let off: T = stiffness.row(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).sum();
        stiffness[(i, i)] = -off;
    }

    let measure = BoundaryMeasure::new(mesh);
    let boundary = measure.nodes().to_vec();
    let mut slot = vec![usize::MAX; n];
    for (p, &v) in boundary.iter().enumerate() {
        slot[v] = p;
    }
    let half = T::lit(0.5);
    let mut beta_mass = vec![T::zero(); boundary.len()];
    for (k, e) in mesh.boundary_edges().iter().enumerate() {
        let share = half * mesh.edge_length(k) * coeffs.beta()[k];
        for &v in &e.nodes {
            beta_mass[slot[v]] += share;
        }
    }

    let mut full = stiffness.clone();
    full.add_to_diagonal(&potential_mass);

    Ok(OperatorBundle {
        mesh: mesh.clone(),
        coeffs: coeffs.clone(),
        stiffness,
        full,
        domain_mass,
        potential_mass,
        boundary_mass: measure.weights().to_vec(),
        beta_mass,
        interior: mesh.interior_nodes(),
        boundary,
    })
}

impl<T: Scalar> OperatorBundle<T> {
    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn coefficients(&self) -> &CoefficientField<T> {
        &self.coeffs
    }

    /// Matrix of `a_V` over all nodes (Neumann operator with potential).
    pub fn full(&self) -> &DenseMatrix<T> {
        &self.full
    }

    /// Matrix of `a` alone.
    pub fn stiffness(&self) -> &DenseMatrix<T> {
        &self.stiffness
    }

    /// Lumped domain mass, one entry per node.
    pub fn domain_mass(&self) -> &[T] {
        &self.domain_mass
    }

    /// Lumped `∫ V u v` diagonal, one entry per node.
    pub fn potential_mass(&self) -> &[T] {
        &self.potential_mass
    }

    /// Lumped boundary mass, one entry per boundary node.
    pub fn boundary_mass(&self) -> &[T] {
        &self.boundary_mass
    }

    /// Lumped `∫_Γ β u v` diagonal, one entry per boundary node.
    pub fn beta_mass(&self) -> &[T] {
        &self.beta_mass
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn node_count(&self) -> usize {
        self.domain_mass.len()
    }

    /// `B_β` as a full n×n diagonal matrix.
    pub fn beta_matrix(&self) -> DenseMatrix<T> {
        let mut d = vec![T::zero(); self.node_count()];
        for (p, &v) in self.boundary.iter().enumerate() {
            d[v] = self.beta_mass[p];
        }
        DenseMatrix::from_diagonal(&d)
    }

    /// Nodal trace: restriction to boundary nodes.
    pub fn trace(&self, u: &[T]) -> Vec<T> {
        self.boundary.iter().map(|&v| u[v]).collect()
    }

    /// Interior block `(A_II, M_Ω,II)`, the discrete `A^D + V`.
    pub fn dirichlet_block(&self) -> DirichletBlock<T> {
        DirichletBlock {
            matrix: self.full.select(&self.interior, &self.interior),
            mass: self.interior.iter().map(|&i| self.domain_mass[i]).collect(),
        }
    }

    /// Default spectral-gate tolerance, `1e-8 · ‖A‖_max`.
    pub fn default_gate_tol(&self) -> T {
        T::lit(1e-8) * self.full.max_abs()
    }
}

pub struct DirichletBlock<T> {
    pub matrix: DenseMatrix<T>,
    pub mass: Vec<T>,
}

impl<T: Scalar> DirichletBlock<T> {
    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn spectrum(&self) -> Result<SpectralDecomposition<T>> {
        eigensolve(&self.matrix, &self.mass)
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        eigenvalues(&self.matrix, &self.mass)
    }
}

pub fn dirichlet_block<T: Scalar>(bundle: &OperatorBundle<T>) -> DirichletBlock<T> {
    bundle.dirichlet_block()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOutcome<T> {
    /// Every Dirichlet eigenvalue is at least `distance` away from zero.
    Pass { distance: T },
    /// `eigenvalue` lies within `tol` of zero.
    Violation { eigenvalue: T, distance: T },
}

impl<T: Scalar> GateOutcome<T> {
    pub fn passed(&self) -> bool {
        matches!(self, GateOutcome::Pass { .. })
    }
}

/// Checks `0 ∉ σ(A^D + V)` at tolerance `tol`. An empty interior passes
/// with infinite distance.
pub fn spectral_gate<T: Scalar>(bundle: &OperatorBundle<T>, tol: T) -> Result<GateOutcome<T>> {
    let block = bundle.dirichlet_block();
    if block.is_empty() {
        return Ok(GateOutcome::Pass { distance: T::infinity() });
    }
    let closest = block
        .eigenvalues()?
        .iter()
        .copied()
        .fold(T::infinity(), |best, l| if l.abs() < best.abs() { l } else { best });
    let distance = closest.abs();
    Ok(if distance >= tol {
        GateOutcome::Pass { distance }
    } else {
        GateOutcome::Violation { eigenvalue: closest, distance }
    })
}

/// Coefficient JSON file layout.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CoefficientSpec {
    #[serde(default)]
    pub a: TensorSpec,
    #[serde(default, rename = "V")]
    pub potential: FieldSpec,
    #[serde(default)]
    pub beta: FieldSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TensorSpec {
    /// `[a11, a12, a22]` per triangle.
    PerTriangle(Vec<[f64; 3]>),
    Preset {
        preset: TensorPreset,
        #[serde(default)]
        params: AnisotropyParams,
    },
}

impl Default for TensorSpec {
    fn default() -> Self {
        TensorSpec::Preset { preset: TensorPreset::Identity, params: AnisotropyParams::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorPreset {
    Identity,
    Anisotropic,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AnisotropyParams {
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default)]
    pub angle: f64,
}

fn default_ratio() -> f64 {
    1.0
}

impl Default for AnisotropyParams {
    fn default() -> Self {
        Self { ratio: 1.0, angle: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Constant(f64),
    PerElement(Vec<f64>),
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Constant(0.0)
    }
}

impl FieldSpec {
    fn resolve<T: Scalar>(&self, len: usize, what: &str) -> Result<Vec<T>> {
        match self {
            FieldSpec::Constant(c) => Ok(vec![T::lit(*c); len]),
            FieldSpec::PerElement(v) if v.len() == len => Ok(v.iter().map(|&x| T::lit(x)).collect()),
            FieldSpec::PerElement(v) => Err(Error::InvalidCoefficients(format!(
                "{what} has {} entries, mesh needs {len}",
                v.len()
            ))),
        }
    }
}

impl CoefficientSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn resolve<T: Scalar>(&self, mesh: &Mesh<T>) -> Result<CoefficientField<T>> {
        let nt = mesh.triangle_count();
        let a = match &self.a {
            TensorSpec::PerTriangle(v) => {
                if v.len() != nt {
                    return Err(Error::InvalidCoefficients(format!("a has {} entries, mesh needs {nt}", v.len())));
                }
                v.iter().map(|e| SymTensor::new(T::lit(e[0]), T::lit(e[1]), T::lit(e[2]))).collect()
            }
            TensorSpec::Preset { preset: TensorPreset::Identity, .. } => vec![SymTensor::identity(); nt],
            TensorSpec::Preset { preset: TensorPreset::Anisotropic, params } => {
                vec![SymTensor::anisotropic(T::lit(params.ratio), T::lit(params.angle)); nt]
            }
        };
        let potential = self.potential.resolve(nt, "V")?;
        let beta = self.beta.resolve(mesh.boundary_edges().len(), "beta")?;
        CoefficientField::new(mesh, a, potential, beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryEdge, Preset};

    fn reference_triangle() -> Mesh<f64> {
        let edges = [[0, 1], [1, 2], [2, 0]]
            .iter()
            .map(|&nodes| BoundaryEdge { nodes, component: 0 })
            .collect();
        Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], edges).unwrap()
    }

    #[test]
    fn reference_triangle_stiffness() {
        let m = reference_triangle();
        let b = assemble(&m, &CoefficientField::laplacian(&m)).unwrap();
        let expected = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((b.stiffness()[(i, j)] - expected[i][j]).abs() < 1e-15);
            }
        }
        assert_eq!(b.domain_mass(), &[1.0 / 6.0; 3]);
    }

    #[test]
    fn scaling_a_scales_stiffness() {
        let m = Mesh::<f64>::preset(Preset::Disk, 2).unwrap();
        let k1 = assemble(&m, &CoefficientField::laplacian(&m)).unwrap();
        let c2 = CoefficientField::uniform(&m, SymTensor::identity().scaled(2.0), 0.0, 0.0).unwrap();
        let k2 = assemble(&m, &c2).unwrap();
        assert!(k2.stiffness().max_abs_diff(&k1.stiffness().scaled(2.0)) < 1e-14);
    }

    #[test]
    fn zero_potential_and_beta() {
        let m = Mesh::<f64>::preset(Preset::Annulus, 2).unwrap();
        let b = assemble(&m, &CoefficientField::laplacian(&m)).unwrap();
        assert_eq!(b.full(), b.stiffness());
        assert!(b.beta_mass().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn structural_invariants() {
        for preset in Preset::ALL {
            let m = Mesh::<f64>::preset(preset, 3).unwrap().refine();
            let c = CoefficientField::uniform(&m, SymTensor::anisotropic(3.0, 0.4), 0.7, -0.2).unwrap();
            let b = assemble(&m, &c).unwrap();
            assert_eq!(b.full().asymmetry(), 0.0);
            let scale = b.stiffness().max_abs();
            assert!(b.stiffness().row_sums().iter().all(|r| r.abs() <= 1e-14 * scale));
            assert!(b.domain_mass().iter().all(|&x| x > 0.0));
            assert!(b.boundary_mass().iter().all(|&x| x > 0.0));
            assert!((b.domain_mass().iter().sum::<f64>() - m.total_area()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_beta_lumps_to_boundary_mass() {
        let m = Mesh::<f64>::preset(Preset::Lshape, 2).unwrap();
        let c = CoefficientField::laplacian(&m).with_uniform_beta(2.5);
        let b = assemble(&m, &c).unwrap();
        for (bm, gm) in b.beta_mass().iter().zip(b.boundary_mass()) {
            assert!((bm - 2.5 * gm).abs() < 1e-15);
        }
    }

    #[test]
    fn beta_lumping_preserves_boundary_integral() {
        let m = Mesh::<f64>::preset(Preset::Disk, 3).unwrap();
        let beta: Vec<f64> = (0..m.boundary_edges().len()).map(|k| (k as f64).sin()).collect();
        let exact: f64 = beta.iter().enumerate().map(|(k, b)| b * m.edge_length(k)).sum();
        let c = CoefficientField::laplacian(&m).with_beta(beta).unwrap();
        let b = assemble(&m, &c).unwrap();
        assert!((b.beta_mass().iter().sum::<f64>() - exact).abs() < 1e-14);
    }

    #[test]
    fn ellipticity_violation_names_triangle() {
        let m = Mesh::<f64>::preset(Preset::Square, 2).unwrap();
        let mut a = vec![SymTensor::identity(); m.triangle_count()];
        a[5] = SymTensor::new(1.0, 2.0, 1.0);
        let err = CoefficientField::new(&m, a, vec![0.0; 8], vec![0.0; 8]).unwrap_err();
        assert!(matches!(err, Error::Ellipticity { triangle: 5, .. }));
    }

    #[test]
    fn empty_interior_gives_empty_block() {
        let m = Mesh::<f64>::preset(Preset::Square, 1).unwrap();
        let b = assemble(&m, &CoefficientField::laplacian(&m)).unwrap();
        assert!(b.dirichlet_block().is_empty());
        assert!(spectral_gate(&b, 1e-8).unwrap().passed());
    }

    #[test]
    fn first_dirichlet_eigenvalue_of_square() {
        let m = Mesh::<f64>::preset(Preset::Square, 2).unwrap().refined(2);
        let b = assemble(&m, &CoefficientField::laplacian(&m)).unwrap();
        let l1 = b.dirichlet_block().spectrum().unwrap().ground_value();
        let exact = 2.0 * std::f64::consts::PI.powi(2);
        assert!((l1 - exact).abs() / exact < 0.05, "{l1}");
    }

    #[test]
    fn constant_potential_shifts_dirichlet_spectrum() {
        let m = Mesh::<f64>::preset(Preset::Lshape, 2).unwrap().refine();
        let base = assemble(&m, &CoefficientField::laplacian(&m)).unwrap();
        let shifted = assemble(&m, &CoefficientField::laplacian(&m).with_uniform_potential(3.25)).unwrap();
        let l0 = base.dirichlet_block().spectrum().unwrap();
        let l1 = shifted.dirichlet_block().spectrum().unwrap();
        for (a, b) in l0.values().iter().zip(l1.values()) {
            assert!((b - a - 3.25).abs() < 1e-10);
        }
    }

    #[test]
    fn gate_detects_singular_shift() {
        let m = Mesh::<f64>::preset(Preset::Square, 4).unwrap();
        let base = assemble(&m, &CoefficientField::laplacian(&m)).unwrap();
        assert!(spectral_gate(&base, base.default_gate_tol()).unwrap().passed());
        let l1 = base.dirichlet_block().spectrum().unwrap().ground_value();

        let singular = assemble(&m, &CoefficientField::laplacian(&m).with_uniform_potential(-l1)).unwrap();
        let tol = singular.default_gate_tol();
        match spectral_gate(&singular, tol).unwrap() {
            GateOutcome::Violation { distance, .. } => assert!(distance <= tol),
            other => panic!("expected violation, got {other:?}"),
        }

        let half = assemble(&m, &CoefficientField::laplacian(&m).with_uniform_potential(-0.5 * l1)).unwrap();
        assert!(spectral_gate(&half, half.default_gate_tol()).unwrap().passed());
        assert!(half.dirichlet_block().spectrum().unwrap().ground_value() > 0.0);
    }

    #[test]
    fn coefficient_json_forms() {
        let m = Mesh::<f64>::preset(Preset::Square, 1).unwrap();
        let spec = CoefficientSpec::from_json_str(r#"{"a":{"preset":"anisotropic","params":{"ratio":4,"angle":0}},"V":1.5,"beta":[0,1,2,3]}"#).unwrap();
        let c = spec.resolve(&m).unwrap();
        assert_eq!(c.a()[0], SymTensor::new(1.0, 0.0, 4.0));
        assert_eq!(c.potential(), &[1.5, 1.5]);
        assert_eq!(c.beta(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(c.mu(), 1.0);

        let spec = CoefficientSpec::from_json_str(r#"{"a":[[2,0,2],[1,0.5,1]]}"#).unwrap();
        let c = spec.resolve(&m).unwrap();
        assert!((c.mu() - 0.5).abs() < 1e-15);

        let spec = CoefficientSpec::from_json_str(r#"{"V":[1,2,3]}"#).unwrap();
        assert!(spec.resolve(&m).is_err());
    }
}
