//! The discrete Dirichlet-to-Neumann operator `D_V` as a boundary Schur
//! complement, the harmonic lifting, the two conormal-derivative routes, the
//! Robin operator `A_{V,β}`, and the invertible Neumann solve.

use crate::error::{Error, Result};
use crate::fem::{spectral_gate, GateOutcome, OperatorBundle};
use crate::linalg::{weighted_dot, DenseMatrix, LuFactor};
use crate::scalar::Scalar;
use crate::spectral::{eigensolve, eigenvalues, SpectralDecomposition};

/// `D_V` represented by the symmetric pair `(S, M_Γ)`; applying `D_V` to
/// boundary data `φ` means `M_Γ⁻¹ S φ`.
///
/// Read-only after construction, so the interior factorization can be shared
/// across threads.
#[derive(Debug, Clone)]
pub struct DtnOperator<T> {
    schur: DenseMatrix<T>,
    boundary_mass: Vec<T>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    interior_solver: Option<LuFactor<T>>,
    coupling: DenseMatrix<T>,
    node_count: usize,
    gate: GateOutcome<T>,
}

/// Builds `S = A_BB − A_BI A_II⁻¹ A_IB`, refusing when the Dirichlet block
/// has an eigenvalue within `gate_tol` of zero.
pub fn build_dtn<T: Scalar>(bundle: &OperatorBundle<T>, gate_tol: T) -> Result<DtnOperator<T>> {
    let gate = spectral_gate(bundle, gate_tol)?;
    if let GateOutcome::Violation { eigenvalue, .. } = gate {
        return Err(Error::SpectralGateViolation { eigenvalue: eigenvalue.as_f64(), tol: gate_tol.as_f64() });
    }
    let a = bundle.full();
    let interior = bundle.interior().to_vec();
    let boundary = bundle.boundary().to_vec();
    let a_bb = a.select(&boundary, &boundary);
    let coupling = a.select(&interior, &boundary);
    let (schur, interior_solver) = if interior.is_empty() {
        (a_bb, None)
    } else {
        let lu = LuFactor::new(a.select(&interior, &interior))?;
        let x = lu.solve_matrix(&coupling);
        let mut s = a_bb.sub(&coupling.transpose().matmul(&x));
        s.symmetrize();
        (s, Some(lu))
    };
    Ok(DtnOperator {
        schur,
        boundary_mass: bundle.boundary_mass().to_vec(),
        interior,
        boundary,
        interior_solver,
        coupling,
        node_count: bundle.node_count(),
        gate,
    })
}

impl<T: Scalar> DtnOperator<T> {
    pub fn schur(&self) -> &DenseMatrix<T> {
        &self.schur
    }

    pub fn boundary_mass(&self) -> &[T] {
        &self.boundary_mass
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn gate(&self) -> GateOutcome<T> {
        self.gate
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary.len()
    }

    /// `ψ = M_Γ⁻¹ S φ`.
    pub fn apply(&self, phi: &[T]) -> Vec<T> {
        self.schur.matvec(phi).iter().zip(&self.boundary_mass).map(|(&s, &m)| s / m).collect()
    }

    /// Spectrum of the pair `(S, M_Γ)`.
    pub fn spectrum(&self) -> Result<SpectralDecomposition<T>> {
        eigensolve(&self.schur, &self.boundary_mass)
    }

    /// The discrete `(A + V)`-harmonic extension of boundary data `φ`.
    pub fn lift(&self, phi: &[T]) -> Vec<T> {
        assert_eq!(phi.len(), self.boundary.len(), "boundary data has the wrong length");
        let mut u = vec![T::zero(); self.node_count];
        for (&v, &p) in self.boundary.iter().zip(phi) {
            u[v] = p;
        }
        if let Some(lu) = &self.interior_solver {
            let rhs: Vec<T> = self.coupling.matvec(phi).into_iter().map(|x| -x).collect();
            for (&v, x) in self.interior.iter().zip(lu.solve(&rhs)) {
                u[v] = x;
            }
        }
        u
    }

    /// `‖A_II u_I + A_IB φ‖_∞` for a lifted `u`.
    pub fn lift_residual(&self, bundle: &OperatorBundle<T>, u: &[T]) -> T {
        let au = bundle.full().matvec(u);
        self.interior.iter().fold(T::zero(), |m, &v| m.max(au[v].abs()))
    }

    /// Copy with `delta` added to `S`, bypassing symmetrization. Used to
    /// build fixtures that must fail the self-adjointness check.
    pub fn perturbed(&self, delta: &DenseMatrix<T>) -> Self {
        let mut out = self.clone();
        out.schur = self.schur.add(delta);
        out
    }
}

/// Conormal derivative of the lifting of `φ` computed two ways.
#[derive(Debug, Clone)]
pub struct ConormalRoutes<T> {
    /// Variational route, `M_Γ⁻¹ S φ`.
    pub schur: Vec<T>,
    /// Pointwise route: per-node, length-weighted mean of `ν·(a∇u)` over the
    /// incident boundary edges.
    pub flux: Vec<T>,
    /// `M_Γ`-weighted L₂ distance between the two.
    pub discrepancy: T,
}

pub fn conormal_two_routes<T: Scalar>(
    dtn: &DtnOperator<T>,
    bundle: &OperatorBundle<T>,
    phi: &[T],
) -> ConormalRoutes<T> {
    let mesh = bundle.mesh();
    let u = dtn.lift(phi);
    let schur = dtn.apply(phi);

    let mut slot = vec![usize::MAX; mesh.vertex_count()];
    for (p, &v) in dtn.boundary.iter().enumerate() {
        slot[v] = p;
    }
    let half = T::lit(0.5);
    let mut flux = vec![T::zero(); dtn.boundary.len()];
    for (k, e) in mesh.boundary_edges().iter().enumerate() {
        let t = mesh.boundary_edge_triangle(k);
        let tri = mesh.triangles()[t];
        let grads = mesh.hat_gradients(t);
        let mut grad_u = [T::zero(); 2];
        for (g, &v) in grads.iter().zip(&tri) {
            grad_u[0] += g[0] * u[v];
            grad_u[1] += g[1] * u[v];
        }
        let conormal = bundle.coefficients().a()[t].apply(grad_u);
        let nu = mesh.outward_normal(k);
        let value = nu[0] * conormal[0] + nu[1] * conormal[1];
        let share = half * mesh.edge_length(k);
        for &v in &e.nodes {
            flux[slot[v]] += share * value;
        }
    }
    for (f, &m) in flux.iter_mut().zip(&dtn.boundary_mass) {
        *f /= m;
    }
    let diff: Vec<T> = schur.iter().zip(&flux).map(|(&a, &b)| a - b).collect();
    let discrepancy = weighted_dot(&dtn.boundary_mass, &diff, &diff).sqrt();
    ConormalRoutes { schur, flux, discrepancy }
}

/// `A_{V,β}` as the pair `(A + B_β, M_Ω)`.
#[derive(Debug, Clone)]
pub struct RobinOperator<T> {
    matrix: DenseMatrix<T>,
    mass: Vec<T>,
}

pub fn build_robin<T: Scalar>(bundle: &OperatorBundle<T>) -> RobinOperator<T> {
    RobinOperator { matrix: bundle.full().add(&bundle.beta_matrix()), mass: bundle.domain_mass().to_vec() }
}

impl<T: Scalar> RobinOperator<T> {
    /// Robin operator for the constant boundary coefficient `beta`,
    /// ignoring the bundle's own `β`.
    pub fn with_uniform_beta(bundle: &OperatorBundle<T>, beta: T) -> Self {
        let mut matrix = bundle.full().clone();
        for (&v, &m) in bundle.boundary().iter().zip(bundle.boundary_mass()) {
            matrix[(v, v)] += beta * m;
        }
        Self { matrix, mass: bundle.domain_mass().to_vec() }
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    pub fn spectrum(&self) -> Result<SpectralDecomposition<T>> {
        eigensolve(&self.matrix, &self.mass)
    }
}

/// Solves `A u = (0 on I, M_Γ τ on B)`, the weak Neumann problem with
/// conormal data `τ`. Refuses when `(A, M_Ω)` has an eigenvalue within
/// `gate_tol` of zero.
pub fn neumann_solve<T: Scalar>(bundle: &OperatorBundle<T>, tau: &[T], gate_tol: T) -> Result<Vec<T>> {
    if tau.len() != bundle.boundary().len() {
        return Err(Error::DimensionMismatch { expected: bundle.boundary().len(), found: tau.len() });
    }
    let closest = eigenvalues(bundle.full(), bundle.domain_mass())?
        .iter()
        .copied()
        .fold(T::infinity(), |best, l| if l.abs() < best.abs() { l } else { best });
    if closest.abs() < gate_tol {
        return Err(Error::NearSingularNeumann { eigenvalue: closest.as_f64(), tol: gate_tol.as_f64() });
    }
    let mut rhs = vec![T::zero(); bundle.node_count()];
    for ((&v, &m), &t) in bundle.boundary().iter().zip(bundle.boundary_mass()).zip(tau) {
        rhs[v] = m * t;
    }
    Ok(LuFactor::new(bundle.full().clone())?.solve(&rhs))
}
