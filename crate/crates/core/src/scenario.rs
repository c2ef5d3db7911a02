//! Scenario description: domain, coefficients, potential regime, time grid.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::{assemble, CoefficientField};
use crate::mesh::{Mesh, Preset};
use crate::scalar::Scalar;

/// How the potential `V` is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// Leave whatever the coefficient field already carries.
    Keep,
    Constant(f64),
    /// `V ≡ factor · λ₁^D`, where `λ₁^D` is the first eigenvalue of the
    /// Dirichlet block with the same `a` and zero potential.
    DirichletMultiple(f64),
}

impl FromStr for PotentialSpec {
    type Err = Error;

    /// Accepts `"1.5"` or `"-0.5*lambda1d"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidScenario(format!("cannot parse potential `{s}`"));
        if let Some(factor) = s.strip_suffix("lambda1d") {
            let factor = factor.trim().trim_end_matches('*').trim();
            let f = match factor {
                "" | "+" => 1.0,
                "-" => -1.0,
                x => x.parse().map_err(|_| bad())?,
            };
            return Ok(PotentialSpec::DirichletMultiple(f));
        }
        s.parse().map(PotentialSpec::Constant).map_err(|_| bad())
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::Keep => f.write_str("from coefficients"),
            PotentialSpec::Constant(c) => write!(f, "{c}"),
            PotentialSpec::DirichletMultiple(c) => write!(f, "{c}*lambda1d"),
        }
    }
}

/// First Dirichlet eigenvalue of `a` with zero potential; `+∞` without
/// interior nodes.
pub fn first_dirichlet_eigenvalue<T: Scalar>(mesh: &Mesh<T>, coeffs: &CoefficientField<T>) -> Result<T> {
    let free = coeffs.clone().with_uniform_potential(T::zero());
    let block = assemble(mesh, &free)?.dirichlet_block();
    if block.is_empty() {
        return Ok(T::infinity());
    }
    Ok(block.eigenvalues()?[0])
}

impl PotentialSpec {
    pub fn apply<T: Scalar>(&self, mesh: &Mesh<T>, coeffs: CoefficientField<T>) -> Result<CoefficientField<T>> {
        match *self {
            PotentialSpec::Keep => Ok(coeffs),
            PotentialSpec::Constant(c) => Ok(coeffs.with_uniform_potential(T::lit(c))),
            PotentialSpec::DirichletMultiple(f) => {
                let l1 = first_dirichlet_eigenvalue(mesh, &coeffs)?;
                if !l1.is_finite() {
                    return Err(Error::InvalidScenario(
                        "potential relative to the Dirichlet eigenvalue needs interior nodes".into(),
                    ));
                }
                Ok(coeffs.with_uniform_potential(T::lit(f) * l1))
            }
        }
    }
}

/// Scenario metadata carried into reports.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioDescriptor {
    pub domain: String,
    pub resolution: usize,
    pub refinement: usize,
    pub coefficients: String,
    pub potential: String,
    pub beta: String,
    pub seed: u64,
    pub times: Vec<f64>,
    pub ps: Vec<f64>,
}

/// Everything `run_suite` needs.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub descriptor: ScenarioDescriptor,
    pub mesh: Mesh<T>,
    pub coeffs: CoefficientField<T>,
    pub times: Vec<T>,
    pub ps: Vec<f64>,
    pub seed: u64,
    pub gate_tol: Option<T>,
    /// Adds a small antisymmetric perturbation to `S` before checking; the
    /// self-adjointness check must then fail.
    pub inject_asymmetry: bool,
}

pub const DEFAULT_TIMES: [f64; 3] = [0.1, 0.5, 1.0];
pub const DEFAULT_PS: [f64; 3] = [1.0, 2.0, f64::INFINITY];

impl<T: Scalar> Scenario<T> {
    /// Preset domain with `a = I`, constant `β` and the given potential.
    pub fn preset(
        preset: Preset,
        resolution: usize,
        refinement: usize,
        potential: PotentialSpec,
        beta: f64,
    ) -> Result<Self> {
        let mesh = Mesh::preset(preset, resolution)?.refined(refinement);
        let coeffs = CoefficientField::laplacian(&mesh).with_uniform_beta(T::lit(beta));
        let coeffs = potential.apply(&mesh, coeffs)?;
        let descriptor = ScenarioDescriptor {
            domain: preset.name().to_string(),
            resolution,
            refinement,
            coefficients: "a = identity".into(),
            potential: potential.to_string(),
            beta: beta.to_string(),
            seed: 0,
            times: DEFAULT_TIMES.to_vec(),
            ps: DEFAULT_PS.to_vec(),
        };
        Ok(Self::from_parts(descriptor, mesh, coeffs))
    }

    pub fn from_parts(descriptor: ScenarioDescriptor, mesh: Mesh<T>, coeffs: CoefficientField<T>) -> Self {
        let times = descriptor.times.iter().map(|&t| T::lit(t)).collect();
        Self {
            ps: descriptor.ps.clone(),
            seed: descriptor.seed,
            descriptor,
            mesh,
            coeffs,
            times,
            gate_tol: None,
            inject_asymmetry: false,
        }
    }

    pub fn with_times(mut self, times: &[f64]) -> Result<Self> {
        validate_times(times)?;
        self.descriptor.times = times.to_vec();
        self.times = times.iter().map(|&t| T::lit(t)).collect();
        Ok(self)
    }

    pub fn with_ps(mut self, ps: &[f64]) -> Self {
        self.descriptor.ps = ps.to_vec();
        self.ps = ps.to_vec();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.descriptor.seed = seed;
        self.seed = seed;
        self
    }
}

/// Time grids must be strictly positive and strictly ascending.
pub fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidScenario("time grid is empty".into()));
    }
    if times.iter().any(|&t| !(t > 0.0 && t.is_finite())) || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidScenario(format!(
            "time grid must be strictly positive and ascending, got {times:?}"
        )));
    }
    Ok(())
}
