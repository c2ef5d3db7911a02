//! Machine checks of the structural properties of the DtN and Robin
//! semigroups, each producing a [`CheckResult`] with measured values and the
//! tolerance it was judged against.
//!
//! A check whose hypotheses do not hold for the scenario still runs but is
//! reported as [`CheckStatus::Informational`], so it never fails a suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::dtn::{build_dtn, build_robin, DtnOperator, RobinOperator};
use crate::fem::{assemble, OperatorBundle};
use crate::linalg::{max_abs, weighted_dot, DenseMatrix};
use crate::mesh::BoundaryMeasure;
use crate::scalar::Scalar;
use crate::scenario::{Scenario, ScenarioDescriptor};
use crate::spectral::{PNorm, SemigroupKernel, SpectralDecomposition};

/// Tolerances used by the checks. Relative quantities are normalized by the
/// largest entry of the object being checked.
pub mod tol {
    pub const SYMMETRY: f64 = 1e-12;
    pub const POSITIVITY: f64 = 1e-9;
    pub const SUBMARKOV: f64 = 1e-10;
    pub const CHAPMAN_KOLMOGOROV: f64 = 1e-10;
    pub const ACTION: f64 = 1e-10;
    pub const TRACE: f64 = 1e-10;
    pub const SEMIGROUP_LAW: f64 = 1e-10;
    pub const PERRON_GAP: f64 = 1e-8;
    pub const STRICT_POSITIVITY: f64 = 1e-14;
    pub const ROBIN_LINK: f64 = 1e-8;
    pub const ROBIN_LINK_ANGLE: f64 = 1e-6;
    pub const LP_SLACK: f64 = 1e-8;
    pub const CONSTANTS: f64 = 1e-10;
    pub const METZLER: f64 = 1e-12;
}

const PROBES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Informational,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub measured: Map<String, Value>,
    pub tolerance: Option<f64>,
    /// Plain statement of the property being checked.
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn new(name: impl Into<String>, anchor: &str, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            status: CheckStatus::Pass,
            measured: Map::new(),
            tolerance: Some(tolerance),
            anchor: anchor.to_string(),
            note: None,
        }
    }

    fn record(&mut self, key: &str, value: impl Into<Value>) {
        self.measured.insert(key.to_string(), value.into());
    }

    fn record_num<T: Scalar>(&mut self, key: &str, x: T) {
        self.record(key, num(x.as_f64()));
    }

    fn record_series<T: Scalar>(&mut self, key: &str, xs: impl IntoIterator<Item = T>) {
        self.record(key, Value::Array(xs.into_iter().map(|x| num(x.as_f64())).collect()));
    }

    fn conclude(mut self, ok: bool, hypothesis: bool) -> Self {
        self.status = match (hypothesis, ok) {
            (false, _) => CheckStatus::Informational,
            (true, true) => CheckStatus::Pass,
            (true, false) => CheckStatus::Fail,
        };
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn failure(name: &str, anchor: &str, note: String) -> Self {
        let mut c = Self::new(name, anchor, 0.0);
        c.tolerance = None;
        c.conclude(false, true).with_note(note)
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn relative<T: Scalar>(err: T, scale: T) -> T {
    let floor = T::min_positive_value();
    err / scale.abs().max(floor)
}

fn probes<T: Scalar>(n: usize, seed: u64) -> Vec<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..PROBES).map(|_| (0..n).map(|_| T::lit(rng.gen_range(0.0..1.0))).collect()).collect()
}

/// `S` symmetric to `1e-12 · ‖S‖_max` and its quadratic form bounded below
/// by the smallest eigenvalue of `(S, M)`.
pub fn check_selfadjoint_lowerbounded<T: Scalar>(
    name: &str,
    s: &DenseMatrix<T>,
    dec: &SpectralDecomposition<T>,
    seed: u64,
) -> CheckResult {
    let mut c = CheckResult::new(name, "operator is self-adjoint and bounded below", tol::SYMMETRY);
    let asym = relative(s.asymmetry(), s.max_abs());
    let lambda1 = dec.ground_value();
    c.record_num("relative_asymmetry", asym);
    c.record_num("lambda1", lambda1);
    // Rayleigh quotients of signed probes never fall below λ₁.
    let mut worst = T::infinity();
    for p in probes::<T>(dec.len(), seed) {
        let v: Vec<T> = p.iter().map(|&x| x - T::lit(0.5)).collect();
        let q = crate::linalg::dot(&v, &s.matvec(&v)) / weighted_dot(dec.mass(), &v, &v);
        worst = worst.min(q - lambda1);
    }
    c.record_num("min_rayleigh_minus_lambda1", worst);
    let bounded = lambda1.is_finite() && worst >= -T::lit(1e-9) * lambda1.abs().max(T::one());
    c.conclude(asym <= T::lit(tol::SYMMETRY) && bounded, true)
}

/// Kernel entries nonnegative up to `1e-9` of the largest entry.
///
/// Times shorter than `1/λ_max` resolve the mesh rather than the operator;
/// they are reported but excluded from the verdict.
pub fn check_positivity<T: Scalar>(
    name: &str,
    kernels: &[SemigroupKernel<T>],
    dec: &SpectralDecomposition<T>,
    hypothesis: bool,
) -> CheckResult {
    let mut c = CheckResult::new(name, "semigroup is positive (kernel nonnegative)", tol::POSITIVITY);
    let lambda_max = dec.values().iter().fold(T::zero(), |m, l| m.max(l.abs()));
    let cutoff = lambda_max.recip();
    let mut ok = true;
    let mut ratios = Vec::new();
    let mut excluded = Vec::new();
    for k in kernels {
        let ratio = relative(k.min_entry(), k.max_entry().abs());
        ratios.push(ratio);
        if k.t < cutoff {
            excluded.push(k.t);
        } else if ratio < -T::lit(tol::POSITIVITY) {
            ok = false;
        }
    }
    c.record_series("times", kernels.iter().map(|k| k.t));
    c.record_series("min_over_max", ratios);
    c.record_series("excluded_times", excluded);
    c.conclude(ok, hypothesis)
}

/// `‖S_t 𝟙‖_∞ ≤ 1` and `0 ≤ S_t f ≤ 1` for seeded random `f ∈ [0, 1]`.
pub fn check_submarkov<T: Scalar>(
    name: &str,
    kernels: &[SemigroupKernel<T>],
    seed: u64,
    hypothesis: bool,
) -> CheckResult {
    let mut c = CheckResult::new(name, "semigroup is sub-Markovian", tol::SUBMARKOV);
    let slack = T::lit(tol::SUBMARKOV);
    let mut ok = true;
    let mut row_max = Vec::new();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for k in kernels {
        let ones = k.weighted_row_sums();
        let m = ones.iter().copied().fold(T::neg_infinity(), T::max);
        row_max.push(m);
        ok &= m <= T::one() + slack;
        for f in probes::<T>(k.weights.len(), seed) {
            for v in k.apply(&f) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    ok &= lo >= -slack && hi <= T::one() + slack;
    c.record_series("max_of_semigroup_on_one", row_max);
    c.record_num("probe_min", lo);
    c.record_num("probe_max", hi);
    c.conclude(ok, hypothesis)
}

/// Kernel symmetry, Chapman–Kolmogorov, agreement of the kernel action with
/// the spectral evaluation, the trace identity and the semigroup law.
/// `doubled[i]` must be the kernel at `2 · kernels[i].t`.
pub fn check_kernel_laws<T: Scalar>(
    name: &str,
    dec: &SpectralDecomposition<T>,
    kernels: &[SemigroupKernel<T>],
    doubled: &[SemigroupKernel<T>],
    seed: u64,
) -> CheckResult {
    let mut c = CheckResult::new(name, "kernel is symmetric and obeys Chapman-Kolmogorov", tol::CHAPMAN_KOLMOGOROV);
    let mut sym = T::zero();
    let mut ck = T::zero();
    let mut action = T::zero();
    let mut trace = T::zero();
    let mut law = T::zero();
    let probe = probes::<T>(dec.len(), seed).swap_remove(0);
    for (k, k2) in kernels.iter().zip(doubled) {
        sym = sym.max(relative(k.symmetry_error(), k.values.max_abs()));
        ck = ck.max(relative(k.compose(k).max_abs_diff(&k2.values), k2.values.max_abs()));
        let via_kernel = k.apply(&probe);
        match dec.semigroup_apply(k.t, &probe) {
            Ok(direct) => {
                let diff = via_kernel.iter().zip(&direct).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
                action = action.max(relative(diff, max_abs(&direct)));
            }
            Err(_) => action = T::infinity(),
        }
        let spectral = dec.spectral_trace(k.t);
        trace = trace.max((k.trace() - spectral).abs() / spectral.abs().max(T::one()));
    }
    for w in kernels.windows(2) {
        let (t, s) = (w[0].t, w[1].t);
        let composed = dec.semigroup_apply(s, &dec.semigroup_apply(t, &probe).unwrap_or_default());
        let direct = dec.semigroup_apply(t + s, &probe);
        if let (Ok(a), Ok(b)) = (composed, direct) {
            let diff = a.iter().zip(&b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()));
            law = law.max(relative(diff, max_abs(&b)));
        }
    }
    c.record_num("symmetry", sym);
    c.record_num("chapman_kolmogorov", ck);
    c.record_num("action_identity", action);
    c.record_num("trace_identity", trace);
    c.record_num("semigroup_law", law);
    let ok = sym <= T::lit(tol::SYMMETRY)
        && ck <= T::lit(tol::CHAPMAN_KOLMOGOROV)
        && action <= T::lit(tol::ACTION)
        && trace <= T::lit(tol::TRACE)
        && law <= T::lit(tol::SEMIGROUP_LAW);
    c.conclude(ok, true)
}

/// Simple ground eigenvalue with a strictly positive eigenvector. When
/// `components` labels the entries, the minimum on each label is reported.
pub fn check_perron<T: Scalar>(
    name: &str,
    dec: &SpectralDecomposition<T>,
    components: Option<&[usize]>,
    hypothesis: bool,
) -> CheckResult {
    let mut c = CheckResult::new(name, "ground eigenvalue simple with positive eigenvector", tol::PERRON_GAP);
    let l1 = dec.ground_value();
    let gap = if dec.len() > 1 { dec.values()[1] - l1 } else { T::infinity() };
    let phi = dec.ground_state();
    let max = phi.iter().copied().fold(T::neg_infinity(), T::max);
    let min = phi.iter().copied().fold(T::infinity(), T::min);
    let delta = relative(min, max);
    c.record_num("lambda1", l1);
    c.record_num("gap", gap);
    c.record_num("min_over_max", delta);
    if let Some(labels) = components {
        let count = labels.iter().max().map_or(0, |&m| m + 1);
        let mut mins = vec![T::infinity(); count];
        for (&label, &v) in labels.iter().zip(&phi) {
            mins[label] = mins[label].min(v);
        }
        c.record_series("component_min", mins);
    }
    let ok = gap >= T::lit(tol::PERRON_GAP) * l1.abs().max(T::one()) && delta >= T::lit(tol::STRICT_POSITIVITY);
    c.conclude(ok, hypothesis)
}

/// With `β ≡ −λ₁(D_V)` the Robin pair has bottom eigenvalue zero, with
/// eigenvector whose trace is parallel to the DtN ground state.
///
/// Outside the positive regime `R · lift(Φ₁) = 0` still holds but zero need
/// not be the bottom of the spectrum; the eigenvalue closest to zero is then
/// measured and the result is informational.
pub fn check_robin_dtn_link<T: Scalar>(
    bundle: &OperatorBundle<T>,
    dtn: &DtnOperator<T>,
    dtn_dec: &SpectralDecomposition<T>,
    positive_regime: bool,
) -> CheckResult {
    let name = "link.robin_dtn";
    let anchor = "Robin operator with beta = -lambda1(DtN) has bottom eigenvalue 0";
    let mut c = CheckResult::new(name, anchor, tol::ROBIN_LINK);
    let l1 = dtn_dec.ground_value();
    let phi1 = dtn_dec.ground_state();
    let robin = RobinOperator::with_uniform_beta(bundle, -l1);
    let lifted = dtn.lift(&phi1);
    let r_lift = robin.matrix().matvec(&lifted);
    let lift_residual = relative(max_abs(&r_lift), robin.matrix().max_abs() * max_abs(&lifted));
    let dec = match robin.spectrum() {
        Ok(d) => d,
        Err(e) => return CheckResult::failure(name, anchor, e.to_string()),
    };
    let scale = dec.values().iter().fold(T::zero(), |m, l| m.max(l.abs()));
    let index = if positive_regime {
        0
    } else {
        (0..dec.len()).min_by(|&a, &b| dec.values()[a].abs().partial_cmp(&dec.values()[b].abs()).unwrap()).unwrap_or(0)
    };
    let bottom = dec.values()[index];
    let u = dec.eigenvector(index);
    let trace = bundle.trace(&u);
    let m = dtn.boundary_mass();
    let coef = weighted_dot(m, &trace, &phi1) / weighted_dot(m, &phi1, &phi1);
    let rest: Vec<T> = trace.iter().zip(&phi1).map(|(&a, &b)| a - coef * b).collect();
    let sin = (weighted_dot(m, &rest, &rest) / weighted_dot(m, &trace, &trace)).sqrt();
    c.record_num("beta", -l1);
    c.record_num("robin_eigenvalue", bottom);
    c.record_num("spectral_scale", scale);
    c.record_num("relative_eigenvalue", relative(bottom.abs(), scale));
    c.record_num("trace_angle_sin", sin);
    c.record_num("lift_residual", lift_residual);
    c.record("angle_tolerance", num(tol::ROBIN_LINK_ANGLE));
    let ok = bottom.abs() <= T::lit(tol::ROBIN_LINK) * scale && sin <= T::lit(tol::ROBIN_LINK_ANGLE);
    c.conclude(ok, positive_regime)
}

/// Every kernel entry exceeds `1e-14` of the largest entry. On failure the
/// support graph of the kernel is searched for a proper invariant subset of
/// coordinates, which witnesses reducibility.
pub fn check_strict_kernel_positivity<T: Scalar>(
    name: &str,
    kernels: &[SemigroupKernel<T>],
    hypothesis: bool,
) -> CheckResult {
    let mut c = CheckResult::new(name, "kernel strictly positive (irreducible semigroup)", tol::STRICT_POSITIVITY);
    let mut ok = true;
    let mut ratios = Vec::new();
    let mut invariant = None;
    for k in kernels {
        let ratio = relative(k.min_entry(), k.max_entry().abs());
        ratios.push(ratio);
        if !(ratio > T::lit(tol::STRICT_POSITIVITY)) {
            ok = false;
            if invariant.is_none() {
                invariant = invariant_coordinate_subset(&k.values, T::lit(tol::STRICT_POSITIVITY));
            }
        }
    }
    c.record_series("times", kernels.iter().map(|k| k.t));
    c.record_series("min_over_max", ratios);
    if let Some(subset) = invariant {
        c.record("invariant_subset_size", subset.len());
        c.record("invariant_subset_first", subset[0]);
    }
    c.conclude(ok, hypothesis)
}

/// Coordinates reachable from coordinate 0 through entries above
/// `rel_tol · max|K|`; `Some` when that set is proper, i.e. the kernel
/// leaves the span of those coordinates invariant.
pub fn invariant_coordinate_subset<T: Scalar>(k: &DenseMatrix<T>, rel_tol: T) -> Option<Vec<usize>> {
    let n = k.rows();
    if n == 0 {
        return None;
    }
    let thresh = rel_tol * k.max_abs();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for (y, &v) in k.row(x).iter().enumerate() {
            if !seen[y] && v.abs() > thresh {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    let subset: Vec<usize> = (0..n).filter(|&i| seen[i]).collect();
    (subset.len() < n).then_some(subset)
}

/// `‖S_t‖_{p→p} ≤ (max Φ₁ / min Φ₁) e^{−λ₁ t}` for each requested `p`.
pub fn check_lp_bound<T: Scalar>(
    name: &str,
    dec: &SpectralDecomposition<T>,
    kernels: &[SemigroupKernel<T>],
    ps: &[f64],
    hypothesis: bool,
) -> CheckResult {
    let mut c = CheckResult::new(name, "L_p operator norm bounded by M exp(-lambda1 t)", tol::LP_SLACK);
    let phi = dec.ground_state();
    let max = phi.iter().copied().fold(T::neg_infinity(), T::max);
    let min = phi.iter().copied().fold(T::infinity(), T::min);
    let l1 = dec.ground_value();
    if !(min > T::zero()) {
        c.record_num("ground_state_min", min);
        return c.conclude(false, hypothesis).with_note("ground state is not strictly positive");
    }
    let constant = max / min;
    c.record_num("constant", constant);
    c.record_num("lambda1", l1);
    let mut ok = true;
    let mut rows = Vec::new();
    let mut one_vs_inf = T::zero();
    for k in kernels {
        let bound = constant * (-l1 * k.t).exp();
        for &p in ps {
            let Some(norm_kind) = PNorm::from_exponent(p) else {
                return CheckResult::failure(name, "L_p bound", format!("invalid exponent {p}"));
            };
            let norm = match k.operator_norm(norm_kind) {
                Ok(v) => v,
                Err(e) => return CheckResult::failure(name, "L_p bound", e.to_string()),
            };
            ok &= norm <= bound * (T::one() + T::lit(tol::LP_SLACK));
            let mut row = Map::new();
            row.insert("t".into(), num(k.t.as_f64()));
            row.insert("p".into(), if p.is_infinite() { Value::from("inf") } else { num(p) });
            row.insert("norm".into(), num(norm.as_f64()));
            row.insert("bound".into(), num(bound.as_f64()));
            rows.push(Value::Object(row));
        }
        if let (Ok(n1), Ok(ninf)) = (k.operator_norm(PNorm::One), k.operator_norm(PNorm::Infinity)) {
            one_vs_inf = one_vs_inf.max(relative((n1 - ninf).abs(), ninf));
        }
    }
    c.record("norms", Value::Array(rows));
    c.record_num("one_vs_infinity_relative", one_vs_inf);
    c.conclude(ok, hypothesis)
}

/// With zero potential constants are harmonic: `S 𝟙 = 0` and `S_t 𝟙 = 𝟙`.
pub fn check_harmonic_constants<T: Scalar>(
    name: &str,
    s: &DenseMatrix<T>,
    kernels: &[SemigroupKernel<T>],
    hypothesis: bool,
) -> CheckResult {
    let mut c = CheckResult::new(name, "constants are preserved when V = 0", tol::CONSTANTS);
    let ones = vec![T::one(); s.rows()];
    let flux = relative(max_abs(&s.matvec(&ones)), s.max_abs());
    let drift = kernels.iter().fold(T::zero(), |m, k| {
        k.weighted_row_sums().iter().fold(m, |m, &v| m.max((v - T::one()).abs()))
    });
    c.record_num("relative_flux_of_one", flux);
    c.record_num("max_drift_of_one", drift);
    c.conclude(flux <= T::lit(tol::CONSTANTS) && drift <= T::lit(tol::CONSTANTS), hypothesis)
}

/// `‖S_t φ − φ‖_∞` as `t → 0`, with the observed convergence rates per
/// decade. Always informational: finite-dimensional semigroups are trivially
/// strongly continuous, so this is evidence across refinements, nothing more.
pub fn check_strong_continuity<T: Scalar>(name: &str, dec: &SpectralDecomposition<T>, phi: &[T]) -> CheckResult {
    let mut c = CheckResult::new(name, "strong continuity as t -> 0", 0.0);
    c.tolerance = None;
    let times = [1e-1, 1e-2, 1e-3];
    let mut errs = Vec::new();
    for &t in &times {
        let err = match dec.semigroup_apply(T::lit(t), phi) {
            Ok(v) => v.iter().zip(phi).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())).as_f64(),
            Err(e) => return CheckResult::failure(name, "strong continuity", e.to_string()),
        };
        errs.push(err);
    }
    let rates: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log10()).collect();
    c.record("times", times.to_vec());
    c.record("sup_errors", errs.iter().map(|&e| num(e)).collect::<Vec<_>>());
    c.record("rates", rates.iter().map(|&r| num(r)).collect::<Vec<_>>());
    c.conclude(true, false)
        .with_note("rates on a fixed mesh; they do not decide strong continuity for rough coefficients")
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub scenario: ScenarioDescriptor,
    pub summary: Map<String, Value>,
    pub checks: Vec<CheckResult>,
    pub overall: CheckStatus,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.overall == CheckStatus::Pass
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs every check on the DtN and Robin semigroups of a scenario.
/// Construction errors become failing checks instead of aborting the suite.
pub fn run_suite<T: Scalar>(scenario: &Scenario<T>) -> VerificationReport {
    let mut summary = Map::new();
    let mut checks = Vec::new();
    run_checks(scenario, &mut summary, &mut checks);
    let overall = if checks.iter().any(CheckResult::failed) { CheckStatus::Fail } else { CheckStatus::Pass };
    VerificationReport { schema: 1, scenario: scenario.descriptor.clone(), summary, checks, overall }
}

fn run_checks<T: Scalar>(scenario: &Scenario<T>, summary: &mut Map<String, Value>, checks: &mut Vec<CheckResult>) {
    let mesh = &scenario.mesh;
    let coeffs = &scenario.coeffs;
    let seed = scenario.seed;
    summary.insert("nodes".into(), mesh.vertex_count().into());
    summary.insert("triangles".into(), mesh.triangle_count().into());
    summary.insert("boundary_nodes".into(), mesh.boundary_nodes().len().into());
    summary.insert("omega_connected".into(), mesh.omega_connected().into());
    summary.insert("boundary_components".into(), mesh.component_count().into());

    let bundle = match assemble(mesh, coeffs) {
        Ok(b) => b,
        Err(e) => {
            checks.push(CheckResult::failure("assembly", "operators assemble", e.to_string()));
            return;
        }
    };
    let block = bundle.dirichlet_block();
    let dirichlet_l1 = if block.is_empty() {
        Ok(T::infinity())
    } else {
        block.eigenvalues().map(|v| v[0])
    };
    let dirichlet_l1 = match dirichlet_l1 {
        Ok(l) => l,
        Err(e) => {
            checks.push(CheckResult::failure("dirichlet_spectrum", "Dirichlet block eigensolve", e.to_string()));
            return;
        }
    };
    let positive_regime = dirichlet_l1 > T::zero();
    let connected = mesh.omega_connected();
    let v_nonneg = coeffs.potential_nonnegative();
    let beta_nonneg = coeffs.beta_nonnegative();
    summary.insert("dirichlet_lambda1".into(), num(dirichlet_l1.as_f64()));
    summary.insert("positive_regime".into(), positive_regime.into());
    summary.insert("potential_nonnegative".into(), v_nonneg.into());
    summary.insert("beta_nonnegative".into(), beta_nonneg.into());

    // Lattice positivity of the discrete semigroups needs a Z-matrix
    // stiffness (discrete maximum principle); anisotropic coefficients on
    // unadapted meshes break it even though the continuous statement holds.
    let metzler = max_offdiagonal(bundle.full()) <= T::lit(tol::METZLER) * bundle.full().max_abs();
    summary.insert("stiffness_offdiagonal_nonpositive".into(), metzler.into());
    let doubled: Vec<T> = scenario.times.iter().map(|&t| t + t).collect();
    let gate_tol = scenario.gate_tol.unwrap_or_else(|| bundle.default_gate_tol());

    match build_dtn(&bundle, gate_tol) {
        Ok(dtn) => {
            let dtn = if scenario.inject_asymmetry { inject_asymmetry(&dtn) } else { dtn };
            let regime = Regime { positive: positive_regime, metzler };
            dtn_checks(scenario, &bundle, &dtn, regime, &doubled, summary, checks);
        }
        Err(e) => checks.push(CheckResult::failure("dtn.construction", "DtN operator is well defined", e.to_string())),
    }

    let robin = build_robin(&bundle);
    let dec = match robin.spectrum() {
        Ok(d) => d,
        Err(e) => {
            checks.push(CheckResult::failure("robin.spectrum", "Robin eigensolve", e.to_string()));
            return;
        }
    };
    summary.insert("robin_lambda1".into(), num(dec.ground_value().as_f64()));
    let (kernels, kernels2) = match (dec.kernels(&scenario.times), dec.kernels(&doubled)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            checks.push(CheckResult::failure("robin.kernels", "Robin kernels", e.to_string()));
            return;
        }
    };
    checks.push(check_selfadjoint_lowerbounded("robin.self_adjoint", robin.matrix(), &dec, seed));
    checks.push(skip_reason(check_positivity("robin.positivity", &kernels, &dec, metzler), &[(!metzler, NOT_METZLER)]));
    checks.push(skip_reason(
        check_submarkov("robin.submarkov", &kernels, seed, metzler && v_nonneg && beta_nonneg),
        &[(!v_nonneg, "V has negative values"), (!beta_nonneg, "beta has negative values"), (!metzler, NOT_METZLER)],
    ));
    checks.push(check_kernel_laws("robin.kernel_laws", &dec, &kernels, &kernels2, seed));
    let hyp = [(!connected, DISCONNECTED), (!metzler, NOT_METZLER)];
    checks.push(skip_reason(check_perron("robin.perron", &dec, None, connected && metzler), &hyp));
    checks.push(skip_reason(
        check_strict_kernel_positivity("robin.strict_positivity", &kernels, connected && metzler),
        &hyp,
    ));
    checks.push(skip_reason(check_lp_bound("robin.lp_bound", &dec, &kernels, &scenario.ps, connected && metzler), &hyp));
}

#[derive(Clone, Copy)]
struct Regime {
    /// `A^D + V ≻ 0`.
    positive: bool,
    /// Off-diagonal stiffness entries are nonpositive.
    metzler: bool,
}

fn dtn_checks<T: Scalar>(
    scenario: &Scenario<T>,
    bundle: &OperatorBundle<T>,
    dtn: &DtnOperator<T>,
    regime: Regime,
    doubled: &[T],
    summary: &mut Map<String, Value>,
    checks: &mut Vec<CheckResult>,
) {
    let mesh = &scenario.mesh;
    let seed = scenario.seed;
    let connected = mesh.omega_connected();
    let dec = match dtn.spectrum() {
        Ok(d) => d,
        Err(e) => {
            checks.push(CheckResult::failure("dtn.spectrum", "DtN eigensolve", e.to_string()));
            return;
        }
    };
    summary.insert("dtn_lambda1".into(), num(dec.ground_value().as_f64()));
    summary.insert("dtn_max_offdiagonal".into(), num(max_offdiagonal(dtn.schur()).as_f64()));
    let (kernels, kernels2) = match (dec.kernels(&scenario.times), dec.kernels(doubled)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            checks.push(CheckResult::failure("dtn.kernels", "DtN kernels", e.to_string()));
            return;
        }
    };
    let Regime { positive, metzler } = regime;
    let perron_hyp = connected && positive;
    let hyp = [(!connected, DISCONNECTED), (!positive, NOT_POSITIVE)];
    let lattice_hyp = [(!connected, DISCONNECTED), (!positive, NOT_POSITIVE), (!metzler, NOT_METZLER)];
    checks.push(check_selfadjoint_lowerbounded("dtn.self_adjoint", dtn.schur(), &dec, seed));
    checks.push(skip_reason(
        check_positivity("dtn.positivity", &kernels, &dec, positive && metzler),
        &lattice_hyp[1..],
    ));
    let v_nonneg = scenario.coeffs.potential_nonnegative();
    checks.push(skip_reason(
        check_submarkov("dtn.submarkov", &kernels, seed, positive && metzler && v_nonneg),
        &[(!v_nonneg, "V has negative values"), (!metzler, NOT_METZLER)],
    ));
    checks.push(check_kernel_laws("dtn.kernel_laws", &dec, &kernels, &kernels2, seed));
    let measure = BoundaryMeasure::new(mesh);
    checks.push(skip_reason(check_perron("dtn.perron", &dec, Some(measure.components()), perron_hyp), &hyp));
    checks.push(skip_reason(
        check_strict_kernel_positivity("dtn.strict_positivity", &kernels, perron_hyp && metzler),
        &lattice_hyp,
    ));
    checks.push(skip_reason(
        check_lp_bound("dtn.lp_bound", &dec, &kernels, &scenario.ps, perron_hyp && metzler),
        &lattice_hyp,
    ));
    let v_zero = scenario.coeffs.potential_is_zero();
    checks.push(skip_reason(
        check_harmonic_constants("dtn.harmonic_constants", dtn.schur(), &kernels, v_zero),
        &[(!v_zero, "V is not identically zero")],
    ));
    checks.push(skip_reason(check_robin_dtn_link(bundle, dtn, &dec, perron_hyp), &hyp));
    let xs: Vec<T> = dtn.boundary().iter().map(|&v| mesh.vertices()[v][0]).collect();
    checks.push(check_strong_continuity("dtn.strong_continuity", &dec, &xs));
}

const DISCONNECTED: &str = "Omega is not connected";
const NOT_POSITIVE: &str = "A^D + V is not positive definite";
const NOT_METZLER: &str = "stiffness has positive off-diagonal entries (no discrete maximum principle)";

/// Attaches the reason an informational check did not gate the suite.
fn skip_reason(c: CheckResult, hypotheses: &[(bool, &str)]) -> CheckResult {
    if c.status != CheckStatus::Informational {
        return c;
    }
    let reasons: Vec<&str> = hypotheses.iter().filter(|(violated, _)| *violated).map(|(_, r)| *r).collect();
    if reasons.is_empty() {
        return c;
    }
    let mut note = format!("hypothesis not met: {}", reasons.join("; "));
    if let Some(prev) = &c.note {
        note = format!("{note}; {prev}");
    }
    c.with_note(note)
}

/// Largest off-diagonal entry.
pub fn max_offdiagonal<T: Scalar>(a: &DenseMatrix<T>) -> T {
    let mut worst = T::neg_infinity();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if i != j {
                worst = worst.max(a[(i, j)]);
            }
        }
    }
    worst
}

/// Perturbs `S` by `10⁻⁶ ‖S‖_max` in one off-diagonal entry.
fn inject_asymmetry<T: Scalar>(dtn: &DtnOperator<T>) -> DtnOperator<T> {
    let n = dtn.boundary_len();
    let mut delta = DenseMatrix::zeros(n, n);
    if n > 1 {
        delta[(0, 1)] = T::lit(1e-6) * dtn.schur().max_abs().max(T::one());
    }
    dtn.perturbed(&delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Preset;
    use crate::scenario::PotentialSpec;

    fn square(v: PotentialSpec) -> Scenario<f64> {
        Scenario::preset(Preset::Square, 4, 0, v, 0.0).unwrap()
    }

    #[test]
    fn laplace_square_passes_everything() {
        let report = run_suite(&square(PotentialSpec::Constant(0.0)));
        for c in &report.checks {
            assert!(!c.failed(), "{} failed: {:?}", c.name, c.measured);
        }
        assert!(report.passed());
        assert!(report.check("dtn.harmonic_constants").unwrap().passed());
        assert!(report.check("dtn.submarkov").unwrap().passed());
    }

    #[test]
    fn injected_asymmetry_is_caught() {
        let mut s = square(PotentialSpec::Constant(1.0));
        s.inject_asymmetry = true;
        let report = run_suite(&s);
        assert!(report.check("dtn.self_adjoint").unwrap().failed());
        assert!(!report.passed());
    }

    #[test]
    fn negative_potential_skips_submarkov() {
        let report = run_suite(&square(PotentialSpec::DirichletMultiple(-0.5)));
        assert_eq!(report.check("dtn.submarkov").unwrap().status, CheckStatus::Informational);
        assert!(report.check("dtn.positivity").unwrap().passed());
        assert!(report.passed());
    }

    #[test]
    fn invariant_subset_of_block_matrix() {
        let k = DenseMatrix::from_fn(4, 4, |i, j| if (i < 2) == (j < 2) { 1.0 } else { 0.0 });
        assert_eq!(invariant_coordinate_subset(&k, 1e-14), Some(vec![0, 1]));
        let full = DenseMatrix::from_fn(3, 3, |_, _| 1.0f64);
        assert_eq!(invariant_coordinate_subset(&full, 1e-14), None);
    }

    #[test]
    fn report_serializes_with_schema() {
        let report = run_suite(&square(PotentialSpec::Constant(1.0)));
        let v: Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert!(v["checks"].as_array().unwrap().iter().all(|c| c["anchor"].is_string()));
    }
}
