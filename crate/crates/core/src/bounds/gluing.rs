use super::report::{BoundReport, Formula};
use crate::profiles::unit_sphere_volume;
use crate::quadrature::adaptive_simpson;
use crate::{Error, Result};

/// Radius `r₁` of the ball carrying the fixed cut-off in the trace estimate.
pub const TRACE_RADIUS: f64 = 0.5;

const AGREEMENT: f64 = 1e-10;

fn check_dimension(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::domain(format!("dimension m = {m} must be >= 2")));
    }
    Ok(())
}

pub(crate) fn cutoff_closed_form(m: usize, eps: f64) -> f64 {
    let log_eps = eps.ln();
    let radial = if m == 2 {
        -0.5 * log_eps
    } else {
        let d = (m - 2) as f64;
        (eps.powf(0.5 * d) - eps.powf(d)) / d
    };
    4.0 / (log_eps * log_eps) * unit_sphere_volume(m - 1) * radial
}

/// Dirichlet energy of the logarithmic cut-off `χ_ε` (1 inside `ε`, 0 outside
/// `√ε`) on flat `R^m`, by quadrature in `u = ln r` and by antiderivative.
pub fn cutoff_energy(m: usize, eps: f64) -> Result<BoundReport> {
    check_dimension(m)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!(
            "cut-off scale eps = {eps} must lie in (0, 1)"
        )));
    }
    let closed = cutoff_closed_form(m, eps);
    let log_eps = eps.ln();
    let d = (m - 2) as f64;
    // ∫_ε^{√ε} r^{m-3} dr = ∫ e^{(m-2)u} du over [ln ε, ln √ε].
    let radial = adaptive_simpson(
        |u| (d * u).exp(),
        log_eps,
        0.5 * log_eps,
        1e-15 * closed.abs().max(1e-300),
    );
    let quadrature = 4.0 / (log_eps * log_eps) * unit_sphere_volume(m - 1) * radial;
    let rel = (quadrature - closed).abs() / closed.abs();
    if rel > AGREEMENT {
        return Err(Error::QuadratureMismatch {
            quantity: format!("cut-off energy (m = {m}, eps = {eps})"),
            quadrature,
            closed_form: closed,
        });
    }
    BoundReport::new("cut-off energy", Formula::CutoffEnergy)
        .constant("m", m as f64)
        .constant("eps", eps)
        .step("vol(S^(m-1))", unit_sphere_volume(m - 1))
        .step("4 / log^2 eps", 4.0 / (log_eps * log_eps))
        .step("quadrature", quadrature)
        .step("antiderivative", closed)
        .finish()
}

fn smoothstep_slope(x: f64) -> f64 {
    6.0 * x * (1.0 - x)
}

/// `C = 2 max(sup χ², sup χ'²)` for the cut-off `χ` that is 1 on
/// `[0, r₁/2]`, a cubic smoothstep down to 0 on `[r₁/2, r₁]`.
pub fn trace_constant() -> f64 {
    let half = 0.5 * TRACE_RADIUS;
    let samples = 10_000;
    let mut sup_chi: f64 = 1.0;
    let mut sup_slope: f64 = 0.0;
    for i in 0..=samples {
        let x = i as f64 / samples as f64;
        let chi = 1.0 - x * x * (3.0 - 2.0 * x);
        sup_chi = sup_chi.max(chi.abs());
        sup_slope = sup_slope.max(smoothstep_slope(x) / half);
    }
    2.0 * (sup_chi * sup_chi).max(sup_slope * sup_slope)
}

pub(crate) fn trace_formula(m: usize, r: f64, h1_norm: f64, c: f64) -> f64 {
    let h2 = h1_norm * h1_norm;
    if m == 2 {
        c * r * r.ln().abs() * h2
    } else {
        c * r / (m - 2) as f64 * h2
    }
}

/// Bound on `∫_{∂B_r} |φ|²` by the `H¹` norm of `φ` on `B_{r₁} \ B_r`.
///
/// `constant` overrides the calibrated `C`. The report also checks the bound
/// on the model function `φ ≡ 1`.
pub fn trace_bound(m: usize, r: f64, h1_norm: f64, constant: Option<f64>) -> Result<BoundReport> {
    check_dimension(m)?;
    let r_max = 0.5 * TRACE_RADIUS;
    if !(r > 0.0 && r <= r_max) {
        return Err(Error::domain(format!(
            "trace radius r = {r} must lie in (0, {r_max}] where the cut-off is identically 1"
        )));
    }
    if !(h1_norm >= 0.0 && h1_norm.is_finite()) {
        return Err(Error::domain(format!(
            "H1 norm {h1_norm} must be finite and >= 0"
        )));
    }
    let calibrated = trace_constant();
    let c = constant.unwrap_or(calibrated);
    if !(c > 0.0) {
        return Err(Error::NonpositiveInput(format!("trace constant C = {c}")));
    }

    let sphere = unit_sphere_volume(m - 1);
    let model_trace = sphere * r.powi(m as i32 - 1);
    let tol = 1e-14;
    let model_h2 = sphere * adaptive_simpson(|s| s.powi(m as i32 - 1), r, TRACE_RADIUS, tol);
    let closed_h2 = sphere * (TRACE_RADIUS.powi(m as i32) - r.powi(m as i32)) / m as f64;
    let model_bound = trace_formula(m, r, model_h2.sqrt(), calibrated);

    BoundReport::new("trace bound", Formula::TraceBound)
        .constant("m", m as f64)
        .constant("r", r)
        .constant("h1_norm", h1_norm)
        .constant("C", c)
        .step("calibrated C", calibrated)
        .step("model trace vol(S^(m-1)) r^(m-1)", model_trace)
        .step("model H1 norm squared", model_h2)
        .step("model bound", model_bound)
        .finish()
        .map(|rep| {
            rep.check(
                "model H1 norm matches antiderivative",
                (model_h2 - closed_h2).abs() <= 1e-10 * closed_h2,
                format!("{model_h2} vs {closed_h2}"),
            )
            .check(
                "model trace within bound",
                model_trace <= model_bound,
                format!("{model_trace:.6e} <= {model_bound:.6e}"),
            )
        })
}

/// Cylinder length beyond which the `k`-th test-form bound drops below `η/2`.
pub fn length_threshold(k: usize, eta: f64) -> Result<BoundReport> {
    if k == 0 {
        return Err(Error::domain("k must be >= 1"));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::NonpositiveInput(format!("eta = {eta}")));
    }
    BoundReport::new("length threshold", Formula::LengthThreshold)
        .constant("k", k as f64)
        .constant("eta", eta)
        .finish()
}

/// Normalized eigenvalue budget after gluing: the volume is at most 2 for one
/// connected sum, at most `m` for `m - 1` sphere summands.
pub fn glue_budget(m: usize, eta: f64, n_summands: usize, k: usize) -> Result<BoundReport> {
    check_dimension(m)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::NonpositiveInput(format!("eta = {eta}")));
    }
    let factor = if n_summands == 1 {
        2.0
    } else if n_summands == m - 1 {
        m as f64
    } else {
        return Err(Error::domain(format!(
            "number of summands {n_summands} must be 1 or m - 1 = {}",
            m - 1
        )));
    };
    let threshold = length_threshold(k, eta)?;
    BoundReport::new("glue budget", Formula::GlueBudget)
        .constant("m", m as f64)
        .constant("eta", eta)
        .constant("factor", factor)
        .constant("n_summands", n_summands as f64)
        .constant("L_threshold", threshold.value)
        .step("volume bound", factor)
        .step("L threshold k pi sqrt(2/eta)", threshold.value)
        .finish()
}
