use std::f64::consts::PI;

use super::report::{BoundReport, Formula, QuotientKind};
use crate::profiles::{assemble_doubly_warped, check_degree, volume, WarpProfile, PROFILE_END};
use crate::quadrature::adaptive_simpson;
use crate::{Error, Result};

/// Absolute tolerance for the closed integrals behind every bound.
pub const QUADRATURE_TOL: f64 = 1e-12;

/// `max_i ‖Dφ_i‖² / ‖φ_i‖²` over the `k` test forms `φ_i = f_i(t) v_p` on the
/// cylinder, with `f_i = sin((t - t_{i-1}) kπ/L)` on `[t_{i-1}, t_i]` and
/// `t_i = 2 + iL/k`. Returns the max and the numerator and denominator that
/// attain it.
///
/// On the cylinder `|v_p| = 1` and the fiber volumes cancel. `v_p` is parallel
/// there, so `|∇φ|² = f'²` just like `|dφ|² = |f' dt ∧ v_p|² = f'²`.
pub(crate) fn max_test_form_quotient(k: usize, length: f64, kind: QuotientKind) -> (f64, f64, f64) {
    let width = length / k as f64;
    let omega = k as f64 * PI / length;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 1..=k {
        let start = PROFILE_END + width * (i - 1) as f64;
        let end = PROFILE_END + width * i as f64;
        let f = |t: f64| ((t - start) * omega).sin();
        let df = |t: f64| omega * ((t - start) * omega).cos();
        let tol = QUADRATURE_TOL * width.max(1.0);
        let numerator = match kind {
            QuotientKind::Hodge => adaptive_simpson(|t| df(t).powi(2), start, end, tol),
            QuotientKind::Rough => {
                // Fiber derivatives of v_p vanish on the product region.
                let fiber_gradient = 0.0;
                adaptive_simpson(
                    |t| df(t).powi(2) + fiber_gradient * f(t).powi(2),
                    start,
                    end,
                    tol,
                )
            }
        };
        let denominator = adaptive_simpson(|t| f(t).powi(2), start, end, tol);
        let q = numerator / denominator;
        if q > best.0 {
            best = (q, numerator, denominator);
        }
    }
    best
}

/// Rayleigh quotient of the test-form span, which bounds `λ_k` from above.
pub fn test_form_quotient(
    m: usize,
    p: usize,
    k: usize,
    length: f64,
    kind: QuotientKind,
) -> Result<BoundReport> {
    check_degree(m, p)?;
    if k == 0 {
        return Err(Error::domain("number of test forms k must be >= 1"));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::domain(format!(
            "cylinder length L = {length} must be > 0"
        )));
    }
    let (_, num, den) = max_test_form_quotient(k, length, kind);
    let closed = (k as f64 * PI / length).powi(2);
    let r = BoundReport::new(
        match kind {
            QuotientKind::Rough => "rough test-form quotient",
            QuotientKind::Hodge => "hodge test-form quotient",
        },
        Formula::TestFormQuotient { quotient: kind },
    )
    .constant("m", m as f64)
    .constant("p", p as f64)
    .constant("k", k as f64)
    .constant("L", length)
    .step("numerator of worst test form", num)
    .step("denominator of worst test form", den)
    .step("k^2 pi^2 / L^2", closed)
    .finish()?;
    let rel = (r.value - closed).abs() / closed;
    Ok(r.check(
        "quotient equals k^2 pi^2 / L^2",
        rel <= 1e-10,
        format!("relative difference {rel:.2e}"),
    ))
}

/// The test-form bound after rescaling the metric to unit volume.
pub fn normalized_upper(m: usize, p: usize, k: usize, length: f64) -> Result<BoundReport> {
    check_degree(m, p)?;
    if k == 0 {
        return Err(Error::domain("k must be >= 1"));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::domain(format!(
            "cylinder length L = {length} must be > 0"
        )));
    }
    let metric = assemble_doubly_warped(m, p, length, &WarpProfile::default())?;
    let vol = volume(&metric);
    let raw = (k as f64 * PI / length).powi(2);
    BoundReport::new("normalized upper bound", Formula::NormalizedUpper)
        .constant("m", m as f64)
        .constant("p", p as f64)
        .constant("k", k as f64)
        .constant("L", length)
        .constant("A", vol.slope)
        .constant("B", vol.intercept)
        .step("k^2 pi^2 / L^2", raw)
        .step("volume A L + B", vol.total)
        .step("vol^(2/m)", vol.eigenvalue_factor(m))
        .finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quotient_examples() {
        let r = test_form_quotient(3, 1, 1, 10.0, QuotientKind::Hodge).unwrap();
        assert_relative_eq!(r.value, 0.0986960440108936, max_relative = 1e-10);
        let r = test_form_quotient(3, 1, 2, 10.0, QuotientKind::Rough).unwrap();
        assert_relative_eq!(r.value, 0.3947841760435743, max_relative = 1e-10);
        assert!(r.all_checks_pass());
        let a = test_form_quotient(3, 1, 3, 7.0, QuotientKind::Hodge).unwrap();
        let b = test_form_quotient(7, 4, 3, 7.0, QuotientKind::Hodge).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.reevaluate().unwrap(), a.value);
    }

    #[test]
    fn quotient_rejects_bad_input() {
        assert!(test_form_quotient(3, 3, 1, 10.0, QuotientKind::Hodge).is_err());
        assert!(test_form_quotient(3, 1, 0, 10.0, QuotientKind::Hodge).is_err());
        assert!(test_form_quotient(3, 1, 1, 0.0, QuotientKind::Hodge).is_err());
    }

    #[test]
    fn normalized_bound_behaviour() {
        let a = normalized_upper(3, 1, 1, 10.0).unwrap();
        let b = normalized_upper(3, 1, 1, 100.0).unwrap();
        assert!(b.value < a.value);
        // m = 2: exponent 2/m = 1.
        let r = normalized_upper(2, 1, 2, 8.0).unwrap();
        let (aa, bb) = (r.get("A").unwrap(), r.get("B").unwrap());
        assert_relative_eq!(
            r.value,
            4.0 * PI * PI * (aa * 8.0 + bb) / 64.0,
            max_relative = 1e-14
        );
        // value · L^{2(m-1)/m} → k²π² A^{2/m}.
        let l: f64 = 1e8;
        let far = normalized_upper(3, 1, 1, l).unwrap();
        let limit = PI * PI * far.get("A").unwrap().powf(2.0 / 3.0);
        assert_relative_eq!(far.value * l.powf(4.0 / 3.0), limit, max_relative = 1e-6);
        assert_eq!(far.reevaluate().unwrap(), far.value);
    }
}
