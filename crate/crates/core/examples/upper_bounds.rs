//! Small co-exact eigenvalues on long cylinders: the test-form bound, its
//! volume-normalized version and the numeric Rayleigh-Ritz value.

use warped_forms::bounds::{normalized_upper, test_form_quotient, QuotientKind};
use warped_forms::profiles::{assemble_doubly_warped, volume, WarpProfile};
use warped_forms::warped_spectra::coexact_pform_upper;

fn main() -> warped_forms::Result<()> {
    let (m, p, k) = (3, 1, 1);
    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "L", "k^2pi^2/L^2", "normalized", "numeric"
    );
    for l in [5.0, 10.0, 20.0, 40.0, 80.0] {
        let q = test_form_quotient(m, p, k, l, QuotientKind::Hodge)?;
        let n = normalized_upper(m, p, k, l)?;
        let g = assemble_doubly_warped(m, p, l, &WarpProfile::default())?;
        let numeric = coexact_pform_upper(&g, k, 1024)?.entries()[k - 1].eigenvalue;
        let factor = volume(&g).eigenvalue_factor(m);
        println!(
            "{l:>6} {:>12.6} {:>12.6} {:>12.6}",
            q.value,
            n.value,
            numeric * factor
        );
    }
    Ok(())
}
