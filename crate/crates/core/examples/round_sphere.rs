//! Recovers the function spectrum k(k+m-1) of round spheres from the
//! separated radial problems.

use warped_forms::profiles::DoublyWarpedMetric;
use warped_forms::warped_spectra::{cluster_levels, function_spectrum};

fn main() -> warped_forms::Result<()> {
    for m in [2, 3, 4] {
        let g = DoublyWarpedMetric::round_sphere(m, 1)?;
        let table = function_spectrum(&g, 10, 40, 1024)?;
        println!("S^{m}:");
        for (k, (value, mult)) in cluster_levels(&table, 5e-3).iter().take(5).enumerate() {
            println!(
                "  level {k}: {value:.8} (exact {}) multiplicity {mult}",
                k * (k + m - 1)
            );
        }
    }
    Ok(())
}
