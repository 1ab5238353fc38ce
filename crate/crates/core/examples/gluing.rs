//! Cut-off energies and the eigenvalue budget of a connected sum.

use warped_forms::bounds::{cutoff_energy, glue_budget, trace_bound};

fn main() -> warped_forms::Result<()> {
    for m in [2, 3] {
        for eps in [1e-2, 1e-4, 1e-8] {
            println!(
                "m={m} eps={eps:e}: energy {:.6e}",
                cutoff_energy(m, eps)?.value
            );
        }
    }
    println!(
        "trace bound at r = 0.1: {:.4}",
        trace_bound(3, 0.1, 1.0, None)?.value
    );
    for summands in [1, 2] {
        let b = glue_budget(3, 0.1, summands, 1)?;
        println!(
            "m=3, {summands} summand(s): budget {:.6}, cylinder length >= {:.3}",
            b.value,
            b.get("L_threshold").unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
