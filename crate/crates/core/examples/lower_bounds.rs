//! McGowan lower bounds for an exceptional and a generic degree.

use warped_forms::bounds::{theorem41_report, CapInputs, LowerFit};

fn main() -> warped_forms::Result<()> {
    let lengths = [10.0, 20.0, 40.0, 80.0];
    for (m, p, q) in [(3, 1, 1), (8, 2, 4)] {
        let r = theorem41_report(m, p, q, &lengths, &CapInputs::default())?;
        println!(
            "(m, p, q) = ({m}, {p}, {q}): n_q = {}, bound applies from index {}",
            r.n_q, r.first_bounded_index
        );
        match r.fit {
            LowerFit::Uniform { c } => println!("  uniform bound C = {c:.6e}"),
            LowerFit::Decaying {
                c1,
                c2,
                loglog_slope,
                ..
            } => {
                println!("  1/bound = {c1:.4} L^2 + {c2:.4}, log-log slope {loglog_slope:.3}")
            }
        }
        for (l, b) in lengths.iter().zip(&r.per_length) {
            println!(
                "  L = {l:>5}: {:.6e}{}",
                b.value,
                if b.is_surrogate() {
                    " (surrogate caps)"
                } else {
                    ""
                }
            );
        }
    }
    Ok(())
}
