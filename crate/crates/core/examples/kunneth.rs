//! Hodge spectra of S^1 x S^2 assembled from the factors.

use warped_forms::closed_form::{kunneth_spectrum, sphere_hodge_tables};

fn main() -> warped_forms::Result<()> {
    let left = sphere_hodge_tables(1, 8)?;
    let right = sphere_hodge_tables(2, 8)?;
    for q in 0..=3 {
        let t = kunneth_spectrum(&left, &right, q, 5)?;
        let levels: Vec<String> = t
            .entries()
            .iter()
            .map(|e| format!("{}x{}", e.eigenvalue, e.multiplicity))
            .collect();
        println!("degree {q}: {}", levels.join(", "));
    }
    Ok(())
}
