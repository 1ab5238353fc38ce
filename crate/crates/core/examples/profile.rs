//! Builds the warping profile, checks its curvature, and prints the volume
//! growth of the long metric.

use warped_forms::profiles::{assemble_doubly_warped, build_profile, volume, BlendSpec};

fn main() -> warped_forms::Result<()> {
    let profile = build_profile(BlendSpec::default())?;
    let cert = &profile.certificate;
    println!(
        "curvature certificate: passed={} min radial={:.3e} min tangential={:.4}",
        cert.passed(),
        cert.min_radial_curvature,
        cert.min_tangential_curvature
    );
    for r in [0.0, 0.5, 1.0, 1.25, 1.5, 2.0] {
        println!(
            "f({r:4}) = {:.6}  f' = {:.6}  f'' = {:.6}",
            profile.f(r),
            profile.df(r),
            profile.d2f(r)
        );
    }
    for (m, p) in [(3, 1), (4, 2)] {
        let v = volume(&assemble_doubly_warped(m, p, 10.0, &profile)?);
        println!("m={m} p={p}: vol = {:.4} L + {:.4}", v.slope, v.intercept);
    }
    Ok(())
}
