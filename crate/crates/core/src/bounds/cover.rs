use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{loglog_slope, quadratic_fit, BoundReport, Formula};
use crate::closed_form::{
    betti_and_nq, interval_tables, kunneth_levels, sphere_hodge_tables, sphere_product_tables,
};
use crate::profiles::{assemble_doubly_warped, check_degree, volume, WarpProfile, PROFILE_END};
use crate::spectrum::SpectrumTable;
use crate::{Error, Result};

/// `C_g` for a cubic smoothstep partition of unity over unit-length overlaps:
/// `sup |ρ'|² = (3/2)²`.
pub const DEFAULT_GRADIENT_BOUND: f64 = 2.25;

const ZERO_TOL: f64 = 1e-9;
const SPHERE_LEVELS: usize = 6;
const INTERVAL_LEVELS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverPiece {
    pub name: String,
    /// Extent in the arclength coordinate `t`.
    pub extent: (f64, f64),
    /// First positive exact-form eigenvalue in the degree under study.
    pub nu: f64,
    pub surrogate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverOverlap {
    pub name: String,
    pub first: usize,
    pub second: usize,
    pub extent: (f64, f64),
    /// First positive exact-form eigenvalue one degree lower.
    pub nu: f64,
    pub surrogate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverDescriptor {
    pub degree: usize,
    pub pieces: Vec<CoverPiece>,
    pub overlaps: Vec<CoverOverlap>,
    pub gradient_bound: f64,
}

/// Optional replacements for the cover inputs that are not known exactly.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapInputs {
    pub nu_u1: Option<f64>,
    pub nu_u3: Option<f64>,
    pub nu_u12: Option<f64>,
    pub nu_u23: Option<f64>,
    pub gradient_bound: Option<f64>,
}

fn nu_key(name: &str) -> String {
    format!("nu[{name}]")
}

/// McGowan's lower bound for the first exact `q`-form eigenvalue beyond the
/// `n_q` excluded ones: `1 / (8 Σ)` with
/// `Σ = Σ_i 1/ν_i + Σ_{i≠j} (C_g/ν_ij + 1)(1/ν_i + 1/ν_j)`.
pub fn mcgowan_lower(cover: &CoverDescriptor) -> Result<BoundReport> {
    if cover.pieces.is_empty() {
        return Err(Error::domain("cover has no pieces"));
    }
    if !(cover.gradient_bound > 0.0) {
        return Err(Error::NonpositiveInput(format!(
            "partition gradient bound C_g = {}",
            cover.gradient_bound
        )));
    }
    let mut report = BoundReport::new(
        "mcgowan lower bound",
        Formula::McGowan {
            pieces: cover.pieces.iter().map(|p| nu_key(&p.name)).collect(),
            overlaps: cover
                .overlaps
                .iter()
                .flat_map(|o| {
                    let (a, b) = (
                        nu_key(&cover.pieces[o.first].name),
                        nu_key(&cover.pieces[o.second].name),
                    );
                    let k = nu_key(&o.name);
                    [(k.clone(), a.clone(), b.clone()), (k, b, a)]
                })
                .collect(),
            gradient_bound: "C_g".into(),
        },
    )
    .constant("C_g", cover.gradient_bound)
    .constant("q", cover.degree as f64);
    let mut piece_sum = 0.0;
    for piece in &cover.pieces {
        if !(piece.nu > 0.0) {
            return Err(Error::NonpositiveInput(format!(
                "nu({}) = {}",
                piece.name, piece.nu
            )));
        }
        piece_sum += 1.0 / piece.nu;
        report = report.constant(nu_key(&piece.name), piece.nu);
        if piece.surrogate {
            report.surrogate_inputs.push(nu_key(&piece.name));
        }
    }
    report = report.step("sum of 1/nu over pieces", piece_sum);
    for o in &cover.overlaps {
        if o.first >= cover.pieces.len() || o.second >= cover.pieces.len() || o.first == o.second {
            return Err(Error::domain(format!(
                "overlap {} refers to invalid pieces",
                o.name
            )));
        }
        if !(o.nu > 0.0) {
            return Err(Error::NonpositiveInput(format!(
                "nu({}) = {}",
                o.name, o.nu
            )));
        }
        let inv = 1.0 / cover.pieces[o.first].nu + 1.0 / cover.pieces[o.second].nu;
        let term = 2.0 * (cover.gradient_bound / o.nu + 1.0) * inv;
        report = report
            .constant(nu_key(&o.name), o.nu)
            .step(format!("overlap {} (both orders)", o.name), term);
        if o.surrogate {
            report.surrogate_inputs.push(nu_key(&o.name));
        }
    }
    report.finish()
}

/// Degrees `q` where the middle piece has harmonic forms in degree `q` or
/// `q - 1` of its cross-section, so its first eigenvalue decays like `π²/L²`.
pub fn is_exceptional(m: usize, p: usize, q: usize) -> bool {
    [1, p, p + 1, m - p - 1, m - p, m - 1, m].contains(&q)
}

fn first_positive_checked(table: &SpectrumTable) -> Result<f64> {
    let v = table
        .first_positive(ZERO_TOL)
        .ok_or(Error::InsufficientLevels {
            requested: 1,
            complete_through: table.completeness.bound(),
        })?;
    if v > table.completeness.bound() {
        return Err(Error::InsufficientLevels {
            requested: 1,
            complete_through: table.completeness.bound(),
        });
    }
    Ok(v)
}

/// First exact `q`-form eigenvalue on the middle piece `S^p × [0, L] × S^{m-p-1}`
/// with absolute boundary conditions.
pub fn cover_nu1_u2(m: usize, p: usize, q: usize, length: f64) -> Result<BoundReport> {
    check_degree(m, p)?;
    if q == 0 || q > m {
        return Err(Error::domain(format!("degree q = {q} outside 1..={m}")));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::domain(format!(
            "cylinder length L = {length} must be > 0"
        )));
    }
    if is_exceptional(m, p, q) {
        return BoundReport::new("nu1(U2)", Formula::InverseSquareLength)
            .constant("L", length)
            .step(
                "first positive eigenvalue of [0,1] in degrees 0 and 1",
                std::f64::consts::PI.powi(2),
            )
            .finish();
    }
    let tables = sphere_product_tables(p, m - p - 1, SPHERE_LEVELS)?;
    let lq = first_positive_checked(&tables[q])?;
    let lq1 = first_positive_checked(&tables[q - 1])?;
    BoundReport::new(
        "nu1(U2)",
        Formula::MinOf {
            keys: vec!["lambda_q".into(), "lambda_q-1".into()],
        },
    )
    .constant("L", length)
    .constant("lambda_q", lq)
    .constant("lambda_q-1", lq1)
    .finish()
}

/// First positive degree-`degree` eigenvalue of `S^p × [0,1] × S^r`.
///
/// Full eigenvalues include the exact ones, so this is a lower bound for the
/// first exact eigenvalue and keeps McGowan's bound valid.
pub fn overlap_surrogate(p: usize, r: usize, degree: usize) -> Result<f64> {
    let sp = sphere_hodge_tables(p, SPHERE_LEVELS)?;
    let sr = sphere_hodge_tables(r, SPHERE_LEVELS)?;
    let interval = interval_tables(1.0, INTERVAL_LEVELS)?;
    let collar: Vec<SpectrumTable> = (0..=p + 1)
        .map(|d| kunneth_levels(&sp, &interval, d))
        .collect();
    first_positive_checked(&kunneth_levels(&collar, &sr, degree))
}

/// The three-piece cover of `(S^m, g_{p,L})`: caps `[0,3]`, `[L+1, L+4]` and
/// the cylinder `[2, L+2]`, overlapping in unit-length collars.
pub fn build_cover(
    m: usize,
    p: usize,
    q: usize,
    length: f64,
    caps: &CapInputs,
) -> Result<CoverDescriptor> {
    check_degree(m, p)?;
    if !(length > 2.0) {
        return Err(Error::domain(format!(
            "cover needs L > 2 so the caps stay disjoint, got L = {length}"
        )));
    }
    let r = m - p - 1;
    let middle = cover_nu1_u2(m, p, q, length)?.value;
    let cap_default = overlap_surrogate(p, r, q)?;
    let collar = overlap_surrogate(p, r, q - 1)?;
    let pick = |v: Option<f64>, default: f64, is_surrogate: bool| match v {
        Some(x) => (x, false),
        None => (default, is_surrogate),
    };
    let (nu1, s1) = pick(caps.nu_u1, cap_default, true);
    let (nu3, s3) = pick(caps.nu_u3, cap_default, true);
    let (nu12, s12) = pick(caps.nu_u12, collar, false);
    let (nu23, s23) = pick(caps.nu_u23, collar, false);
    let t = length + 2.0 * PROFILE_END;
    let u1 = (0.0, PROFILE_END + 1.0);
    let u2 = (PROFILE_END, t - PROFILE_END);
    let u3 = (t - PROFILE_END - 1.0, t);
    debug_assert!(u1.1 < u3.0);
    Ok(CoverDescriptor {
        degree: q,
        pieces: vec![
            CoverPiece {
                name: "U1".into(),
                extent: u1,
                nu: nu1,
                surrogate: s1,
            },
            CoverPiece {
                name: "U2".into(),
                extent: u2,
                nu: middle,
                surrogate: false,
            },
            CoverPiece {
                name: "U3".into(),
                extent: u3,
                nu: nu3,
                surrogate: s3,
            },
        ],
        overlaps: vec![
            CoverOverlap {
                name: "U12".into(),
                first: 0,
                second: 1,
                extent: (u2.0, u1.1),
                nu: nu12,
                surrogate: s12,
            },
            CoverOverlap {
                name: "U23".into(),
                first: 1,
                second: 2,
                extent: (u3.0, u2.1),
                nu: nu23,
                surrogate: s23,
            },
        ],
        gradient_bound: caps.gradient_bound.unwrap_or(DEFAULT_GRADIENT_BOUND),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LowerFit {
    /// The bound does not depend on `L`.
    Uniform { c: f64 },
    /// `1/bound ≈ C₁ L² + C₂`.
    Decaying {
        c1: f64,
        c2: f64,
        max_relative_residual: f64,
        loglog_slope: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem41Report {
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub n_q: u64,
    /// Index of the first eigenvalue the bound applies to, `n_q + 1`.
    pub first_bounded_index: u64,
    pub exceptional: bool,
    pub fit: LowerFit,
    pub summary: BoundReport,
    pub per_length: Vec<BoundReport>,
    /// `C (A L + B)^{2/m}` per length, generic degrees only.
    pub normalized: Vec<BoundReport>,
}

/// McGowan bounds over a sweep of cylinder lengths, with the `L`-dependence
/// fitted as either a constant or `1/(C₁L² + C₂)`.
pub fn theorem41_report(
    m: usize,
    p: usize,
    q: usize,
    lengths: &[f64],
    caps: &CapInputs,
) -> Result<Theorem41Report> {
    check_degree(m, p)?;
    if lengths.is_empty() {
        return Err(Error::domain("length sweep is empty"));
    }
    let (_, n_q) = betti_and_nq(m, p, q)?;
    let exceptional = is_exceptional(m, p, q);
    let per_length = lengths
        .par_iter()
        .map(|&l| mcgowan_lower(&build_cover(m, p, q, l, caps)?))
        .collect::<Result<Vec<_>>>()?;
    let bounds: Vec<f64> = per_length.iter().map(|r| r.value).collect();

    let mut summary;
    let fit;
    let mut normalized = Vec::new();
    if exceptional {
        if lengths.len() < 2 {
            return Err(Error::domain("fitting C1, C2 needs at least two lengths"));
        }
        summary = BoundReport::new(
            "C1",
            Formula::QuadraticFit {
                points: lengths.len(),
                slope: true,
            },
        );
        for (i, (l, b)) in lengths.iter().zip(&bounds).enumerate() {
            summary = summary
                .constant(format!("L[{i}]"), *l)
                .constant(format!("bound[{i}]"), *b);
        }
        let (c1, c2) = quadratic_fit(lengths, &bounds);
        let max_relative_residual = lengths
            .iter()
            .zip(&bounds)
            .map(|(l, b)| ((c1 * l * l + c2) * b - 1.0).abs())
            .fold(0.0, f64::max);
        let slope = loglog_slope(lengths, &bounds);
        summary = summary
            .constant("C2", c2)
            .constant("max_relative_residual", max_relative_residual)
            .constant("loglog_slope", slope)
            .finish()?;
        fit = LowerFit::Decaying {
            c1,
            c2,
            max_relative_residual,
            loglog_slope: slope,
        };
    } else {
        let keys: Vec<String> = (0..lengths.len()).map(|i| format!("bound[{i}]")).collect();
        summary = BoundReport::new("C", Formula::MinOf { keys });
        for (i, (l, b)) in lengths.iter().zip(&bounds).enumerate() {
            summary = summary
                .constant(format!("L[{i}]"), *l)
                .constant(format!("bound[{i}]"), *b);
        }
        summary = summary.finish()?;
        let c = summary.value;
        let spread = bounds.iter().map(|b| (b - c).abs() / c).fold(0.0, f64::max);
        summary = summary.check(
            "bound independent of L",
            spread < 1e-12,
            format!("max relative spread {spread:.2e}"),
        );
        fit = LowerFit::Uniform { c };
        for &l in lengths {
            let vol = volume(&assemble_doubly_warped(m, p, l, &WarpProfile::default())?);
            normalized.push(
                BoundReport::new("normalized lower bound", Formula::NormalizedLower)
                    .constant("C", c)
                    .constant("A", vol.slope)
                    .constant("B", vol.intercept)
                    .constant("L", l)
                    .constant("m", m as f64)
                    .finish()?,
            );
        }
    }
    summary.surrogate_inputs = per_length
        .first()
        .map(|r| r.surrogate_inputs.clone())
        .unwrap_or_default();
    summary = summary
        .constant("n_q", n_q as f64)
        .constant("first_bounded_index", (n_q + 1) as f64);
    Ok(Theorem41Report {
        m,
        p,
        q,
        n_q,
        first_bounded_index: n_q + 1,
        exceptional,
        fit,
        summary,
        per_length,
        normalized,
    })
}
