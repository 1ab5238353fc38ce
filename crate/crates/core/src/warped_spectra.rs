//! Numeric spectra of doubly warped metrics by separation of variables.
//!
//! An eigenfunction `u(t) Y(x) Z(y)` with `ΔY = μY` on `S^p` and `ΔZ = νZ` on
//! `S^{m-p-1}` reduces to the weighted problem `-(w u')'/w + (μ/a² + ν/b²) u = λu`
//! with `w = a^p b^{m-p-1}`. When the second fiber is `S^0` the `t`-interval is
//! traversed twice; the even and odd combinations see Neumann and Dirichlet
//! conditions at the far end.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::sphere_function_spectrum;
use crate::profiles::{DoublyWarpedMetric, WarpShape, PROFILE_END};
use crate::sl_solver::{refine, refine_below, Boundary, RadialProblem};
use crate::spectrum::{Completeness, Label, SpectrumEntry, SpectrumTable};
use crate::{Error, Result};

/// Eigenvalues below this are treated as the constant mode.
pub const ZERO_TOL: f64 = 1e-8;

/// Separation indices: one eigenvalue of each fiber and the boundary
/// condition the pair imposes at the `b`-end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModePair {
    pub mu: f64,
    pub mu_multiplicity: u64,
    pub nu: f64,
    pub nu_multiplicity: u64,
    pub far_end: Boundary,
}

impl ModePair {
    pub fn multiplicity(&self) -> u64 {
        self.mu_multiplicity * self.nu_multiplicity
    }
}

type FiberLevel = (f64, u64, Boundary);

/// Fiber levels `(value, multiplicity, far-end condition)` below the cutoff,
/// plus the first excluded value (infinite when nothing is excluded).
fn fiber_levels(n: usize, cutoff: usize) -> Result<(Vec<FiberLevel>, f64)> {
    if n == 0 {
        return Ok((
            vec![(0.0, 1, Boundary::Neumann), (0.0, 1, Boundary::Dirichlet)],
            f64::INFINITY,
        ));
    }
    let t = sphere_function_spectrum(n, cutoff + 1)?;
    let mut levels: Vec<_> = t
        .entries()
        .iter()
        .map(|e| (e.eigenvalue, e.multiplicity, Boundary::RegularPole))
        .collect();
    let next = levels.pop().map_or(f64::INFINITY, |l| l.0);
    Ok((levels, next))
}

/// Modes kept for `mode_cutoff` levels per fiber, and the lower bound
/// `min(μ_next / sup a², ν_next / sup b²)` on everything excluded.
pub fn mode_pairs(metric: &DoublyWarpedMetric, mode_cutoff: usize) -> Result<(Vec<ModePair>, f64)> {
    if mode_cutoff == 0 {
        return Err(Error::domain("mode cutoff must be >= 1"));
    }
    let (da, db) = metric.fiber_dims();
    let (a_levels, a_next) = fiber_levels(da, mode_cutoff)?;
    let (b_levels, b_next) = fiber_levels(db, mode_cutoff)?;
    // Both warps are bounded by 1 for every supported shape.
    let floor = a_next.min(b_next);
    let mut pairs = Vec::with_capacity(a_levels.len() * b_levels.len());
    for &(mu, mu_multiplicity, _) in &a_levels {
        for &(nu, nu_multiplicity, far_end) in &b_levels {
            pairs.push(ModePair {
                mu,
                mu_multiplicity,
                nu,
                nu_multiplicity,
                far_end,
            });
        }
    }
    Ok((pairs, floor))
}

/// The radial problem of one separated mode.
pub fn mode_problem(metric: &DoublyWarpedMetric, mode: ModePair, grid: usize) -> RadialProblem {
    let (_, db) = metric.fiber_dims();
    let (g1, g2) = (metric.clone(), metric.clone());
    let weight = move |t: f64| g1.density(t);
    let potential = move |t: f64| {
        let mut v = 0.0;
        if mode.mu > 0.0 {
            v += mode.mu / g2.a(t).powi(2);
        }
        if mode.nu > 0.0 && db > 0 {
            v += mode.nu / g2.b(t).powi(2);
        }
        v
    };
    RadialProblem::new(
        (0.0, metric.total_length()),
        weight,
        potential,
        Boundary::RegularPole,
        mode.far_end,
        grid,
    )
}

/// Merges per-mode numeric levels, keeps `count` entries and checks them
/// against the truncation floor.
fn merge_levels(
    tag: String,
    entries: Vec<SpectrumEntry>,
    count: usize,
    floor: f64,
) -> Result<SpectrumTable> {
    let table = SpectrumTable::new(tag, entries, Completeness::Exhaustive).truncate(count);
    // Modes are only solved below the floor, so a short table means the
    // count-th level is not below it either.
    let found = if table.len() < count {
        floor
    } else {
        table.entries()[count - 1].eigenvalue
    };
    if !(found < floor) {
        return Err(Error::TruncationUnsafe {
            floor,
            found,
            count,
        });
    }
    let bound = table.completeness.bound().min(floor);
    Ok(SpectrumTable::new(
        table.manifold_tag.clone(),
        table.into_entries(),
        Completeness::Through(bound),
    ))
}

fn metric_tag(metric: &DoublyWarpedMetric) -> String {
    match &metric.shape {
        WarpShape::Constructed {
            cylinder_length, ..
        } => format!("g_{{{},L={}}} on S^{}", metric.p, cylinder_length, metric.m),
        WarpShape::RoundSphere => format!("round S^{} (p={})", metric.m, metric.p),
    }
}

/// The `count` smallest function eigenvalues, one entry per (mode, radial
/// level) with multiplicity `mult(μ)·mult(ν)`.
pub fn function_spectrum(
    metric: &DoublyWarpedMetric,
    mode_cutoff: usize,
    count: usize,
    grid: usize,
) -> Result<SpectrumTable> {
    if count == 0 {
        return Err(Error::domain("count must be >= 1"));
    }
    let (pairs, floor) = mode_pairs(metric, mode_cutoff)?;
    let per_mode: Vec<Result<Vec<SpectrumEntry>>> = pairs
        .par_iter()
        .map(|&mode| {
            let r = refine_below(&mode_problem(metric, mode, grid), count, floor)?;
            Ok(r.eigenvalues
                .iter()
                .zip(&r.error_estimate)
                .map(|(&v, &e)| SpectrumEntry::numeric(v, mode.multiplicity(), 0, Label::Full, e))
                .collect())
        })
        .collect();
    let mut entries = Vec::new();
    for r in per_mode {
        entries.extend(r?);
    }
    merge_levels(metric_tag(metric), entries, count, floor)
}

/// Radial problems for forms `h(t)·v_p` supported on `[2, T]` and their
/// multiplicities.
///
/// `h·v_p` and `h'dt∧v_p` both have pointwise norm `a^{-p}`, so the quotient
/// is `∫h'² w₁ / ∫h² w₁` with `w₁ = a^{-p} b^{m-p-1}`. Trial forms vanish on
/// the cap at `t <= 2`, giving a Dirichlet condition there.
pub fn coexact_problems(metric: &DoublyWarpedMetric, grid: usize) -> Result<Vec<RadialProblem>> {
    if !matches!(metric.shape, WarpShape::Constructed { .. }) {
        return Err(Error::domain(
            "co-exact radial bounds need the constructed metric (caps plus cylinder)",
        ));
    }
    let (da, db) = metric.fiber_dims();
    let g = metric.clone();
    let weight = move |t: f64| g.a(t).powi(-(da as i32)) * g.b(t).powi(db as i32);
    let ends: &[Boundary] = if db == 0 {
        &[Boundary::Neumann, Boundary::Dirichlet]
    } else {
        &[Boundary::RegularPole]
    };
    Ok(ends
        .iter()
        .map(|&far| {
            RadialProblem::new(
                (PROFILE_END, metric.total_length()),
                weight.clone(),
                |_| 0.0,
                Boundary::Dirichlet,
                far,
                grid,
            )
        })
        .collect())
}

/// Rayleigh–Ritz upper bounds for the first `count` co-exact `p`-form
/// eigenvalues, from the co-closed family `h(t)·v_p`.
pub fn coexact_pform_upper(
    metric: &DoublyWarpedMetric,
    count: usize,
    grid: usize,
) -> Result<SpectrumTable> {
    if count == 0 {
        return Err(Error::domain("count must be >= 1"));
    }
    let p = metric.p;
    let problems = coexact_problems(metric, grid)?;
    let solved: Vec<Result<_>> = problems.par_iter().map(|pr| refine(pr, count)).collect();
    let mut entries = Vec::new();
    for r in solved {
        let r = r?;
        entries.extend(
            r.eigenvalues
                .iter()
                .zip(&r.error_estimate)
                .map(|(&v, &e)| SpectrumEntry::numeric(v, 1, p, Label::Coexact, e)),
        );
    }
    let table = SpectrumTable::new(metric_tag(metric), entries, Completeness::Exhaustive);
    Ok(table.truncate(count))
}

/// Positive 1-form spectrum of a surface: `d` carries nonzero function
/// eigenvalues onto exact 1-forms and the star swaps exact with co-exact.
pub fn surface_oneform_spectrum(
    metric: &DoublyWarpedMetric,
    mode_cutoff: usize,
    count: usize,
    grid: usize,
) -> Result<SpectrumTable> {
    if metric.m != 2 {
        return Err(Error::domain(format!(
            "surface 1-form spectrum needs m = 2, got m = {}",
            metric.m
        )));
    }
    let functions = function_spectrum(metric, mode_cutoff, count + 1, grid)?;
    let completeness = functions.completeness;
    let positive: Vec<SpectrumEntry> = functions
        .into_entries()
        .into_iter()
        .filter(|e| e.eigenvalue.abs() >= ZERO_TOL)
        .take(count)
        .collect();
    let mut entries = Vec::with_capacity(2 * positive.len());
    for label in [Label::Exact, Label::Coexact] {
        entries.extend(positive.iter().cloned().map(|mut e| {
            e.degree = 1;
            e.label = label;
            e
        }));
    }
    Ok(SpectrumTable::new(
        metric_tag(metric),
        entries,
        completeness,
    ))
}

/// Groups numeric entries within `rtol` of each other into distinct levels
/// with summed multiplicities.
pub fn cluster_levels(table: &SpectrumTable, rtol: f64) -> Vec<(f64, u64)> {
    let mut out: Vec<(f64, u64)> = Vec::new();
    for e in table.entries() {
        match out.last_mut() {
            Some((v, m)) if (e.eigenvalue - *v).abs() <= rtol * v.abs().max(1.0) => {
                *m += e.multiplicity
            }
            _ => out.push((e.eigenvalue, e.multiplicity)),
        }
    }
    out
}
