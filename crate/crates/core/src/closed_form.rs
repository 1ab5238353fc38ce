//! Exact spectra: round spheres, intervals, products, and Betti numbers.
//!
//! On the unit round `S^n` the co-exact `p`-forms (`0 <= p <= n-1`) have
//! eigenvalues `(k+p)(k+n-1-p)`, `k >= 1`, and `d` maps co-exact `(p-1)`-forms
//! isomorphically onto exact `p`-forms, so the exact table of degree `p` is the
//! co-exact table of degree `p - 1`. A full Hodge table of degree `p` is
//! `b_p` zeros plus the exact and co-exact parts.
//!
//! `S^0` (two points) is supported wherever a product needs it: its only
//! forms are functions, with eigenvalue 0 of multiplicity 2.

use std::f64::consts::PI;

use crate::spectrum::{Completeness, Label, SpectrumEntry, SpectrumTable};
use crate::{Error, Result};

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Multiplicity of the co-exact `p`-form eigenvalue `(k+p)(k+n-1-p)` on `S^n`.
pub fn coexact_multiplicity(n: usize, p: usize, k: usize) -> u64 {
    assert!(n >= 1 && p < n && k >= 1);
    let (n, p, k) = (n as u64, p as u64, k as u64);
    // (k+n-1)! (2k+n-1) / ((k-1)! p! (n-p-1)! (k+p) (k+n-p-1))
    let num = n as u128 * binomial(k + n - 1, n) * binomial(n - 1, p) * (2 * k + n - 1) as u128;
    let den = ((k + p) * (k + n - p - 1)) as u128;
    debug_assert_eq!(num % den, 0);
    (num / den) as u64
}

/// Eigenvalue of the `k`-th co-exact level in degree `p` on `S^n`.
pub fn coexact_eigenvalue(n: usize, p: usize, k: usize) -> f64 {
    ((k + p) * (k + n - 1 - p)) as f64
}

/// Laplace spectrum of functions on `S^n`: `k(k+n-1)`, `k = 0..count`.
pub fn sphere_function_spectrum(n: usize, count: usize) -> Result<SpectrumTable> {
    if n == 0 {
        return Err(Error::domain("function spectrum needs n >= 1"));
    }
    if count == 0 {
        return Err(Error::domain("count must be >= 1"));
    }
    let mut entries = vec![SpectrumEntry::closed_form(0.0, 1, 0, Label::Full)];
    for k in 1..count {
        entries.push(SpectrumEntry::closed_form(
            coexact_eigenvalue(n, 0, k),
            coexact_multiplicity(n, 0, k),
            0,
            Label::Full,
        ));
    }
    let completeness = Completeness::Through(entries.last().unwrap().eigenvalue);
    Ok(SpectrumTable::new(format!("S^{n}"), entries, completeness))
}

/// Co-exact `p`-forms on `S^n`, `count` levels.
pub fn sphere_coexact_spectrum(n: usize, p: usize, count: usize) -> Result<SpectrumTable> {
    if n == 0 || p >= n {
        return Err(Error::domain(format!(
            "no co-exact {p}-forms on S^{n} (need p <= n - 1)"
        )));
    }
    let entries: Vec<_> = (1..=count)
        .map(|k| {
            SpectrumEntry::closed_form(
                coexact_eigenvalue(n, p, k),
                coexact_multiplicity(n, p, k),
                p,
                Label::Coexact,
            )
        })
        .collect();
    let completeness = entries.last().map_or(Completeness::Through(0.0), |e| {
        Completeness::Through(e.eigenvalue)
    });
    Ok(SpectrumTable::new(format!("S^{n}"), entries, completeness))
}

/// Exact `p`-forms on `S^n` (`1 <= p <= n`), `count` levels.
pub fn sphere_exact_spectrum(n: usize, p: usize, count: usize) -> Result<SpectrumTable> {
    if p == 0 || p > n {
        return Err(Error::domain(format!(
            "no exact {p}-forms on S^{n} (need 1 <= p <= n)"
        )));
    }
    Ok(sphere_coexact_spectrum(n, p - 1, count)?.relabeled(p, Label::Exact))
}

/// Betti numbers `b_0..=b_n` of `S^n`.
pub fn sphere_betti(n: usize) -> Vec<u64> {
    if n == 0 {
        return vec![2];
    }
    let mut b = vec![0; n + 1];
    b[0] = 1;
    b[n] = 1;
    b
}

/// Full Hodge spectrum of `p`-forms on `S^n` with `levels` exact and
/// co-exact levels each.
pub fn sphere_hodge_spectrum(n: usize, p: usize, levels: usize) -> Result<SpectrumTable> {
    if p > n {
        return Err(Error::domain(format!("degree {p} exceeds dimension {n}")));
    }
    let tag = format!("S^{n}");
    let betti = sphere_betti(n)[p];
    let zeros = vec![SpectrumEntry::closed_form(0.0, betti, p, Label::Full)];
    if n == 0 {
        return Ok(SpectrumTable::new(tag, zeros, Completeness::Exhaustive));
    }
    let mut table = SpectrumTable::new(tag, zeros, Completeness::Exhaustive);
    if p >= 1 {
        table = table.union(sphere_exact_spectrum(n, p, levels)?);
    }
    if p < n {
        table = table.union(sphere_coexact_spectrum(n, p, levels)?);
    }
    Ok(table.relabeled(p, Label::Full).merge_equal_levels())
}

/// Full Hodge tables of `S^n` in every degree `0..=n`.
pub fn sphere_hodge_tables(n: usize, levels: usize) -> Result<Vec<SpectrumTable>> {
    (0..=n)
        .map(|p| sphere_hodge_spectrum(n, p, levels))
        .collect()
}

/// Rough-Laplacian spectrum from a round-sphere Hodge table.
///
/// On the unit `S^n` the Weitzenböck term acts on `p`-forms as the constant
/// `p(n-p)`, so every eigenvalue shifts down by that amount.
pub fn rough_from_hodge_round(n: usize, p: usize, hodge: &SpectrumTable) -> Result<SpectrumTable> {
    if p > n {
        return Err(Error::domain(format!("degree {p} exceeds dimension {n}")));
    }
    let shift = (p * (n - p)) as f64;
    let mut entries = Vec::with_capacity(hodge.len());
    for e in hodge.entries() {
        let v = e.eigenvalue - shift;
        if v < -1e-12 {
            return Err(Error::NegativeEigenvalue { value: v });
        }
        let mut e = e.clone();
        e.eigenvalue = v.max(0.0);
        e.label = Label::Rough;
        e.degree = p;
        entries.push(e);
    }
    let completeness = match hodge.completeness {
        Completeness::Exhaustive => Completeness::Exhaustive,
        Completeness::Through(x) => Completeness::Through(x - shift),
    };
    Ok(SpectrumTable::new(
        format!("{} (rough)", hodge.manifold_tag),
        entries,
        completeness,
    ))
}

/// Interval `[0, length]` with absolute boundary conditions.
///
/// Degree 0 is the Neumann problem, `(kπ/ℓ)²` for `k >= 0`; degree 1 forms
/// `u dt` need `u = 0` at both ends, `(kπ/ℓ)²` for `k >= 1`.
pub fn interval_spectrum(length: f64, degree: usize, count: usize) -> Result<SpectrumTable> {
    if !(length > 0.0) {
        return Err(Error::domain(format!(
            "interval length {length} must be > 0"
        )));
    }
    let start = match degree {
        0 => 0,
        1 => 1,
        _ => {
            return Err(Error::domain(format!(
                "interval degree {degree} not in {{0, 1}}"
            )))
        }
    };
    let entries: Vec<_> = (start..start + count)
        .map(|k| {
            let x = k as f64 * PI / length;
            SpectrumEntry::closed_form(x * x, 1, degree, Label::Full)
        })
        .collect();
    let completeness = entries.last().map_or(Completeness::Through(0.0), |e| {
        Completeness::Through(e.eigenvalue)
    });
    Ok(SpectrumTable::new(
        format!("[0,{length}]"),
        entries,
        completeness,
    ))
}

/// Interval tables for degrees 0 and 1.
pub fn interval_tables(length: f64, count: usize) -> Result<Vec<SpectrumTable>> {
    Ok(vec![
        interval_spectrum(length, 0, count)?,
        interval_spectrum(length, 1, count)?,
    ])
}

/// Every degree-`q` level of a Riemannian product that the factors' full
/// tables (indexed by degree; missing degrees have no forms) determine.
///
/// A truncated factor can hide levels above its bound plus the other factor's
/// minimum, so the result is complete only through the smallest such sum.
pub fn kunneth_levels(left: &[SpectrumTable], right: &[SpectrumTable], q: usize) -> SpectrumTable {
    let tag = format!(
        "{} x {}",
        left.first().map_or("?", |t| t.manifold_tag.as_str()),
        right.first().map_or("?", |t| t.manifold_tag.as_str())
    );
    let empty = SpectrumTable::empty("");
    let mut entries = Vec::new();
    let mut floor = f64::INFINITY;
    for a in 0..=q {
        let ta = left.get(a).unwrap_or(&empty);
        let tb = right.get(q - a).unwrap_or(&empty);
        let a_none = ta.is_empty() && ta.completeness == Completeness::Exhaustive;
        let b_none = tb.is_empty() && tb.completeness == Completeness::Exhaustive;
        if a_none || b_none {
            continue;
        }
        let min_a = ta.min_eigenvalue().unwrap_or(0.0).max(0.0);
        let min_b = tb.min_eigenvalue().unwrap_or(0.0).max(0.0);
        floor = floor
            .min(ta.completeness.bound() + min_b)
            .min(min_a + tb.completeness.bound());
        for ea in ta.entries() {
            for eb in tb.entries() {
                entries.push(SpectrumEntry::closed_form(
                    ea.eigenvalue + eb.eigenvalue,
                    ea.multiplicity * eb.multiplicity,
                    q,
                    Label::Full,
                ));
            }
        }
    }
    let completeness = if floor.is_infinite() {
        Completeness::Exhaustive
    } else {
        Completeness::Through(floor)
    };
    entries.retain(|e| e.eigenvalue <= floor * (1.0 + 1e-12));
    SpectrumTable::new(tag, entries, completeness).merge_equal_levels()
}

/// First `count` distinct degree-`q` levels of a product.
///
/// Fails with [`Error::InsufficientLevels`] if a truncated factor could still
/// contribute below the last requested level.
pub fn kunneth_spectrum(
    left: &[SpectrumTable],
    right: &[SpectrumTable],
    q: usize,
    count: usize,
) -> Result<SpectrumTable> {
    if count == 0 {
        return Err(Error::domain("count must be >= 1"));
    }
    let table = kunneth_levels(left, right, q);
    if table.len() < count && table.completeness != Completeness::Exhaustive {
        return Err(Error::InsufficientLevels {
            requested: count,
            complete_through: table.completeness.bound(),
        });
    }
    Ok(table.truncate(count))
}

/// Full Hodge tables of `S^p × S^r` in every degree `0..=p+r`.
pub fn sphere_product_tables(p: usize, r: usize, levels: usize) -> Result<Vec<SpectrumTable>> {
    let left = sphere_hodge_tables(p, levels)?;
    let right = sphere_hodge_tables(r, levels)?;
    Ok((0..=p + r)
        .map(|q| {
            let mut t = kunneth_levels(&left, &right, q);
            t.manifold_tag = format!("S^{p} x S^{r}");
            t
        })
        .collect())
}

/// Betti numbers of a product by convolution of the factors'.
pub fn betti_convolution(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `(b_{q-1}(S^p × S^{m-p-1}), n_q)` with `n_q = 2 b_{q-1}` counting the
/// `(q-1)`-cohomology of the two cylinder overlaps of the three-piece cover.
pub fn betti_and_nq(m: usize, p: usize, q: usize) -> Result<(u64, u64)> {
    if m < 2 || p < 1 || p > m - 1 || q > m {
        return Err(Error::domain(format!(
            "(m, p, q) = ({m}, {p}, {q}) outside 1 <= p <= m-1, 0 <= q <= m"
        )));
    }
    if q == 0 {
        return Ok((0, 0));
    }
    let betti = betti_convolution(&sphere_betti(p), &sphere_betti(m - p - 1));
    let b = betti.get(q - 1).copied().unwrap_or(0);
    Ok((b, 2 * b))
}
