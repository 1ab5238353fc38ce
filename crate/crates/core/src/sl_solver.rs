//! Weighted 1D eigenproblems `-(w u')'/w + V u = λ u` on an interval.
//!
//! The interval is split into `N` equal cells with unknowns at cell centres,
//! so no node ever sits on an endpoint where the weight collapses or the
//! potential blows up. The flux form with `w` sampled at cell faces gives the
//! stiffness matrix `A`; the mass matrix is `diag(w_j h)`. The symmetric
//! matrix `M^{-1/2} A M^{-1/2}` is tridiagonal and its smallest eigenvalues are
//! found by Sturm-sequence bisection, then polished with inverse iteration.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Smallest resolution accepted by [`discretize`].
pub const MIN_GRID: usize = 16;
/// Resolution used when none is requested.
pub const DEFAULT_GRID: usize = 1024;

const BISECTION_RTOL: f64 = 1e-13;
const MAX_BISECTION_STEPS: usize = 200;
const WEIGHT_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Neumann,
    Dirichlet,
    /// Collapsed end of a warped product; regularity is zero flux at the face.
    RegularPole,
}

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct RadialProblem {
    pub t_min: f64,
    pub t_max: f64,
    pub weight: RadialFn,
    pub potential: RadialFn,
    pub left: Boundary,
    pub right: Boundary,
    pub grid: usize,
}

impl fmt::Debug for RadialProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProblem")
            .field("domain", &(self.t_min, self.t_max))
            .field("left", &self.left)
            .field("right", &self.right)
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

impl RadialProblem {
    pub fn new(
        domain: (f64, f64),
        weight: impl Fn(f64) -> f64 + Send + Sync + 'static,
        potential: impl Fn(f64) -> f64 + Send + Sync + 'static,
        left: Boundary,
        right: Boundary,
        grid: usize,
    ) -> Self {
        RadialProblem {
            t_min: domain.0,
            t_max: domain.1,
            weight: Arc::new(weight),
            potential: Arc::new(potential),
            left,
            right,
            grid,
        }
    }

    /// Unit weight, zero potential.
    pub fn free(domain: (f64, f64), left: Boundary, right: Boundary, grid: usize) -> Self {
        Self::new(domain, |_| 1.0, |_| 0.0, left, right, grid)
    }

    pub fn with_grid(&self, grid: usize) -> Self {
        RadialProblem {
            grid,
            ..self.clone()
        }
    }
}

/// Symmetric tridiagonal matrix: `diag[i]` and `off[i] = T[i][i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::domain(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        Ok(SymTridiagonal { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let coupling = if i == 0 {
                0.0
            } else {
                self.off[i - 1] * self.off[i - 1]
            };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { coupling / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Solves `(T - shift) x = rhs` with the Thomas algorithm.
    fn shifted_solve(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let tiny = f64::EPSILON * self.gershgorin().1.abs().max(1.0);
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0] - shift;
        if pivot.abs() < tiny {
            pivot = tiny;
        }
        c[0] = if n > 1 { self.off[0] / pivot } else { 0.0 };
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
            if pivot.abs() < tiny {
                pivot = tiny;
            }
            c[i] = if i + 1 < n { self.off[i] / pivot } else { 0.0 };
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        d
    }

    fn rayleigh(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let mut tx = self.diag[i] * x[i];
            if i > 0 {
                tx += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                tx += self.off[i] * x[i + 1];
            }
            num += x[i] * tx;
            den += x[i] * x[i];
        }
        num / den
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    pub grid: usize,
    pub extrapolated: bool,
    pub error_estimate: Vec<f64>,
}

/// Builds the symmetric tridiagonal matrix of `problem`.
pub fn discretize(problem: &RadialProblem) -> Result<SymTridiagonal> {
    let n = problem.grid;
    if n < MIN_GRID {
        return Err(Error::domain(format!("grid {n} below minimum {MIN_GRID}")));
    }
    let (a, b) = (problem.t_min, problem.t_max);
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::domain(format!("invalid interval [{a}, {b}]")));
    }
    let h = (b - a) / n as f64;
    let checked_weight = |t: f64| -> Result<f64> {
        let w = (problem.weight)(t);
        if !(w.is_finite() && w > WEIGHT_FLOOR) {
            return Err(Error::SingularWeight { at: t, value: w });
        }
        Ok(w)
    };

    // Face i sits at a + i h; the end faces only matter for Dirichlet, where
    // the ghost value -u doubles the one-sided flux.
    let mut face = vec![0.0; n + 1];
    for (i, f) in face.iter_mut().enumerate().take(n).skip(1) {
        *f = checked_weight(a + i as f64 * h)?;
    }
    if problem.left == Boundary::Dirichlet {
        face[0] = 2.0 * checked_weight(a)?;
    }
    if problem.right == Boundary::Dirichlet {
        face[n] = 2.0 * checked_weight(b)?;
    }

    let mut node_w = vec![0.0; n];
    let mut diag = vec![0.0; n];
    for j in 0..n {
        let t = a + (j as f64 + 0.5) * h;
        let w = checked_weight(t)?;
        let v = (problem.potential)(t);
        if !v.is_finite() {
            return Err(Error::domain(format!(
                "potential is {v} at grid node t = {t}"
            )));
        }
        node_w[j] = w;
        // A_jj / (w_j h)
        diag[j] = (face[j] + face[j + 1]) / (w * h * h) + v;
    }
    let off = (0..n - 1)
        .map(|j| -face[j + 1] / (h * h * (node_w[j] * node_w[j + 1]).sqrt()))
        .collect();
    SymTridiagonal::new(diag, off)
}

/// Smallest `count` eigenvalues of a symmetric tridiagonal matrix.
pub fn eigenvalues(system: &SymTridiagonal, count: usize) -> Result<EigenResult> {
    let n = system.dim();
    if count > n {
        return Err(Error::domain(format!(
            "requested {count} eigenvalues of a {n}x{n} matrix"
        )));
    }
    let (glo, ghi) = system.gershgorin();
    let norm = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
    let abs_floor = 4.0 * f64::EPSILON * norm;
    let mut out = Vec::with_capacity(count);
    let mut lo_start = glo;
    for index in 0..count {
        let (mut lo, mut hi) = (lo_start, ghi);
        let mut steps = 0;
        loop {
            let width = hi - lo;
            if width <= (BISECTION_RTOL * lo.abs().max(hi.abs())).max(abs_floor) {
                break;
            }
            if steps == MAX_BISECTION_STEPS {
                return Err(Error::ConvergenceFailure { index, width });
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if system.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            steps += 1;
        }
        let mut value = 0.5 * (lo + hi);

        // Inverse iteration; keep the Rayleigh quotient only if it stays in the
        // bisection bracket.
        let mut x = vec![1.0; n];
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += 1e-3 * ((i * 7919 + index * 104_729) % 1000) as f64 / 1000.0;
        }
        for _ in 0..3 {
            x = system.shifted_solve(value, &x);
            let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(s.is_finite() && s > 0.0) {
                break;
            }
            x.iter_mut().for_each(|v| *v /= s);
        }
        if x.iter().all(|v| v.is_finite()) {
            let rq = system.rayleigh(&x);
            if rq >= lo && rq <= hi {
                value = rq;
            }
        }
        out.push(value);
        lo_start = lo;
    }
    Ok(EigenResult {
        eigenvalues: out,
        grid: n,
        extrapolated: false,
        error_estimate: vec![0.0; count],
    })
}

fn check_count(problem: &RadialProblem, count: usize) -> Result<()> {
    if count == 0 || count > problem.grid / 4 {
        return Err(Error::domain(format!(
            "count {count} outside 1..={} for grid {}",
            problem.grid / 4,
            problem.grid
        )));
    }
    Ok(())
}

/// Smallest `count` eigenvalues at the problem's own resolution.
pub fn solve(problem: &RadialProblem, count: usize) -> Result<EigenResult> {
    check_count(problem, count)?;
    eigenvalues(&discretize(problem)?, count)
}

/// Solves at `N` and `2N` and Richardson-extrapolates the `O(h²)` error.
pub fn refine(problem: &RadialProblem, count: usize) -> Result<EigenResult> {
    refine_below(problem, count, f64::INFINITY)
}

/// Like [`refine`], but only levels that the coarse grid puts below
/// `ceiling` are computed; the result may hold fewer than `count` values.
pub fn refine_below(problem: &RadialProblem, count: usize, ceiling: f64) -> Result<EigenResult> {
    check_count(problem, count)?;
    let coarse_system = discretize(problem)?;
    let count = count.min(coarse_system.sturm_count(ceiling));
    let coarse = eigenvalues(&coarse_system, count)?;
    let fine = eigenvalues(&discretize(&problem.with_grid(2 * problem.grid))?, count)?;
    let (eigenvalues, error_estimate) = coarse
        .eigenvalues
        .iter()
        .zip(&fine.eigenvalues)
        .map(|(c, f)| ((4.0 * f - c) / 3.0, (c - f).abs() / 3.0))
        .unzip();
    Ok(EigenResult {
        eigenvalues,
        grid: problem.grid,
        extrapolated: true,
        error_estimate,
    })
}
