//! Warping profile `f` and the doubly warped description of `(S^m, g_{p,L})`.
//!
//! The cap profile is `f(r) = sin r` on `[0, 1]`, `f(r) = 1` on `[3/2, 2]`, and
//! a polynomial blend in between whose derivative `f'` matches the derivatives
//! of `cos` at `r = 1` and vanishes to the same order at `r = 3/2`. One extra
//! moment condition `∫ f' = 1 - sin 1` makes `f` land exactly on 1.
//!
//! Globally the metric is written over `t ∈ [0, T]`, `T = L + 4`, as
//!
//! ```text
//! dt² + a(t)² g_{S^p} + b(t)² g_{S^{m-p-1}}
//! a(t) = f(t)      on [0, 2],      1 afterwards
//! b(t) = f(T - t)  on [T - 2, T],  1 before
//! ```
//!
//! so the `S^p` fiber collapses at `t = 0` and the `S^{m-p-1}` fiber at `t = T`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::quadrature::adaptive_simpson;
use crate::{Error, Result};

pub const BLEND_START: f64 = 1.0;
pub const BLEND_END: f64 = 1.5;
pub const PROFILE_END: f64 = 2.0;

/// Points used by the constraint certificate.
pub const VALIDATION_POINTS: usize = 10_000;
/// Tolerance on `0 <= f' <= 1` and `f'' <= 0`.
pub const SLOPE_TOLERANCE: f64 = 1e-12;
/// Tolerance on the sign of the sectional curvatures.
pub const CURVATURE_TOLERANCE: f64 = 1e-10;

/// Parameters of the blend on `[1, 3/2]`.
///
/// `matching_order = n` matches `f', f'', …, f^{(n+1)}` at both junctions, so
/// the profile is `C^{n+1}`. The default (`n = 1`) is the quartic-derivative
/// blend, `C²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlendSpec {
    pub matching_order: usize,
}

impl Default for BlendSpec {
    fn default() -> Self {
        BlendSpec { matching_order: 1 }
    }
}

impl BlendSpec {
    pub fn smoothness_class(&self) -> usize {
        self.matching_order + 1
    }

    /// Degree of the polynomial representing `f'` on the blend.
    pub fn derivative_degree(&self) -> usize {
        2 * (self.matching_order + 1)
    }

    /// Coefficients `c_j` of `f'(1 + s) = Σ c_j s^j`, `s ∈ [0, 1/2]`.
    fn solve_coefficients(&self) -> Result<Vec<f64>> {
        let order = self.matching_order;
        if order > 6 {
            return Err(Error::domain(format!(
                "blend matching order {order} is outside the supported range 0..=6"
            )));
        }
        let n = self.derivative_degree() + 1;
        let h = BLEND_END - BLEND_START;
        // d^d/dr^d cos(r) at r = 1
        let cos_derivs = [1.0f64.cos(), -(1.0f64.sin()), -(1.0f64.cos()), 1.0f64.sin()];
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut rhs = DVector::<f64>::zeros(n);
        let mut row = 0;
        for d in 0..=order {
            for j in d..n {
                let falling = falling_factorial(j, d);
                if j == d {
                    a[(row, j)] = falling;
                }
                a[(row + 1, j)] = falling * h.powi((j - d) as i32);
            }
            rhs[row] = cos_derivs[d % 4];
            rhs[row + 1] = 0.0;
            row += 2;
        }
        for j in 0..n {
            a[(row, j)] = h.powi(j as i32 + 1) / (j as f64 + 1.0);
        }
        rhs[row] = 1.0 - 1.0f64.sin();
        let sol = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::domain("blend interpolation system is singular"))?;
        Ok(sol.iter().copied().collect())
    }
}

fn falling_factorial(j: usize, d: usize) -> f64 {
    (0..d).map(|i| (j - i) as f64).product()
}

/// Worst values of every checked quantity over the validation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCertificate {
    pub grid_points: usize,
    pub slope_tolerance: f64,
    pub curvature_tolerance: f64,
    pub min_value: f64,
    pub min_slope: f64,
    pub max_slope: f64,
    pub max_second_derivative: f64,
    pub min_radial_curvature: f64,
    pub min_tangential_curvature: f64,
    /// Largest amount by which any constraint was exceeded (0 if none).
    pub max_violation: f64,
}

impl ConstraintCertificate {
    pub fn passed(&self) -> bool {
        self.max_violation == 0.0
    }
}

/// The cap warping function with its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpProfile {
    pub blend: BlendSpec,
    pub smoothness_class: usize,
    /// `f'(1 + s) = Σ coefficients[j] s^j` on the blend.
    pub coefficients: Vec<f64>,
    pub certificate: ConstraintCertificate,
}

impl Default for WarpProfile {
    fn default() -> Self {
        build_profile(BlendSpec::default()).expect("default blend is admissible")
    }
}

/// Builds and certifies the profile for `blend`.
pub fn build_profile(blend: BlendSpec) -> Result<WarpProfile> {
    let coefficients = blend.solve_coefficients()?;
    let mut profile = WarpProfile {
        blend,
        smoothness_class: blend.smoothness_class(),
        coefficients,
        certificate: ConstraintCertificate {
            grid_points: 0,
            slope_tolerance: SLOPE_TOLERANCE,
            curvature_tolerance: CURVATURE_TOLERANCE,
            min_value: 0.0,
            min_slope: 0.0,
            max_slope: 0.0,
            max_second_derivative: 0.0,
            min_radial_curvature: 0.0,
            min_tangential_curvature: 0.0,
            max_violation: 0.0,
        },
    };
    profile.certificate = profile.certify()?;
    Ok(profile)
}

impl WarpProfile {
    pub fn f(&self, r: f64) -> f64 {
        if r <= BLEND_START {
            r.sin()
        } else if r >= BLEND_END {
            1.0
        } else {
            let s = r - BLEND_START;
            let integral: f64 = self
                .coefficients
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (j, c)| acc * s + c / (j as f64 + 1.0));
            BLEND_START.sin() + s * integral
        }
    }

    pub fn df(&self, r: f64) -> f64 {
        if r <= BLEND_START {
            r.cos()
        } else if r >= BLEND_END {
            0.0
        } else {
            let s = r - BLEND_START;
            self.coefficients
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * s + c)
        }
    }

    pub fn d2f(&self, r: f64) -> f64 {
        if r <= BLEND_START {
            -r.sin()
        } else if r >= BLEND_END {
            0.0
        } else {
            let s = r - BLEND_START;
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (j, c)| acc * s + j as f64 * c)
        }
    }

    /// `(K(∂_r, X), K(X, Y))` for the cap metric `dr² + f² g_{S^{n-1}}`.
    pub fn sectional_curvatures(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0 && r <= PROFILE_END) {
            return Err(Error::domain(format!(
                "sectional curvature requested at r = {r}; need 0 < r <= 2"
            )));
        }
        let f = self.f(r);
        let df = self.df(r);
        Ok((-self.d2f(r) / f, (1.0 - df * df) / (f * f)))
    }

    fn certify(&self) -> Result<ConstraintCertificate> {
        let mut c = ConstraintCertificate {
            grid_points: VALIDATION_POINTS,
            slope_tolerance: SLOPE_TOLERANCE,
            curvature_tolerance: CURVATURE_TOLERANCE,
            min_value: f64::INFINITY,
            min_slope: f64::INFINITY,
            max_slope: f64::NEG_INFINITY,
            max_second_derivative: f64::NEG_INFINITY,
            min_radial_curvature: f64::INFINITY,
            min_tangential_curvature: f64::INFINITY,
            max_violation: 0.0,
        };
        let mut violations: Vec<(f64, &'static str, f64, f64, f64)> = Vec::new();
        for i in 1..=VALIDATION_POINTS {
            let r = PROFILE_END * i as f64 / VALIDATION_POINTS as f64;
            let f = self.f(r);
            let df = self.df(r);
            let d2f = self.d2f(r);
            let (kr, kt) = self.sectional_curvatures(r)?;
            c.min_value = c.min_value.min(f);
            c.min_slope = c.min_slope.min(df);
            c.max_slope = c.max_slope.max(df);
            c.max_second_derivative = c.max_second_derivative.max(d2f);
            c.min_radial_curvature = c.min_radial_curvature.min(kr) + 0.0;
            c.min_tangential_curvature = c.min_tangential_curvature.min(kt);
            let checks = [
                (-df - SLOPE_TOLERANCE, "f'", df, SLOPE_TOLERANCE),
                (
                    df - 1.0 - SLOPE_TOLERANCE,
                    "f' - 1",
                    df - 1.0,
                    SLOPE_TOLERANCE,
                ),
                (d2f - SLOPE_TOLERANCE, "f''", d2f, SLOPE_TOLERANCE),
                (
                    -kr - CURVATURE_TOLERANCE,
                    "K(dr, X)",
                    kr,
                    CURVATURE_TOLERANCE,
                ),
                (
                    -kt - CURVATURE_TOLERANCE,
                    "K(X, Y)",
                    kt,
                    CURVATURE_TOLERANCE,
                ),
                (if f > 0.0 { -1.0 } else { 1.0 }, "f", f, 0.0),
            ];
            for (excess, what, value, tol) in checks {
                if excess > 0.0 {
                    violations.push((excess, what, r, value, tol));
                }
            }
        }
        if let Some(&(_, what, at, value, tolerance)) =
            violations.iter().max_by(|a, b| a.0.total_cmp(&b.0))
        {
            return Err(Error::ConstraintViolation {
                quantity: what.to_string(),
                at,
                value,
                tolerance,
            });
        }
        Ok(c)
    }

    /// Samples `f, f', f''` on `points` uniform nodes of `[0, 2]`.
    pub fn document(&self, points: usize) -> ProfileDocument {
        let points = points.max(2);
        let grid: Vec<f64> = (0..points)
            .map(|i| PROFILE_END * i as f64 / (points - 1) as f64)
            .collect();
        ProfileDocument {
            blend: self.blend,
            smoothness_class: self.smoothness_class,
            coefficients: self.coefficients.clone(),
            f: grid.iter().map(|&r| self.f(r)).collect(),
            df: grid.iter().map(|&r| self.df(r)).collect(),
            d2f: grid.iter().map(|&r| self.d2f(r)).collect(),
            grid,
            certificate: self.certificate.clone(),
        }
    }
}

/// Serialized form of a profile: blend parameters, samples and certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub blend: BlendSpec,
    pub smoothness_class: usize,
    pub coefficients: Vec<f64>,
    pub grid: Vec<f64>,
    pub f: Vec<f64>,
    pub df: Vec<f64>,
    pub d2f: Vec<f64>,
    pub certificate: ConstraintCertificate,
}

/// Volume of the unit round `S^n` (`S^0` is two points).
pub fn unit_sphere_volume(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 1.0) * unit_sphere_volume(n - 2),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WarpShape {
    /// The long sphere: caps from `profile`, flat cylinder of length `cylinder_length`.
    Constructed {
        profile: WarpProfile,
        cylinder_length: f64,
    },
    /// Unit round sphere, `a = sin t`, `b = cos t` on `[0, π/2]`.
    RoundSphere,
}

/// `dt² + a(t)² g_{S^p} + b(t)² g_{S^{m-p-1}}` on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublyWarpedMetric {
    pub m: usize,
    pub p: usize,
    pub shape: WarpShape,
}

pub(crate) fn check_degree(m: usize, p: usize) -> Result<()> {
    if m < 2 || p < 1 || p > m - 1 {
        return Err(Error::domain(format!(
            "degree p = {p} outside 1 <= p <= m - 1 for m = {m} (m >= 2)"
        )));
    }
    Ok(())
}

/// Assembles `g_{p,L}` from the cap profile.
pub fn assemble_doubly_warped(
    m: usize,
    p: usize,
    cylinder_length: f64,
    profile: &WarpProfile,
) -> Result<DoublyWarpedMetric> {
    check_degree(m, p)?;
    if !(cylinder_length >= 0.0 && cylinder_length.is_finite()) {
        return Err(Error::domain(format!(
            "cylinder length L = {cylinder_length} must be finite and >= 0"
        )));
    }
    Ok(DoublyWarpedMetric {
        m,
        p,
        shape: WarpShape::Constructed {
            profile: profile.clone(),
            cylinder_length,
        },
    })
}

impl DoublyWarpedMetric {
    /// The unit round `S^m` split as `S^p` and `S^{m-p-1}` joins.
    pub fn round_sphere(m: usize, p: usize) -> Result<Self> {
        check_degree(m, p)?;
        Ok(DoublyWarpedMetric {
            m,
            p,
            shape: WarpShape::RoundSphere,
        })
    }

    /// Dimensions of the two fibers `(p, m - p - 1)`.
    pub fn fiber_dims(&self) -> (usize, usize) {
        (self.p, self.m - self.p - 1)
    }

    pub fn total_length(&self) -> f64 {
        match &self.shape {
            WarpShape::Constructed {
                cylinder_length, ..
            } => cylinder_length + 2.0 * PROFILE_END,
            WarpShape::RoundSphere => PI / 2.0,
        }
    }

    pub fn cylinder_length(&self) -> Option<f64> {
        match &self.shape {
            WarpShape::Constructed {
                cylinder_length, ..
            } => Some(*cylinder_length),
            WarpShape::RoundSphere => None,
        }
    }

    /// `[2, T - 2]`, where both warps are identically 1.
    pub fn product_region(&self) -> Option<(f64, f64)> {
        self.cylinder_length()
            .map(|l| (PROFILE_END, PROFILE_END + l))
    }

    pub fn profile(&self) -> Option<&WarpProfile> {
        match &self.shape {
            WarpShape::Constructed { profile, .. } => Some(profile),
            WarpShape::RoundSphere => None,
        }
    }

    /// Warp of the `S^p` fiber.
    pub fn a(&self, t: f64) -> f64 {
        match &self.shape {
            WarpShape::Constructed { profile, .. } => {
                if t >= PROFILE_END {
                    1.0
                } else {
                    profile.f(t)
                }
            }
            WarpShape::RoundSphere => t.sin(),
        }
    }

    /// Warp of the `S^{m-p-1}` fiber.
    pub fn b(&self, t: f64) -> f64 {
        match &self.shape {
            WarpShape::Constructed { profile, .. } => {
                let s = self.total_length() - t;
                if s >= PROFILE_END {
                    1.0
                } else {
                    profile.f(s)
                }
            }
            WarpShape::RoundSphere => t.cos(),
        }
    }

    /// Volume density per unit fiber volume, `a^p b^{m-p-1}`.
    pub fn density(&self, t: f64) -> f64 {
        let (da, db) = self.fiber_dims();
        self.a(t).powi(da as i32) * self.b(t).powi(db as i32)
    }

    /// `vol(S^p) · vol(S^{m-p-1})`.
    pub fn fiber_volume(&self) -> f64 {
        let (da, db) = self.fiber_dims();
        unit_sphere_volume(da) * unit_sphere_volume(db)
    }

    /// Samples `a, b, w₀` on `points` uniform nodes of `[0, T]`.
    pub fn document(&self, points: usize) -> MetricDocument {
        let points = points.max(2);
        let t_end = self.total_length();
        let grid: Vec<f64> = (0..points)
            .map(|i| t_end * i as f64 / (points - 1) as f64)
            .collect();
        MetricDocument {
            m: self.m,
            p: self.p,
            cylinder_length: self.cylinder_length(),
            total_length: t_end,
            a: grid.iter().map(|&t| self.a(t)).collect(),
            b: grid.iter().map(|&t| self.b(t)).collect(),
            density: grid.iter().map(|&t| self.density(t)).collect(),
            grid,
            volume: volume(self),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDocument {
    pub m: usize,
    pub p: usize,
    pub cylinder_length: Option<f64>,
    pub total_length: f64,
    pub grid: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub density: Vec<f64>,
    pub volume: VolumeData,
}

/// `vol = A·L + B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeData {
    pub total: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl VolumeData {
    /// Factor `vol^{-2/m}` that rescales the metric to unit volume.
    pub fn normalization_scale(&self, m: usize) -> f64 {
        self.total.powf(-2.0 / m as f64)
    }

    /// Factor `vol^{2/m}` by which eigenvalues grow under that rescaling.
    pub fn eigenvalue_factor(&self, m: usize) -> f64 {
        self.total.powf(2.0 / m as f64)
    }
}

const VOLUME_TOL: f64 = 1e-14;

fn cap_integral(profile: &WarpProfile, power: usize) -> f64 {
    if power == 0 {
        return PROFILE_END;
    }
    let g = |r: f64| profile.f(r).powi(power as i32);
    adaptive_simpson(g, 0.0, BLEND_START, VOLUME_TOL)
        + adaptive_simpson(g, BLEND_START, BLEND_END, VOLUME_TOL)
        + (PROFILE_END - BLEND_END)
}

/// Total volume and its affine decomposition in the cylinder length.
pub fn volume(metric: &DoublyWarpedMetric) -> VolumeData {
    let (da, db) = metric.fiber_dims();
    let fiber = metric.fiber_volume();
    match &metric.shape {
        WarpShape::Constructed {
            profile,
            cylinder_length,
        } => {
            let caps = cap_integral(profile, da) + cap_integral(profile, db);
            let intercept = fiber * caps;
            VolumeData {
                total: fiber * (caps + cylinder_length),
                slope: fiber,
                intercept,
            }
        }
        WarpShape::RoundSphere => {
            let w = |t: f64| t.sin().powi(da as i32) * t.cos().powi(db as i32);
            let total = fiber * adaptive_simpson(w, 0.0, PI / 2.0, VOLUME_TOL);
            VolumeData {
                total,
                slope: fiber,
                intercept: total,
            }
        }
    }
}
