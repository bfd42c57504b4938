//! Closed-form kernels and torsion functions used by the estimates:
//! the half-space Green function (method of images), the ball-center kernel,
//! the infinite-wedge torsion function, and the circular-sector torsion
//! series.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::specfn::gamma_half;

/// A hyperplane `{x : n·x = offset}` bounding the open half-space
/// `{x : n·x > offset}`. The normal need not be normalized.
#[derive(Clone, Debug)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    pub fn new(normal: Vec<f64>, offset: f64) -> Hyperplane {
        Hyperplane { normal, offset }
    }

    /// Signed distance times |normal|; positive inside the half-space.
    fn side(&self, p: &[f64]) -> f64 {
        dot(&self.normal, p) - self.offset
    }

    /// Reflection of `p` across the hyperplane.
    fn reflect(&self, p: &[f64]) -> Vec<f64> {
        let n2 = dot(&self.normal, &self.normal);
        let t = 2.0 * self.side(p) / n2;
        p.iter().zip(&self.normal).map(|(a, n)| a - t * n).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Normalization constant `c_m = Γ((m−2)/2) / (4 π^{m/2})` of the Newtonian
/// kernel, `m ≥ 3`.
pub fn newton_constant(m: u32) -> f64 {
    assert!(m >= 3);
    gamma_half(m - 2) / (4.0 * PI.powf(m as f64 / 2.0))
}

/// Green function of an open half-space by the method of images:
/// `c_m (|x−y|^{2−m} − |x*−y|^{2−m})` for `m ≥ 3` and
/// `(1/2π) log(|x*−y| / |x−y|)` for `m = 2`, with `x*` the reflection of `x`.
pub fn halfspace_green(x: &[f64], y: &[f64], boundary: &Hyperplane) -> Result<f64> {
    let m = x.len();
    if m < 2 || y.len() != m || boundary.normal.len() != m {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: x has {m}, y has {}, normal has {}",
            y.len(),
            boundary.normal.len()
        )));
    }
    let d = dist(x, y);
    if d == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    if boundary.side(x) <= 0.0 {
        return Err(Error::InvalidInput("x must lie strictly inside the half-space".into()));
    }
    let xr = boundary.reflect(x);
    let dr = dist(&xr, y);
    if m == 2 {
        Ok((dr / d).ln() / (2.0 * PI))
    } else {
        let p = 2.0 - m as f64;
        Ok(newton_constant(m as u32) * (d.powf(p) - dr.powf(p)))
    }
}

/// Green function of `B_R ⊂ R^m` with pole at the center, evaluated at
/// radius `ρ`: `(1/2π) log(R/ρ)` for `m = 2`, and
/// `c_m (ρ^{2−m} − R^{2−m})` for `m ≥ 3`.
pub fn ball_center_green(m: u32, big_r: f64, rho: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidInput(format!("dimension m = {m} must be >= 2")));
    }
    if !(big_r > 0.0) || !(rho <= big_r) || rho < 0.0 {
        return Err(Error::InvalidInput(format!("need 0 < rho <= R, got rho = {rho}, R = {big_r}")));
    }
    if rho == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    if m == 2 {
        Ok((big_r / rho).ln() / (2.0 * PI))
    } else {
        let p = 2.0 - m as f64;
        Ok(newton_constant(m) * (rho.powf(p) - big_r.powf(p)))
    }
}

/// An infinite wedge (or, with `radius` present, a circular sector) with
/// opening angle `alpha` and the positive x-axis as bisector.
#[derive(Clone, Copy, Debug)]
pub struct WedgeSpec {
    /// Full opening angle, in `(0, π/2)`.
    pub alpha: f64,
    /// Sector radius; `None` for the infinite wedge.
    pub radius: Option<f64>,
}

impl WedgeSpec {
    pub fn infinite(alpha: f64) -> Result<WedgeSpec> {
        WedgeSpec { alpha, radius: None }.validated()
    }

    pub fn sector(alpha: f64, radius: f64) -> Result<WedgeSpec> {
        WedgeSpec { alpha, radius: Some(radius) }.validated()
    }

    fn validated(self) -> Result<WedgeSpec> {
        if !(self.alpha > 0.0 && self.alpha < PI / 2.0) {
            return Err(Error::InvalidInput(format!(
                "wedge opening angle {} must lie in (0, \u{3c0}/2)",
                self.alpha
            )));
        }
        if let Some(a) = self.radius {
            if !(a > 0.0) {
                return Err(Error::InvalidInput(format!("sector radius {a} must be > 0")));
            }
        }
        Ok(self)
    }
}

/// Torsion function of the infinite wedge with opening angle `α < π/2`:
/// `(x₂² − s²x₁²) / (2(s² − 1))` with `s = tan(α/2)`; nonnegative inside.
pub fn wedge_torsion(spec: &WedgeSpec, p: Point) -> Result<f64> {
    spec.validated()?;
    let s = (spec.alpha / 2.0).tan();
    if !(p.x > 0.0 && p.y.abs() < s * p.x) {
        return Err(Error::PointOutsideWedge { x: p.x, y: p.y });
    }
    Ok((p.y * p.y - s * s * p.x * p.x) / (2.0 * (s * s - 1.0)))
}

/// Torsion function of the sector `{0 < r < a, |θ| < α/2}` in polar
/// coordinates, by the classical series
///
/// ```text
/// v(r, θ) = (r²/4)(cos 2θ / cos α − 1)
///           + (4a²α²/π³) Σ_{n=1,3,5,…} (−1)^{(n+1)/2} (r/a)^{nπ/α}
///                         · cos(nπθ/α) / (n (n + 2α/π)(n − 2α/π)),
/// ```
///
/// summed in compensated (Kahan) accumulation with an explicit tail bound:
/// on the bisector the alternating-series remainder, off-axis a geometric
/// bound with ratio `(r/a)^{2π/α}`. Fails with `TruncationFailure` if 10⁶
/// terms do not reach `tolerance`.
pub fn sector_torsion(spec: &WedgeSpec, r: f64, theta: f64, tolerance: f64) -> Result<f64> {
    spec.validated()?;
    let a = spec.radius.ok_or_else(|| {
        Error::InvalidInput("sector_torsion needs a WedgeSpec with a radius".into())
    })?;
    if !(tolerance > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tolerance} must be > 0")));
    }
    let alpha = spec.alpha;
    if r < 0.0 || r >= a || theta.abs() >= alpha / 2.0 {
        return Err(Error::PointOutsideWedge { x: r * theta.cos(), y: r * theta.sin() });
    }
    if r == 0.0 {
        return Ok(0.0);
    }

    let poly = r * r / 4.0 * ((2.0 * theta).cos() / alpha.cos() - 1.0);
    let prefactor = 4.0 * a * a * alpha * alpha / (PI * PI * PI);
    let c = 2.0 * alpha / PI; // < 1, so no vanishing denominator
    let pw1 = (r / a).powf(PI / alpha);
    let ratio = pw1 * pw1; // (r/a)^{2π/α}
    let on_axis = theta == 0.0;

    let mut sum = 0.0f64;
    let mut comp = 0.0f64; // Kahan compensation
    let mut pw = pw1;
    let mut sign = -1.0f64; // (−1)^{(n+1)/2} at n = 1
    let mut n = 1.0f64;
    const TERM_CAP: usize = 1_000_000;
    for terms in 1..=TERM_CAP {
        let denom = n * (n + c) * (n - c);
        let term = sign * prefactor * pw * (n * PI * theta / alpha).cos() / denom;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        // tail after this term
        let n2 = n + 2.0;
        let next_mag = prefactor * pw * ratio / (n2 * (n2 + c) * (n2 - c));
        let tail = if on_axis { next_mag } else { next_mag / (1.0 - ratio) };
        if tail < tolerance {
            return Ok(poly + sum);
        }
        if terms == TERM_CAP {
            return Err(Error::TruncationFailure { terms, tail, tolerance });
        }
        pw *= ratio;
        sign = -sign;
        n = n2;
    }
    unreachable!()
}
