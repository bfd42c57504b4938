//! Small in-house special-function kit: half-integer gamma values, unit-ball
//! volumes, and Bessel functions of the first kind with their first positive
//! zeros. Kept self-contained so every constant in [`crate::bounds`] is
//! reproducible from first principles.

use std::f64::consts::PI;

/// Γ(n/2) for positive integer `n`, by the recursion Γ(x+1) = xΓ(x) from
/// Γ(1/2) = √π and Γ(1) = 1.
pub fn gamma_half(n: u32) -> f64 {
    assert!(n >= 1, "gamma_half needs a positive half-integer argument");
    match n {
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (n as f64 / 2.0 - 1.0) * gamma_half(n - 2),
    }
}

/// Volume of the unit ball in `R^m`: ω_m = π^{m/2} / Γ(m/2 + 1).
pub fn omega_m(m: u32) -> f64 {
    assert!(m >= 1);
    PI.powf(m as f64 / 2.0) / gamma_half(m + 2)
}

/// J_ν(x) for ν = `nu2`/2 ≥ 0, by the ascending series
/// Σ_k (−1)^k (x/2)^{2k+ν} / (k! Γ(k+ν+1)).
///
/// Terms are generated by the balanced recurrence
/// t_{k+1} = −t_k · (x/2)² / ((k+1)(k+1+ν)), which keeps intermediates
/// near the magnitude of the result for the argument range used here
/// (first zeros of ν ≤ 5, so x ≲ 10).
pub fn bessel_j_half(nu2: u32, x: f64) -> f64 {
    let nu = nu2 as f64 / 2.0;
    let half = x / 2.0;
    let mut term = half.powf(nu) / gamma_half(nu2 + 2);
    let mut sum = term;
    let q = half * half;
    for k in 0..40 {
        let kf = k as f64;
        term *= -q / ((kf + 1.0) * (kf + 1.0 + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// First positive zero j_{ν,1} of J_ν, ν = `nu2`/2, located by a coarse scan
/// for the first sign change followed by bisection to 1e-14 relative width.
pub fn bessel_first_zero(nu2: u32) -> f64 {
    let f = |x: f64| bessel_j_half(nu2, x);
    let mut lo = 1e-6;
    let mut hi = lo;
    let mut prev = f(lo);
    let mut found = false;
    let mut x = 0.25;
    while x < 80.0 {
        let v = f(x);
        if prev > 0.0 && v <= 0.0 {
            hi = x;
            found = true;
            break;
        }
        lo = x;
        prev = v;
        x += 0.25;
    }
    assert!(found, "no sign change found for J_{}/2 on (0, 80)", nu2);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Bottom Dirichlet eigenvalue of the unit ball in `R^m`: j²_{m/2−1,1}.
pub fn lambda_unit_ball(m: u32) -> f64 {
    assert!(m >= 2);
    bessel_first_zero(m - 2).powi(2)
}
