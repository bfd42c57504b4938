//! Exact piecewise closed-form solutions of the radially symmetric problem
//!
//! ```text
//! −v'' − (m−1)/r · v' = γ − g(r),   v'(0) = 0,  v(R) = 0,
//! ```
//!
//! where `g` is piecewise constant in `[0, 1]` on a shell partition of
//! `[0, R]` (`g ≡ 1` on the negative-source shells, fractional values for
//! relaxed densities). Each shell carries `v(r) = q·r² + b·φ(r) + c` with the
//! harmonic basis `φ(r) = ln r` for `m = 2` and `φ(r) = r^{2−m}` for `m ≥ 3`,
//! so the shell identity `−Δv = γ − g_i` holds symbolically.

use crate::error::{Error, Result};
use crate::specfn::{gamma_half, omega_m};
use std::f64::consts::PI;

/// Dimension, outer radius, shell partition, per-shell density, and γ.
#[derive(Clone, Debug)]
pub struct RadialConfig {
    m: u32,
    outer_radius: f64,
    /// Shell boundaries `0 = ρ₀ < ρ₁ < … < ρ_k = R`.
    breakpoints: Vec<f64>,
    /// Density of the negative-source set on each shell, in `[0, 1]`.
    densities: Vec<f64>,
    gamma: f64,
}

impl RadialConfig {
    /// Full constructor; `breakpoints` includes both endpoints `0` and `R`.
    /// γ = 1 is admitted so the pure torsion problem is expressible as
    /// `g ≡ 0, γ = 1`.
    pub fn new(
        m: u32,
        breakpoints: Vec<f64>,
        densities: Vec<f64>,
        gamma: f64,
    ) -> Result<RadialConfig> {
        if m < 2 {
            return Err(Error::InvalidInput(format!("dimension m = {m} must be >= 2")));
        }
        if breakpoints.len() < 2 || breakpoints.len() != densities.len() + 1 {
            return Err(Error::InvalidInput(
                "need k+1 breakpoints for k shell densities".into(),
            ));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidInput("first breakpoint must be 0".into()));
        }
        if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidInput(format!("gamma = {gamma} must lie in (0, 1]")));
        }
        if !densities.iter().all(|g| (0.0..=1.0).contains(g)) {
            return Err(Error::InvalidInput("shell densities must lie in [0, 1]".into()));
        }
        let outer_radius = *breakpoints.last().unwrap();
        Ok(RadialConfig { m, outer_radius, breakpoints, densities, gamma })
    }

    /// Pure torsion problem on `B_R` (right-hand side ≡ 1).
    pub fn torsion(m: u32, outer_radius: f64) -> RadialConfig {
        RadialConfig::new(m, vec![0.0, outer_radius], vec![0.0], 1.0).unwrap()
    }

    /// Concentric ball source `A = B_a` inside `B_R`.
    pub fn ball_source(m: u32, outer_radius: f64, gamma: f64, a: f64) -> Result<RadialConfig> {
        if !(a > 0.0 && a < outer_radius) {
            return Err(Error::InvalidInput(format!("need 0 < a = {a} < R = {outer_radius}")));
        }
        RadialConfig::new(m, vec![0.0, a, outer_radius], vec![1.0, 0.0], gamma)
    }

    /// Concentric annulus source `A = B_{r2} ∖ B_{r1}` inside `B_R`.
    pub fn annulus_source(
        m: u32,
        outer_radius: f64,
        gamma: f64,
        r1: f64,
        r2: f64,
    ) -> Result<RadialConfig> {
        if !(r1 > 0.0 && r1 < r2 && r2 <= outer_radius) {
            return Err(Error::InvalidInput(format!("need 0 < r1 < r2 <= R, got ({r1}, {r2})")));
        }
        if r2 == outer_radius {
            RadialConfig::new(m, vec![0.0, r1, r2], vec![0.0, 1.0], gamma)
        } else {
            RadialConfig::new(m, vec![0.0, r1, r2, outer_radius], vec![0.0, 1.0, 0.0], gamma)
        }
    }

    pub fn dimension(&self) -> u32 {
        self.m
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    /// Mass of the negative-source set, `Σ g_i ω_m (ρ_{i+1}^m − ρ_i^m)`.
    pub fn source_mass(&self) -> f64 {
        let w = omega_m(self.m);
        let m = self.m as i32;
        self.densities
            .iter()
            .enumerate()
            .map(|(i, g)| {
                g * w * (self.breakpoints[i + 1].powi(m) - self.breakpoints[i].powi(m))
            })
            .sum()
    }
}

/// One shell of the solution: `v(r) = quad·r² + harm·φ(r) + constant`.
#[derive(Clone, Copy, Debug)]
pub struct Shell {
    pub quad: f64,
    pub harm: f64,
    pub constant: f64,
}

/// Piecewise closed-form solution produced by [`solve_radial`].
#[derive(Clone, Debug)]
pub struct RadialSolution {
    m: u32,
    breakpoints: Vec<f64>,
    densities: Vec<f64>,
    gamma: f64,
    shells: Vec<Shell>,
}

impl RadialSolution {
    fn phi(&self, r: f64) -> f64 {
        if self.m == 2 {
            r.ln()
        } else {
            r.powi(2 - self.m as i32)
        }
    }

    fn phi_prime(&self, r: f64) -> f64 {
        if self.m == 2 {
            1.0 / r
        } else {
            (2.0 - self.m as f64) * r.powi(1 - self.m as i32)
        }
    }

    fn shell_index(&self, r: f64) -> usize {
        let k = self.breakpoints.partition_point(|&b| b < r);
        k.saturating_sub(1).min(self.shells.len() - 1)
    }

    pub fn dimension(&self) -> u32 {
        self.m
    }

    pub fn outer_radius(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn shells(&self) -> &[Shell] {
        &self.shells
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Solution value at radius `r ∈ [0, R]`.
    pub fn eval(&self, r: f64) -> f64 {
        debug_assert!((0.0..=self.outer_radius() * (1.0 + 1e-12)).contains(&r));
        if r == 0.0 {
            // innermost harmonic coefficient is identically zero
            return self.shells[0].constant;
        }
        let s = self.shells[self.shell_index(r)];
        s.quad * r * r + s.harm * self.phi(r) + s.constant
    }

    /// Derivative `v'(r)`; 0 at the origin.
    pub fn deriv(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        let s = self.shells[self.shell_index(r)];
        2.0 * s.quad * r + s.harm * self.phi_prime(r)
    }

    /// Cumulative source flux `∫₀^r s^{m−1} (γ − g(s)) ds`, which equals
    /// `−r^{m−1} v'(r)` identically.
    pub fn flux(&self, r: f64) -> f64 {
        let m = self.m as f64;
        let mut acc = 0.0;
        for (i, g) in self.densities.iter().enumerate() {
            let lo = self.breakpoints[i];
            let hi = self.breakpoints[i + 1].min(r);
            if hi <= lo {
                break;
            }
            acc += (self.gamma - g) * (hi.powf(m) - lo.powf(m)) / m;
        }
        acc
    }
}

/// Solves the radial problem by forward flux integration
/// (`−r^{m−1} v' = ∫₀^r s^{m−1}(γ − g) ds`) followed by backward integration
/// of the constants from `v(R) = 0`.
pub fn solve_radial(cfg: &RadialConfig) -> RadialSolution {
    let m = cfg.m as f64;
    let k = cfg.densities.len();
    let mut shells = vec![Shell { quad: 0.0, harm: 0.0, constant: 0.0 }; k];

    // flux at the inner edge of each shell
    let mut flux_in = vec![0.0f64; k];
    for i in 1..k {
        let f = cfg.gamma - cfg.densities[i - 1];
        flux_in[i] =
            flux_in[i - 1] + f * (cfg.breakpoints[i].powf(m) - cfg.breakpoints[i - 1].powf(m)) / m;
    }

    for i in 0..k {
        let f = cfg.gamma - cfg.densities[i];
        let rho = cfg.breakpoints[i];
        shells[i].quad = -f / (2.0 * m);
        let resid = flux_in[i] - f * rho.powf(m) / m;
        shells[i].harm = if cfg.m == 2 { -resid } else { resid / (m - 2.0) };
    }
    // innermost shell: regular at the origin
    shells[0].harm = 0.0;

    let mut sol = RadialSolution {
        m: cfg.m,
        breakpoints: cfg.breakpoints.clone(),
        densities: cfg.densities.clone(),
        gamma: cfg.gamma,
        shells,
    };

    // constants, outermost inward: v(R) = 0 and continuity at breakpoints
    let big_r = cfg.outer_radius;
    let last = k - 1;
    sol.shells[last].constant =
        -(sol.shells[last].quad * big_r * big_r + sol.shells[last].harm * sol.phi(big_r));
    for i in (0..last).rev() {
        let rho = cfg.breakpoints[i + 1];
        let outer = sol.shells[i + 1];
        let outer_val = outer.quad * rho * rho + outer.harm * sol.phi(rho) + outer.constant;
        sol.shells[i].constant =
            outer_val - sol.shells[i].quad * rho * rho - sol.shells[i].harm * sol.phi(rho);
    }
    sol
}

/// Central value of the solution on the unit disk with `A = B_a`:
/// `γ/4 − a²/4 + (a²/4)·log a²`.
pub fn central_value_disk(gamma: f64, a: f64) -> f64 {
    gamma / 4.0 - a * a / 4.0 + a * a / 4.0 * (a * a).ln()
}

/// Central value of the solution on the unit ball in `R^m`, `m ≥ 3`, with
/// `A = B_a`: `γ/(2m) − c_m·m·ω_m·∫₀^a (r − r^{m−1}) dr`, with
/// `c_m = Γ((m−2)/2)/(4π^{m/2})`.
pub fn central_value_ball(m: u32, gamma: f64, a: f64) -> Result<f64> {
    if m < 3 {
        return Err(Error::InvalidInput("central_value_ball needs m >= 3".into()));
    }
    let mf = m as f64;
    let c_m = gamma_half(m - 2) / (4.0 * PI.powf(mf / 2.0));
    let integral = a * a / 2.0 - a.powi(m as i32) / mf;
    Ok(gamma / (2.0 * mf) - c_m * mf * omega_m(m) * integral)
}

/// Critical radius of the unit disk at `γ = 1/2`: the root of
/// `central_value_disk(1/2, ·)` in `(0, 1)`, by bisection to 1e-10.
pub fn find_rc() -> f64 {
    let f = |a: f64| central_value_disk(0.5, a);
    let mut lo = 0.1;
    let mut hi = 0.9;
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest inner radius `r₁` for which the annulus source `B_{r2} ∖ B_{r1}`
/// keeps the radial solution monotone down to the boundary
/// (`v'(r2) ≤ 0`): `(1 − γ)^{1/m} · r2`.
pub fn talenti_threshold(m: u32, gamma: f64, r2: f64) -> f64 {
    (1.0 - gamma).powf(1.0 / m as f64) * r2
}

/// Global minimum of the solution over `[0, R]` by per-shell stationary-point
/// analysis; returns `(argmin radius, min value)`.
pub fn min_radial(sol: &RadialSolution) -> (f64, f64) {
    let m = sol.m as f64;
    let mut best = (0.0, sol.eval(0.0));
    let mut consider = |r: f64, sol: &RadialSolution, best: &mut (f64, f64)| {
        let v = sol.eval(r);
        if v < best.1 {
            *best = (r, v);
        }
    };
    for i in 0..sol.shells.len() {
        let lo = sol.breakpoints[i];
        let hi = sol.breakpoints[i + 1];
        consider(hi, sol, &mut best);
        // interior stationary point: flux vanishes inside the shell
        let f = sol.gamma - sol.densities[i];
        if f != 0.0 {
            let flux_lo = sol.flux(lo);
            let rm = lo.powf(m) - m * flux_lo / f;
            if rm > lo.powf(m) && rm < hi.powf(m) {
                consider(rm.powf(1.0 / m), sol, &mut best);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const RC_PAPER: f64 = 0.432067;

    #[test]
    fn pure_torsion_matches_closed_form() {
        // v(r) = (R² − r²)/(2m)
        for m in [2u32, 3, 4, 7] {
            let sol = solve_radial(&RadialConfig::torsion(m, 1.0));
            for r in [0.0, 0.3, 0.99, 1.0] {
                let expect = (1.0 - r * r) / (2.0 * m as f64);
                assert!((sol.eval(r) - expect).abs() < 1e-15, "m={m} r={r}");
            }
        }
        let sol = solve_radial(&RadialConfig::torsion(2, 1.0));
        assert!((sol.eval(0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn critical_ball_source_has_zero_center_value() {
        let cfg = RadialConfig::ball_source(2, 1.0, 0.5, 0.432067).unwrap();
        let sol = solve_radial(&cfg);
        assert!(sol.eval(0.0).abs() < 1e-6);
    }

    #[test]
    fn three_dimensional_half_ball_source_is_exactly_critical() {
        // γ/6 − a²/2 + a³/3 = 0 at γ = 1/2, a = 1/2
        let cfg = RadialConfig::ball_source(3, 1.0, 0.5, 0.5).unwrap();
        let sol = solve_radial(&cfg);
        assert!(sol.eval(0.0).abs() < 1e-15);
        assert!(central_value_ball(3, 0.5, 0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn central_value_disk_reference_points() {
        assert!((central_value_disk(0.5, 0.3) - 0.048321).abs() < 1e-6);
        assert!(central_value_disk(0.5, RC_PAPER).abs() < 1e-6);
        // a → 0 limit is γ/4
        assert!((central_value_disk(0.7, 1e-9) - 0.175).abs() < 1e-12);
    }

    #[test]
    fn central_value_ball_reference_points() {
        assert!((central_value_ball(3, 0.5, 1e-12).unwrap() - 1.0 / 12.0).abs() < 1e-12);
        // at a = γ^{1/2} the value is non-positive
        for gamma in [0.2, 0.5, 0.8] {
            let v = central_value_ball(3, gamma, gamma.sqrt()).unwrap();
            assert!(v <= 1e-15, "gamma={gamma}: {v}");
        }
        assert!(central_value_ball(2, 0.5, 0.3).is_err());
    }

    #[test]
    fn central_value_disk_agrees_with_solver() {
        for (gamma, a) in [(0.5, 0.3), (0.5, 0.432067), (0.25, 0.6), (0.9, 0.1)] {
            let sol = solve_radial(&RadialConfig::ball_source(2, 1.0, gamma, a).unwrap());
            assert!((sol.eval(0.0) - central_value_disk(gamma, a)).abs() < 1e-14);
        }
        for (gamma, a) in [(0.5, 0.5), (0.3, 0.4), (0.8, 0.7)] {
            let sol = solve_radial(&RadialConfig::ball_source(3, 1.0, gamma, a).unwrap());
            assert!((sol.eval(0.0) - central_value_ball(3, gamma, a).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn rc_matches_paper_estimate() {
        let rc = find_rc();
        assert!((rc - RC_PAPER).abs() < 1e-5);
        assert!(central_value_disk(0.5, rc).abs() < 1e-9);
        assert!(central_value_disk(0.5, 0.3) > 0.0);
        assert!(central_value_disk(0.5, 0.6) < 0.0);
    }

    #[test]
    fn talenti_threshold_values() {
        assert!((talenti_threshold(2, 0.5, 1.0) - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((talenti_threshold(3, 7.0 / 8.0, 1.0) - 0.5).abs() < 1e-12);
        assert!((talenti_threshold(4, 1e-12, 2.0) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn threshold_is_the_sign_change_of_the_boundary_derivative() {
        for m in [2u32, 3, 5] {
            for gamma in [0.25, 0.5, 0.75] {
                let r2 = 1.0;
                let r1c = talenti_threshold(m, gamma, r2);
                for (r1, expect_nonpos) in
                    [(r1c + 1e-12, true), (r1c - 1e-12, false), (r1c * 1.05, true)]
                {
                    let cfg = RadialConfig::annulus_source(m, r2, gamma, r1, r2).unwrap();
                    let sol = solve_radial(&cfg);
                    let vp = sol.deriv(r2);
                    if expect_nonpos {
                        assert!(vp <= 1e-12, "m={m} gamma={gamma} r1={r1}: v'(R) = {vp}");
                    } else {
                        assert!(vp > 0.0, "m={m} gamma={gamma} r1={r1}: v'(R) = {vp}");
                    }
                }
            }
        }
    }

    #[test]
    fn min_radial_reference_cases() {
        let torsion = solve_radial(&RadialConfig::torsion(2, 1.0));
        let (argmin, value) = min_radial(&torsion);
        assert!((argmin - 1.0).abs() < 1e-12 && value.abs() < 1e-15);

        let sol = solve_radial(&RadialConfig::ball_source(2, 1.0, 0.5, 0.5).unwrap());
        let (argmin, value) = min_radial(&sol);
        assert_eq!(argmin, 0.0);
        assert!((value - central_value_disk(0.5, 0.5)).abs() < 1e-14);
        assert!(value < 0.0);

        let sol = solve_radial(&RadialConfig::ball_source(2, 1.0, 0.5, 0.3).unwrap());
        let (argmin, value) = min_radial(&sol);
        assert!((argmin - 1.0).abs() < 1e-12);
        assert!(value.abs() < 1e-15);
    }

    fn arb_config() -> impl Strategy<Value = RadialConfig> {
        (
            2u32..6,
            proptest::collection::vec(0.01f64..1.0, 1..5),
            proptest::collection::vec(0.0f64..=1.0, 5),
            0.05f64..0.999,
        )
            .prop_map(|(m, cuts, gs, gamma)| {
                let mut bps = vec![0.0];
                let mut acc = 0.0;
                for c in &cuts {
                    acc += c;
                    bps.push(acc);
                }
                let scale = *bps.last().unwrap();
                for b in bps.iter_mut() {
                    *b /= scale; // R = 1
                }
                let k = bps.len() - 1;
                RadialConfig::new(m, bps, gs[..k].to_vec(), gamma).unwrap()
            })
    }

    proptest! {
        // −Δv = γ − g_i holds symbolically: 2m·quad = −(γ − g_i)
        #[test]
        fn shell_pde_identity(cfg in arb_config()) {
            let sol = solve_radial(&cfg);
            for (i, s) in sol.shells().iter().enumerate() {
                let f = cfg.gamma() - cfg.densities()[i];
                prop_assert!((2.0 * cfg.dimension() as f64 * s.quad + f).abs() < 1e-15);
            }
        }

        // −r^{m−1} v'(r) equals the cumulative source integral
        #[test]
        fn flux_identity(cfg in arb_config(), seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let sol = solve_radial(&cfg);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..200 {
                let r: f64 = rng.gen_range(1e-6..cfg.outer_radius());
                let lhs = -r.powf(cfg.dimension() as f64 - 1.0) * sol.deriv(r);
                prop_assert!((lhs - sol.flux(r)).abs() < 1e-12,
                    "flux mismatch at r={r}: {lhs} vs {}", sol.flux(r));
            }
        }

        // continuity of v and v' at every breakpoint
        #[test]
        fn c1_continuity_at_breakpoints(cfg in arb_config()) {
            let sol = solve_radial(&cfg);
            let eps = 1e-9;
            for &b in &cfg.breakpoints()[1..cfg.breakpoints().len() - 1] {
                let (vl, vr) = (sol.eval(b - eps), sol.eval(b + eps));
                let (dl, dr) = (sol.deriv(b - eps), sol.deriv(b + eps));
                prop_assert!((vl - vr).abs() < 1e-7);
                prop_assert!((dl - dr).abs() < 1e-6);
            }
            prop_assert!(sol.eval(cfg.outer_radius()).abs() < 1e-14);
        }

        // −(1−γ)·v_torsion ≤ v ≤ γ·v_torsion
        #[test]
        fn sandwich_bound(cfg in arb_config()) {
            let sol = solve_radial(&cfg);
            let tors = solve_radial(&RadialConfig::torsion(cfg.dimension(), cfg.outer_radius()));
            for i in 0..=100 {
                let r = cfg.outer_radius() * i as f64 / 100.0;
                let t = tors.eval(r);
                let v = sol.eval(r);
                prop_assert!(v <= cfg.gamma() * t + 1e-13);
                prop_assert!(v >= -(1.0 - cfg.gamma()) * t - 1e-13);
            }
        }
    }

    #[test]
    fn radial_monotonicity_ball_is_worst() {
        // among radial sets of equal mass, the concentric ball minimizes the
        // solution pointwise
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5157);
        for trial in 0..50 {
            let m = [2u32, 3][trial % 2];
            let gamma = rng.gen_range(0.1..0.9);
            let w = omega_m(m);
            let mass_total = w; // |B_1|
            let c = rng.gen_range(0.05..0.95) * mass_total;

            // random partition with randomized fractional fill of mass c
            let k = rng.gen_range(2..6usize);
            let mut bps = vec![0.0];
            for _ in 0..k {
                bps.push(rng.gen_range(0.01..1.0));
            }
            bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
            *bps.last_mut().unwrap() = 1.0;
            bps.dedup();
            let shells = bps.len() - 1;
            let mut g = vec![0.0; shells];
            let mut order: Vec<usize> = (0..shells).collect();
            for i in (1..order.len()).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            let mut remaining = c;
            for &i in &order {
                let cap = w * (bps[i + 1].powi(m as i32) - bps[i].powi(m as i32));
                let take = remaining.min(cap);
                g[i] = take / cap;
                remaining -= take;
                if remaining <= 0.0 {
                    break;
                }
            }
            let cfg = RadialConfig::new(m, bps, g, gamma).unwrap();
            assert!((cfg.source_mass() - c).abs() < 1e-12 * mass_total.max(1.0));

            let rc = (c / w).powf(1.0 / m as f64);
            let ball = RadialConfig::ball_source(m, 1.0, gamma, rc.min(1.0 - 1e-12)).unwrap();
            let (va, vb) = (solve_radial(&cfg), solve_radial(&ball));
            for i in 0..=100 {
                let r = i as f64 / 100.0;
                assert!(
                    va.eval(r) >= vb.eval(r) - 1e-12,
                    "trial {trial}: v_A({r}) = {} < v_ball({r}) = {}",
                    va.eval(r),
                    vb.eval(r)
                );
            }
        }
    }
}
