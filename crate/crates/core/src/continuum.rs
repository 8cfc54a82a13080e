//! Continuous-variable limits: Hermite, Laguerre and Gegenbauer functions,
//! hydrogen radial functions and Calogero–Sutherland eigenfunctions, with
//! error measures for the discrete families approaching them.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::families::{make_family, meixner_m, FamilyParams};
use crate::numeric::{derivative, ln_factorial, ln_gamma, pochhammer, second_derivative};
use crate::poly::{ladder_apply, orthonormal_column, polynomial_eval, Direction};

/// Base step for second derivatives (Richardson-extrapolated).
pub const SECOND_DERIVATIVE_STEP: f64 = 1e-3;

/// Step for first derivatives in the ladder checks.
pub const FIRST_DERIVATIVE_STEP: f64 = 1e-5;

/// Substitution carrying a lattice point to the continuum variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingMap {
    /// `x = Np + √(2Npq) s` on `{0, …, N}`.
    KravchukToHermite { p: f64, n: usize },
    /// `γ = α+1`, `μ = 1−h`, `x = s/h`.
    MeixnerToLaguerre { alpha: f64, h: f64 },
    /// `x = N(1+s)/2` for `s ∈ [−1, 1]`.
    HahnToGegenbauer { n: usize },
}

impl ScalingMap {
    /// Unrounded lattice coordinate of `s`.
    pub fn lattice_point(&self, s: f64) -> f64 {
        match *self {
            ScalingMap::KravchukToHermite { p, n } => {
                let n = n as f64;
                n * p + (2.0 * n * p * (1.0 - p)).sqrt() * s
            }
            ScalingMap::MeixnerToLaguerre { h, .. } => s / h,
            ScalingMap::HahnToGegenbauer { n } => n as f64 * (1.0 + s) / 2.0,
        }
    }

    /// Nearest lattice point.
    pub fn nearest(&self, s: f64) -> i64 {
        self.lattice_point(s).round() as i64
    }
}

/// Continuum functions with a defining second-order equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuumFunction {
    Hermite { n: usize },
    Laguerre { n: usize, alpha: f64 },
    Gegenbauer { n: usize, lambda: f64 },
    Hydrogen { nu: usize, l: usize },
    CalogeroSutherland { n: usize, lambda: f64 },
}

impl ContinuumFunction {
    pub fn eval(&self, t: f64) -> Result<f64> {
        match *self {
            ContinuumFunction::Hermite { n } => Ok(hermite_fn(n, t)),
            ContinuumFunction::Laguerre { n, alpha } => laguerre_fn(n, alpha, t),
            ContinuumFunction::Gegenbauer { n, lambda } => gegenbauer(n, lambda, t),
            ContinuumFunction::Hydrogen { nu, l } => hydrogen_radial(nu, l, t),
            ContinuumFunction::CalogeroSutherland { n, lambda } => cs_eigenfunction(n, lambda, t),
        }
    }

    /// Residual of the defining equation at `t`, derivatives by finite
    /// differences.
    pub fn ode_residual(&self, t: f64) -> Result<f64> {
        match *self {
            ContinuumFunction::Hermite { n } => Ok(hermite_ode_residual(n, t)),
            ContinuumFunction::Laguerre { n, alpha } => laguerre_ode_residual(n, alpha, t),
            ContinuumFunction::Gegenbauer { n, lambda } => gegenbauer_ode_residual(n, lambda, t),
            ContinuumFunction::Hydrogen { nu, l } => radial_residual(nu, l, t),
            ContinuumFunction::CalogeroSutherland { n, lambda } => cs_check(n, lambda, &[t]),
        }
    }
}

/// Normalized Hermite function `(2ⁿ n! √π)^{-1/2} e^{−s²/2} H_n(s)`.
pub fn hermite_fn(n: usize, s: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * s * s).exp();
    for k in 0..n {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * s * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `|ψ'' + (2n+1 − s²)ψ|`.
pub fn hermite_ode_residual(n: usize, s: f64) -> f64 {
    let f = |t: f64| hermite_fn(n, t);
    (second_derivative(f, s, SECOND_DERIVATIVE_STEP) + (2.0 * n as f64 + 1.0 - s * s) * f(s)).abs()
}

/// `max_s |c_N K_n(round(x(s))) − ψ_n(s)|` with `c_N = (2Npq)^{1/4}`.
pub fn kravchuk_hermite_error(n: usize, p: f64, size: usize, s_grid: &[f64]) -> Result<f64> {
    let family = make_family(FamilyParams::Kravchuk { p, n: size })?;
    family.check_degree(n)?;
    let map = ScalingMap::KravchukToHermite { p, n: size };
    let outside: Vec<f64> = s_grid
        .iter()
        .copied()
        .filter(|&s| !family.support().contains(map.nearest(s)))
        .collect();
    if !outside.is_empty() {
        return Err(Error::Domain(format!(
            "N = {size}: s values {outside:?} map outside the Kravchuk support"
        )));
    }
    let c = (2.0 * size as f64 * p * (1.0 - p)).powf(0.25);
    Ok(s_grid
        .iter()
        .map(|&s| (c * orthonormal_column(&family, n, map.nearest(s))[n] - hermite_fn(n, s)).abs())
        .fold(0.0, f64::max))
}

/// Deviations of the scaled Kravchuk ladders `(Npq)^{-1/2} c_N L^± K_n`
/// from `(1/√2)(s ∓ d/ds) ψ_n`, maximized over `s_values`.
pub fn kravchuk_ladder_limit_error(
    n: usize,
    p: f64,
    size: usize,
    s_values: &[f64],
) -> Result<(f64, f64)> {
    let family = make_family(FamilyParams::Kravchuk { p, n: size })?;
    let map = ScalingMap::KravchukToHermite { p, n: size };
    let npq = size as f64 * p * (1.0 - p);
    let scale = (2.0 * npq).powf(0.25) / npq.sqrt();
    let psi = |t: f64| hermite_fn(n, t);
    let mut worst = (0.0_f64, 0.0_f64);
    for &s in s_values {
        let x = map.nearest(s);
        let d = derivative(psi, s, FIRST_DERIVATIVE_STEP);
        let create = (s * psi(s) - d) / 2f64.sqrt();
        let annihilate = (s * psi(s) + d) / 2f64.sqrt();
        let up = scale * ladder_apply(&family, Direction::Raise, n, x)?;
        let down = scale * ladder_apply(&family, Direction::Lower, n, x)?;
        worst.0 = worst.0.max((up - create).abs());
        worst.1 = worst.1.max((down - annihilate).abs());
    }
    Ok(worst)
}

fn check_positive(s: f64) -> Result<()> {
    if s > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("argument s = {s} must be positive")))
    }
}

/// Generalized Laguerre polynomial `L_n^α(s)` by its three-term recurrence.
pub fn laguerre_poly(n: usize, alpha: f64, s: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - s) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `ψ_n^α(s) = √(n!/Γ(n+α+1)) e^{−s/2} s^{(α+1)/2} L_n^α(s)`.
pub fn laguerre_fn(n: usize, alpha: f64, s: f64) -> Result<f64> {
    check_positive(s)?;
    if !(alpha > -1.0) {
        return Err(Error::Validation(format!(
            "Laguerre α = {alpha} must exceed −1"
        )));
    }
    let nf = n as f64;
    let ln_pre = 0.5 * (ln_factorial(nf) - ln_gamma(nf + alpha + 1.0)) - 0.5 * s
        + 0.5 * (alpha + 1.0) * s.ln();
    Ok(ln_pre.exp() * laguerre_poly(n, alpha, s))
}

/// `|ψ'' + (ν/s − ¼ − (α²−1)/(4s²)) ψ|` with `ν = n + (α+1)/2`.
pub fn laguerre_ode_residual(n: usize, alpha: f64, s: f64) -> Result<f64> {
    check_positive(s)?;
    let f = |t: f64| laguerre_fn(n, alpha, t).unwrap_or(f64::NAN);
    let nu = n as f64 + 0.5 * (alpha + 1.0);
    let potential = nu / s - 0.25 - (alpha * alpha - 1.0) / (4.0 * s * s);
    Ok((second_derivative(f, s, SECOND_DERIVATIVE_STEP) + potential * f(s)).abs())
}

/// Deviations of the Laguerre raising and lowering actions from
/// `−√((n+1)(n+α+1)) ψ_{n+1}` and `−√(n(n+α)) ψ_{n−1}`.
pub fn laguerre_ladder_residual(n: usize, alpha: f64, s: f64) -> Result<(f64, f64)> {
    check_positive(s)?;
    let psi = |k: usize, t: f64| laguerre_fn(k, alpha, t).unwrap_or(f64::NAN);
    let nf = n as f64;
    let d = derivative(|t| psi(n, t), s, FIRST_DERIVATIVE_STEP);
    let diag = -0.5 * (2.0 * nf + alpha + 1.0 - s) * psi(n, s);
    let raise = diag - s * d + ((nf + 1.0) * (nf + alpha + 1.0)).sqrt() * psi(n + 1, s);
    let below = if n == 0 { 0.0 } else { psi(n - 1, s) };
    let lower = diag + s * d + (nf * (nf + alpha)).sqrt() * below;
    Ok((raise.abs(), lower.abs()))
}

/// `max_s |M_n(round(s/h)) − ψ_n^α(s)|` for the Meixner family with
/// `γ = α+1`, `μ = 1−h`. `M_n` carries the `1/(μ(x+γ))` measure, which
/// converts to `ds/s` with unit constant.
pub fn meixner_laguerre_error(n: usize, alpha: f64, h: f64, s_grid: &[f64]) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Validation(format!("h = {h} must lie in (0, 1)")));
    }
    let family = make_family(FamilyParams::Meixner {
        gamma: alpha + 1.0,
        mu: 1.0 - h,
    })?;
    let map = ScalingMap::MeixnerToLaguerre { alpha, h };
    let last = family.support().last() as i64;
    let mut worst = 0.0_f64;
    for &s in s_grid {
        check_positive(s)?;
        let x = map.nearest(s);
        if x > last {
            return Err(Error::Domain(format!(
                "s = {s} maps beyond X_max = {last} at h = {h}"
            )));
        }
        worst = worst.max((meixner_m(&family, n, x) - laguerre_fn(n, alpha, s)?).abs());
    }
    Ok(worst)
}

/// Hydrogen radial function `u_{νl}(s) = ψ^{2l+1}_{ν−l−1}(s)`.
pub fn hydrogen_radial(nu: usize, l: usize, s: f64) -> Result<f64> {
    if nu == 0 || l >= nu {
        return Err(Error::Domain(format!(
            "need 0 ≤ l < ν, got ν = {nu}, l = {l}"
        )));
    }
    laguerre_fn(nu - l - 1, 2.0 * l as f64 + 1.0, s)
}

/// `|u'' + (ν/s − ¼ − l(l+1)/s²) u|`.
pub fn radial_residual(nu: usize, l: usize, s: f64) -> Result<f64> {
    hydrogen_radial(nu, l, s)?;
    let u = |t: f64| hydrogen_radial(nu, l, t).unwrap_or(f64::NAN);
    let lf = l as f64;
    let potential = nu as f64 / s - 0.25 - lf * (lf + 1.0) / (s * s);
    Ok((second_derivative(u, s, SECOND_DERIVATIVE_STEP) + potential * u(s)).abs())
}

fn gegenbauer_unchecked(n: usize, lambda: f64, s: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let k = k as f64;
        let next = (2.0 * (k + lambda) * s * cur - (k + 2.0 * lambda - 1.0) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Gegenbauer polynomial `C_n^λ(s)` on `[−1, 1]`.
pub fn gegenbauer(n: usize, lambda: f64, s: f64) -> Result<f64> {
    if s.abs() > 1.0 {
        return Err(Error::Domain(format!(
            "Gegenbauer argument s = {s} outside [−1, 1]"
        )));
    }
    Ok(gegenbauer_unchecked(n, lambda, s))
}

/// `|(s²−1) C'' + (2λ+1) s C' − n(n+2λ) C|` at interior `s`.
pub fn gegenbauer_ode_residual(n: usize, lambda: f64, s: f64) -> Result<f64> {
    if s.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "ODE residual needs |s| < 1, got {s}"
        )));
    }
    // The polynomial extends past ±1, so the stencil may leave the interval.
    let c = |t: f64| gegenbauer_unchecked(n, lambda, t);
    let nf = n as f64;
    let d2 = second_derivative(c, s, SECOND_DERIVATIVE_STEP);
    let d1 = derivative(c, s, FIRST_DERIVATIVE_STEP);
    Ok(
        ((s * s - 1.0) * d2 + (2.0 * lambda + 1.0) * s * d1 - nf * (nf + 2.0 * lambda) * c(s))
            .abs(),
    )
}

/// Evenly spaced grid on `[−1, 1]` used by [`hahn_limit_error`].
pub fn default_hahn_grid() -> Vec<f64> {
    (0..=40).map(|i| -1.0 + i as f64 / 20.0).collect()
}

/// Largest deviation of the rescaled symmetric Hahn polynomial from
/// `((λ+½)_n/(2λ)_n) C_n^λ(s)` on [`default_hahn_grid`].
pub fn hahn_limit_error(n: usize, lambda: f64, size: usize) -> Result<f64> {
    hahn_limit_error_on(n, lambda, size, &default_hahn_grid())
}

/// As [`hahn_limit_error`] on a caller-supplied grid. The monic Hahn
/// polynomial is evaluated at `x = N(1+s)/2` (off-grid values allowed) and
/// scaled by `(2/N)ⁿ` times the Jacobi leading coefficient
/// `(n+2λ)_n / (2ⁿ n!)`.
pub fn hahn_limit_error_on(n: usize, lambda: f64, size: usize, s_grid: &[f64]) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Validation(format!("λ = {lambda} must be positive")));
    }
    let family = make_family(FamilyParams::hahn_symmetric(lambda, size))?;
    let map = ScalingMap::HahnToGegenbauer { n: size };
    let nf = n as f64;
    let ln_lead = pochhammer(nf + 2.0 * lambda, n).ln() - nf * 2f64.ln() - ln_factorial(nf);
    let ln_scale = ln_lead + nf * (2.0 / size as f64).ln();
    let jacobi = pochhammer(lambda + 0.5, n) / pochhammer(2.0 * lambda, n);
    let mut worst = 0.0_f64;
    for &s in s_grid {
        let target = jacobi * gegenbauer(n, lambda, s)?;
        let discrete = ln_scale.exp() * polynomial_eval(&family, n, map.lattice_point(s))?;
        worst = worst.max((discrete - target).abs());
    }
    Ok(worst)
}

/// Normalization `d_n` making `ψ_n^λ` unit-norm on `(0, π)`.
pub fn cs_norm(n: usize, lambda: f64) -> f64 {
    let nf = n as f64;
    let ln_integral = PI.ln() + (1.0 - 2.0 * lambda) * 2f64.ln() + ln_gamma(nf + 2.0 * lambda)
        - ln_factorial(nf)
        - (nf + lambda).ln()
        - 2.0 * ln_gamma(lambda);
    (-0.5 * ln_integral).exp()
}

/// Calogero–Sutherland eigenfunction `d_n (sin q)^λ C_n^λ(cos q)`.
pub fn cs_eigenfunction(n: usize, lambda: f64, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < PI) {
        return Err(Error::Domain(format!("q = {q} must lie in (0, π)")));
    }
    Ok(cs_norm(n, lambda) * q.sin().powf(lambda) * gegenbauer_unchecked(n, lambda, q.cos()))
}

/// `max_q |−ψ'' + λ(λ−1)ψ/sin²q − (n+λ)² ψ|` over `q_grid`.
pub fn cs_check(n: usize, lambda: f64, q_grid: &[f64]) -> Result<f64> {
    let energy = (n as f64 + lambda).powi(2);
    let psi = |q: f64| {
        cs_norm(n, lambda) * q.sin().powf(lambda) * gegenbauer_unchecked(n, lambda, q.cos())
    };
    let mut worst = 0.0_f64;
    for &q in q_grid {
        let value = cs_eigenfunction(n, lambda, q)?;
        if q - 2.0 * SECOND_DERIVATIVE_STEP <= 0.0 || q + 2.0 * SECOND_DERIVATIVE_STEP >= PI {
            return Err(Error::Domain(format!(
                "q = {q} too close to the singular endpoints"
            )));
        }
        let potential = lambda * (lambda - 1.0) / q.sin().powi(2);
        let r =
            -second_derivative(psi, q, SECOND_DERIVATIVE_STEP) + potential * value - energy * value;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Observed convergence rates `ln(e_i/e_{i+1}) / ln(size_{i+1}/size_i)`.
pub fn observed_rates(sizes: &[f64], errors: &[f64]) -> Vec<f64> {
    sizes
        .windows(2)
        .zip(errors.windows(2))
        .map(|(s, e)| (e[0] / e[1]).ln() / (s[1] / s[0]).ln())
        .collect()
}
