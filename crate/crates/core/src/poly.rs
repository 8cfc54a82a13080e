//! Family-agnostic machinery for polynomials of hypergeometric type on a
//! uniform lattice.
//!
//! A family is fixed by `σ(x)` (degree ≤ 2), `τ(x)` (degree ≤ 1), a weight
//! `ρ(x)` obeying the Pearson relation `Δ(σρ) = τρ`, and the coefficients of
//! the three-term recurrence
//!
//! ```text
//! x P_n(x) = α_n P_{n+1}(x) + β_n P_n(x) + γ_n P_{n-1}(x).
//! ```
//!
//! The polynomials used here are monic (`α_n = 1`), which is the
//! normalization under which the raising relation carries the coefficient
//! `λ_{2n}/2n` in front of `P_{n+1}`. The orthonormal functions
//! `φ_n = d_n^{-1} √ρ P_n` turn the difference equation into a symmetric
//! tridiagonal eigenproblem; ladder operators and the factorization of that
//! operator are expressed on `φ_n`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyKind, FamilyParams};
use crate::numeric::{pairwise_sum, Residual};

/// Tail mass allowed when a semi-infinite support is cut at `X_max`.
pub const TAIL_THRESHOLD: f64 = 1e-12;

/// Highest degree covered by the automatic truncation of a semi-infinite
/// support.
pub const AUTO_TRUNCATION_DEGREE: usize = 12;

/// Lattice on which a family lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    /// Points `{0, …, points − 1}`.
    Finite { points: usize },
    /// Points `{0, 1, …}`; sums run over `{0, …, x_max}`.
    SemiInfinite { x_max: usize },
}

impl Support {
    /// Last grid point included in sums.
    pub fn last(&self) -> usize {
        match *self {
            Support::Finite { points } => points - 1,
            Support::SemiInfinite { x_max } => x_max,
        }
    }

    pub fn contains(&self, x: i64) -> bool {
        match *self {
            Support::Finite { points } => x >= 0 && (x as usize) < points,
            Support::SemiInfinite { .. } => x >= 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Support::Finite { .. })
    }
}

/// Recurrence coefficients at one degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recurrence {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Complete data of one polynomial family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteFamily {
    params: FamilyParams,
    sigma: [f64; 3],
    tau: [f64; 2],
    support: Support,
}

impl DiscreteFamily {
    /// Assembles a family from its parameters. Semi-infinite supports are
    /// truncated automatically; see [`auto_truncation`].
    pub(crate) fn from_params(params: FamilyParams) -> Result<Self> {
        params.validate()?;
        let support = match params.points() {
            Some(points) => Support::Finite { points },
            None => Support::SemiInfinite { x_max: 0 },
        };
        let mut family = Self {
            params,
            sigma: params.sigma_coeffs(),
            tau: params.tau_coeffs(),
            support,
        };
        if !support.is_finite() {
            let x_max = auto_truncation(&family, AUTO_TRUNCATION_DEGREE, TAIL_THRESHOLD);
            family.support = Support::SemiInfinite { x_max };
        }
        family.check_invariants()?;
        Ok(family)
    }

    /// Same family with an explicit truncation index. Ignored for finite
    /// supports.
    pub fn with_truncation(&self, x_max: usize) -> Self {
        let mut out = self.clone();
        if !self.support.is_finite() {
            out.support = Support::SemiInfinite { x_max };
        }
        out
    }

    pub fn kind(&self) -> FamilyKind {
        self.params.kind()
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// Coefficients `[c0, c1, c2]` of `σ(x) = c0 + c1 x + c2 x²`.
    pub fn sigma_coeffs(&self) -> [f64; 3] {
        self.sigma
    }

    /// Coefficients `[c0, c1]` of `τ(x) = c0 + c1 x`.
    pub fn tau_coeffs(&self) -> [f64; 2] {
        self.tau
    }

    pub fn sigma(&self, x: f64) -> f64 {
        self.sigma[0] + x * (self.sigma[1] + x * self.sigma[2])
    }

    pub fn tau(&self, x: f64) -> f64 {
        self.tau[0] + self.tau[1] * x
    }

    fn tau_slope(&self) -> f64 {
        self.tau[1]
    }

    fn sigma_second(&self) -> f64 {
        2.0 * self.sigma[2]
    }

    /// `λ_n = −nτ' − n(n−1)σ''/2`.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        n as f64 * self.lambda_over_n(n)
    }

    /// `λ_n / n` as the polynomial `−τ' − (n−1)σ''/2`; at `n = 0` this is
    /// the limiting value.
    pub fn lambda_over_n(&self, n: usize) -> f64 {
        -self.tau_slope() - (n as f64 - 1.0) * self.sigma_second() / 2.0
    }

    /// `λ_{2n} / 2n`, with the same limit at `n = 0`.
    pub fn lambda_2n_over_2n(&self, n: usize) -> f64 {
        self.lambda_over_n(2 * n)
    }

    /// Highest admissible degree; `None` for semi-infinite families.
    pub fn max_degree(&self) -> Option<usize> {
        match self.support {
            Support::Finite { points } => Some(points - 1),
            Support::SemiInfinite { .. } => None,
        }
    }

    pub fn check_degree(&self, n: usize) -> Result<()> {
        match self.max_degree() {
            Some(max) if n > max => Err(Error::Domain(format!(
                "degree {n} exceeds the admissible range 0..={max} of the {} family",
                self.kind()
            ))),
            _ => Ok(()),
        }
    }

    pub fn check_point(&self, x: i64) -> Result<()> {
        if self.support.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "x = {x} lies outside the {} support",
                self.kind()
            )))
        }
    }

    /// Grid points included in sums.
    pub fn grid(&self) -> std::ops::RangeInclusive<i64> {
        0..=self.support.last() as i64
    }

    /// `ln ρ(x)`; `−∞` off the support.
    pub fn ln_weight(&self, x: i64) -> f64 {
        if self.support.contains(x) {
            self.params.ln_weight(x as f64)
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn weight(&self, x: i64) -> f64 {
        self.ln_weight(x).exp()
    }

    pub fn recurrence(&self, n: usize) -> Recurrence {
        self.params.recurrence(n)
    }

    /// `d_{n+1} / d_n = √(γ_{n+1} / α_n)`.
    pub fn norm_ratio(&self, n: usize) -> f64 {
        let next = self.recurrence(n + 1);
        (next.gamma / self.recurrence(n).alpha).sqrt()
    }

    /// `ln d_n` with `d_0 = 1` (weights are normalized to unit mass).
    pub fn ln_norm(&self, n: usize) -> f64 {
        (0..n).map(|k| self.norm_ratio(k).ln()).sum()
    }

    /// `d_n` with `d_n² = Σ ρ P_n²`.
    pub fn norm(&self, n: usize) -> f64 {
        self.ln_norm(n).exp()
    }

    /// Square-root coefficient `√((σ(x)+τ(x))σ(x+1))` coupling `x` and
    /// `x + 1`. Zero when the hop leaves the support.
    pub fn hop(&self, x: i64) -> Result<f64> {
        if !self.support.contains(x) || !self.support.contains(x + 1) {
            return Ok(0.0);
        }
        let xf = x as f64;
        let radicand = (self.sigma(xf) + self.tau(xf)) * self.sigma(xf + 1.0);
        if radicand < 0.0 {
            return Err(Error::NegativeRadicand {
                factor: "(σ(x)+τ(x))·σ(x+1)",
                x,
                value: radicand,
            });
        }
        Ok(radicand.sqrt())
    }

    /// `τ_n(x) = τ(x+n) + σ(x+n) − σ(x)`.
    pub fn tau_n(&self, n: usize, x: f64) -> f64 {
        let nf = n as f64;
        self.tau(x + nf) + self.sigma(x + nf) - self.sigma(x)
    }

    /// Slope of `τ_n`: `τ' + nσ''`.
    pub fn tau_n_slope(&self, n: usize) -> f64 {
        self.tau_slope() + n as f64 * self.sigma_second()
    }

    /// Diagonal coefficient of the raising operator,
    /// `u(x,n) = (λ_n/n) τ_n(x)/τ'_n − σ(x)`.
    pub fn raise_diagonal(&self, n: usize, x: f64) -> f64 {
        self.lambda_over_n(n) * self.tau_n(n, x) / self.tau_n_slope(n) - self.sigma(x)
    }

    /// Diagonal coefficient of the lowering operator.
    pub fn lower_diagonal(&self, n: usize, x: f64) -> f64 {
        let beta = self.recurrence(n).beta;
        -self.lambda_over_n(n) * self.tau_n(n, x) / self.tau_n_slope(n)
            + self.eigenvalue(n)
            + self.lambda_2n_over_2n(n) * (x - beta)
            - self.sigma(x)
            - self.tau(x)
    }

    fn check_invariants(&self) -> Result<()> {
        let last = self.support.last() as i64;
        for x in 1..=last {
            let s = self.sigma(x as f64);
            if s <= 0.0 {
                return Err(Error::Validation(format!("σ({x}) = {s} is not positive")));
            }
        }
        for x in 0..last {
            let xf = x as f64;
            let s = self.sigma(xf) + self.tau(xf);
            if s <= 0.0 {
                return Err(Error::Validation(format!(
                    "σ({x})+τ({x}) = {s} is not positive"
                )));
            }
        }
        if let Some(max) = self.max_degree() {
            for n in 1..=max {
                if self.recurrence(n).gamma <= 0.0 {
                    return Err(Error::Validation(format!("d_{n}² is not positive")));
                }
            }
        }
        Ok(())
    }
}

/// Pearson defect `ρ(x+1)σ(x+1) − ρ(x)(σ(x)+τ(x))` at `x`, relative to the
/// largest of `ρ(x+1)σ(x+1)`, `ρ(x)σ(x)` and `ρ(x)τ(x)`.
pub fn pearson_residual(family: &DiscreteFamily, x: i64) -> f64 {
    let xf = x as f64;
    let here = family.weight(x);
    let terms = [
        family.weight(x + 1) * family.sigma(xf + 1.0),
        -here * family.sigma(xf),
        -here * family.tau(xf),
    ];
    let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    if scale == 0.0 {
        0.0
    } else {
        terms.iter().sum::<f64>().abs() / scale
    }
}

/// `P_n(x)` by forward iteration of the three-term recurrence from
/// `P_0 = 1`. Off-grid `x` is allowed.
pub fn polynomial_eval(family: &DiscreteFamily, n: usize, x: f64) -> Result<f64> {
    family.check_degree(n)?;
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let r = family.recurrence(k);
        let next = ((x - r.beta) * cur - r.gamma * prev) / r.alpha;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `φ_0(x), …, φ_{n_max}(x)` by the orthonormal recurrence. Zero off the
/// support.
///
/// On finite supports the forward recurrence loses accuracy wherever `φ_n(x)`
/// decays with `n`. There the values are taken from the backward recurrence
/// seeded with `φ_M(x) = 0` (`M` the number of points), scaled to agree with
/// the forward values where `|φ_n(x)|` peaks.
pub fn orthonormal_column(family: &DiscreteFamily, n_max: usize, x: i64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if !family.support.contains(x) {
        return out;
    }
    let stitch = match family.support {
        Support::Finite { points } if n_max < points => backward_from_top(family, points, x),
        _ => None,
    };
    let forward_to = stitch.as_ref().map_or(n_max, |b| b.peak.min(n_max));
    let xf = x as f64;
    out[0] = (0.5 * family.ln_weight(x)).exp();
    for n in 0..forward_to {
        let (up, down) = recurrence_links(family, n);
        let below = if n == 0 { 0.0 } else { out[n - 1] };
        out[n + 1] = ((xf - family.recurrence(n).beta) * out[n] - down * below) / up;
    }
    if let Some(b) = stitch.filter(|b| b.peak < n_max) {
        let anchor = out[b.peak];
        for n in b.peak + 1..=n_max {
            out[n] = anchor * b.ratio_to_peak(n);
        }
    }
    out
}

/// `(a_{n+1}, a_n)` of `a_{n+1}φ_{n+1} = (x − β_n)φ_n − a_nφ_{n−1}`.
fn recurrence_links(family: &DiscreteFamily, n: usize) -> (f64, f64) {
    let r = family.recurrence(n);
    let up = r.alpha * family.norm_ratio(n);
    let down = if n == 0 {
        0.0
    } else {
        r.gamma / family.norm_ratio(n - 1)
    };
    (up, down)
}

/// Backward solution with magnitudes kept in range by block rescaling.
struct BackwardColumn {
    values: Vec<f64>,
    /// Power of [`BackwardColumn::RESCALE`] removed from each entry.
    shifts: Vec<i32>,
    peak: usize,
}

impl BackwardColumn {
    const RESCALE: f64 = 1e-150;

    fn ln_abs(&self, n: usize) -> f64 {
        self.values[n].abs().ln() - self.shifts[n] as f64 * Self::RESCALE.ln()
    }

    fn ratio_to_peak(&self, n: usize) -> f64 {
        let shift = self.shifts[n] - self.shifts[self.peak];
        self.values[n] / self.values[self.peak] * Self::RESCALE.powi(shift)
    }
}

fn backward_from_top(family: &DiscreteFamily, points: usize, x: i64) -> Option<BackwardColumn> {
    if points < 2 {
        return None;
    }
    let xf = x as f64;
    let mut values = vec![0.0; points + 1];
    let mut shifts = vec![0; points + 1];
    values[points - 1] = 1.0;
    let mut shift = 0;
    for n in (1..points).rev() {
        let (up, down) = recurrence_links(family, n);
        let next = ((xf - family.recurrence(n).beta) * values[n] - up * values[n + 1]) / down;
        values[n - 1] = next;
        shifts[n - 1] = shift;
        if next.abs() > 1.0 / BackwardColumn::RESCALE {
            values[n - 1] *= BackwardColumn::RESCALE;
            values[n] *= BackwardColumn::RESCALE;
            shift += 1;
            shifts[n - 1] = shift;
            shifts[n] = shift;
        }
    }
    let mut column = BackwardColumn {
        values,
        shifts,
        peak: 0,
    };
    // Below its first maximum the backward solution is itself unstable.
    let peak = (1..points)
        .rev()
        .find(|&n| column.values[n - 1] == 0.0 || column.ln_abs(n - 1) < column.ln_abs(n))
        .unwrap_or(0);
    column.peak = peak;
    Some(column)
}

fn phi(family: &DiscreteFamily, n: usize, x: i64) -> f64 {
    orthonormal_column(family, n, x)[n]
}

/// `φ_n(x)` for `x` on the support.
pub fn orthonormal_eval(family: &DiscreteFamily, n: usize, x: i64) -> Result<f64> {
    family.check_degree(n)?;
    family.check_point(x)?;
    Ok(phi(family, n, x))
}

/// Left side of the symmetric difference equation for `φ_n` at `x`.
pub fn difference_residual(family: &DiscreteFamily, n: usize, x: i64) -> Result<Residual> {
    difference_residual_with_eigenvalue(family, n, x, family.eigenvalue(n))
}

/// As [`difference_residual`] with an explicit eigenvalue in place of `λ_n`.
pub fn difference_residual_with_eigenvalue(
    family: &DiscreteFamily,
    n: usize,
    x: i64,
    lambda: f64,
) -> Result<Residual> {
    family.check_degree(n)?;
    family.check_point(x)?;
    let f = |y: i64| phi(family, n, y);
    Ok(hamiltonian_terms(family, lambda, x, &f)?)
}

/// Terms of `H(x, λ) f = s(x) f(x+1) + s(x−1) f(x−1) − (2σ+τ) f(x) + λ f(x)`.
fn hamiltonian_terms(
    family: &DiscreteFamily,
    lambda: f64,
    x: i64,
    f: &dyn Fn(i64) -> f64,
) -> Result<Residual> {
    let xf = x as f64;
    let fx = f(x);
    let diag = 2.0 * family.sigma(xf) + family.tau(xf);
    Ok(Residual::from_terms(&[
        family.hop(x)? * f(x + 1),
        family.hop(x - 1)? * f(x - 1),
        -diag * fx,
        lambda * fx,
    ]))
}

/// Ladder direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Raise,
    Lower,
}

/// Raising operator `L⁺(x,n)` applied to a grid function.
fn apply_raise(family: &DiscreteFamily, n: usize, x: i64, f: &dyn Fn(i64) -> f64) -> Result<f64> {
    Ok(family.raise_diagonal(n, x as f64) * f(x) + family.hop(x - 1)? * f(x - 1))
}

/// Lowering operator `L⁻(x,n)` applied to a grid function.
fn apply_lower(family: &DiscreteFamily, n: usize, x: i64, f: &dyn Fn(i64) -> f64) -> Result<f64> {
    Ok(family.lower_diagonal(n, x as f64) * f(x) + family.hop(x)? * f(x + 1))
}

/// Coefficient `c` with `L^±(x,n) φ_n = c φ_{n±1}`.
pub fn ladder_coefficient(family: &DiscreteFamily, direction: Direction, n: usize) -> f64 {
    let r = family.recurrence(n);
    match direction {
        Direction::Raise => family.lambda_2n_over_2n(n) * r.alpha * family.norm_ratio(n),
        Direction::Lower if n == 0 => 0.0,
        Direction::Lower => family.lambda_2n_over_2n(n) * r.gamma / family.norm_ratio(n - 1),
    }
}

/// `L^±(x,n) φ_n(x)` evaluated from the difference-operator form.
pub fn ladder_apply(
    family: &DiscreteFamily,
    direction: Direction,
    n: usize,
    x: i64,
) -> Result<f64> {
    family.check_degree(n)?;
    family.check_point(x)?;
    if direction == Direction::Raise {
        family.check_degree(n + 1)?;
    }
    let f = |y: i64| phi(family, n, y);
    match direction {
        Direction::Raise => apply_raise(family, n, x, &f),
        Direction::Lower => apply_lower(family, n, x, &f),
    }
}

/// Right side `c φ_{n±1}(x)` of the ladder relations.
pub fn ladder_target(
    family: &DiscreteFamily,
    direction: Direction,
    n: usize,
    x: i64,
) -> Result<f64> {
    family.check_degree(n)?;
    family.check_point(x)?;
    let c = ladder_coefficient(family, direction, n);
    match direction {
        Direction::Raise => {
            family.check_degree(n + 1)?;
            Ok(c * phi(family, n + 1, x))
        }
        Direction::Lower if n == 0 => Ok(0.0),
        Direction::Lower => Ok(c * phi(family, n - 1, x)),
    }
}

/// Residual of a ladder relation: both operator terms minus `c φ_{n±1}(x)`.
pub fn ladder_residual(
    family: &DiscreteFamily,
    direction: Direction,
    n: usize,
    x: i64,
) -> Result<Residual> {
    family.check_degree(n)?;
    family.check_point(x)?;
    let xf = x as f64;
    let target = ladder_target(family, direction, n, x)?;
    let (diag, hop) = match direction {
        Direction::Raise => (
            family.raise_diagonal(n, xf),
            family.hop(x - 1)? * phi(family, n, x - 1),
        ),
        Direction::Lower => (
            family.lower_diagonal(n, xf),
            family.hop(x)? * phi(family, n, x + 1),
        ),
    };
    Ok(Residual::from_terms(&[
        diag * phi(family, n, x),
        hop,
        -target,
    ]))
}

/// Residual of the orthonormal recurrence
/// `α_n (d_{n+1}/d_n) φ_{n+1} + (β_n − x) φ_n + γ_n (d_{n−1}/d_n) φ_{n−1}`.
pub fn recurrence_residual(family: &DiscreteFamily, n: usize, x: i64) -> Result<Residual> {
    family.check_degree(n)?;
    family.check_point(x)?;
    let top = family.max_degree().map_or(n + 1, |m| m.min(n + 1));
    let col = orthonormal_column(family, top, x);
    let r = family.recurrence(n);
    let up = if top > n {
        r.alpha * family.norm_ratio(n) * col[n + 1]
    } else {
        0.0
    };
    let down = if n > 0 {
        r.gamma / family.norm_ratio(n - 1) * col[n - 1]
    } else {
        0.0
    };
    Ok(Residual::from_terms(&[
        up,
        (r.beta - x as f64) * col[n],
        down,
    ]))
}

/// Ingredients of the ladder operators at one `(x, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderFactors {
    pub tau_n: f64,
    pub tau_n_slope: f64,
    pub mu: f64,
    pub u: f64,
}

/// `μ(n) = (λ_{2n}/2n)(λ_{2n+2}/(2n+2)) α_n γ_{n+1}`.
pub fn factorization_constant(family: &DiscreteFamily, n: usize) -> f64 {
    family.lambda_2n_over_2n(n)
        * family.lambda_2n_over_2n(n + 1)
        * family.recurrence(n).alpha
        * family.recurrence(n + 1).gamma
}

pub fn ladder_factors(family: &DiscreteFamily, n: usize, x: f64) -> LadderFactors {
    LadderFactors {
        tau_n: family.tau_n(n, x),
        tau_n_slope: family.tau_n_slope(n),
        mu: factorization_constant(family, n),
        u: family.raise_diagonal(n, x),
    }
}

/// Operator order in the factorization identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorOrder {
    /// `L⁻(x,n+1) L⁺(x,n) = μ(n) + u(x+1,n) H(x,n)`.
    MinusPlus,
    /// `L⁺(x,n) L⁻(x,n+1) = μ(n) + u(x,n) H(x,n+1)`.
    PlusMinus,
}

/// Residual of a factorization identity applied to `φ_n` at `x`.
pub fn factorization_residual(
    family: &DiscreteFamily,
    n: usize,
    x: i64,
    order: FactorOrder,
) -> Result<Residual> {
    factorization_residual_on(family, n, x, order, 0)
}

/// [`FactorOrder::PlusMinus`] with the multiplier `u(x, n−1)` in front of
/// `H(x, n+1)` as it is usually printed. Fails unless that term vanishes.
pub fn factorization_residual_printed(
    family: &DiscreteFamily,
    n: usize,
    x: i64,
) -> Result<Residual> {
    if n == 0 {
        return Err(Error::Domain("u(x, n−1) needs n ≥ 1".into()));
    }
    factorization_residual_on(family, n, x, FactorOrder::PlusMinus, 1)
}

fn factorization_residual_on(
    family: &DiscreteFamily,
    n: usize,
    x: i64,
    order: FactorOrder,
    u_shift: usize,
) -> Result<Residual> {
    family.check_degree(n)?;
    family.check_point(x)?;
    let f = |y: i64| phi(family, n, y);
    let xf = x as f64;
    let mu = factorization_constant(family, n);
    let fx = f(x);
    let terms = match order {
        FactorOrder::MinusPlus => {
            let g = |y: i64| apply_raise(family, n, y, &f);
            let h = hamiltonian_terms(family, family.eigenvalue(n), x, &f)?.value;
            [
                family.lower_diagonal(n + 1, xf) * g(x)?,
                family.hop(x)? * g(x + 1)?,
                -mu * fx,
                -family.raise_diagonal(n, xf + 1.0) * h,
            ]
        }
        FactorOrder::PlusMinus => {
            let g = |y: i64| apply_lower(family, n + 1, y, &f);
            let h = hamiltonian_terms(family, family.eigenvalue(n + 1), x, &f)?.value;
            [
                family.raise_diagonal(n, xf) * g(x)?,
                family.hop(x - 1)? * g(x - 1)?,
                -mu * fx,
                -family.raise_diagonal(n - u_shift, xf) * h,
            ]
        }
    };
    Ok(Residual::from_terms(&terms))
}

/// Grid values of `φ_0 … φ_{n_max}` over the (truncated) support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalTable {
    pub family: DiscreteFamily,
    pub n_max: usize,
    pub xs: Vec<i64>,
    /// `values[n][i] = φ_n(xs[i])`.
    pub values: Vec<Vec<f64>>,
    /// Mass `Σ_{x > X_max} φ_n(x)²` dropped by the truncation (zero for
    /// finite supports).
    pub tail_mass: Vec<f64>,
}

impl OrthonormalTable {
    pub fn new(family: &DiscreteFamily, n_max: usize) -> Result<Self> {
        family.check_degree(n_max)?;
        let xs: Vec<i64> = family.grid().collect();
        let mut values = vec![Vec::with_capacity(xs.len()); n_max + 1];
        for &x in &xs {
            for (n, v) in orthonormal_column(family, n_max, x).into_iter().enumerate() {
                values[n].push(v);
            }
        }
        let tail_mass = match family.support() {
            Support::Finite { .. } => vec![0.0; n_max + 1],
            Support::SemiInfinite { x_max } => tail_masses(family, n_max, x_max),
        };
        Ok(Self {
            family: family.clone(),
            n_max,
            xs,
            values,
            tail_mass,
        })
    }

    pub fn weights(&self) -> Vec<f64> {
        self.xs.iter().map(|&x| self.family.weight(x)).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        (0..=self.n_max).map(|n| self.family.norm(n)).collect()
    }

    /// `G_{nm} = Σ_x φ_n(x) φ_m(x)`.
    pub fn gram(&self) -> DMatrix<f64> {
        let size = self.n_max + 1;
        DMatrix::from_fn(size, size, |n, m| {
            let products: Vec<f64> = self.values[n]
                .iter()
                .zip(&self.values[m])
                .map(|(a, b)| a * b)
                .collect();
            pairwise_sum(&products)
        })
    }
}

/// Gram matrix of `φ_0 … φ_{n_max}`; rejects truncations that drop more
/// than [`TAIL_THRESHOLD`] of any row's mass.
pub fn gram_matrix(family: &DiscreteFamily, n_max: usize) -> Result<DMatrix<f64>> {
    let table = OrthonormalTable::new(family, n_max)?;
    if let Support::SemiInfinite { x_max } = family.support() {
        let tail = table.tail_mass.iter().cloned().fold(0.0, f64::max);
        if tail > TAIL_THRESHOLD {
            return Err(Error::Truncation {
                x_max,
                tail,
                threshold: TAIL_THRESHOLD,
                suggested: auto_truncation(family, n_max, TAIL_THRESHOLD),
            });
        }
    }
    Ok(table.gram())
}

/// Squared values `max_n φ_n(x)²` from `x = 0` until they are negligible
/// past the bulk of the weight.
fn squared_profile(family: &DiscreteFamily, n_max: usize) -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    let mut peak = 0.0_f64;
    let mut peak_passed = false;
    let mut x = 0_i64;
    loop {
        let sq: Vec<f64> = orthonormal_column(family, n_max, x)
            .into_iter()
            .map(|v| v * v)
            .collect();
        let largest = sq.iter().cloned().fold(0.0, f64::max);
        let rho = family.weight(x);
        if rho < family.weight(x - 1).max(0.0) {
            peak_passed = true;
        }
        peak = peak.max(largest);
        rows.push(sq);
        if (peak_passed && largest < 1e-40 * peak) || largest == 0.0 && x > 0 {
            break;
        }
        x += 1;
        if x > 50_000_000 {
            break;
        }
    }
    rows
}

/// `Σ_{x > x_max} φ_n(x)²` for each `n ≤ n_max`.
pub fn tail_masses(family: &DiscreteFamily, n_max: usize, x_max: usize) -> Vec<f64> {
    let rows = squared_profile(family, n_max);
    (0..=n_max)
        .map(|n| {
            let tail: Vec<f64> = rows.iter().skip(x_max + 1).map(|r| r[n]).collect();
            pairwise_sum(&tail)
        })
        .collect()
}

/// Smallest `X_max` whose dropped tail is below `threshold` for every
/// degree up to `n_max`.
pub fn auto_truncation(family: &DiscreteFamily, n_max: usize, threshold: f64) -> usize {
    let rows = squared_profile(family, n_max);
    let mut tails = vec![0.0; n_max + 1];
    let mut best = rows.len().saturating_sub(1);
    for x in (0..rows.len()).rev() {
        if tails.iter().all(|&t| t < threshold) {
            best = x;
        } else {
            break;
        }
        for (t, v) in tails.iter_mut().zip(&rows[x]) {
            *t += v;
        }
    }
    best
}

/// Symmetric tridiagonal matrix `T` with `T φ_n = λ_n φ_n` over the
/// (truncated) support. Each row is assembled from its own stencil.
pub fn difference_operator(family: &DiscreteFamily) -> Result<DMatrix<f64>> {
    let size = family.support().last() + 1;
    let mut t = DMatrix::zeros(size, size);
    for i in 0..size {
        let x = i as i64;
        let xf = x as f64;
        t[(i, i)] = 2.0 * family.sigma(xf) + family.tau(xf);
        if i > 0 {
            t[(i, i - 1)] = -family.hop(x - 1)?;
        }
        if i + 1 < size {
            t[(i, i + 1)] = -family.hop(x)?;
        }
    }
    Ok(t)
}
