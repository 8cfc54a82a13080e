//! Concrete families (Kravchuk, Meixner, Charlier, Hahn) and residuals of
//! their family-specific identities.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, ln_gamma, Residual};
use crate::poly::{orthonormal_column, polynomial_eval, DiscreteFamily, Recurrence};

/// Family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Kravchuk,
    Meixner,
    Charlier,
    Hahn,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FamilyKind::Kravchuk => "kravchuk",
            FamilyKind::Meixner => "meixner",
            FamilyKind::Charlier => "charlier",
            FamilyKind::Hahn => "hahn",
        };
        f.write_str(name)
    }
}

/// Raw parameters of a family.
///
/// Kravchuk lives on `{0, …, N}` (degrees `0..=N`), Hahn on `{0, …, N−1}`
/// (degrees `0..N`); Meixner and Charlier are semi-infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FamilyParams {
    Kravchuk {
        p: f64,
        #[serde(rename = "N")]
        n: usize,
    },
    Meixner {
        gamma: f64,
        mu: f64,
    },
    Charlier {
        mu: f64,
    },
    Hahn {
        alpha: f64,
        beta: f64,
        #[serde(rename = "N")]
        n: usize,
    },
}

impl FamilyParams {
    /// Symmetric Hahn parameters `α = β = λ − ½`.
    pub fn hahn_symmetric(lambda: f64, n: usize) -> Self {
        FamilyParams::Hahn {
            alpha: lambda - 0.5,
            beta: lambda - 0.5,
            n,
        }
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            FamilyParams::Kravchuk { .. } => FamilyKind::Kravchuk,
            FamilyParams::Meixner { .. } => FamilyKind::Meixner,
            FamilyParams::Charlier { .. } => FamilyKind::Charlier,
            FamilyParams::Hahn { .. } => FamilyKind::Hahn,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        match *self {
            FamilyParams::Kravchuk { p, n } => {
                if !(p > 0.0 && p < 1.0) {
                    return bad(format!("kravchuk p = {p} must lie in (0, 1)"));
                }
                if n == 0 {
                    return bad("kravchuk N must be positive".into());
                }
            }
            FamilyParams::Meixner { gamma, mu } => {
                if !(gamma > 0.0) {
                    return bad(format!("meixner γ = {gamma} must be positive"));
                }
                if !(mu > 0.0 && mu < 1.0) {
                    return bad(format!("meixner μ = {mu} must lie in (0, 1)"));
                }
            }
            FamilyParams::Charlier { mu } => {
                if !(mu > 0.0) {
                    return bad(format!("charlier μ = {mu} must be positive"));
                }
            }
            FamilyParams::Hahn { alpha, beta, n } => {
                if !(alpha > -1.0 && beta > -1.0) {
                    return bad(format!("hahn α = {alpha}, β = {beta} must exceed −1"));
                }
                if n == 0 {
                    return bad("hahn N must be positive".into());
                }
            }
        }
        Ok(())
    }

    /// Number of support points, `None` when semi-infinite.
    pub fn points(&self) -> Option<usize> {
        match *self {
            FamilyParams::Kravchuk { n, .. } => Some(n + 1),
            FamilyParams::Hahn { n, .. } => Some(n),
            _ => None,
        }
    }

    pub fn sigma_coeffs(&self) -> [f64; 3] {
        match *self {
            FamilyParams::Kravchuk { p, .. } => [0.0, 1.0 - p, 0.0],
            FamilyParams::Meixner { .. } | FamilyParams::Charlier { .. } => [0.0, 1.0, 0.0],
            FamilyParams::Hahn { alpha, n, .. } => [0.0, n as f64 + alpha, -1.0],
        }
    }

    pub fn tau_coeffs(&self) -> [f64; 2] {
        match *self {
            FamilyParams::Kravchuk { p, n } => [n as f64 * p, -1.0],
            FamilyParams::Meixner { gamma, mu } => [mu * gamma, -(1.0 - mu)],
            FamilyParams::Charlier { mu } => [mu, -1.0],
            FamilyParams::Hahn { alpha, beta, n } => {
                [(beta + 1.0) * (n as f64 - 1.0), -(alpha + beta + 2.0)]
            }
        }
    }

    /// `ln ρ(x)` of the unit-mass weight, for `x` on the support.
    pub fn ln_weight(&self, x: f64) -> f64 {
        match *self {
            FamilyParams::Kravchuk { p, n } => {
                let n = n as f64;
                ln_factorial(n) - ln_factorial(x) - ln_factorial(n - x)
                    + x * p.ln()
                    + (n - x) * (1.0 - p).ln()
            }
            FamilyParams::Meixner { gamma, mu } => {
                gamma * (1.0 - mu).ln() + x * mu.ln() + ln_gamma(x + gamma)
                    - ln_factorial(x)
                    - ln_gamma(gamma)
            }
            FamilyParams::Charlier { mu } => -mu + x * mu.ln() - ln_factorial(x),
            FamilyParams::Hahn { alpha, beta, n } => {
                let n = n as f64;
                let ln_mass =
                    ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0) + ln_gamma(alpha + beta + n + 1.0)
                        - ln_gamma(n)
                        - ln_gamma(alpha + beta + 2.0);
                ln_gamma(n + alpha - x) + ln_gamma(beta + 1.0 + x)
                    - ln_factorial(x)
                    - ln_factorial(n - 1.0 - x)
                    - ln_mass
            }
        }
    }

    /// Monic recurrence coefficients at degree `n`.
    pub fn recurrence(&self, n: usize) -> Recurrence {
        let k = n as f64;
        let (beta, gamma) = match *self {
            FamilyParams::Kravchuk { p, n: size } => {
                let q = 1.0 - p;
                let size = size as f64;
                (p * (size - k) + k * q, k * p * q * (size - k + 1.0))
            }
            FamilyParams::Meixner { gamma: g, mu } => {
                let d = 1.0 - mu;
                ((k + mu * (k + g)) / d, k * (k + g - 1.0) * mu / (d * d))
            }
            FamilyParams::Charlier { mu } => (k + mu, k * mu),
            FamilyParams::Hahn {
                alpha,
                beta,
                n: size,
            } => {
                // Standard Hahn data on {0, …, M} with the roles of α and β
                // exchanged relative to the weight above.
                let (a, b, m) = (beta, alpha, size as f64 - 1.0);
                let up = |k: f64| {
                    (k + a + b + 1.0) * (k + a + 1.0) * (m - k)
                        / ((2.0 * k + a + b + 1.0) * (2.0 * k + a + b + 2.0))
                };
                let down = |k: f64| {
                    if k == 0.0 {
                        0.0
                    } else {
                        k * (k + a + b + m + 1.0) * (k + b)
                            / ((2.0 * k + a + b) * (2.0 * k + a + b + 1.0))
                    }
                };
                let gamma = if n == 0 { 0.0 } else { up(k - 1.0) * down(k) };
                (up(k) + down(k), gamma)
            }
        };
        Recurrence {
            alpha: 1.0,
            beta,
            gamma,
        }
    }
}

/// Builds the family for `params`, checking parameter bounds and the
/// positivity conditions of the symmetric difference operator.
pub fn make_family(params: FamilyParams) -> Result<DiscreteFamily> {
    DiscreteFamily::from_params(params)
}

/// Family-specific identities with a residual check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IdentityId {
    /// Kravchuk difference equation.
    KDiff,
    /// Kravchuk recurrence in the degree.
    KRec,
    /// Kravchuk raising operator.
    KRaise,
    /// Kravchuk lowering operator.
    KLower,
    /// `L⁺(x,n−1) L⁻(x,n)` on `K_n`.
    KFactRaiseLower,
    /// `L⁻(x,n+1) L⁺(x,n)` on `K_n`.
    KFactLowerRaise,
    /// Commutator eigenvalue `1 − n/j`.
    KSo3,
    /// Anticommutator eigenvalue `(j(j+1) − (j−n)²)/j`.
    KAnti,
    /// Meixner difference equation in the `M_n` normalization.
    MDiff,
    /// Meixner recurrence.
    MRec,
    /// Meixner raising operator.
    MRaise,
    /// Meixner lowering operator.
    MLower,
    /// Symmetric Hahn difference equation.
    HDiff,
}

impl IdentityId {
    pub const ALL: [IdentityId; 13] = [
        IdentityId::KDiff,
        IdentityId::KRec,
        IdentityId::KRaise,
        IdentityId::KLower,
        IdentityId::KFactRaiseLower,
        IdentityId::KFactLowerRaise,
        IdentityId::KSo3,
        IdentityId::KAnti,
        IdentityId::MDiff,
        IdentityId::MRec,
        IdentityId::MRaise,
        IdentityId::MLower,
        IdentityId::HDiff,
    ];

    pub fn family(&self) -> FamilyKind {
        match self {
            IdentityId::MDiff | IdentityId::MRec | IdentityId::MRaise | IdentityId::MLower => {
                FamilyKind::Meixner
            }
            IdentityId::HDiff => FamilyKind::Hahn,
            _ => FamilyKind::Kravchuk,
        }
    }

    /// Short label, e.g. `K-diff`.
    pub fn label(&self) -> &'static str {
        match self {
            IdentityId::KDiff => "K-diff",
            IdentityId::KRec => "K-rec",
            IdentityId::KRaise => "K-raise",
            IdentityId::KLower => "K-lower",
            IdentityId::KFactRaiseLower => "K-fact+-",
            IdentityId::KFactLowerRaise => "K-fact-+",
            IdentityId::KSo3 => "K-so3",
            IdentityId::KAnti => "K-anti",
            IdentityId::MDiff => "M-diff",
            IdentityId::MRec => "M-rec",
            IdentityId::MRaise => "M-raise",
            IdentityId::MLower => "M-lower",
            IdentityId::HDiff => "H-diff",
        }
    }

    /// Whether the customary printed form of the identity differs from the
    /// one that holds.
    pub fn has_printed_variant(&self) -> bool {
        matches!(
            self,
            IdentityId::KRec
                | IdentityId::KRaise
                | IdentityId::KLower
                | IdentityId::KFactRaiseLower
                | IdentityId::KFactLowerRaise
                | IdentityId::KAnti
                | IdentityId::MRaise
                | IdentityId::HDiff
        )
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Which version of an identity to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Form {
    Corrected,
    Printed,
}

/// Residual of a family identity (in its valid form) at degree `n` and grid
/// point `x`.
pub fn family_identity_residual(
    id: IdentityId,
    params: FamilyParams,
    n: usize,
    x: i64,
) -> Result<Residual> {
    identity_residual(id, &make_family(params)?, n, x, Form::Corrected)
}

/// Residual of the identity with the coefficients as customarily printed:
/// `(x+1)` for `(n+1)` in the Kravchuk recurrence, `pq` for `p` in the
/// Kravchuk ladder diagonals, a commutator in place of the anticommutator,
/// a `+` sign on the Meixner raising result and `2x(N−λ−1)` for
/// `2x(N−x−1)` in the Hahn equation. Identities without a printed variant
/// return the ordinary residual.
pub fn family_identity_residual_printed(
    id: IdentityId,
    params: FamilyParams,
    n: usize,
    x: i64,
) -> Result<Residual> {
    identity_residual(id, &make_family(params)?, n, x, Form::Printed)
}

/// [`family_identity_residual`] on an already constructed family, which
/// keeps the truncation of semi-infinite supports fixed across a sweep.
pub fn identity_residual_in(
    id: IdentityId,
    family: &DiscreteFamily,
    n: usize,
    x: i64,
) -> Result<Residual> {
    identity_residual(id, family, n, x, Form::Corrected)
}

fn identity_residual(
    id: IdentityId,
    family: &DiscreteFamily,
    n: usize,
    x: i64,
    form: Form,
) -> Result<Residual> {
    let params = *family.params();
    if params.kind() != id.family() {
        return Err(Error::Validation(format!(
            "identity {id} belongs to the {} family, got {} parameters",
            id.family(),
            params.kind()
        )));
    }
    family.check_degree(n)?;
    family.check_point(x)?;
    match params {
        FamilyParams::Kravchuk { p, n: size } => kravchuk_identity(id, family, p, size, n, x, form),
        FamilyParams::Meixner { gamma, mu } => meixner_identity(id, family, gamma, mu, n, x, form),
        FamilyParams::Hahn {
            alpha,
            beta,
            n: size,
        } => hahn_identity(family, alpha, beta, size, n, x, form),
        FamilyParams::Charlier { .. } => unreachable!("no Charlier identities"),
    }
}

/// `φ_n(y)` with zero outside the support and beyond the top degree.
fn phi(family: &DiscreteFamily, n: usize, y: i64) -> f64 {
    if family.max_degree().is_some_and(|m| n > m) {
        return 0.0;
    }
    orthonormal_column(family, n, y)[n]
}

struct Kravchuk<'a> {
    family: &'a DiscreteFamily,
    p: f64,
    q: f64,
    size: f64,
    /// Coefficient multiplying `p(x+n−N)`-type diagonals: `p`, or `pq` as printed.
    diag: f64,
}

impl Kravchuk<'_> {
    fn k(&self, n: usize, y: i64) -> f64 {
        phi(self.family, n, y)
    }

    fn back_hop(&self, x: f64) -> f64 {
        (self.p * self.q * (self.size - x + 1.0) * x)
            .max(0.0)
            .sqrt()
    }

    fn fwd_hop(&self, x: f64) -> f64 {
        (self.p * self.q * (self.size - x) * (x + 1.0))
            .max(0.0)
            .sqrt()
    }

    /// Difference-equation operator `H(x,n)` applied to `f`.
    fn hamiltonian(&self, n: usize, x: i64, f: &dyn Fn(i64) -> f64) -> f64 {
        let xf = x as f64;
        self.fwd_hop(xf) * f(x + 1)
            + self.back_hop(xf) * f(x - 1)
            + (xf * (self.p - self.q) - self.size * self.p + n as f64) * f(x)
    }

    fn raise_coeff(&self, n: usize) -> f64 {
        let n = n as f64;
        (self.p * self.q * (self.size - n) * (n + 1.0))
            .max(0.0)
            .sqrt()
    }

    fn lower_coeff(&self, n: usize) -> f64 {
        let n = n as f64;
        (self.p * self.q * (self.size - n + 1.0) * n)
            .max(0.0)
            .sqrt()
    }

    /// Elementary terms of `L⁻(x,n+1) L⁺(x,n) f` at `x`.
    fn lower_raise(&self, n: usize, x: i64, f: &dyn Fn(i64) -> f64) -> [f64; 4] {
        let xf = x as f64;
        let nf = n as f64;
        let outer = self.diag * (xf + nf + 1.0 - self.size);
        let hop = self.fwd_hop(xf);
        [
            outer * self.diag * (xf + nf - self.size) * f(x),
            outer * self.back_hop(xf) * f(x - 1),
            hop * self.diag * (xf + 1.0 + nf - self.size) * f(x + 1),
            hop * self.back_hop(xf + 1.0) * f(x),
        ]
    }

    /// Elementary terms of `L⁺(x,n−1) L⁻(x,n) f` at `x`.
    fn raise_lower(&self, n: usize, x: i64, f: &dyn Fn(i64) -> f64) -> [f64; 4] {
        let xf = x as f64;
        let nf = n as f64;
        let outer = self.diag * (xf + nf - 1.0 - self.size);
        let hop = self.back_hop(xf);
        [
            outer * self.diag * (xf + nf - self.size) * f(x),
            outer * self.fwd_hop(xf) * f(x + 1),
            hop * self.diag * (xf - 1.0 + nf - self.size) * f(x - 1),
            hop * self.fwd_hop(xf - 1.0) * f(x),
        ]
    }
}

fn kravchuk_identity(
    id: IdentityId,
    family: &DiscreteFamily,
    p: f64,
    size: usize,
    n: usize,
    x: i64,
    form: Form,
) -> Result<Residual> {
    let q = 1.0 - p;
    let printed = form == Form::Printed;
    let diag = if printed { p * q } else { p };
    let kr = Kravchuk {
        family,
        p,
        q,
        size: size as f64,
        diag,
    };
    let f = |y: i64| kr.k(n, y);
    let xf = x as f64;
    let nf = n as f64;
    let kn = f(x);
    let need_lower = || {
        if n == 0 {
            Err(Error::Domain(format!("{id} needs n ≥ 1")))
        } else {
            Ok(())
        }
    };
    let terms: Vec<f64> = match id {
        IdentityId::KDiff => vec![
            kr.fwd_hop(xf) * f(x + 1),
            kr.back_hop(xf) * f(x - 1),
            (xf * (p - q) - kr.size * p + nf) * kn,
        ],
        IdentityId::KRec => {
            let up = if printed {
                (p * q * (kr.size - nf) * (xf + 1.0)).max(0.0).sqrt()
            } else {
                kr.raise_coeff(n)
            };
            vec![
                up * kr.k(n + 1, x),
                kr.lower_coeff(n) * if n > 0 { kr.k(n - 1, x) } else { 0.0 },
                (nf * (q - p) + kr.size * p - xf) * kn,
            ]
        }
        IdentityId::KRaise => vec![
            diag * (xf + nf - kr.size) * kn,
            kr.back_hop(xf) * f(x - 1),
            -kr.raise_coeff(n) * kr.k(n + 1, x),
        ],
        IdentityId::KLower => {
            need_lower()?;
            vec![
                diag * (xf + nf - kr.size) * kn,
                kr.fwd_hop(xf) * f(x + 1),
                -kr.lower_coeff(n) * kr.k(n - 1, x),
            ]
        }
        IdentityId::KFactRaiseLower => {
            need_lower()?;
            let mut terms = kr.raise_lower(n, x, &f).to_vec();
            terms.extend([
                -p * q * (kr.size - nf + 1.0) * nf * kn,
                -diag * (xf + nf - 1.0 - kr.size) * kr.hamiltonian(n, x, &f),
            ]);
            terms
        }
        IdentityId::KFactLowerRaise => {
            let mut terms = kr.lower_raise(n, x, &f).to_vec();
            terms.extend([
                -p * q * (kr.size - nf) * (nf + 1.0) * kn,
                -diag * (xf + nf + 1.0 - kr.size) * kr.hamiltonian(n, x, &f),
            ]);
            terms
        }
        IdentityId::KSo3 | IdentityId::KAnti => {
            let (lr, rl) = so3_parts(&kr, n, x)?;
            let j = kr.size / 2.0;
            let scale = kr.size * p * q;
            let (eigen, sign) = if id == IdentityId::KSo3 {
                (1.0 - nf / j, -1.0)
            } else {
                let sign = if printed { -1.0 } else { 1.0 };
                ((j * (j + 1.0) - (j - nf).powi(2)) / j, sign)
            };
            let mut terms: Vec<f64> = lr.iter().map(|t| t / scale).collect();
            terms.extend(rl.iter().map(|t| sign * t / scale));
            terms.push(-eigen * kn);
            terms
        }
        _ => unreachable!(),
    };
    Ok(Residual::from_terms(&terms))
}

/// Elementary terms of `L⁻L⁺K_n` and `L⁺L⁻K_n`.
fn so3_parts(kr: &Kravchuk<'_>, n: usize, x: i64) -> Result<([f64; 4], [f64; 4])> {
    if n == 0 || n as f64 > kr.size - 2.0 {
        return Err(Error::Domain(format!(
            "SO(3) check needs 1 ≤ n ≤ N−2, got n = {n} with N = {}",
            kr.size
        )));
    }
    let f = |y: i64| kr.k(n, y);
    Ok((kr.lower_raise(n, x, &f), kr.raise_lower(n, x, &f)))
}

/// Commutator and anticommutator residuals of the Kravchuk ladder algebra
/// with spin `j = N/2`, relative to the size of `K_n(x)` and the operator
/// terms.
pub fn kravchuk_so3_check(params: FamilyParams, n: usize, x: i64) -> Result<(f64, f64)> {
    let commutator = family_identity_residual(IdentityId::KSo3, params, n, x)?;
    let anticommutator = family_identity_residual(IdentityId::KAnti, params, n, x)?;
    Ok((commutator.relative(), anticommutator.relative()))
}

/// Eigenvalue `(j(j+1) − (j−n)²)/j` of the normalized anticommutator.
pub fn anticommutator_eigenvalue(n: usize, size: usize) -> f64 {
    let j = size as f64 / 2.0;
    let n = n as f64;
    (j * (j + 1.0) - (j - n).powi(2)) / j
}

/// Eigenvalue `1 − n/j` of the normalized commutator.
pub fn commutator_eigenvalue(n: usize, size: usize) -> f64 {
    1.0 - 2.0 * n as f64 / size as f64
}

/// Meixner functions `M_n(x) = (−1)ⁿ √(μ(x+γ)) φ_n(x)`, orthonormal for the
/// measure `1/(μ(x+γ))`.
pub fn meixner_m(family: &DiscreteFamily, n: usize, x: i64) -> f64 {
    let FamilyParams::Meixner { gamma, mu } = *family.params() else {
        return f64::NAN;
    };
    if x < 0 {
        return 0.0;
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * (mu * (x as f64 + gamma)).sqrt() * phi(family, n, x)
}

fn meixner_identity(
    id: IdentityId,
    family: &DiscreteFamily,
    gamma: f64,
    mu: f64,
    n: usize,
    x: i64,
    form: Form,
) -> Result<Residual> {
    let m = |k: usize, y: i64| meixner_m(family, k, y);
    let xf = x as f64;
    let nf = n as f64;
    let diag = -mu * (xf + gamma + nf);
    let fwd = (mu * (xf + gamma) * (xf + 1.0) * (xf + gamma) / (xf + gamma + 1.0)).sqrt();
    let back = (mu * (xf + gamma) * xf).sqrt();
    let up = (mu * (nf + gamma) * (nf + 1.0)).sqrt();
    let down = (mu * (nf + gamma - 1.0) * nf).max(0.0).sqrt();
    let below = |y: i64| if n == 0 { 0.0 } else { m(n - 1, y) };
    let terms = match id {
        IdentityId::MDiff => vec![
            fwd * m(n, x + 1),
            back * m(n, x - 1),
            -(mu * (xf + gamma) + xf - nf * (1.0 - mu)) * m(n, x),
        ],
        IdentityId::MRec => vec![
            -up * m(n + 1, x),
            -down * below(x),
            (mu * xf + mu * nf + mu * gamma + nf - xf) * m(n, x),
        ],
        IdentityId::MRaise => {
            let sign = if form == Form::Printed { -1.0 } else { 1.0 };
            vec![diag * m(n, x), back * m(n, x - 1), sign * up * m(n + 1, x)]
        }
        IdentityId::MLower => vec![diag * m(n, x), fwd * m(n, x + 1), down * below(x)],
        _ => unreachable!(),
    };
    Ok(Residual::from_terms(&terms))
}

fn hahn_identity(
    family: &DiscreteFamily,
    alpha: f64,
    beta: f64,
    size: usize,
    n: usize,
    x: i64,
    form: Form,
) -> Result<Residual> {
    if alpha != beta {
        return Err(Error::Validation(format!(
            "H-diff needs α = β, got α = {alpha}, β = {beta}"
        )));
    }
    let lambda = alpha + 0.5;
    let big = size as f64;
    let xf = x as f64;
    let nf = n as f64;
    let h = |y: f64| polynomial_eval(family, n, y);
    let diag_x = if form == Form::Printed {
        big - lambda - 1.0
    } else {
        big - xf - 1.0
    };
    let terms = [
        (xf * (big - xf - lambda - 1.5) + (lambda + 0.5) * (big - 1.0)) * h(xf + 1.0)?,
        xf * (big + lambda - 0.5 - xf) * h(xf - 1.0)?,
        -(2.0 * xf * diag_x + (lambda + 0.5) * (big - 1.0)) * h(xf)?,
        nf * (nf + 2.0 * lambda) * h(xf)?,
    ];
    Ok(Residual::from_terms(&terms))
}
