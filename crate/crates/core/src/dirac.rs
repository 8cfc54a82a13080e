//! Lattice Dirac operator built from forward differences `Δ_μ` and
//! two-point averages `Δ̃_μ` on a periodic `N⁴` lattice.
//!
//! On a plane wave `exp(−i2π m·n/N)` the ratio `Δ_μ/Δ̃_μ` equals
//! `−2i tan(πm_μ/N)`, so the operator
//! `Σ_μ iγ^μ ε_μ⁻¹ Δ_μ Π_{ν≠μ} Δ̃_ν − m₀c Π_ν Δ̃_ν` has symbol
//! `(γ^μ k_μ − m₀c) Π_ν avg_ν` with `k_μ = (2/ε_μ) tan(πm_μ/N)`. The metric
//! is `diag(+,−,−,−)` and the gamma matrices are in the Dirac
//! representation.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Spinor = Vector4<Complex64>;
pub type Matrix = Matrix4<Complex64>;

const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Lattice size, spacings and mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n: usize,
    pub eps: [f64; 4],
    pub m0c: f64,
}

impl LatticeSpec {
    pub fn new(n: usize, eps: [f64; 4], m0c: f64) -> Result<Self> {
        let spec = Self { n, eps, m0c };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || self.n % 2 != 0 {
            return Err(Error::Validation(format!(
                "lattice size N = {} must be even and at least 4",
                self.n
            )));
        }
        if self.eps.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::Validation(format!(
                "lattice spacings {:?} must be positive",
                self.eps
            )));
        }
        if !(self.m0c >= 0.0) {
            return Err(Error::Validation(format!(
                "mass m0c = {} must be non-negative",
                self.m0c
            )));
        }
        Ok(())
    }
}

/// Dirac-representation gamma matrices `γ^0 … γ^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    pub gamma: [Matrix; 4],
}

impl Default for GammaSet {
    fn default() -> Self {
        Self::dirac()
    }
}

impl GammaSet {
    pub fn dirac() -> Self {
        let z = c(0.0);
        let o = c(1.0);
        let i = Complex64::new(0.0, 1.0);
        #[rustfmt::skip]
        let g0 = Matrix::new(
            o, z, z, z,
            z, o, z, z,
            z, z, -o, z,
            z, z, z, -o,
        );
        #[rustfmt::skip]
        let g1 = Matrix::new(
            z, z, z, o,
            z, z, o, z,
            z, -o, z, z,
            -o, z, z, z,
        );
        #[rustfmt::skip]
        let g2 = Matrix::new(
            z, z, z, -i,
            z, z, i, z,
            z, i, z, z,
            -i, z, z, z,
        );
        #[rustfmt::skip]
        let g3 = Matrix::new(
            z, z, o, z,
            z, z, z, -o,
            -o, z, z, z,
            z, o, z, z,
        );
        Self {
            gamma: [g0, g1, g2, g3],
        }
    }

    /// `γ^5 = iγ^0γ^1γ^2γ^3`.
    pub fn gamma5(&self) -> Matrix {
        let [g0, g1, g2, g3] = &self.gamma;
        g0 * g1 * g2 * g3 * Complex64::new(0.0, 1.0)
    }

    /// `γ^μ k_μ`.
    pub fn slash(&self, k: &[f64; 4]) -> Matrix {
        self.gamma
            .iter()
            .zip(k)
            .fold(Matrix::zeros(), |acc, (g, &kk)| acc + g * c(kk))
    }

    /// Largest entry of `{γ^μ, γ^ν} − 2g^{μν}` over all pairs.
    pub fn clifford_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = self.gamma[mu] * self.gamma[nu] + self.gamma[nu] * self.gamma[mu];
                let target = if mu == nu {
                    Matrix::identity() * c(2.0 * METRIC[mu])
                } else {
                    Matrix::zeros()
                };
                worst = worst.max(max_abs(&(anti - target)));
            }
        }
        worst
    }

    /// Largest entry of `{γ^5, γ^μ k_μ}`.
    pub fn chirality_defect(&self, k: &[f64; 4]) -> f64 {
        let g5 = self.gamma5();
        let s = self.slash(k);
        max_abs(&(g5 * s + s * g5))
    }
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenfactors `(diff, avg)` of `Δ` and `Δ̃` on `exp(−i2πmn/N)`.
pub fn lattice_factors(m: usize, n: usize) -> Result<(Complex64, Complex64)> {
    if m >= n {
        return Err(Error::Domain(format!("mode index {m} outside 0..{n}")));
    }
    if 2 * m == n {
        return Err(Error::Pole { m, n });
    }
    let phase = Complex64::from_polar(1.0, -2.0 * PI * m as f64 / n as f64);
    Ok((phase - 1.0, (phase + 1.0) * 0.5))
}

/// `k = (2/ε) tan(πm/N)`.
pub fn momentum(m: usize, n: usize, eps: f64) -> Result<f64> {
    lattice_factors(m, n)?;
    Ok(2.0 / eps * (PI * m as f64 / n as f64).tan())
}

/// Plane-wave mode with its momenta and spinor.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracMode {
    pub m: [usize; 4],
    pub k: [f64; 4],
    pub spinor: Spinor,
}

impl DiracMode {
    /// Mode with the given spinor (not necessarily on shell).
    pub fn with_spinor(m: [usize; 4], spec: &LatticeSpec, spinor: Spinor) -> Result<Self> {
        let mut k = [0.0; 4];
        for mu in 0..4 {
            k[mu] = momentum(m[mu], spec.n, spec.eps[mu])?;
        }
        Ok(Self { m, k, spinor })
    }

    /// On-shell mode with the spinor from [`spinor_solve`].
    pub fn on_shell(m: [usize; 4], spec: &LatticeSpec, gammas: &GammaSet) -> Result<Self> {
        let mut mode = Self::with_spinor(m, spec, Spinor::zeros())?;
        mode.spinor = spinor_solve(&mode.k, spec.m0c, gammas)?;
        Ok(mode)
    }

    /// `k_μ k^μ`.
    pub fn k_squared(&self) -> f64 {
        self.k.iter().zip(METRIC).map(|(k, g)| g * k * k).sum()
    }
}

/// `|k_μ k^μ − m₀²c²|`.
pub fn dispersion_residual(mode: &DiracMode, spec: &LatticeSpec) -> f64 {
    (mode.k_squared() - spec.m0c * spec.m0c).abs()
}

fn on_shell_scale(k: &[f64; 4], m0c: f64) -> f64 {
    k.iter().map(|v| v * v).sum::<f64>().max(m0c * m0c).max(1.0)
}

/// Whether `k` satisfies the dispersion relation to `1e−9` relative.
pub fn is_on_shell(k: &[f64; 4], m0c: f64) -> bool {
    let k2: f64 = k.iter().zip(METRIC).map(|(k, g)| g * k * k).sum();
    (k2 - m0c * m0c).abs() <= 1e-9 * on_shell_scale(k, m0c)
}

/// Unit spinor `u` with `(γ^μ k_μ − m₀c) u = 0`, taken as the normalized
/// image `(γ^μ k_μ + m₀c) e_j` of the first basis vector that survives.
pub fn spinor_solve(k: &[f64; 4], m0c: f64, gammas: &GammaSet) -> Result<Spinor> {
    if !is_on_shell(k, m0c) {
        return Err(Error::Domain(format!(
            "momentum {k:?} is off shell for m0c = {m0c}"
        )));
    }
    let projector = gammas.slash(k) + Matrix::identity() * c(m0c);
    let scale = max_abs(&projector);
    if scale == 0.0 {
        // Zero momentum and zero mass: every spinor solves the equation.
        return Ok(Spinor::x());
    }
    for j in 0..4 {
        let u = projector.column(j).into_owned();
        let norm = u.norm();
        if norm > 1e-8 * scale {
            return Ok(u / c(norm));
        }
    }
    Err(Error::DegenerateSeed)
}

/// `γ^μ k_μ − m₀c`.
pub fn dirac_symbol(k: &[f64; 4], m0c: f64, gammas: &GammaSet) -> Matrix {
    gammas.slash(k) - Matrix::identity() * c(m0c)
}

/// Number of singular values of `γ^μ k_μ − m₀c` above `1e−9` of the largest.
pub fn symbol_rank(k: &[f64; 4], m0c: f64, gammas: &GammaSet) -> usize {
    let sv = dirac_symbol(k, m0c, gammas).singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s > 1e-9 * top.max(1e-300)).count()
}

fn plane_wave(m: &[usize; 4], n: usize, site: &[i64; 4]) -> Complex64 {
    let phase: f64 = m
        .iter()
        .zip(site)
        .map(|(&mm, &s)| mm as f64 * s.rem_euclid(n as i64) as f64)
        .sum();
    Complex64::from_polar(1.0, -2.0 * PI * phase / n as f64)
}

/// Stencil weights of the operator on the 16 corners of a unit hypercube.
fn corner_weights(spec: &LatticeSpec, gammas: &GammaSet) -> Vec<([i64; 4], Matrix)> {
    (0..16u32)
        .map(|bits| {
            let corner = [0, 1, 2, 3].map(|mu| i64::from(bits >> mu & 1));
            let mut w = Matrix::identity() * c(-spec.m0c / 16.0);
            for mu in 0..4 {
                let sign = if corner[mu] == 1 { 1.0 } else { -1.0 };
                w += gammas.gamma[mu] * Complex64::new(0.0, sign / (8.0 * spec.eps[mu]));
            }
            (corner, w)
        })
        .collect()
}

/// Operator applied to `ψ(n) = f(n) u` at `site`, by the explicit stencil.
pub fn dirac_apply_at(
    mode: &DiracMode,
    spec: &LatticeSpec,
    gammas: &GammaSet,
    site: [i64; 4],
) -> Spinor {
    corner_weights(spec, gammas)
        .into_iter()
        .fold(Spinor::zeros(), |acc, (corner, w)| {
            let shifted = [0, 1, 2, 3].map(|mu| site[mu] + corner[mu]);
            acc + w * mode.spinor * plane_wave(&mode.m, spec.n, &shifted)
        })
}

/// `Π_ν |avg_ν|` for the mode.
pub fn average_product(mode: &DiracMode, spec: &LatticeSpec) -> Result<f64> {
    let mut prod = 1.0;
    for &m in &mode.m {
        prod *= lattice_factors(m, spec.n)?.1.norm();
    }
    Ok(prod)
}

/// Largest spinor component of the operator applied to the plane wave at
/// the origin, divided by `Π |avg_ν|`.
pub fn dirac_residual(mode: &DiracMode, spec: &LatticeSpec, gammas: &GammaSet) -> Result<f64> {
    dirac_residual_at(mode, spec, gammas, [0; 4])
}

/// As [`dirac_residual`] at an arbitrary base site.
pub fn dirac_residual_at(
    mode: &DiracMode,
    spec: &LatticeSpec,
    gammas: &GammaSet,
    site: [i64; 4],
) -> Result<f64> {
    spec.validate()?;
    let avg = average_product(mode, spec)?;
    let out = dirac_apply_at(mode, spec, gammas, site);
    Ok(out.iter().map(|z| z.norm()).fold(0.0, f64::max) / avg)
}

/// Applies the operator to `f(n) u` at every site of the lattice and returns
/// the largest deviation from `f(n) Π avg (γ^μ k_μ − m₀c) u`.
pub fn position_space_check(
    mode: &DiracMode,
    spec: &LatticeSpec,
    gammas: &GammaSet,
) -> Result<f64> {
    spec.validate()?;
    let n = spec.n as i64;
    let mut avg = c(1.0);
    for &m in &mode.m {
        avg *= lattice_factors(m, spec.n)?.1;
    }
    let block = dirac_symbol(&mode.k, spec.m0c, gammas) * mode.spinor * avg;
    let sites = n.pow(4) as usize;
    let field: Vec<Spinor> = (0..sites)
        .map(|idx| mode.spinor * plane_wave(&mode.m, spec.n, &site_of(idx, n)))
        .collect();
    let weights = corner_weights(spec, gammas);
    let mut worst = 0.0_f64;
    for idx in 0..sites {
        let site = site_of(idx, n);
        let mut out = Spinor::zeros();
        for (corner, w) in &weights {
            let neighbor = [0, 1, 2, 3].map(|mu| (site[mu] + corner[mu]).rem_euclid(n));
            out += w * field[index_of(&neighbor, n)];
        }
        let expect = block * plane_wave(&mode.m, spec.n, &site);
        worst = worst.max((out - expect).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(worst)
}

fn site_of(idx: usize, n: i64) -> [i64; 4] {
    let idx = idx as i64;
    [idx % n, idx / n % n, idx / (n * n) % n, idx / (n * n * n)]
}

fn index_of(site: &[i64; 4], n: i64) -> usize {
    (site[0] + n * (site[1] + n * (site[2] + n * site[3]))) as usize
}

/// Single-mode Hamiltonian `Σ_i γ^0γ^i k^i + m₀c γ^0` with `k^i = −k_i`.
pub fn mode_hamiltonian(k_spatial: &[f64; 3], m0c: f64, gammas: &GammaSet) -> Matrix {
    let g0 = gammas.gamma[0];
    let mut h = g0 * c(m0c);
    for i in 0..3 {
        h += g0 * gammas.gamma[i + 1] * c(-k_spatial[i]);
    }
    h
}

/// Cayley transfer matrix `(I − ½iε₀H)^{-1}(I + ½iε₀H)`.
pub fn transfer_matrix(
    k_spatial: &[f64; 3],
    m0c: f64,
    eps0: f64,
    gammas: &GammaSet,
) -> Result<Matrix> {
    let h = mode_hamiltonian(k_spatial, m0c, gammas);
    let half = Complex64::new(0.0, 0.5 * eps0);
    let den = Matrix::identity() - h * half;
    let inv = den.try_inverse().ok_or(Error::StepSize {
        eps: eps0,
        condition: f64::INFINITY,
    })?;
    Ok(inv * (Matrix::identity() + h * half))
}

/// `max |U†U − I|`.
pub fn unitarity_defect(u: &Matrix) -> f64 {
    max_abs(&(u.adjoint() * u - Matrix::identity()))
}

/// Expected eigenphases `±2 arctan(ε₀E/2)`, `E = √(|k|² + m₀²c²)`, sorted.
pub fn transfer_eigenphases(k_spatial: &[f64; 3], m0c: f64, eps0: f64) -> [f64; 4] {
    let e = (k_spatial.iter().map(|k| k * k).sum::<f64>() + m0c * m0c).sqrt();
    let phi = 2.0 * (eps0 * e / 2.0).atan();
    [-phi, -phi, phi, phi]
}

/// Mass that puts mode `m` exactly on shell: `√(k_0² − |k|²)`.
pub fn solve_mass(m: [usize; 4], spec: &LatticeSpec) -> Result<f64> {
    let mode = DiracMode::with_spinor(m, spec, Spinor::zeros())?;
    let k2 = mode.k_squared();
    if k2 < 0.0 {
        return Err(Error::Domain(format!(
            "mode {m:?} is spacelike (k·k = {k2}); no real mass puts it on shell"
        )));
    }
    Ok(k2.sqrt())
}

/// One row of the doubling scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingRow {
    pub m: usize,
    /// Tangent momentum; `None` at the pole `m = N/2`.
    pub k_tan: Option<f64>,
    /// Naive `sin(2πm/N)/ε` for comparison.
    pub k_sin: f64,
}

/// Tabulated momenta of both dispersions with their zero counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingReport {
    pub n: usize,
    pub eps: f64,
    pub rows: Vec<DoublingRow>,
    pub tan_zeros: Vec<usize>,
    pub sin_zeros: Vec<usize>,
    pub injective: bool,
    pub diverges_at_edge: bool,
}

/// Scan `m ∈ {0, …, N−1}` comparing the tangent momenta with the naive sine.
pub fn doubling_scan(n: usize, eps: f64) -> Result<DoublingReport> {
    LatticeSpec::new(n, [eps; 4], 0.0)?;
    let zero_tol = 1e-12 / eps;
    let rows: Vec<DoublingRow> = (0..n)
        .map(|m| DoublingRow {
            m,
            k_tan: momentum(m, n, eps).ok(),
            k_sin: (2.0 * PI * m as f64 / n as f64).sin() / eps,
        })
        .collect();
    let tan_zeros = rows
        .iter()
        .filter(|r| r.k_tan.is_some_and(|k| k.abs() <= zero_tol))
        .map(|r| r.m)
        .collect();
    let sin_zeros = rows
        .iter()
        .filter(|r| r.k_sin.abs() <= zero_tol)
        .map(|r| r.m)
        .collect();
    let values: Vec<f64> = rows.iter().filter_map(|r| r.k_tan).collect();
    let injective = values
        .iter()
        .enumerate()
        .all(|(i, a)| values[i + 1..].iter().all(|b| (a - b).abs() > zero_tol));
    let half = n / 2;
    let abs_k = |m: usize| rows[m].k_tan.map_or(f64::INFINITY, f64::abs);
    let rising = (1..half).all(|m| abs_k(m) > abs_k(m - 1));
    let falling = (half + 1..n - 1).all(|m| abs_k(m) > abs_k(m + 1));
    Ok(DoublingReport {
        n,
        eps,
        rows,
        tan_zeros,
        sin_zeros,
        injective,
        diverges_at_edge: rising && falling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, m0c: f64) -> LatticeSpec {
        LatticeSpec::new(n, [1.0; 4], m0c).unwrap()
    }

    #[test]
    fn factors_examples() {
        assert_eq!(lattice_factors(0, 8).unwrap(), (c(0.0), c(1.0)));
        let (d, a) = lattice_factors(1, 4).unwrap();
        assert!((d - Complex64::new(-1.0, -1.0)).norm() < 1e-15);
        assert!((a - Complex64::new(0.5, -0.5)).norm() < 1e-15);
        assert!((d / a - Complex64::new(0.0, -2.0)).norm() < 1e-15);
        assert!(matches!(
            lattice_factors(4, 8),
            Err(Error::Pole { m: 4, n: 8 })
        ));
    }

    #[test]
    fn half_angle_sweep() {
        for m in (0..8).filter(|&m| m != 4) {
            let (d, a) = lattice_factors(m, 8).unwrap();
            let expect = Complex64::new(0.0, -2.0 * (PI * m as f64 / 8.0).tan());
            assert!((d / a - expect).norm() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn spec_validation() {
        assert!(LatticeSpec::new(2, [1.0; 4], 0.0).is_err());
        assert!(LatticeSpec::new(7, [1.0; 4], 0.0).is_err());
        assert!(LatticeSpec::new(8, [1.0, 0.0, 1.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn clifford_exact() {
        assert_eq!(GammaSet::dirac().clifford_defect(), 0.0);
    }

    #[test]
    fn dispersion_examples() {
        let s0 = spec(8, 0.0);
        let zero = DiracMode::with_spinor([0; 4], &s0, Spinor::x()).unwrap();
        assert_eq!(dispersion_residual(&zero, &s0), 0.0);
        let light = DiracMode::with_spinor([1, 1, 0, 0], &s0, Spinor::x()).unwrap();
        assert!(dispersion_residual(&light, &s0) < 1e-15);
        let m0c = 2.0 * (PI / 8.0).tan();
        let rest = DiracMode::with_spinor([1, 0, 0, 0], &spec(8, m0c), Spinor::x()).unwrap();
        assert!(dispersion_residual(&rest, &spec(8, m0c)) < 1e-15);
    }

    #[test]
    fn rest_frame_spinor() {
        let g = GammaSet::dirac();
        let u = spinor_solve(&[1.5, 0.0, 0.0, 0.0], 1.5, &g).unwrap();
        assert!((u - Spinor::x()).norm() < 1e-15);
    }

    #[test]
    fn massless_spinor_and_rank() {
        let g = GammaSet::dirac();
        let k = [0.8, 0.8, 0.0, 0.0];
        let u = spinor_solve(&k, 0.0, &g).unwrap();
        assert!((dirac_symbol(&k, 0.0, &g) * u).norm() < 1e-12);
        assert_eq!(symbol_rank(&k, 0.0, &g), 2);
        assert!(spinor_solve(&[1.0, 0.0, 0.0, 0.0], 0.5, &g).is_err());
    }

    #[test]
    fn zero_mode_any_spinor() {
        let s = spec(8, 0.0);
        let u = Spinor::new(c(0.3), Complex64::new(0.0, 1.0), c(-2.0), c(0.5));
        let mode = DiracMode::with_spinor([0; 4], &s, u).unwrap();
        assert!(dirac_residual(&mode, &s, &GammaSet::dirac()).unwrap() < 1e-15);
    }

    #[test]
    fn transfer_trivial_and_phases() {
        let g = GammaSet::dirac();
        let u = transfer_matrix(&[0.0; 3], 0.0, 1.0, &g).unwrap();
        assert!(max_abs(&(u - Matrix::identity())) == 0.0);
        let u = transfer_matrix(&[0.0; 3], 2.0, 1.0, &g).unwrap();
        // Diagonal for k = 0: e^{±iπ/2}.
        for (i, sign) in [1.0, 1.0, -1.0, -1.0].into_iter().enumerate() {
            assert!((u[(i, i)].arg() - sign * PI / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_has_on_shell_energy() {
        let g = GammaSet::dirac();
        let s = spec(8, 0.0);
        let m = [3, 1, 1, 0];
        let m0c = solve_mass(m, &s).unwrap();
        let s = spec(8, m0c);
        let mode = DiracMode::on_shell(m, &s, &g).unwrap();
        let h = mode_hamiltonian(&[mode.k[1], mode.k[2], mode.k[3]], m0c, &g);
        assert!((h * mode.spinor - mode.spinor * c(mode.k[0])).norm() < 1e-12);
        assert!(max_abs(&(h - h.adjoint())) < 1e-14);
    }

    #[test]
    fn doubling_small() {
        let r = doubling_scan(8, 1.0).unwrap();
        assert_eq!(r.tan_zeros, vec![0]);
        assert_eq!(r.sin_zeros, vec![0, 4]);
        assert!(r.injective && r.diverges_at_edge);
        assert_eq!(r.rows.iter().filter(|row| row.k_tan.is_some()).count(), 7);
        for m in 1..8 {
            if let (Some(a), Some(b)) = (r.rows[m].k_tan, r.rows[8 - m].k_tan) {
                assert!((a + b).abs() < 1e-14);
            }
        }
    }
}
