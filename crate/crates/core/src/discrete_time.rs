//! Discrete-time Heisenberg dynamics for Hamiltonians that are polynomials
//! in `x = qp + pq`, on a truncated Fock space.
//!
//! Because `[q, P(x)] = (P(x+2i) − P(x)) q`, the implicit midpoint equation
//! for `q` closes on `q` itself and is solved by a Cayley quotient
//! `q_{n+1} = (1 + ½iεC)^{-1} (1 − ½iεC) q_n` with `C = P(x+2i) − P(x)`.
//! The momentum uses the `−2i` shift.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Resolvent condition number above which a step is rejected.
pub const MAX_CONDITION: f64 = 1e12;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// What an [`OperatorMatrix`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorLabel {
    Q,
    P,
    X,
    H,
    Derived,
}

/// Dense truncation of an operator in the number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub label: OperatorLabel,
    pub matrix: CMatrix,
}

impl OperatorMatrix {
    pub fn new(label: OperatorLabel, matrix: CMatrix) -> Self {
        Self { label, matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |A − A†|` over the full matrix.
    pub fn adjoint_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry magnitude in the leading `size × size` block.
pub fn interior_max(m: &CMatrix, size: usize) -> f64 {
    max_abs(&m.view((0, 0), (size, size)).into_owned())
}

/// `H = Σ c_j x^j` with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianPoly {
    coeffs: Vec<f64>,
}

impl HamiltonianPoly {
    /// Coefficients `c_0, c_1, …`; trailing zeros are dropped and the
    /// remaining degree must be at least one.
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Validation(
                "Hamiltonian coefficients must be finite".into(),
            ));
        }
        let len = coeffs.iter().rposition(|&c| c != 0.0).map_or(0, |i| i + 1);
        if len < 2 {
            return Err(Error::Validation(
                "Hamiltonian must have degree ≥ 1 in x = qp + pq".into(),
            ));
        }
        Ok(Self {
            coeffs: coeffs[..len].to_vec(),
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// `P(x + shift·I)` for a matrix argument, by Horner's rule.
    pub fn eval_matrix(&self, x: &CMatrix, shift: Complex64) -> CMatrix {
        let d = x.nrows();
        let arg = x + CMatrix::identity(d, d) * shift;
        let mut acc = CMatrix::zeros(d, d);
        for &c in self.coeffs.iter().rev() {
            acc = &acc * &arg + CMatrix::identity(d, d) * Complex64::from(c);
        }
        acc
    }

    /// Shift generator `P(x + 2i) − P(x)` (`sign = +1`) or `P(x − 2i) − P(x)`
    /// (`sign = −1`).
    pub fn shift_generator(&self, x: &CMatrix, sign: f64) -> CMatrix {
        self.eval_matrix(x, I * (2.0 * sign)) - self.eval_matrix(x, Complex64::new(0.0, 0.0))
    }
}

/// Smallest dimension accepted for a degree-`k` Hamiltonian.
pub fn safe_dimension(k: usize) -> usize {
    6 * k + 8
}

/// Size of the leading block on which degree-`k` identities are exact.
pub fn interior_size(dim: usize, k: usize) -> usize {
    dim - 2 * k - 2
}

fn check_dimension(dim: usize, k: usize) -> Result<()> {
    let need = safe_dimension(k);
    if dim < need {
        Err(Error::Validation(format!(
            "dimension {dim} too small for degree {k}: need D ≥ {need}"
        )))
    } else {
        Ok(())
    }
}

/// Truncated `q`, `p` and `x = qp + pq` on `D` number states.
pub fn fock_ops(dim: usize) -> Result<(OperatorMatrix, OperatorMatrix, OperatorMatrix)> {
    if dim < 4 {
        return Err(Error::Validation(format!(
            "Fock dimension {dim} must be at least 4"
        )));
    }
    let a = CMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::from((j as f64).sqrt())
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let ad = a.adjoint();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&a + &ad) * Complex64::from(r);
    let p = (&ad - &a) * (I * r);
    let x = &q * &p + &p * &q;
    Ok((
        OperatorMatrix::new(OperatorLabel::Q, q),
        OperatorMatrix::new(OperatorLabel::P, p),
        OperatorMatrix::new(OperatorLabel::X, x),
    ))
}

/// Interior residuals of `[q, P(x)] = (P(x+2i) − P(x)) q` and its `p`
/// counterpart, relative to `max |P(x)|`.
pub fn shift_identity_residual(h: &HamiltonianPoly, dim: usize) -> Result<(f64, f64)> {
    let k = h.degree();
    check_dimension(dim, k)?;
    let (q, p, x) = fock_ops(dim)?;
    let px = h.eval_matrix(&x.matrix, Complex64::new(0.0, 0.0));
    let scale = max_abs(&px).max(1.0);
    let m = interior_size(dim, k);
    let side = |a: &CMatrix, sign: f64| {
        let lhs = a * &px - &px * a;
        let rhs = h.shift_generator(&x.matrix, sign) * a;
        interior_max(&(lhs - rhs), m) / scale
    };
    Ok((side(&q.matrix, 1.0), side(&p.matrix, -1.0)))
}

/// Pair `(q_n, p_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergState {
    pub q: CMatrix,
    pub p: CMatrix,
}

impl HeisenbergState {
    pub fn initial(dim: usize) -> Result<Self> {
        let (q, p, _) = fock_ops(dim)?;
        Ok(Self {
            q: q.matrix,
            p: p.matrix,
        })
    }

    pub fn commutator(&self) -> CMatrix {
        &self.q * &self.p - &self.p * &self.q
    }
}

/// Precomputed one-step maps for `q` and `p`.
#[derive(Debug, Clone)]
pub struct CayleyPropagator {
    pub eps: f64,
    uq: CMatrix,
    up: CMatrix,
}

fn cayley(gen: &CMatrix, eps: f64) -> Result<CMatrix> {
    let d = gen.nrows();
    let id = CMatrix::identity(d, d);
    let half = I * (0.5 * eps);
    let den = &id + gen * half;
    let num = &id - gen * half;
    let sv = den.singular_values();
    let (hi, lo) = sv
        .iter()
        .fold((0.0_f64, f64::INFINITY), |(h, l), &s| (h.max(s), l.min(s)));
    let condition = if lo == 0.0 { f64::INFINITY } else { hi / lo };
    if condition > MAX_CONDITION {
        return Err(Error::StepSize { eps, condition });
    }
    let inv = den.try_inverse().ok_or(Error::StepSize {
        eps,
        condition: f64::INFINITY,
    })?;
    Ok(inv * num)
}

impl CayleyPropagator {
    pub fn new(h: &HamiltonianPoly, eps: f64, x: &CMatrix) -> Result<Self> {
        Ok(Self {
            eps,
            uq: cayley(&h.shift_generator(x, 1.0), eps)?,
            up: cayley(&h.shift_generator(x, -1.0), eps)?,
        })
    }

    pub fn step(&self, state: &HeisenbergState) -> HeisenbergState {
        HeisenbergState {
            q: &self.uq * &state.q,
            p: &self.up * &state.p,
        }
    }
}

/// One Cayley step from `state`.
pub fn cayley_step(
    h: &HamiltonianPoly,
    eps: f64,
    state: &HeisenbergState,
) -> Result<HeisenbergState> {
    let (_, _, x) = fock_ops(state.q.nrows())?;
    Ok(CayleyPropagator::new(h, eps, &x.matrix)?.step(state))
}

/// Exact flow `exp(−itC) q_0`, `exp(−itC') p_0` with `C, C'` functions of
/// `x`, evaluated through the spectral decomposition of `x`.
pub fn exact_flow(h: &HamiltonianPoly, t: f64, dim: usize) -> Result<HeisenbergState> {
    let (q, p, x) = fock_ops(dim)?;
    let eig = x.matrix.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let flow = |sign: f64| {
        let diag: Vec<Complex64> = eig
            .eigenvalues
            .iter()
            .map(|&xi| {
                let xi = Complex64::from(xi);
                let c = h.eval(xi + I * (2.0 * sign)) - h.eval(xi);
                (-I * t * c).exp()
            })
            .collect();
        v * CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)) * v.adjoint()
    };
    Ok(HeisenbergState {
        q: flow(1.0) * q.matrix,
        p: flow(-1.0) * p.matrix,
    })
}

/// Outcome of [`evolve_compare`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOutcome {
    pub t: f64,
    pub interior: usize,
    /// Interior max deviation of `q_n` from the exact flow.
    pub deviation: f64,
    /// Same for `p_n`.
    pub deviation_p: f64,
    /// Interior max of `[q_n, p_n] − [q_0, p_0]`.
    pub commutator_drift: f64,
}

/// Iterates [`CayleyPropagator::step`] `steps` times and compares with
/// [`exact_flow`] at `t = steps·ε` on the interior block.
pub fn evolve_compare(
    h: &HamiltonianPoly,
    eps: f64,
    steps: usize,
    dim: usize,
) -> Result<EvolveOutcome> {
    let k = h.degree();
    check_dimension(dim, k)?;
    let t = eps * steps as f64;
    if t.abs() > 2.0 {
        return Err(Error::Validation(format!("total time {t} exceeds 2")));
    }
    let (_, _, x) = fock_ops(dim)?;
    let start = HeisenbergState::initial(dim)?;
    let mut state = start.clone();
    if steps > 0 {
        let prop = CayleyPropagator::new(h, eps, &x.matrix)?;
        for _ in 0..steps {
            state = prop.step(&state);
        }
    }
    let reference = exact_flow(h, t, dim)?;
    let m = interior_size(dim, k);
    Ok(EvolveOutcome {
        t,
        interior: m,
        deviation: interior_max(&(&state.q - &reference.q), m),
        deviation_p: interior_max(&(&state.p - &reference.p), m),
        commutator_drift: interior_max(&(state.commutator() - start.commutator()), m),
    })
}

/// Continuous Hahn polynomial `S_k` from `k S_k = x S_{k−1} − (k−1) S_{k−2}`,
/// `S_0 = 1`, `S_1 = x`.
pub fn hahn_s(k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 1..=k {
        let j = j as f64;
        let next = (x * cur - (j - 1.0) * prev) / j;
        prev = cur;
        cur = next;
    }
    cur
}

/// [`hahn_s`] with a matrix argument.
pub fn hahn_s_matrix(k: usize, x: &CMatrix) -> CMatrix {
    let d = x.nrows();
    let mut prev = CMatrix::zeros(d, d);
    let mut cur = CMatrix::identity(d, d);
    for j in 1..=k {
        let j = j as f64;
        let next = (x * &cur - &prev * Complex64::from(j - 1.0)) / Complex64::from(j);
        prev = cur;
        cur = next;
    }
    cur
}

/// Sum of all distinct orderings of `k` factors `q` and `k` factors `p`.
pub fn symmetrized_product(k: usize, q: &CMatrix, p: &CMatrix) -> CMatrix {
    let d = q.nrows();
    let mut total = CMatrix::zeros(d, d);
    for mask in 0u32..(1 << (2 * k)) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let mut prod = CMatrix::identity(d, d);
        for bit in 0..2 * k {
            prod = if mask >> bit & 1 == 1 {
                prod * q
            } else {
                prod * p
            };
        }
        total += prod;
    }
    total
}

/// Interior residual of `T_{k,k}(q,p) = ((2k)!/(k! 2^k)) S_k(qp + pq)`.
pub fn t_residual(k: usize, dim: usize) -> Result<f64> {
    if k > 3 {
        return Err(Error::Unsupported(format!(
            "symmetrized products limited to k ≤ 3, got {k}"
        )));
    }
    check_dimension(dim, k)?;
    let (q, p, x) = fock_ops(dim)?;
    let t = symmetrized_product(k, &q.matrix, &p.matrix);
    let coeff = (k + 1..=2 * k).map(|j| j as f64).product::<f64>() / 2f64.powi(k as i32);
    let rhs = hahn_s_matrix(k, &x.matrix) * Complex64::from(coeff);
    Ok(interior_max(&(t - rhs), interior_size(dim, k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::from(re)
    }

    #[test]
    fn fock_small_entries() {
        let (q, p, x) = fock_ops(4).unwrap();
        assert!((q.matrix[(0, 1)] - c(std::f64::consts::FRAC_1_SQRT_2)).norm() < 1e-16);
        assert!(q.adjoint_defect() < 1e-14 && p.adjoint_defect() < 1e-14);
        assert!(x.adjoint_defect() < 1e-14);
        assert!(fock_ops(3).is_err());
    }

    #[test]
    fn canonical_commutator_interior() {
        let (q, p, _) = fock_ops(12).unwrap();
        let comm = &q.matrix * &p.matrix - &p.matrix * &q.matrix;
        let target = CMatrix::identity(12, 12) * I;
        assert!(interior_max(&(comm - target), 10) < 1e-12);
    }

    #[test]
    fn x_is_off_diagonal_imaginary() {
        // x = i(a†² − a²): zero diagonal, so the interior trace vanishes.
        let (_, _, x) = fock_ops(10).unwrap();
        let tr: Complex64 = (0..8).map(|i| x.matrix[(i, i)]).sum();
        assert_eq!(tr, c(0.0));
        assert!(x.matrix.iter().all(|z| z.re.abs() < 1e-15));
    }

    #[test]
    fn shift_identity_linear_and_quadratic() {
        let lin = HamiltonianPoly::new(&[0.0, 1.0]).unwrap();
        let (rq, rp) = shift_identity_residual(&lin, 14).unwrap();
        assert!(rq < 1e-14 && rp < 1e-14);
        let quad = HamiltonianPoly::new(&[0.0, 0.0, 1.0]).unwrap();
        let (rq, rp) = shift_identity_residual(&quad, 24).unwrap();
        assert!(rq < 1e-8 && rp < 1e-8);
        assert!(matches!(
            shift_identity_residual(&quad, 19),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn hamiltonian_validation() {
        assert!(HamiltonianPoly::new(&[1.0]).is_err());
        assert!(HamiltonianPoly::new(&[1.0, 0.0]).is_err());
        assert_eq!(HamiltonianPoly::new(&[0.0, 1.0, 0.0]).unwrap().degree(), 1);
    }

    #[test]
    fn zero_step_is_identity() {
        let h = HamiltonianPoly::new(&[0.3, 0.5, 0.2]).unwrap();
        let s = HeisenbergState::initial(24).unwrap();
        let next = cayley_step(&h, 0.0, &s).unwrap();
        assert!(max_abs(&(&next.q - &s.q)) < 1e-15);
    }

    #[test]
    fn dilation_factor_for_linear_hamiltonian() {
        let h = HamiltonianPoly::new(&[0.0, 1.0]).unwrap();
        let s = HeisenbergState::initial(14).unwrap();
        let eps = 0.1;
        let next = cayley_step(&h, eps, &s).unwrap();
        let factor = (1.0 + eps) / (1.0 - eps);
        assert!(max_abs(&(&next.q - &s.q * c(factor))) < 1e-13);
        assert!(max_abs(&(&next.p - &s.p * c(1.0 / factor))) < 1e-13);
    }

    #[test]
    fn singular_step_is_rejected() {
        let h = HamiltonianPoly::new(&[0.0, 1.0]).unwrap();
        let s = HeisenbergState::initial(14).unwrap();
        assert!(matches!(
            cayley_step(&h, 1.0, &s),
            Err(Error::StepSize { .. })
        ));
    }

    #[test]
    fn evolve_zero_steps() {
        let h = HamiltonianPoly::new(&[0.0, 1.0]).unwrap();
        let out = evolve_compare(&h, 0.1, 0, 24).unwrap();
        assert!(out.deviation < 1e-13);
    }

    #[test]
    fn hahn_s_low_orders() {
        for x in [-1.5, 0.0, 0.3, 2.0] {
            assert_eq!(hahn_s(0, x), 1.0);
            assert_eq!(hahn_s(1, x), x);
            assert!((hahn_s(2, x) - (x * x - 1.0) / 2.0).abs() < 1e-15);
            assert_eq!(hahn_s(3, -x), -hahn_s(3, x));
        }
    }

    #[test]
    fn symmetrized_products() {
        assert!(t_residual(1, 14).unwrap() < 1e-13);
        assert!(t_residual(2, 24).unwrap() < 1e-9);
        assert!(matches!(t_residual(4, 40), Err(Error::Unsupported(_))));
    }
}
