//! The `verify` suites. Each builds its parameters first (invalid overrides
//! surface as errors before anything runs), then records one case per
//! property with the worst residual over its sweep.

use std::f64::consts::PI;

use clap::ValueEnum;
use latpoly::continuum::{
    cs_check, gegenbauer_ode_residual, hahn_limit_error, hermite_ode_residual,
    kravchuk_hermite_error, laguerre_ode_residual, meixner_laguerre_error, observed_rates,
    radial_residual,
};
use latpoly::dirac::{
    average_product, dirac_apply_at, dirac_residual, dirac_residual_at, dispersion_residual,
    doubling_scan, momentum, position_space_check, solve_mass, transfer_matrix, unitarity_defect,
    DiracMode, GammaSet, LatticeSpec, Spinor,
};
use latpoly::discrete_time::{
    evolve_compare, fock_ops, max_abs, shift_identity_residual, t_residual, CayleyPropagator,
    HamiltonianPoly, HeisenbergState,
};
use latpoly::families::{family_identity_residual_printed, identity_residual_in};
use latpoly::poly::{
    difference_residual, factorization_residual, factorization_residual_printed, gram_matrix,
    ladder_residual, pearson_residual, recurrence_residual, tail_masses, Direction, FactorOrder,
    AUTO_TRUNCATION_DEGREE,
};
use latpoly::{
    make_family, DiscreteFamily, FamilyKind, FamilyParams, IdentityId, Residual, Support,
};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::report::VerificationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Families,
    Ladders,
    Factorization,
    So3,
    DiscreteTime,
    Dirac,
    Continuum,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Families => "families",
            Suite::Ladders => "ladders",
            Suite::Factorization => "factorization",
            Suite::So3 => "so3",
            Suite::DiscreteTime => "discrete-time",
            Suite::Dirac => "dirac",
            Suite::Continuum => "continuum",
            Suite::All => "all",
        }
    }
}

/// Command-line overrides of the default parameters. `n` is the lattice
/// size of whichever suite runs (Kravchuk and Hahn `N`, the Dirac `N`).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    pub charlier_mu: Option<f64>,
    pub lambda: Option<f64>,
    pub eps: Option<f64>,
    pub dim: Option<usize>,
    pub tol: Option<f64>,
}

impl Overrides {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn kravchuk(&self) -> FamilyParams {
        FamilyParams::Kravchuk {
            p: self.p.unwrap_or(0.5),
            n: self.n.unwrap_or(32),
        }
    }

    fn meixner(&self) -> FamilyParams {
        FamilyParams::Meixner {
            gamma: self.gamma.unwrap_or(1.5),
            mu: self.mu.unwrap_or(0.4),
        }
    }

    fn charlier(&self) -> FamilyParams {
        FamilyParams::Charlier {
            mu: self.charlier_mu.unwrap_or(1.0),
        }
    }

    fn hahn(&self) -> FamilyParams {
        FamilyParams::hahn_symmetric(self.lambda.unwrap_or(1.0), self.n.unwrap_or(32))
    }

    fn all_families(&self) -> latpoly::Result<Vec<DiscreteFamily>> {
        [
            self.kravchuk(),
            self.meixner(),
            self.charlier(),
            self.hahn(),
        ]
        .into_iter()
        .map(make_family)
        .collect()
    }
}

pub fn run(suite: Suite, o: &Overrides) -> latpoly::Result<VerificationReport> {
    match suite {
        Suite::Families => families(o),
        Suite::Ladders => ladders(o),
        Suite::Factorization => factorization(o),
        Suite::So3 => so3(o),
        Suite::DiscreteTime => discrete_time(o),
        Suite::Dirac => dirac(o),
        Suite::Continuum => continuum(o),
        Suite::All => {
            let parts = [
                Suite::Families,
                Suite::Ladders,
                Suite::Factorization,
                Suite::So3,
                Suite::DiscreteTime,
                Suite::Dirac,
                Suite::Continuum,
            ];
            let mut all = VerificationReport::new("all", Map::new());
            for part in parts {
                all.absorb(run(part, o)?);
            }
            Ok(all)
        }
    }
}

fn params_of(families: &[DiscreteFamily]) -> Map<String, Value> {
    let mut map = Map::new();
    for fam in families {
        let mut entry = serde_json::to_value(fam.params()).expect("parameters serialize");
        if let (Value::Object(obj), Support::SemiInfinite { x_max }) = (&mut entry, fam.support()) {
            obj.insert("x_max".into(), json!(x_max));
        }
        map.insert(fam.kind().to_string(), entry);
    }
    map
}

fn degrees(family: &DiscreteFamily) -> std::ops::RangeInclusive<usize> {
    0..=family
        .max_degree()
        .map_or(10, |m| m.saturating_sub(1).min(10))
}

fn interior(family: &DiscreteFamily, reach: i64) -> std::ops::Range<i64> {
    reach..family.support().last() as i64 + 1 - reach
}

/// Largest relative residual over a sweep; an error poisons the result.
fn worst<I, F>(points: I, mut f: F) -> f64
where
    I: IntoIterator<Item = (usize, i64)>,
    F: FnMut(usize, i64) -> latpoly::Result<Residual>,
{
    let mut max = 0.0_f64;
    for (n, x) in points {
        match f(n, x) {
            Ok(r) => max = max.max(r.relative()),
            Err(_) => return f64::NAN,
        }
    }
    max
}

fn sweep(
    degrees: impl Iterator<Item = usize> + Clone,
    xs: std::ops::Range<i64>,
) -> impl Iterator<Item = (usize, i64)> {
    degrees.flat_map(move |n| xs.clone().map(move |x| (n, x)))
}

fn families(o: &Overrides) -> latpoly::Result<VerificationReport> {
    let fams = o.all_families()?;
    let printed = make_family(FamilyParams::Kravchuk { p: 0.5, n: 6 })?;
    let mut report = VerificationReport::new("families", params_of(&fams));

    for fam in &fams {
        let name = fam.kind();
        let pearson = fam
            .grid()
            .map(|x| pearson_residual(fam, x))
            .fold(0.0, f64::max);
        report.check(
            format!("{name}/pearson"),
            format!("{name} weight satisfies the Pearson relation"),
            pearson,
            o.tol(1e-12),
        );
        let n_max = fam.max_degree().unwrap_or(AUTO_TRUNCATION_DEGREE);
        let gram = gram_matrix(fam, n_max).map(|g| {
            let size = g.nrows();
            (0..size)
                .flat_map(|i| (0..size).map(move |j| (i, j)))
                .map(|(i, j)| (g[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
                .fold(0.0, f64::max)
        });
        report.check_result(
            format!("{name}/gram"),
            format!("{name} orthonormal functions have unit Gram matrix"),
            gram,
            o.tol(1e-10),
        );
        if let Support::SemiInfinite { x_max } = fam.support() {
            let tail = tail_masses(fam, n_max, x_max)
                .into_iter()
                .fold(0.0, f64::max);
            report.check(
                format!("{name}/tail"),
                format!("{name} truncation drops negligible mass"),
                tail,
                1e-12,
            );
        }
    }

    for fam in fams.iter().filter(|f| f.kind() != FamilyKind::Charlier) {
        let size = fam.max_degree().unwrap_or(AUTO_TRUNCATION_DEGREE);
        for id in IdentityId::ALL
            .iter()
            .filter(|id| id.family() == fam.kind())
        {
            let low = match id {
                IdentityId::KLower
                | IdentityId::KFactRaiseLower
                | IdentityId::KSo3
                | IdentityId::KAnti => 1,
                _ => 0,
            };
            let top = 10.min(size.saturating_sub(2));
            let r = worst(sweep(low..=top, interior(fam, 1)), |n, x| {
                identity_residual_in(*id, fam, n, x)
            });
            report.check(id.label(), anchor(*id), r, o.tol(1e-9));
        }
    }

    let printed_worst = worst(sweep(1..=1, interior(&printed, 1)), |n, x| {
        family_identity_residual_printed(IdentityId::KRec, *printed.params(), n, x)
    });
    report.check(
        "K-rec/printed-rejected",
        "Kravchuk recurrence with (x+1) in place of (n+1) is detected at N=6, n=1 (ratio 1e-2/residual)",
        1e-2 / printed_worst,
        1.0,
    );
    Ok(report)
}

fn anchor(id: IdentityId) -> &'static str {
    match id {
        IdentityId::KDiff => "Kravchuk difference equation",
        IdentityId::KRec => "Kravchuk three-term recurrence",
        IdentityId::KRaise => "Kravchuk raising operator",
        IdentityId::KLower => "Kravchuk lowering operator",
        IdentityId::KFactRaiseLower => "Kravchuk factorization L+ L-",
        IdentityId::KFactLowerRaise => "Kravchuk factorization L- L+",
        IdentityId::KSo3 => "Kravchuk ladder commutator",
        IdentityId::KAnti => "Kravchuk ladder anticommutator",
        IdentityId::MDiff => "Meixner difference equation",
        IdentityId::MRec => "Meixner three-term recurrence",
        IdentityId::MRaise => "Meixner raising operator",
        IdentityId::MLower => "Meixner lowering operator",
        IdentityId::HDiff => "symmetric Hahn difference equation",
    }
}

fn ladders(o: &Overrides) -> latpoly::Result<VerificationReport> {
    let fams = o.all_families()?;
    let mut report = VerificationReport::new("ladders", params_of(&fams));
    let tol = o.tol(1e-8);
    for fam in &fams {
        let name = fam.kind();
        let points = || sweep(degrees(fam), interior(fam, 1));
        let difference = worst(points(), |n, x| difference_residual(fam, n, x));
        report.check(
            format!("{name}/difference"),
            format!("{name} weighted difference equation"),
            difference,
            tol,
        );
        let recurrence = worst(points(), |n, x| recurrence_residual(fam, n, x));
        report.check(
            format!("{name}/recurrence"),
            format!("{name} orthonormal recurrence"),
            recurrence,
            tol,
        );
        let raise = worst(points(), |n, x| {
            ladder_residual(fam, Direction::Raise, n, x)
        });
        report.check(
            format!("{name}/raise"),
            format!("{name} generic raising operator"),
            raise,
            tol,
        );
        let lower = worst(points(), |n, x| {
            ladder_residual(fam, Direction::Lower, n, x)
        });
        report.check(
            format!("{name}/lower"),
            format!("{name} generic lowering operator"),
            lower,
            tol,
        );
    }
    Ok(report)
}

fn factorization(o: &Overrides) -> latpoly::Result<VerificationReport> {
    let fams = o.all_families()?;
    let mut report = VerificationReport::new("factorization", params_of(&fams));
    let tol = o.tol(1e-8);
    for fam in &fams {
        let name = fam.kind();
        for (order, label) in [
            (FactorOrder::MinusPlus, "minus-plus"),
            (FactorOrder::PlusMinus, "plus-minus"),
        ] {
            let r = worst(sweep(degrees(fam), interior(fam, 2)), |n, x| {
                factorization_residual(fam, n, x, order)
            });
            report.check(
                format!("{name}/{label}"),
                format!("{name} Hamiltonian factorizes as {label} ladder product"),
                r,
                tol,
            );
        }
    }
    let kr = &fams[0];
    let printed = worst(sweep(1..=*degrees(kr).end(), interior(kr, 2)), |n, x| {
        factorization_residual_printed(kr, n, x)
    });
    report.check(
        "kravchuk/plus-minus-printed-rejected",
        "plus-minus factorization with the u(x,n-1) multiplier is detected (ratio 1e-2/residual)",
        1e-2 / printed,
        1.0,
    );
    Ok(report)
}

fn so3(o: &Overrides) -> latpoly::Result<VerificationReport> {
    let size = o.n.unwrap_or(8);
    let params = FamilyParams::Kravchuk {
        p: o.p.unwrap_or(0.5),
        n: size,
    };
    let fam = make_family(params)?;
    if size < 3 {
        return Err(latpoly::Error::Validation(format!(
            "SO(3) checks need N ≥ 3, got {size}"
        )));
    }
    let mut report = VerificationReport::new("so3", params_of(std::slice::from_ref(&fam)));
    report.params.insert("j".into(), json!(size as f64 / 2.0));
    let tol = o.tol(1e-8);
    for n in 1..=size - 2 {
        for (id, label) in [
            (IdentityId::KSo3, "commutator"),
            (IdentityId::KAnti, "anticommutator"),
        ] {
            let r = worst(sweep(n..=n, interior(&fam, 1)), |n, x| {
                identity_residual_in(id, &fam, n, x)
            });
            report.check(
                format!("n{n}/{label}"),
                format!("Kravchuk ladder {label} eigenvalue with j = N/2"),
                r,
                tol,
            );
        }
    }
    Ok(report)
}

fn linear() -> HamiltonianPoly {
    HamiltonianPoly::new(&[0.0, 1.0]).expect("valid polynomial")
}

fn discrete_time(o: &Overrides) -> latpoly::Result<VerificationReport> {
    let dim = o.dim.unwrap_or(24);
    let eps = o.eps.unwrap_or(0.05);
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(latpoly::Error::Validation(format!(
            "step ε = {eps} must lie in (0, 0.5]"
        )));
    }
    let quadratic = HamiltonianPoly::new(&[0.3, 0.5, 0.2])?;
    let affine = HamiltonianPoly::new(&[0.5, 2.0])?;
    shift_identity_residual(&quadratic, dim)?;

    let mut params = Map::new();
    params.insert("dim".into(), json!(dim));
    params.insert("eps".into(), json!(eps));
    params.insert("quadratic_h".into(), json!(quadratic.coeffs()));
    params.insert("affine_h".into(), json!(affine.coeffs()));
    let mut report = VerificationReport::new("discrete-time", params);

    for (k, h) in [(1, &affine), (2, &quadratic)] {
        report.check_result(
            format!("shift/k{k}"),
            format!("shift commutator identity [q, P(x)] = (P(x+2i) - P(x)) q, degree {k}"),
            shift_identity_residual(h, dim).map(|(a, b)| a.max(b)),
            o.tol(1e-8),
        );
    }

    let steps = (1.0 / eps).round() as usize;
    report.check_result(
        "linear/closed-form",
        "H = x iteration equals ((1+eps)/(1-eps))^n q_0",
        linear_closed_form(eps, steps, dim),
        o.tol(1e-12),
    );
    let limit_dev = |e: f64| (((1.0 + e) / (1.0 - e)).powf(1.0 / e) - 2f64.exp()).abs();
    report.check(
        "linear/limit-order",
        "H = x dilation factor approaches e^{2t} at second order (|ratio - 4| on halving eps, t = 1)",
        (limit_dev(eps) / limit_dev(eps / 2.0) - 4.0).abs(),
        1.0,
    );
    let order = |h: &HamiltonianPoly, t: f64, step: f64| -> latpoly::Result<f64> {
        let coarse = evolve_compare(h, step, (t / step).round() as usize, dim)?;
        let fine = evolve_compare(h, step / 2.0, (2.0 * t / step).round() as usize, dim)?;
        Ok((coarse.deviation / fine.deviation - 4.0).abs())
    };
    report.check_result(
        "evolve/order-linear",
        "Cayley iteration error falls fourfold when eps halves (H = x, t = 1)",
        order(&linear(), 1.0, eps),
        1.0,
    );
    report.check_result(
        "evolve/order-quadratic",
        "Cayley iteration error falls fourfold from eps/2 to eps/4 (quadratic H, t = 0.1)",
        order(&quadratic, 0.1, eps / 2.0),
        1.0,
    );
    for (label, h) in [("linear", linear()), ("affine", affine.clone())] {
        report.check_result(
            format!("commutator/{label}"),
            format!("interior [q_n, p_n] preserved over 50 steps ({label} H)"),
            evolve_compare(&h, eps, 50.min((2.0 / eps) as usize), dim).map(|r| r.commutator_drift),
            o.tol(1e-10),
        );
    }
    report.check_result(
        "hermiticity/affine",
        "q_n and p_n stay Hermitian for affine H",
        hermiticity_after(&affine, eps, 50, dim),
        o.tol(1e-10),
    );

    for k in 1..=3 {
        let d = if k == 3 { dim.max(26) } else { dim };
        report.check_result(
            format!("T{k}{k}"),
            format!(
                "symmetrized product T_{{{k},{k}}} is proportional to S_{k}(qp + pq) (D = {d})"
            ),
            t_residual(k, d),
            o.tol(1e-9),
        );
    }
    Ok(report)
}

fn linear_closed_form(eps: f64, steps: usize, dim: usize) -> latpoly::Result<f64> {
    let (_, _, x) = fock_ops(dim)?;
    let prop = CayleyPropagator::new(&linear(), eps, &x.matrix)?;
    let start = HeisenbergState::initial(dim)?;
    let mut state = start.clone();
    for _ in 0..steps {
        state = prop.step(&state);
    }
    let factor = ((1.0 + eps) / (1.0 - eps)).powi(steps as i32);
    let dq =
        max_abs(&(&state.q - &start.q * Complex64::from(factor))) / (factor * max_abs(&start.q));
    let dp = max_abs(&(&state.p - &start.p * Complex64::from(1.0 / factor)))
        / (max_abs(&start.p) / factor);
    Ok(dq.max(dp))
}

fn hermiticity_after(
    h: &HamiltonianPoly,
    eps: f64,
    steps: usize,
    dim: usize,
) -> latpoly::Result<f64> {
    let (_, _, x) = fock_ops(dim)?;
    let prop = CayleyPropagator::new(h, eps, &x.matrix)?;
    let mut state = HeisenbergState::initial(dim)?;
    for _ in 0..steps {
        state = prop.step(&state);
    }
    let defect = |m: &latpoly::discrete_time::CMatrix| max_abs(&(m - m.adjoint())) / max_abs(m);
    Ok(defect(&state.q).max(defect(&state.p)))
}

fn mode_id(m: [usize; 4]) -> String {
    format!("{}{}{}{}", m[0], m[1], m[2], m[3])
}

fn dirac(o: &Overrides) -> latpoly::Result<VerificationReport> {
    let n = o.n.unwrap_or(8);
    let eps = o.eps.unwrap_or(1.0);
    let base = LatticeSpec::new(n, [eps; 4], 0.0)?;
    let gammas = GammaSet::dirac();
    let tol = o.tol(1e-12);

    let mut params = Map::new();
    params.insert("N".into(), json!(n));
    params.insert("eps".into(), json!(eps));
    let mut report = VerificationReport::new("dirac", params);

    report.check(
        "clifford",
        "gamma matrices satisfy the Clifford algebra",
        gammas.clifford_defect(),
        1e-14,
    );

    let modes = [[1, 0, 0, 0], [2, 1, 0, 0], [3, 1, 1, 0], [1, 1, 0, 0]];
    for m in modes {
        let id = mode_id(m);
        let outcome = (|| -> latpoly::Result<(f64, f64)> {
            let spec = LatticeSpec {
                m0c: solve_mass(m, &base)?,
                ..base
            };
            let mode = DiracMode::on_shell(m, &spec, &gammas)?;
            let scale = mode.k.iter().map(|k| k * k).sum::<f64>().max(1.0);
            Ok((
                dispersion_residual(&mode, &spec) / scale,
                dirac_residual(&mode, &spec, &gammas)?,
            ))
        })();
        report.check_result(
            format!("mode-{id}/dispersion"),
            format!("tangent momenta of mode {id} satisfy k.k = m0^2 c^2"),
            outcome.as_ref().map(|r| r.0).map_err(|_| ()),
            tol,
        );
        report.check_result(
            format!("mode-{id}/plane-wave"),
            format!("on-shell plane wave {id} annihilated by the lattice Dirac operator"),
            outcome.as_ref().map(|r| r.1).map_err(|_| ()),
            tol,
        );
    }

    let rest = [1, 0, 0, 0];
    let perturbed = (|| -> latpoly::Result<f64> {
        let m0c = solve_mass(rest, &base)?;
        let spec = LatticeSpec { m0c, ..base };
        let mode = DiracMode::on_shell(rest, &spec, &gammas)?;
        let off = LatticeSpec {
            m0c: 1.1 * m0c,
            ..base
        };
        let out = dirac_apply_at(&mode, &off, &gammas, [0; 4]);
        let r = out.norm() / average_product(&mode, &off)?;
        Ok((r / (0.1 * m0c) - 1.0).abs())
    })();
    report.check_result(
        "mass-perturbation",
        "10% mass error gives plane-wave residual 0.1 m0c (relative deviation)",
        perturbed,
        0.2,
    );

    let translation = (|| -> latpoly::Result<f64> {
        let spec = LatticeSpec { m0c: 0.37, ..base };
        let spinor = Spinor::new(
            c(1.0),
            Complex64::new(0.0, 0.5),
            c(-0.25),
            Complex64::new(0.1, 0.2),
        );
        let mode = DiracMode::with_spinor([3, 1, 1, 0], &spec, spinor)?;
        let origin = dirac_residual(&mode, &spec, &gammas)?;
        let mut worst = 0.0_f64;
        for site in [[1, 0, 0, 0], [0, 2, 1, 0], [3, 3, 3, 3], [5, 1, 7, 2]] {
            worst = worst.max((dirac_residual_at(&mode, &spec, &gammas, site)? - origin).abs());
        }
        Ok(worst / origin.max(1.0))
    })();
    report.check_result(
        "translation-invariance",
        "plane-wave residual is the same at every base site",
        translation,
        tol,
    );

    let unitarity = (|| -> latpoly::Result<f64> {
        let m0c = solve_mass(rest, &base)?;
        let ms: Vec<usize> = (0..n).filter(|&m| 2 * m != n).collect();
        let mut worst = 0.0_f64;
        for &a in &ms {
            for &b in &ms {
                for &d in &ms {
                    let k = [
                        momentum(a, n, eps)?,
                        momentum(b, n, eps)?,
                        momentum(d, n, eps)?,
                    ];
                    worst = worst.max(unitarity_defect(&transfer_matrix(&k, m0c, eps, &gammas)?));
                }
            }
        }
        Ok(worst)
    })();
    report.check_result(
        "transfer-unitarity",
        "Cayley transfer matrix is unitary for every spatial mode",
        unitarity,
        tol,
    );

    let chirality = (|| -> latpoly::Result<f64> {
        let ms: Vec<usize> = (0..n).filter(|&m| 2 * m != n).collect();
        let mut worst = 0.0_f64;
        for &a in &ms {
            for &b in &ms {
                let (ka, kb) = (momentum(a, n, eps)?, momentum(b, n, eps)?);
                let k = [ka, kb, kb - ka, 0.5 * ka];
                worst = worst.max(gammas.chirality_defect(&k));
            }
        }
        Ok(worst)
    })();
    report.check_result(
        "chirality",
        "gamma5 anticommutes with the massless symbol",
        chirality,
        1e-14,
    );

    let scan = doubling_scan(n, eps)?;
    report.check(
        "doubling/tan-zeros",
        "tangent dispersion has exactly one zero (|count - 1|)",
        (scan.tan_zeros.len() as f64 - 1.0).abs(),
        0.0,
    );
    report.check(
        "doubling/sin-zeros",
        "sine dispersion has exactly two zeros (|count - 2|)",
        (scan.sin_zeros.len() as f64 - 2.0).abs(),
        0.0,
    );
    report.check(
        "doubling/injective",
        "tangent momenta are distinct across the zone",
        if scan.injective { 0.0 } else { 1.0 },
        0.0,
    );
    report.check(
        "doubling/edge",
        "tangent momentum grows toward the zone edge",
        if scan.diverges_at_edge { 0.0 } else { 1.0 },
        0.0,
    );

    let position = (|| -> latpoly::Result<f64> {
        let spec = LatticeSpec::new(4, [eps, 0.8 * eps, 1.3 * eps, eps], 0.7)?;
        let spinor = Spinor::new(
            Complex64::new(0.3, -0.1),
            c(0.9),
            Complex64::new(0.0, 0.4),
            c(-0.2),
        );
        let mode = DiracMode::with_spinor([1, 3, 0, 1], &spec, spinor)?;
        position_space_check(&mode, &spec, &gammas)
    })();
    report.check_result(
        "position-space",
        "full-grid stencil on N = 4 agrees with the momentum block",
        position,
        tol,
    );
    Ok(report)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(0, 1)`-interior grid for the ODE checks.
fn grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Count of consecutive pairs that fail to decrease strictly.
fn non_decreasing_steps(errors: &[f64]) -> f64 {
    errors.windows(2).filter(|w| !(w[1] < w[0])).count() as f64
}

pub const HERMITE_SIZES: [usize; 3] = [256, 1024, 4096];
pub const HAHN_SIZES: [usize; 3] = [256, 1024, 4096];
pub const LAGUERRE_STEPS: [f64; 3] = [1e-2, 2.5e-3, 6.25e-4];

/// `s ∈ [−3, 3]` with spacing 0.01.
pub fn hermite_grid() -> Vec<f64> {
    grid(-3.0, 3.0, 601)
}

/// `s ∈ [0.5, 4]` with spacing 0.05.
pub fn laguerre_grid() -> Vec<f64> {
    grid(0.5, 4.0, 71)
}

fn continuum(o: &Overrides) -> latpoly::Result<VerificationReport> {
    let p = o.p.unwrap_or(0.5);
    let alpha = 1.0;
    let mut params = Map::new();
    params.insert("kravchuk_p".into(), json!(p));
    params.insert("kravchuk_sizes".into(), json!(HERMITE_SIZES));
    params.insert("hahn_lambda".into(), json!(o.lambda.unwrap_or(1.0)));
    params.insert("hahn_sizes".into(), json!(HAHN_SIZES));
    params.insert("laguerre_alpha".into(), json!(alpha));
    params.insert("meixner_h".into(), json!(LAGUERRE_STEPS));
    make_family(FamilyParams::Kravchuk {
        p,
        n: HERMITE_SIZES[0],
    })?;
    let mut report = VerificationReport::new("continuum", params);
    let tol = o.tol(1e-6);

    let worst_of = |values: Vec<latpoly::Result<f64>>| -> f64 {
        values
            .into_iter()
            .try_fold(0.0_f64, |m, v| v.map(|v| m.max(v)))
            .unwrap_or(f64::NAN)
    };
    for n in 0..=3 {
        let r = grid(-4.0, 4.0, 81)
            .into_iter()
            .map(|s| Ok(hermite_ode_residual(n, s)))
            .collect();
        report.check(
            format!("ode/hermite-n{n}"),
            "Hermite function oscillator equation",
            worst_of(r),
            tol,
        );
        for a in [1.0, 2.0] {
            let r = grid(0.2, 12.0, 60)
                .into_iter()
                .map(|s| laguerre_ode_residual(n, a, s))
                .collect();
            report.check(
                format!("ode/laguerre-n{n}-alpha{a}"),
                "Laguerre function radial equation",
                worst_of(r),
                tol,
            );
        }
        for lambda in [1.0, 2.0] {
            let r = grid(-0.95, 0.95, 39)
                .into_iter()
                .map(|s| gegenbauer_ode_residual(n, lambda, s))
                .collect();
            report.check(
                format!("ode/gegenbauer-n{n}-lambda{lambda}"),
                "Gegenbauer differential equation",
                worst_of(r),
                tol,
            );
            report.check_result(
                format!("ode/calogero-sutherland-n{n}-lambda{lambda}"),
                "Calogero-Sutherland eigenvalue equation with E = (n + lambda)^2",
                cs_check(n, lambda, &grid(0.05, PI - 0.05, 60)),
                tol,
            );
        }
    }
    for (nu, l) in [(1, 0), (2, 0), (2, 1)] {
        let r = grid(0.2, 20.0, 100)
            .into_iter()
            .map(|s| radial_residual(nu, l, s))
            .collect();
        report.check(
            format!("ode/hydrogen-{nu}{l}"),
            "hydrogen radial equation",
            worst_of(r),
            tol,
        );
    }

    let sizes: Vec<f64> = HERMITE_SIZES.iter().map(|&s| s as f64).collect();
    let hgrid = hermite_grid();
    for n in 0..=5 {
        let errors: latpoly::Result<Vec<f64>> = HERMITE_SIZES
            .iter()
            .map(|&size| kravchuk_hermite_error(n, p, size, &hgrid))
            .collect();
        report.check_result(
            format!("limit/hermite-n{n}/monotone"),
            "Kravchuk to Hermite error decreases with N (non-decreasing steps)",
            errors
                .as_ref()
                .map(|e| non_decreasing_steps(e))
                .map_err(|_| ()),
            0.0,
        );
        report.check_result(
            format!("limit/hermite-n{n}/rate"),
            "Kravchuk to Hermite convergence rate 0.5 (|rate - 0.5|)",
            errors.map(|e| (overall_rate(&sizes, &e) - 0.5).abs()),
            0.15,
        );
    }

    let lambda = o.lambda.unwrap_or(1.0);
    for n in 0..=5 {
        let errors: latpoly::Result<Vec<f64>> = HAHN_SIZES
            .iter()
            .map(|&size| hahn_limit_error(n, lambda, size))
            .collect();
        let (id, anchor, value) = if n == 0 {
            (
                "exact",
                "Hahn to Gegenbauer error is at rounding level for the constant",
                errors.map(|e| e.into_iter().fold(0.0, f64::max)),
            )
        } else {
            (
                "monotone",
                "Hahn to Gegenbauer error decreases with N (non-decreasing steps)",
                errors.map(|e| non_decreasing_steps(&e)),
            )
        };
        let tol = if n == 0 { 1e-15 } else { 0.0 };
        report.check_result(format!("limit/gegenbauer-n{n}/{id}"), anchor, value, tol);
    }

    let inverse: Vec<f64> = LAGUERRE_STEPS.iter().map(|h| 1.0 / h).collect();
    let lgrid = laguerre_grid();
    for n in 0..=3 {
        let errors: latpoly::Result<Vec<f64>> = LAGUERRE_STEPS
            .iter()
            .map(|&h| meixner_laguerre_error(n, alpha, h, &lgrid))
            .collect();
        report.check_result(
            format!("limit/laguerre-n{n}/monotone"),
            "Meixner to Laguerre error decreases as h shrinks (non-decreasing steps)",
            errors
                .as_ref()
                .map(|e| non_decreasing_steps(e))
                .map_err(|_| ()),
            0.0,
        );
        report.check_result(
            format!("limit/laguerre-n{n}/rate"),
            "Meixner to Laguerre convergence rate in h (|rate - 1|)",
            errors.map(|e| (overall_rate(&inverse, &e) - 1.0).abs()),
            0.5,
        );
    }
    Ok(report)
}

/// Rate fitted between the first and last size.
pub fn overall_rate(sizes: &[f64], errors: &[f64]) -> f64 {
    let last = sizes.len() - 1;
    observed_rates(&[sizes[0], sizes[last]], &[errors[0], errors[last]])[0]
}
