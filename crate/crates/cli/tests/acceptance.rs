//! Acceptance criteria, one line each. Every criterion is evaluated
//! directly against the library (or, for the last one, the binary) at its
//! stated tolerance; the test fails if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;

use latpoly::continuum::{
    cs_check, gegenbauer_ode_residual, hahn_limit_error, hermite_ode_residual,
    kravchuk_hermite_error, laguerre_ode_residual, meixner_laguerre_error, observed_rates,
    radial_residual,
};
use latpoly::dirac::{
    average_product, dirac_apply_at, dirac_residual, doubling_scan, momentum, position_space_check,
    solve_mass, transfer_matrix, unitarity_defect, DiracMode, GammaSet, LatticeSpec, Spinor,
};
use latpoly::discrete_time::{
    evolve_compare, fock_ops, max_abs, shift_identity_residual, t_residual, CayleyPropagator,
    HamiltonianPoly, HeisenbergState,
};
use latpoly::families::{
    family_identity_residual_printed, identity_residual_in, kravchuk_so3_check,
};
use latpoly::poly::{
    difference_residual, factorization_residual, gram_matrix, ladder_residual, pearson_residual,
    recurrence_residual, tail_masses, Direction, FactorOrder, AUTO_TRUNCATION_DEGREE,
};
use latpoly::{make_family, DiscreteFamily, FamilyParams, IdentityId, Support};
use num_complex::Complex64;

type Outcome = Result<String, String>;

fn defaults() -> Vec<DiscreteFamily> {
    [
        FamilyParams::Kravchuk { p: 0.5, n: 32 },
        FamilyParams::Meixner {
            gamma: 1.5,
            mu: 0.4,
        },
        FamilyParams::Charlier { mu: 1.0 },
        FamilyParams::hahn_symmetric(1.0, 32),
    ]
    .into_iter()
    .map(|p| make_family(p).unwrap())
    .collect()
}

fn within(label: &str, value: f64, tol: f64) -> Result<(), String> {
    if value <= tol {
        Ok(())
    } else {
        Err(format!("{label} = {value:e} exceeds {tol:e}"))
    }
}

fn max_over<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn interior(fam: &DiscreteFamily, reach: i64) -> std::ops::Range<i64> {
    reach..fam.support().last() as i64 + 1 - reach
}

fn top_degree(fam: &DiscreteFamily) -> usize {
    fam.max_degree().map_or(10, |m| m.saturating_sub(1).min(10))
}

fn pearson_and_gram() -> Outcome {
    let mut worst = (0.0_f64, 0.0_f64, 0.0_f64);
    for fam in defaults() {
        let pearson = max_over(fam.grid().map(|x| pearson_residual(&fam, x)));
        within(&format!("{} Pearson", fam.kind()), pearson, 1e-12)?;
        let n_max = fam.max_degree().unwrap_or(AUTO_TRUNCATION_DEGREE);
        let g = gram_matrix(&fam, n_max).map_err(|e| e.to_string())?;
        let size = g.nrows();
        let defect = max_over((0..size).flat_map(|i| {
            let g = &g;
            (0..size).map(move |j| (g[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
        }));
        within(&format!("{} Gram", fam.kind()), defect, 1e-10)?;
        if let Support::SemiInfinite { x_max } = fam.support() {
            let tail = max_over(tail_masses(&fam, n_max, x_max));
            if !(tail < 1e-12) {
                return Err(format!("{} tail mass {tail:e}", fam.kind()));
            }
            worst.2 = worst.2.max(tail);
        }
        worst.0 = worst.0.max(pearson);
        worst.1 = worst.1.max(defect);
    }
    Ok(format!(
        "Pearson {:.1e}, |G - I| {:.1e}, tail {:.1e}",
        worst.0, worst.1, worst.2
    ))
}

fn generic_machinery() -> Outcome {
    let mut worst = 0.0_f64;
    for fam in defaults() {
        for n in 0..=top_degree(&fam) {
            for x in interior(&fam, 1) {
                let rs = [
                    difference_residual(&fam, n, x),
                    recurrence_residual(&fam, n, x),
                    ladder_residual(&fam, Direction::Raise, n, x),
                    ladder_residual(&fam, Direction::Lower, n, x),
                ];
                for r in rs {
                    let r = r.map_err(|e| e.to_string())?.relative();
                    within(&format!("{} n={n} x={x}", fam.kind()), r, 1e-8)?;
                    worst = worst.max(r);
                }
            }
            for x in interior(&fam, 2) {
                for order in [FactorOrder::MinusPlus, FactorOrder::PlusMinus] {
                    let r = factorization_residual(&fam, n, x, order)
                        .map_err(|e| e.to_string())?
                        .relative();
                    within(&format!("{} {order:?} n={n} x={x}", fam.kind()), r, 1e-8)?;
                    worst = worst.max(r);
                }
            }
        }
    }
    Ok(format!("worst relative residual {worst:.1e}"))
}

fn family_identities() -> Outcome {
    let fams: Vec<DiscreteFamily> = defaults()
        .into_iter()
        .filter(|f| !matches!(f.params(), FamilyParams::Charlier { .. }))
        .collect();
    let mut worst = 0.0_f64;
    for fam in &fams {
        let size = fam.max_degree().unwrap_or(AUTO_TRUNCATION_DEGREE);
        for id in IdentityId::ALL
            .iter()
            .filter(|id| id.family() == fam.kind())
        {
            let low = usize::from(matches!(
                id,
                IdentityId::KLower
                    | IdentityId::KFactRaiseLower
                    | IdentityId::KSo3
                    | IdentityId::KAnti
            ));
            for n in low..=10.min(size - 2) {
                for x in interior(fam, 1) {
                    let r = identity_residual_in(*id, fam, n, x)
                        .map_err(|e| e.to_string())?
                        .relative();
                    within(&format!("{id} n={n} x={x}"), r, 1e-9)?;
                    worst = worst.max(r);
                }
            }
        }
    }
    let params = FamilyParams::Kravchuk { p: 0.5, n: 6 };
    let printed = max_over((1..6).map(|x| {
        family_identity_residual_printed(IdentityId::KRec, params, 1, x)
            .unwrap()
            .relative()
    }));
    if printed < 1e-2 {
        return Err(format!(
            "uncorrected recurrence residual {printed:e} below 1e-2"
        ));
    }
    Ok(format!(
        "worst corrected {worst:.1e}; uncorrected recurrence at N=6, n=1 gives {printed:.2e}"
    ))
}

fn kravchuk_so3() -> Outcome {
    let params = FamilyParams::Kravchuk { p: 0.5, n: 8 };
    let mut worst = 0.0_f64;
    for n in 1..=6 {
        for x in 1..8 {
            let (comm, anti) = kravchuk_so3_check(params, n, x).map_err(|e| e.to_string())?;
            within(&format!("n={n} x={x} commutator"), comm, 1e-8)?;
            within(&format!("n={n} x={x} anticommutator"), anti, 1e-8)?;
            worst = worst.max(comm).max(anti);
        }
    }
    Ok(format!("worst relative residual {worst:.1e}"))
}

fn strictly_decreasing(label: &str, errors: &[f64]) -> Result<(), String> {
    if errors.windows(2).all(|w| w[1] < w[0]) {
        Ok(())
    } else {
        Err(format!(
            "{label} errors not strictly decreasing: {errors:?}"
        ))
    }
}

fn continuum_limits() -> Outcome {
    let sizes = [256usize, 1024, 4096];
    let as_f64 = sizes.map(|s| s as f64);
    let s_grid: Vec<f64> = (0..=600).map(|i| -3.0 + i as f64 * 0.01).collect();
    let mut rates = Vec::new();
    for n in 0..=5 {
        let errors: Vec<f64> = sizes
            .iter()
            .map(|&size| kravchuk_hermite_error(n, 0.5, size, &s_grid))
            .collect::<latpoly::Result<_>>()
            .map_err(|e| e.to_string())?;
        strictly_decreasing(&format!("Kravchuk n={n}"), &errors)?;
        let rate = observed_rates(&[as_f64[0], as_f64[2]], &[errors[0], errors[2]])[0];
        if (rate - 0.5).abs() > 0.15 {
            return Err(format!("Kravchuk n={n} rate {rate}"));
        }
        rates.push(rate);
    }
    let mut constant = 0.0_f64;
    for n in 0..=5 {
        let errors: Vec<f64> = sizes
            .iter()
            .map(|&size| hahn_limit_error(n, 1.0, size))
            .collect::<latpoly::Result<_>>()
            .map_err(|e| e.to_string())?;
        if n == 0 {
            // The constant polynomial is reproduced to rounding at every N.
            constant = max_over(errors.iter().copied());
            within("Hahn n=0 error", constant, 1e-15)?;
        } else {
            strictly_decreasing(&format!("Hahn n={n}"), &errors)?;
        }
    }
    let steps = [1e-2, 2.5e-3, 6.25e-4];
    let l_grid: Vec<f64> = (0..=70).map(|i| 0.5 + i as f64 * 0.05).collect();
    let mut laguerre_rates = Vec::new();
    for n in 0..=3 {
        let errors: Vec<f64> = steps
            .iter()
            .map(|&h| meixner_laguerre_error(n, 1.0, h, &l_grid))
            .collect::<latpoly::Result<_>>()
            .map_err(|e| e.to_string())?;
        strictly_decreasing(&format!("Meixner n={n}"), &errors)?;
        laguerre_rates
            .push(observed_rates(&[1.0 / steps[0], 1.0 / steps[2]], &[errors[0], errors[2]])[0]);
    }
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|r| format!("{r:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    Ok(format!(
        "Kravchuk rates [{}]; Hahn n=0 error {constant:.1e}; Meixner rates in 1/h [{}]",
        fmt(&rates),
        fmt(&laguerre_rates)
    ))
}

fn grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}

fn ode_residuals() -> Outcome {
    let mut worst = 0.0_f64;
    let mut record = |label: String, value: latpoly::Result<f64>| -> Result<(), String> {
        let v = value.map_err(|e| e.to_string())?;
        within(&label, v, 1e-6)?;
        worst = worst.max(v);
        Ok(())
    };
    for n in 0..=3 {
        for s in grid(-4.0, 4.0, 81) {
            record(
                format!("Hermite n={n} s={s}"),
                Ok(hermite_ode_residual(n, s)),
            )?;
        }
        for alpha in [1.0, 2.0] {
            for s in grid(0.2, 12.0, 60) {
                record(
                    format!("Laguerre n={n} a={alpha} s={s}"),
                    laguerre_ode_residual(n, alpha, s),
                )?;
            }
        }
        for lambda in [1.0, 2.0] {
            for s in grid(-0.95, 0.95, 39) {
                record(
                    format!("Gegenbauer n={n} l={lambda} s={s}"),
                    gegenbauer_ode_residual(n, lambda, s),
                )?;
            }
            record(
                format!("CS n={n} l={lambda}"),
                cs_check(n, lambda, &grid(0.05, PI - 0.05, 60)),
            )?;
        }
    }
    for (nu, l) in [(1, 0), (2, 0), (2, 1)] {
        for s in grid(0.2, 20.0, 100) {
            record(format!("hydrogen {nu}{l} s={s}"), radial_residual(nu, l, s))?;
        }
    }
    // Ground state of the Calogero-Sutherland model by hand:
    // ψ_0 = sin^λ q gives −ψ'' + λ(λ−1)ψ/sin²q = λ²ψ.
    for lambda in [1.0_f64, 2.0] {
        for q in grid(0.1, PI - 0.1, 30) {
            let psi = q.sin().powf(lambda);
            let d2 = lambda * (lambda - 1.0) * q.sin().powf(lambda - 2.0) * q.cos().powi(2)
                - lambda * psi;
            let r = (-d2 + lambda * (lambda - 1.0) * psi / q.sin().powi(2) - lambda * lambda * psi)
                .abs();
            record(format!("CS ground state l={lambda} q={q}"), Ok(r))?;
        }
    }
    Ok(format!("worst residual {worst:.1e}"))
}

fn discrete_time() -> Outcome {
    let linear = HamiltonianPoly::new(&[0.0, 1.0]).unwrap();
    let quadratic = HamiltonianPoly::new(&[0.3, 0.5, 0.2]).unwrap();
    let mut shift = 0.0_f64;
    for h in [&linear, &quadratic] {
        let (a, b) = shift_identity_residual(h, 24).map_err(|e| e.to_string())?;
        shift = shift.max(a).max(b);
    }
    within("shift identity", shift, 1e-8)?;

    let eps = 0.05;
    let steps = 20;
    let (_, _, x) = fock_ops(24).map_err(|e| e.to_string())?;
    let prop = CayleyPropagator::new(&linear, eps, &x.matrix).map_err(|e| e.to_string())?;
    let start = HeisenbergState::initial(24).map_err(|e| e.to_string())?;
    let mut state = start.clone();
    for _ in 0..steps {
        state = prop.step(&state);
    }
    let factor = ((1.0 + eps) / (1.0 - eps)).powi(steps);
    let closed =
        max_abs(&(&state.q - &start.q * Complex64::from(factor))) / (factor * max_abs(&start.q));
    within("closed form", closed, 1e-12)?;

    let coarse = evolve_compare(&linear, eps, steps as usize, 24).map_err(|e| e.to_string())?;
    let fine =
        evolve_compare(&linear, eps / 2.0, 2 * steps as usize, 24).map_err(|e| e.to_string())?;
    let ratio = coarse.deviation / fine.deviation;
    if (ratio - 4.0).abs() > 1.0 {
        return Err(format!("deviation ratio {ratio}"));
    }
    let limit = |e: f64| (((1.0 + e) / (1.0 - e)).powf(1.0 / e) - 2f64.exp()).abs();
    let limit_ratio = limit(eps) / limit(eps / 2.0);
    if (limit_ratio - 4.0).abs() > 1.0 {
        return Err(format!("e^(2t) limit ratio {limit_ratio}"));
    }
    let drift = evolve_compare(&linear, 0.02, 50, 24)
        .map_err(|e| e.to_string())?
        .commutator_drift;
    let long = evolve_compare(&HamiltonianPoly::new(&[0.5, 1.0]).unwrap(), 0.02, 50, 24)
        .map_err(|e| e.to_string())?
        .commutator_drift;
    within("commutator drift", drift.max(long), 1e-10)?;
    let t22 = t_residual(2, 24).map_err(|e| e.to_string())?;
    within("T22", t22, 1e-9)?;
    Ok(format!(
        "shift {shift:.1e}; closed form {closed:.1e}; ratios {ratio:.3}/{limit_ratio:.3}; drift {:.1e}; T22 {t22:.1e}",
        drift.max(long)
    ))
}

fn lattice_dirac() -> Outcome {
    let gammas = GammaSet::dirac();
    let base = LatticeSpec::new(8, [1.0; 4], 0.0).unwrap();
    let mut on_shell = 0.0_f64;
    for m in [[1, 0, 0, 0], [2, 1, 0, 0], [3, 1, 1, 0], [1, 1, 0, 0]] {
        let spec = LatticeSpec {
            m0c: solve_mass(m, &base).map_err(|e| e.to_string())?,
            ..base
        };
        let mode = DiracMode::on_shell(m, &spec, &gammas).map_err(|e| e.to_string())?;
        on_shell = on_shell.max(dirac_residual(&mode, &spec, &gammas).map_err(|e| e.to_string())?);
    }
    within("on-shell residual", on_shell, 1e-12)?;

    let rest = [1, 0, 0, 0];
    let m0c = 2.0 * (PI / 8.0).tan();
    let spec = LatticeSpec { m0c, ..base };
    let mode = DiracMode::on_shell(rest, &spec, &gammas).map_err(|e| e.to_string())?;
    let off = LatticeSpec {
        m0c: 1.1 * m0c,
        ..base
    };
    let perturbed = dirac_apply_at(&mode, &off, &gammas, [0; 4]).norm()
        / average_product(&mode, &off).map_err(|e| e.to_string())?;
    let relative = perturbed / (0.1 * m0c);
    if (relative - 1.0).abs() > 0.2 {
        return Err(format!(
            "perturbed residual {perturbed} is {relative} x 0.1 m0c"
        ));
    }

    let ms: Vec<usize> = (0..8).filter(|&m| m != 4).collect();
    let mut unitarity = 0.0_f64;
    let mut chirality = 0.0_f64;
    for &a in &ms {
        for &b in &ms {
            for &c in &ms {
                let k = [
                    momentum(a, 8, 1.0).unwrap(),
                    momentum(b, 8, 1.0).unwrap(),
                    momentum(c, 8, 1.0).unwrap(),
                ];
                let u = transfer_matrix(&k, m0c, 1.0, &gammas).map_err(|e| e.to_string())?;
                unitarity = unitarity.max(unitarity_defect(&u));
                chirality =
                    chirality.max(gammas.chirality_defect(&[k[0], k[1], k[2], k[0] - k[2]]));
            }
        }
    }
    within("unitarity", unitarity, 1e-12)?;
    within("chirality", chirality, 1e-14)?;

    let scan = doubling_scan(8, 1.0).map_err(|e| e.to_string())?;
    if scan.tan_zeros != [0] || scan.sin_zeros.len() != 2 {
        return Err(format!(
            "zeros: tan {:?}, sin {:?}",
            scan.tan_zeros, scan.sin_zeros
        ));
    }

    let small = LatticeSpec::new(4, [1.0, 0.7, 1.2, 1.0], 0.45).unwrap();
    let spinor = Spinor::new(
        Complex64::new(0.2, 0.1),
        Complex64::new(-0.6, 0.0),
        Complex64::new(0.0, 0.3),
        Complex64::new(0.5, -0.4),
    );
    let probe = DiracMode::with_spinor([1, 3, 0, 1], &small, spinor).map_err(|e| e.to_string())?;
    let position = position_space_check(&probe, &small, &gammas).map_err(|e| e.to_string())?;
    within("position-space check", position, 1e-12)?;
    Ok(format!(
        "on-shell {on_shell:.1e}; perturbed {relative:.3} x 0.1 m0c; unitarity {unitarity:.1e}; chirality {chirality:.1e}; zeros 1 vs {}; N=4 grid {position:.1e}",
        scan.sin_zeros.len()
    ))
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_latpoly"))
            .args(args)
            .output()
            .map_err(|e| e.to_string())
    };
    let mut bytes = Vec::new();
    for name in ["first.json", "second.json"] {
        let path = dir.path().join(name);
        let out = run(&["verify", "--suite", "all", "--out", path.to_str().unwrap()])?;
        if out.status.code() != Some(0) {
            return Err(format!(
                "verify --suite all exited with {:?}",
                out.status.code()
            ));
        }
        bytes.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    if bytes[0] != bytes[1] {
        return Err("reports differ between runs".into());
    }
    let failing = run(&["verify", "--suite", "so3", "--tol", "1e-300"])?
        .status
        .code();
    let usage = run(&["verify", "--suite", "dirac", "--N", "2"])?
        .status
        .code();
    let unknown = run(&["verify", "--suite", "unknown"])?.status.code();
    if (failing, usage, unknown) != (Some(1), Some(2), Some(2)) {
        return Err(format!(
            "exit codes {failing:?}/{usage:?}/{unknown:?}, expected 1/2/2"
        ));
    }
    Ok(format!(
        "{} identical bytes; exit codes 0/1/2/2",
        bytes[0].len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Pearson relation and Gram matrix", pearson_and_gram),
        (
            "generic difference, recurrence, ladder and factorization identities",
            generic_machinery,
        ),
        (
            "family identities and the uncorrected recurrence",
            family_identities,
        ),
        ("Kravchuk SO(3) algebra", kravchuk_so3),
        ("continuum limits", continuum_limits),
        ("continuum ODE residuals", ode_residuals),
        ("discrete-time integrator", discrete_time),
        ("lattice Dirac operator", lattice_dirac),
        ("CLI determinism and exit codes", cli_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
