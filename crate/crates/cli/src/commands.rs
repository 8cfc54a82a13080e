//! `converge`, `tabulate`, `dirac-scan` and `evolve`.

use std::fmt::Write as _;

use clap::ValueEnum;
use latpoly::continuum::{
    hahn_limit_error, kravchuk_hermite_error, meixner_laguerre_error, observed_rates,
};
use latpoly::dirac::{
    dirac_residual, dirac_symbol, doubling_scan, is_on_shell, solve_mass, spinor_solve,
    transfer_matrix, unitarity_defect, DiracMode, DoublingReport, GammaSet, LatticeSpec, Spinor,
};
use latpoly::discrete_time::{evolve_compare, EvolveOutcome, HamiltonianPoly};
use latpoly::{make_family, FamilyParams, OrthonormalTable, Support};
use serde::{Deserialize, Serialize};

use crate::suites::{hermite_grid, laguerre_grid};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Fixed float formatting shared by every CSV artifact.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.filter(|v| v.is_finite()).map(fmt_f64).unwrap_or_default()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
    text.push('\n');
    text
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Hermite,
    Laguerre,
    Gegenbauer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeRow {
    pub size: usize,
    pub max_error: f64,
    /// Rate against the previous row; absent on the first row.
    pub observed_rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergeParams {
    pub target: Target,
    pub n: usize,
    pub p: f64,
    pub alpha: f64,
    pub lambda: f64,
}

/// Errors of the limit `target` at each size. For `laguerre` the size is
/// `1/h`.
pub fn converge(params: &ConvergeParams, sizes: &[usize]) -> Result<Vec<ConvergeRow>, CliError> {
    if sizes.is_empty() {
        return Err(CliError::Usage("at least one size is required".into()));
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) || sizes[0] == 0 {
        return Err(CliError::Usage(format!(
            "sizes {sizes:?} must be positive and strictly increasing"
        )));
    }
    let errors = sizes
        .iter()
        .map(|&size| match params.target {
            Target::Hermite => kravchuk_hermite_error(params.n, params.p, size, &hermite_grid()),
            Target::Laguerre => {
                meixner_laguerre_error(params.n, params.alpha, 1.0 / size as f64, &laguerre_grid())
            }
            Target::Gegenbauer => hahn_limit_error(params.n, params.lambda, size),
        })
        .collect::<latpoly::Result<Vec<f64>>>()?;
    let as_f64: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    let rates = observed_rates(&as_f64, &errors);
    Ok(sizes
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(i, (&size, &max_error))| ConvergeRow {
            size,
            max_error,
            observed_rate: i.checked_sub(1).map(|j| rates[j]).filter(|r| r.is_finite()),
        })
        .collect())
}

pub fn converge_output(rows: &[ConvergeRow], format: Format) -> String {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::from("size,max_error,observed_rate\n");
            for row in rows {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    row.size,
                    fmt_f64(row.max_error),
                    fmt_opt(row.observed_rate)
                );
            }
            out
        }
    }
}

/// Everything `tabulate` emits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tabulation {
    pub family: FamilyParams,
    /// Truncation point for semi-infinite supports.
    pub x_max: Option<usize>,
    pub n_max: usize,
    pub xs: Vec<i64>,
    pub weight: Vec<f64>,
    pub norms: Vec<f64>,
    /// `phi[n][i] = φ_n(xs[i])`.
    pub phi: Vec<Vec<f64>>,
    pub tail_mass: Vec<f64>,
    pub gram: Vec<Vec<f64>>,
}

pub fn tabulate(params: FamilyParams, n_max: usize) -> Result<Tabulation, CliError> {
    let family = make_family(params)?;
    let table = OrthonormalTable::new(&family, n_max)?;
    let gram = table.gram();
    Ok(Tabulation {
        family: params,
        x_max: match family.support() {
            Support::SemiInfinite { x_max } => Some(x_max),
            Support::Finite { .. } => None,
        },
        n_max,
        weight: table.weights(),
        norms: table.norms(),
        gram: gram
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect(),
        xs: table.xs,
        phi: table.values,
        tail_mass: table.tail_mass,
    })
}

pub fn tabulate_output(t: &Tabulation, format: Format) -> String {
    if format == Format::Json {
        return to_json(t);
    }
    let mut out = String::from("x,weight");
    for n in 0..=t.n_max {
        let _ = write!(out, ",phi_{n}");
    }
    out.push('\n');
    for (i, x) in t.xs.iter().enumerate() {
        let _ = write!(out, "{x},{}", fmt_f64(t.weight[i]));
        for row in &t.phi {
            let _ = write!(out, ",{}", fmt_f64(row[i]));
        }
        out.push('\n');
    }
    out.push_str("\nn,norm,tail_mass\n");
    for n in 0..=t.n_max {
        let _ = writeln!(
            out,
            "{n},{},{}",
            fmt_f64(t.norms[n]),
            fmt_f64(t.tail_mass[n])
        );
    }
    out.push_str("\ngram");
    for n in 0..=t.n_max {
        let _ = write!(out, ",m_{n}");
    }
    out.push('\n');
    for (n, row) in t.gram.iter().enumerate() {
        let _ = write!(out, "n_{n}");
        for v in row {
            let _ = write!(out, ",{}", fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub m: [usize; 4],
    pub k: [f64; 4],
    pub on_shell: bool,
    /// `|k·k − m₀²c²|`.
    pub dispersion_residual: f64,
    /// Plane-wave residual for on-shell modes; the smallest singular value
    /// of the momentum-space symbol otherwise.
    pub dirac_residual: f64,
    /// `max |U†U − I|` of the transfer matrix for the spatial momenta.
    pub unitarity_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracScan {
    pub n: usize,
    pub eps: f64,
    pub m0c: f64,
    pub solved_for: Option<[usize; 4]>,
    pub rows: Vec<ScanRow>,
    pub doubling: DoublingReport,
}

impl DiracScan {
    /// Largest plane-wave residual among on-shell rows, and largest
    /// unitarity defect overall.
    pub fn worst(&self) -> (f64, f64) {
        let dirac = self
            .rows
            .iter()
            .filter(|r| r.on_shell)
            .map(|r| r.dirac_residual)
            .fold(0.0, f64::max);
        let unitarity = self
            .rows
            .iter()
            .map(|r| r.unitarity_defect)
            .fold(0.0, f64::max);
        (dirac, unitarity)
    }
}

pub fn dirac_scan(
    n: usize,
    eps: f64,
    m0c: Option<f64>,
    solve_for: Option<[usize; 4]>,
) -> Result<DiracScan, CliError> {
    let base = LatticeSpec::new(n, [eps; 4], 0.0)?;
    let m0c = match (m0c, solve_for) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--m0c and --solve-for-mode are mutually exclusive".into(),
            ));
        }
        (Some(m), None) => m,
        (None, Some(mode)) => solve_mass(mode, &base)?,
        (None, None) => 0.0,
    };
    let spec = LatticeSpec::new(n, [eps; 4], m0c)?;
    let gammas = GammaSet::dirac();
    let ms: Vec<usize> = (0..n).filter(|&m| 2 * m != n).collect();
    let mut rows = Vec::with_capacity(ms.len().pow(4));
    for &m3 in &ms {
        for &m2 in &ms {
            for &m1 in &ms {
                for &m0 in &ms {
                    let m = [m0, m1, m2, m3];
                    let mut mode = DiracMode::with_spinor(m, &spec, Spinor::zeros())?;
                    let on_shell = is_on_shell(&mode.k, m0c);
                    let dirac = if on_shell {
                        mode.spinor = spinor_solve(&mode.k, m0c, &gammas)?;
                        dirac_residual(&mode, &spec, &gammas)?
                    } else {
                        dirac_symbol(&mode.k, m0c, &gammas).singular_values().min()
                    };
                    let u = transfer_matrix(&[mode.k[1], mode.k[2], mode.k[3]], m0c, eps, &gammas)?;
                    rows.push(ScanRow {
                        m,
                        k: mode.k,
                        on_shell,
                        dispersion_residual: (mode.k_squared() - m0c * m0c).abs(),
                        dirac_residual: dirac,
                        unitarity_defect: unitarity_defect(&u),
                    });
                }
            }
        }
    }
    Ok(DiracScan {
        n,
        eps,
        m0c,
        solved_for: solve_for,
        rows,
        doubling: doubling_scan(n, eps)?,
    })
}

fn zero_summary(label: &str, zeros: &[usize]) -> String {
    let list: Vec<String> = zeros.iter().map(|m| format!("m={m}")).collect();
    format!(
        "# zeros of {label}: {} ({})\n",
        zeros.len(),
        list.join(", ")
    )
}

pub fn dirac_scan_output(scan: &DiracScan, format: Format) -> String {
    if format == Format::Json {
        return to_json(scan);
    }
    let mut out = String::new();
    if let Some(m) = scan.solved_for {
        let _ = writeln!(
            out,
            "# m0c = {} (solved for mode {},{},{},{})",
            fmt_f64(scan.m0c),
            m[0],
            m[1],
            m[2],
            m[3]
        );
    }
    out.push_str(
        "m0,m1,m2,m3,k0,k1,k2,k3,on_shell,dispersion_residual,dirac_residual,unitarity_defect\n",
    );
    for r in &scan.rows {
        let _ = write!(out, "{},{},{},{}", r.m[0], r.m[1], r.m[2], r.m[3]);
        for k in r.k {
            let _ = write!(out, ",{}", fmt_f64(k));
        }
        let _ = writeln!(
            out,
            ",{},{},{},{}",
            r.on_shell,
            fmt_f64(r.dispersion_residual),
            fmt_f64(r.dirac_residual),
            fmt_f64(r.unitarity_defect)
        );
    }
    let (dirac, unitarity) = scan.worst();
    let on_shell = scan.rows.iter().filter(|r| r.on_shell).count();
    let _ = writeln!(
        out,
        "# on-shell modes: {on_shell}; worst plane-wave residual: {}",
        fmt_f64(dirac)
    );
    let _ = writeln!(out, "# worst unitarity defect: {}", fmt_f64(unitarity));
    out.push_str(&zero_summary("k(m)", &scan.doubling.tan_zeros));
    out.push_str(&zero_summary("sin comparison", &scan.doubling.sin_zeros));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveReport {
    pub h_coeffs: Vec<f64>,
    pub eps: f64,
    pub steps: usize,
    pub dim: usize,
    pub t: f64,
    pub interior: usize,
    pub deviation_q: f64,
    pub deviation_p: f64,
    pub commutator_drift: f64,
}

pub fn evolve(
    coeffs: &[f64],
    eps: f64,
    steps: usize,
    dim: usize,
) -> Result<EvolveReport, CliError> {
    let h = HamiltonianPoly::new(coeffs)?;
    let EvolveOutcome {
        t,
        interior,
        deviation,
        deviation_p,
        commutator_drift,
    } = evolve_compare(&h, eps, steps, dim)?;
    Ok(EvolveReport {
        h_coeffs: h.coeffs().to_vec(),
        eps,
        steps,
        dim,
        t,
        interior,
        deviation_q: deviation,
        deviation_p,
        commutator_drift,
    })
}

pub fn evolve_output(r: &EvolveReport, format: Format) -> String {
    if format == Format::Json {
        return to_json(r);
    }
    let coeffs: Vec<String> = r.h_coeffs.iter().map(|c| fmt_f64(*c)).collect();
    let mut out = String::from("quantity,value\n");
    let _ = writeln!(out, "h_coeffs,{}", coeffs.join(";"));
    let _ = writeln!(out, "eps,{}", fmt_f64(r.eps));
    let _ = writeln!(out, "steps,{}", r.steps);
    let _ = writeln!(out, "dim,{}", r.dim);
    let _ = writeln!(out, "t,{}", fmt_f64(r.t));
    let _ = writeln!(out, "interior,{}", r.interior);
    let _ = writeln!(out, "deviation_q,{}", fmt_f64(r.deviation_q));
    let _ = writeln!(out, "deviation_p,{}", fmt_f64(r.deviation_p));
    let _ = writeln!(out, "commutator_drift,{}", fmt_f64(r.commutator_drift));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_fixed_width_scientific() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(-1234.5), "-1.2345000000000000e3");
        assert_eq!(fmt_opt(Some(f64::NAN)), "");
    }

    #[test]
    fn converge_rejects_unsorted_sizes() {
        let params = ConvergeParams {
            target: Target::Hermite,
            n: 0,
            p: 0.5,
            alpha: 1.0,
            lambda: 1.0,
        };
        assert!(matches!(
            converge(&params, &[1024, 256]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            converge(&params, &[256, 256]),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn gegenbauer_constant_is_exact() {
        let params = ConvergeParams {
            target: Target::Gegenbauer,
            n: 0,
            p: 0.5,
            alpha: 1.0,
            lambda: 1.0,
        };
        let rows = converge(&params, &[16, 64]).unwrap();
        assert!(rows.iter().all(|r| r.max_error <= 1e-15));
        assert_eq!(rows[0].observed_rate, None);
    }

    #[test]
    fn small_hermite_size_is_a_domain_error() {
        let params = ConvergeParams {
            target: Target::Hermite,
            n: 1,
            p: 0.5,
            alpha: 1.0,
            lambda: 1.0,
        };
        let err = converge(&params, &[4, 256]).unwrap_err();
        assert!(err.to_string().contains("N = 4"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn kravchuk_hand_table() {
        let t = tabulate(FamilyParams::Kravchuk { p: 0.5, n: 2 }, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [[0.5, h, 0.5], [-h, 0.0, h]];
        for (row, want) in t.phi.iter().zip(expect) {
            for (v, w) in row.iter().zip(want) {
                assert!((v - w).abs() < 1e-14, "{v} vs {w}");
            }
        }
        let csv = tabulate_output(&t, Format::Csv);
        assert!(csv.starts_with("x,weight,phi_0,phi_1\n0,"));
    }

    #[test]
    fn solve_for_mode_rest_mass() {
        let scan = dirac_scan(8, 1.0, None, Some([1, 0, 0, 0])).unwrap();
        let expect = 2.0 * (std::f64::consts::PI / 8.0).tan();
        assert!((scan.m0c - expect).abs() < 1e-15);
        let (dirac, unitarity) = scan.worst();
        assert!(dirac <= 1e-12 && unitarity <= 1e-12, "{dirac} {unitarity}");
        assert!(dirac_scan(8, 1.0, Some(0.1), Some([1, 0, 0, 0])).is_err());
    }
}
