//! Acceptance criteria AC1–AC10, one line each. Exits nonzero when a hard
//! criterion fails; report-only items never fail the run.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use fractal_wave_core::evolution::{
    mollified_wave, mollifier, scaled_lambda_max, spectral_heat, transmute, Leapfrog, LeapfrogOptions, SpectralWave,
    TransmuteOptions, WaveInput,
};
use fractal_wave_core::spectral::{decimate_sg, eigendecompose};
use fractal_wave_core::{Boundary, EnergyForm, Field, FractalSpec};
use fractal_wave_lab::config::{FractalArg, Format, Settings};
use fractal_wave_lab::experiments::convergence::{run_convergence, ConvergenceConfig};
use fractal_wave_lab::experiments::kernel::{run_kernel_fit, KernelConfig};
use fractal_wave_lab::experiments::oscillate::{run_oscillation, OscillateConfig};
use fractal_wave_lab::experiments::probe::{run_probe, ProbeConfig};
use fractal_wave_lab::presets::Preset;
use fractal_wave_lab::report::{Report, Value};
use fractal_wave_lab::run::run_suite;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
    Report,
}

struct Outcome {
    status: Status,
    detail: String,
}

fn pass_if(ok: bool, detail: String) -> Outcome {
    Outcome { status: if ok { Status::Pass } else { Status::Fail }, detail }
}

fn sg() -> FractalSpec {
    FractalSpec::sierpinski_gasket()
}

fn interval() -> FractalSpec {
    FractalSpec::interval()
}

fn column(report: &Report, table: &str, col: &str) -> Vec<f64> {
    report.table(table).and_then(|t| t.numbers(col)).unwrap_or_default()
}

fn fmt(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
}

fn ac1() -> Outcome {
    let (mut res, mut gram) = (0.0f64, 0.0f64);
    let mut count = 0;
    for (spec, levels) in [(sg(), 1..=6), (interval(), 1..=8)] {
        for m in levels {
            for b in [Boundary::Neumann, Boundary::Dirichlet] {
                let form = EnergyForm::build(&spec, m, b).unwrap();
                let basis = eigendecompose(&form).unwrap();
                let (r, g) = basis.diagnostics(&form);
                res = res.max(r);
                gram = gram.max(g);
                count += basis.len();
            }
        }
    }
    pass_if(res <= 1e-9 && gram <= 1e-9, format!("{count} eigenpairs, max residual {res:.2e}, max Gram error {gram:.2e}"))
}

fn ac2() -> Outcome {
    let (mut rel, mut res) = (0.0f64, 0.0f64);
    let mut same_count = true;
    for m in 1..=3 {
        for b in [Boundary::Neumann, Boundary::Dirichlet] {
            let form = EnergyForm::build(&sg(), m, b).unwrap();
            let dense = eigendecompose(&form).unwrap();
            let dec = decimate_sg(m, b).unwrap();
            same_count &= dense.len() == dec.len();
            for (a, e) in dec.lambdas().iter().zip(dense.lambdas()) {
                rel = rel.max((a - e).abs() / e.abs().max(1.0));
            }
            res = res.max(dec.diagnostics(&form).0);
        }
    }
    pass_if(same_count && rel <= 1e-8 && res <= 1e-9, format!("max relative eigenvalue gap {rel:.2e}, max residual {res:.2e}"))
}

/// `E_H(u) = (u, -h²μ^{-1}H u) = h² E(u)` along `10⁴` homogeneous steps
/// from `f = 0`, `u(1) = g̃ = h g`, against `4‖g̃‖²`.
fn ac3() -> Outcome {
    let mut worst_cfl = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for m in 1..=5 {
        let h = 5f64.powf(-(m as f64) / 2.0);
        for b in [Boundary::Neumann, Boundary::Dirichlet] {
            let form = EnergyForm::build(&sg(), m, b).unwrap();
            worst_cfl = worst_cfl.max(scaled_lambda_max(&form, h).unwrap());
        }
        let form = EnergyForm::build(&sg(), m, Boundary::Dirichlet).unwrap();
        let g_graph = form.graph();
        let opts = LeapfrogOptions { allow_cfl_violation: false, lambda_max: None };
        let lmax = fractal_wave_core::evolution::operator_lambda_max(&form).unwrap();
        let opts = LeapfrogOptions { lambda_max: Some(lmax), ..opts };
        for _ in 0..20 {
            let g = Field::from_fn(g_graph, |x| if g_graph.is_boundary(x) { 0.0 } else { rng.gen_range(-1.0..1.0) });
            let bound = 4.0 * h * h * form.inner(&g, &g);
            let mut lf = Leapfrog::new(&form, &WaveInput::velocity(&form, g).unwrap(), h, opts).unwrap();
            let mut worst = h * h * form.energy_of(lf.current());
            for _ in 1..10_000 {
                worst = worst.max(h * h * form.energy_of(lf.advance()));
            }
            worst_ratio = worst_ratio.max(worst / bound);
        }
    }
    pass_if(
        worst_cfl <= 3.0 && worst_ratio <= 1.0,
        format!("max h²λ_max = {worst_cfl:.4} (limit 3), max E_H/(4‖g̃‖²) = {worst_ratio:.4} over 20 data × 10⁴ steps × levels 1..5"),
    )
}

fn ac4() -> Outcome {
    let s = Settings {
        fractal: Some(FractalArg::Sg),
        levels: Some(vec![2, 3, 4, 5]),
        t: Some(0.5),
        presets: Some(vec!["eigenmode:2".into()]),
        velocities: Some(vec!["bump:1".into()]),
        ..Default::default()
    };
    let sg_report = run_convergence(&ConvergenceConfig::from_settings(&s).unwrap()).unwrap().report;
    let ratios = column(&sg_report, "rate", "ratio");
    let sg_ok = sg_report.check("ratio_at_t").is_some_and(|c| c.passed);
    let s = Settings { fractal: Some(FractalArg::Interval), ..Default::default() };
    let iv = run_convergence(&ConvergenceConfig::from_settings(&s).unwrap()).unwrap().report;
    let cf = column(&iv, "closed_form", "error");
    let cf_ok = iv.check("closed_form_error").is_some_and(|c| c.passed) && !cf.is_empty();
    pass_if(
        sg_ok && cf_ok,
        format!(
            "SG ratios at t=0.5 [{}] (need >= 3); interval m=8 closed-form errors [{}] (need <= 1e-2)",
            fmt(&ratios),
            cf.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn ac5() -> Outcome {
    let form = EnergyForm::build(&sg(), 4, Boundary::Neumann).unwrap();
    let basis = eigendecompose(&form).unwrap();
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let f = Preset::Random.field(&form, seed).unwrap();
        let input = WaveInput::position(&form, f.clone()).unwrap();
        for t in [0.01, 0.05, 0.1] {
            let v = transmute(&basis, &input, t, TransmuteOptions::default()).unwrap();
            let p = spectral_heat(&basis, &f, t).unwrap();
            worst = worst.max(v.sup_distance(&p));
        }
    }
    pass_if(worst <= 1e-6, format!("max sup difference {worst:.2e} over 10 random data × 3 times"))
}

/// The time-domain side is `∫ φ_σ(s) u(t - s) ds` by the trapezoid rule
/// with spacing `√σ/20` on `|s| ≤ 12√σ`. For a Gaussian times a band-limited
/// integrand the trapezoid error is the aliasing term, far below `1e-12`
/// here, and the truncated tail is below `e^{-72}`.
fn ac6() -> Outcome {
    let form = EnergyForm::build(&sg(), 4, Boundary::Neumann).unwrap();
    let basis = eigendecompose(&form).unwrap();
    let g = form.graph();
    let f = Field::from_fn(g, |x| (1.3 * x as f64).sin() + 0.5 * (0.4 * x as f64).cos());
    let wave = SpectralWave::new(&basis, &WaveInput::position(&form, f.clone()).unwrap()).unwrap();
    let n = g.num_vertices();
    let mut worst = 0.0f64;
    for sigma in [0.01f64, 0.1] {
        for t in [0.2, 1.0] {
            let spacing = sigma.sqrt() / 20.0;
            let k = 240;
            let mut conv = vec![0.0; n];
            let mut buf = vec![0.0; n];
            for j in -k..=k {
                let s = j as f64 * spacing;
                wave.eval_into(t - s, &mut buf);
                let w = mollifier(sigma, s) * spacing;
                conv.iter_mut().zip(&buf).for_each(|(c, u)| *c += w * u);
            }
            let m = mollified_wave(&basis, &f, sigma, t).unwrap();
            worst = worst.max(m.sup_distance(&conv));
        }
    }
    pass_if(worst <= 1e-8, format!("max sup difference {worst:.2e} over (σ, t) ∈ {{0.01, 0.1}} × {{0.2, 1.0}}"))
}

fn ac7() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for f in [FractalArg::Sg, FractalArg::Interval] {
        let s = Settings { fractal: Some(f), ..Default::default() };
        let r = run_kernel_fit(&KernelConfig::from_settings(&s).unwrap()).unwrap().report;
        let alpha = column(&r, "alpha", "alpha");
        let target = column(&r, "alpha", "target");
        let a_ok = r.check("alpha_matches_spectrum").is_some_and(|c| c.passed);
        let d_ok = r.check("off_diagonal_decreasing").is_some_and(|c| c.passed);
        ok &= a_ok && d_ok;
        parts.push(format!(
            "{f:?}: α = {} vs {} ({}), off-diagonal {}",
            fmt(&alpha),
            fmt(&target),
            if a_ok { "ok" } else { "off" },
            if d_ok { "monotone" } else { "not monotone" }
        ));
    }
    pass_if(ok, parts.join("; "))
}

fn ac8() -> Outcome {
    let s = Settings { fractal: Some(FractalArg::Sg), ..Default::default() };
    let r = run_probe(&ProbeConfig::from_settings(&s).unwrap()).unwrap().report;
    let sg_ok = r.check("arrival_decreases").is_some_and(|c| c.passed);
    let taus = column(&r, "arrival", "tau");
    let ratios = column(&r, "ratios", "ratio");
    let s = Settings { fractal: Some(FractalArg::Interval), ..Default::default() };
    let iv = run_probe(&ProbeConfig::from_settings(&s).unwrap()).unwrap().report;
    let iv_ok = iv.check("arrival_converges").is_some_and(|c| c.passed);
    let change = column(&iv, "limit", "relative_change");
    let itau = column(&iv, "limit", "tau");
    pass_if(
        sg_ok && iv_ok,
        format!(
            "SG τ [{}], ratios [{}] (need <= 0.9, {}); interval τ(last) {} with relative change {} (need <= 0.05)",
            fmt(&taus),
            fmt(&ratios),
            r.label,
            fmt(&itau),
            fmt(&change)
        ),
    )
}

fn ac9() -> Outcome {
    let r = run_oscillation(&OscillateConfig::from_settings(&Settings::default()).unwrap()).unwrap().report;
    let t = r.table("phi4").expect("phi4 table");
    let row = &t.rows[0];
    let get = |c: &str| &row[t.column_index(c).unwrap()];
    let simple = matches!(get("simple"), Value::Bool(true));
    let ratio = get("ratio").as_f64().unwrap();
    let dim = get("eigenspace_dim").as_f64().unwrap();
    let mut dims = Vec::new();
    for m in 2..=5 {
        let form = EnergyForm::build(&sg(), m, Boundary::Neumann).unwrap();
        dims.push(eigendecompose(&form).unwrap().eigenspace_of(3).len().to_string());
    }
    let detail = format!(
        "λ₄ eigenspace dimension {dim} at level 5 (levels 2..5: {}), min/max of the selected element {ratio:.4} (target -0.75 ± 0.015)",
        dims.join(", ")
    );
    if simple {
        pass_if((ratio + 0.75).abs() <= 0.015, detail)
    } else {
        Outcome { status: Status::Report, detail: format!("{detail}; degenerate, reported without assertion") }
    }
}

fn files(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn ac10() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut compared = 0;
    let mut differing = Vec::new();
    for format in [Format::Csv, Format::Json] {
        let (da, db) = (a.path().join(format!("{format:?}")), b.path().join(format!("{format:?}")));
        run_suite(&da, 7, format, true).unwrap();
        run_suite(&db, 7, format, true).unwrap();
        let (fa, fb) = (files(&da), files(&db));
        if fa != fb {
            differing.push("file lists".to_string());
            continue;
        }
        for f in fa {
            compared += 1;
            if std::fs::read(da.join(&f)).unwrap() != std::fs::read(db.join(&f)).unwrap() {
                differing.push(f.display().to_string());
            }
        }
    }
    pass_if(differing.is_empty(), format!("{compared} files compared, {} differing {:?}", differing.len(), differing))
}

fn main() -> std::process::ExitCode {
    type Criterion = (&'static str, &'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 10] = [
        ("AC1", "eigen residuals", ac1, Duration::from_secs(60)),
        ("AC2", "decimation oracle", ac2, Duration::from_secs(5)),
        ("AC3", "CFL and energy bound", ac3, Duration::from_secs(60)),
        ("AC4", "leapfrog rate", ac4, Duration::from_secs(120)),
        ("AC5", "transmutation", ac5, Duration::from_secs(30)),
        ("AC6", "mollified-wave identity", ac6, Duration::from_secs(30)),
        ("AC7", "kernel exponents", ac7, Duration::from_secs(60)),
        ("AC8", "propagation probe", ac8, Duration::from_secs(120)),
        ("AC9", "phi4 range ratio", ac9, Duration::from_secs(60)),
        ("AC10", "determinism", ac10, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = took <= budget;
        let tag = match (&out.status, in_time) {
            (Status::Report, _) => "REPORT",
            (Status::Pass, true) => "PASS",
            _ => {
                failed += 1;
                "FAIL"
            }
        };
        let over = if in_time { String::new() } else { format!(", over the {}s budget", budget.as_secs()) };
        println!("{id:<5} {tag:<6} {name}: {} [{:.1}s{over}]", out.detail, took.as_secs_f64());
    }
    if failed == 0 {
        std::process::ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        std::process::ExitCode::FAILURE
    }
}
