//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use pucci_core::asym::{
    big_c_constant, bracket_field, c_constant, elliptic_qmean_limit, fit_model, parabolic_qmean_limit,
    phi_residual_scan, theoretical_regime, varadhan_sweep, FdSettings, QMeanSettings, RateModel, Source,
    SELECTION_MARGIN,
};
use pucci_core::fd::{solve_elliptic, solve_parabolic, EllipticOptions, GridConfig, ParabolicOptions, ProblemKind};
use pucci_core::geometry::{contact_ball, Domain, Modulus, Shape};
use pucci_core::radial::ball_solution;
use pucci_core::selftest::operator_suite;
use pucci_core::special::{
    f_asymptotic_small, f_profile, g_profile, ln_f_asymptotic_large, ln_g_asymptotic_large, ode_residual_check,
    ProfileKind, ProfileParams,
};
use pucci_core::{PucciParams, Result, Sign};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { passed, detail })
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn powers(base: f64, from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| base.powi(-k)).collect()
}

fn disk() -> Domain {
    Domain::new(Shape::ball(vec![0.0, 0.0], 1.0).unwrap())
}

fn square() -> Domain {
    Domain::new(Shape::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap())
}

fn operators() -> Result<Verdict> {
    let t0 = Instant::now();
    let checks = operator_suite(20_240_917, 10_000)?;
    let secs = t0.elapsed().as_secs_f64();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let eig = checks.iter().find(|c| c.name.contains("eigenframe")).map_or(f64::NAN, |c| c.value);
    verdict(
        failed.is_empty() && secs < 10.0,
        format!("{} checks on 10000 matrices, eigenframe gap {eig:.1e}, failed {failed:?}, {secs:.2} s", checks.len()),
    )
}

fn special_functions() -> Result<Verdict> {
    let one = ProfileParams::new(1.0, 1.0)?;
    let mut closed: f64 = 0.0;
    for k in 0..=200 {
        let s = 1e-3 * 5e4f64.powf(k as f64 / 200.0);
        closed = closed
            .max(rel(g_profile(s, &one)?.value, 2.0 * s.sinh() / s))
            .max(rel(f_profile(s, &one)?.value, (-s).exp() / s));
    }
    let mut ode: f64 = 0.0;
    for a in [0.5, 1.0, 1.5, 2.0, 3.0] {
        for b in [-0.5, 0.0, 0.5, 1.0, 3.0] {
            let pp = ProfileParams::new(a, b)?;
            for s in [0.5, 1.0, 2.0, 5.0, 20.0] {
                for kind in [ProfileKind::F, ProfileKind::G] {
                    ode = ode.max(ode_residual_check(kind, &pp, s)?);
                }
            }
        }
    }

    let pp = ProfileParams::new(1.3, 0.5)?;
    let large: Vec<f64> = (0..9).map(|k| 50.0 * 2f64.powf(0.5 * k as f64)).collect();
    let small: Vec<f64> = (0..9).map(|k| 1e-5 * 2f64.powi(k)).collect();
    let mut err_f = Vec::new();
    let mut err_g = Vec::new();
    for &s in &large {
        err_f.push((f_profile(s, &pp)?.log_value - ln_f_asymptotic_large(s, &pp)).abs());
        err_g.push((g_profile(s, &pp)?.log_value - ln_g_asymptotic_large(s, &pp)).abs());
    }
    // (branch, predicted exponent, measured slope)
    let mut orders = vec![
        ("f large", -1.0, log_slope(&large, &err_f)),
        ("g large", -1.0, log_slope(&large, &err_g)),
    ];
    for (name, b, predicted, absolute) in [("f small b>0", 0.5, 0.5, false), ("f small b=0", 0.0, 0.0, true), ("f small b<0", -0.5, 0.5, false)] {
        let pp = ProfileParams::new(1.3, b)?;
        let mut err = Vec::new();
        for &s in &small {
            let v = f_profile(s, &pp)?.value;
            let lead = f_asymptotic_small(s, &pp);
            err.push(if absolute { (v - lead).abs() } else { rel(v, lead) });
        }
        orders.push((name, predicted, log_slope(&small, &err)));
    }
    let slopes_ok = orders.iter().all(|(_, p, m)| (m - p).abs() <= 0.3);
    let shown: Vec<String> = orders.iter().map(|(n, p, m)| format!("{n} {m:.3} (want {p})")).collect();
    verdict(
        closed <= 1e-11 && ode <= 1e-5 && slopes_ok,
        format!("closed forms {closed:.1e}, ODE residual {ode:.1e}, slopes: {}", shown.join(", ")),
    )
}

fn radial_rates() -> Result<Verdict> {
    let t0 = Instant::now();
    let eps = powers(2.0, 3, 12);
    let p = PucciParams::new(1.0, 2.0, 3)?;
    let ball = Domain::new(Shape::ball(vec![0.0; 3], 1.0)?);
    let mut ball_r2 = f64::INFINITY;
    for sign in Sign::BOTH {
        let study = varadhan_sweep(ProblemKind::Elliptic, &ball, sign, &p, &[vec![0.0; 3]], &eps, &Source::Radial)?;
        ball_r2 = ball_r2.min(fit_model(RateModel::EpsLogInvEps, &eps, &study.observed[0], None)?.r_squared);
    }
    let outside = Domain::new(Shape::exterior_ball(vec![0.0; 3], 1.0)?);
    let annulus = [vec![1.25, 0.0, 0.0], vec![0.0, 1.5, 0.0], vec![0.0, 0.0, 2.0]];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for sign in Sign::BOTH {
        let study = varadhan_sweep(ProblemKind::Elliptic, &outside, sign, &p, &annulus, &eps, &Source::Radial)?;
        for fit in &study.fits {
            let e = fit.power.as_ref().map_or(f64::NAN, |f| f.exponent);
            lo = lo.min(e);
            hi = hi.max(e);
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        ball_r2 >= 0.99 && (lo - 1.0).abs() <= 0.1 && (hi - 1.0).abs() <= 0.1 && secs < 30.0,
        format!("ball centre eps log(1/eps) min R^2 {ball_r2:.4}; exterior exponents [{lo:.4}, {hi:.4}]; {secs:.2} s"),
    )
}

fn regimes() -> Result<Verdict> {
    let eps = powers(2.0, 3, 12);
    let ball = Domain::new(Shape::ball(vec![0.0; 3], 1.0)?).with_modulus(Modulus::Lipschitz { l: 1.0 })?;
    let cases = [
        (2.5, RateModel::EpsLogInvEps),
        (2.0, RateModel::EpsLogLogPsi),
        (1.5, RateModel::EpsLogInvPsi),
    ];
    let mut ok = true;
    let mut shown = Vec::new();
    for (big, want) in cases {
        let p = PucciParams::new(1.0, big, 3)?;
        let classified = theoretical_regime(ProblemKind::Elliptic, Sign::Plus, &p);
        let study = varadhan_sweep(ProblemKind::Elliptic, &ball, Sign::Plus, &p, &[vec![0.0; 3]], &eps, &Source::Radial)?;
        let fit = &study.fits[0];
        let predicted = fit.predicted.as_ref().map_or(0.0, |f| f.r_squared);
        let best = fit.selection.fits.first().map_or(0.0, |f| f.r_squared);
        ok &= classified == want && predicted >= 0.99 && best - predicted < SELECTION_MARGIN;
        shown.push(format!(
            "(1,{big}) -> {} R^2 {predicted:.4} (empirical best {:?})",
            classified.label(),
            fit.selection.best.map_or("tie", |m| m.label())
        ));
    }
    verdict(ok, format!("classified by ellipticity, predicted model consistent with data: {}", shown.join("; ")))
}

fn fd_vs_exact() -> Result<Verdict> {
    let eps = 0.1;
    let p = PucciParams::new(1.0, 2.0, 2)?;
    let mut ok = true;
    let mut shown = Vec::new();
    let mut eighth: f64 = 0.0;
    for sign in Sign::BOTH {
        let exact = ball_solution(sign, 0.0, 1.0, eps, &p)?.exp();
        let mut errors = Vec::new();
        for k in [4.0, 8.0, 16.0] {
            let t0 = Instant::now();
            let sol = solve_elliptic(&disk(), sign, eps, &p, &GridConfig::new(eps / k), &EllipticOptions::default())?;
            if k == 8.0 {
                eighth = eighth.max(t0.elapsed().as_secs_f64());
            }
            errors.push(rel(sol.field.sample(&[0.0, 0.0])?, exact));
        }
        let factors: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
        ok &= factors.iter().all(|&f| f >= 1.5);
        let errors: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
        let factors: Vec<String> = factors.iter().map(|f| format!("{f:.2}")).collect();
        shown.push(format!("{sign:?} errors [{}] factors [{}]", errors.join(", "), factors.join(", ")));
    }
    verdict(ok && eighth < 120.0, format!("{}; h = eps/8 solve {eighth:.1} s", shown.join("; ")))
}

fn barriers() -> Result<Verdict> {
    let p = PucciParams::new(1.0, 2.0, 2)?;
    let mut violations = 0;
    let mut nodes = 0;
    for dom in [disk(), square()] {
        for sign in Sign::BOTH {
            let eps = 0.1;
            let ell = solve_elliptic(&dom, sign, eps, &p, &GridConfig::new(eps / 8.0), &EllipticOptions::default())?;
            let t = 0.01;
            let par = solve_parabolic(&dom, sign, t, &p, &GridConfig::new(t.sqrt() / 6.0), &ParabolicOptions::default())?;
            for field in [&ell.field, &par.snapshots[0]] {
                let r = bracket_field(field, &dom, 0.5)?;
                violations += r.upper_violations + r.lower_violations;
                nodes += r.nodes;
            }
        }
    }
    let radii: Vec<f64> = (1..=60).map(|k| 0.05 * k as f64).collect();
    let times = [0.01, 0.05, 0.1, 0.5, 1.0];
    let mut scans = Vec::new();
    for (l, big) in [(1.0, 2.0), (1.0, 1.0)] {
        let pp = PucciParams::new(l, big, 2)?;
        for sign in Sign::BOTH {
            scans.push(phi_residual_scan(sign, &pp, &radii, &times)?);
        }
    }
    let phi_ok = scans.iter().all(|s| s.passed());
    let zero: usize = scans.iter().map(|s| s.zero_region_samples).sum();
    verdict(
        violations == 0 && phi_ok,
        format!("{violations} violations over {nodes} nodes (disk, square; elliptic, parabolic; both signs); Phi residual signs ok: {phi_ok}, {zero} zero-region samples exactly 0"),
    )
}

fn parabolic_rates() -> Result<Verdict> {
    let p = PucciParams::new(1.0, 2.0, 2)?;
    let ts = powers(4.0, 2, 7);
    let source = Source::Fd(FdSettings::for_kind(ProblemKind::Parabolic));
    let mut ok = true;
    let mut shown = Vec::new();
    for sign in Sign::BOTH {
        let study = varadhan_sweep(ProblemKind::Parabolic, &disk(), sign, &p, &[vec![0.9, 0.0]], &ts, &source)?;
        let obs = &study.observed[0];
        let r2 = study.fits[0].two_term.as_ref().map_or(0.0, |f| f.r_squared);
        let shrinks = obs.last().unwrap().abs() < obs[0].abs();
        ok &= r2 >= 0.98 && shrinks;
        shown.push(format!("{sign:?} R^2 {r2:.4}, discrepancy {:.3e} -> {:.3e}", obs[0], obs.last().unwrap()));
    }
    verdict(ok, format!("probe depth 0.1, t log(1/t) + t fit: {}", shown.join("; ")))
}

fn elliptic_qmeans() -> Result<Verdict> {
    let p = PucciParams::new(1.0, 1.0, 2)?;
    let flat = Domain::new(Shape::rectangle([-1.5, 0.0], [1.5, 2.5])?);
    let curved = Domain::new(Shape::ball(vec![0.0, 0.0], 2.0)?);
    let eps = [0.2, 0.1, 0.05, 0.025];
    let set = QMeanSettings::for_kind(ProblemKind::Elliptic);
    let flat_c = contact_ball(&flat, &[0.0, 1.0])?;
    let curved_c = contact_ball(&curved, &[1.0, 0.0])?;
    let flat2 = elliptic_qmean_limit(&flat, &flat_c, Sign::Minus, &p, 2.0, &eps, &set)?;
    let curved2 = elliptic_qmean_limit(&curved, &curved_c, Sign::Minus, &p, 2.0, &eps, &set)?;
    let inf = elliptic_qmean_limit(&flat, &flat_c, Sign::Minus, &p, f64::INFINITY, &eps, &set)?;
    let c22 = c_constant(2, 2.0)?;
    let flat_err = rel(flat2.extrapolation.limit, c22);
    let ratio = curved2.extrapolation.limit / flat2.extrapolation.limit;
    let want = curved_c.pi0.powf(-0.5);
    let ratio_err = rel(ratio, want);
    let inf_err = rel(inf.extrapolation.limit, 0.5);
    verdict(
        flat_err <= 0.10 && ratio_err <= 0.10 && inf_err <= 0.02,
        format!(
            "flat limit {:.4} vs c_2,2 {c22:.4} ({:.1}%); curved/flat {ratio:.4} vs {want:.4} ({:.1}%); mu_inf {:.4} ({:.2}%)",
            flat2.extrapolation.limit,
            100.0 * flat_err,
            100.0 * ratio_err,
            inf.extrapolation.limit,
            100.0 * inf_err
        ),
    )
}

fn parabolic_qmeans() -> Result<Verdict> {
    let flat = Domain::new(Shape::rectangle([-1.5, 0.0], [1.5, 2.5])?);
    let contact = contact_ball(&flat, &[0.0, 1.0])?;
    let ts = [0.02, 0.01, 0.005, 0.0025];
    let set = QMeanSettings::for_kind(ProblemKind::Parabolic);
    let equal = PucciParams::new(1.0, 1.0, 2)?;
    let base = parabolic_qmean_limit(&flat, &contact, Sign::Minus, &equal, 2.0, &ts, &set)?;
    let big = big_c_constant(2, 2.0)?;
    let base_err = rel(base.extrapolation.limit, big);
    let p = PucciParams::new(1.0, 2.0, 2)?;
    let minus = parabolic_qmean_limit(&flat, &contact, Sign::Minus, &p, 2.0, &ts, &set)?;
    let plus = parabolic_qmean_limit(&flat, &contact, Sign::Plus, &p, 2.0, &ts, &set)?;
    let ratio = plus.extrapolation.limit / minus.extrapolation.limit;
    let want = 2f64.powf(3.0 / 4.0);
    let ratio_err = rel(ratio, want);
    verdict(
        base_err <= 0.15 && ratio_err <= 0.10,
        format!(
            "flat limit {:.4} vs C_2,2 {big:.4} ({:.1}%); plus/minus {ratio:.4} vs {want:.4} ({:.1}%)",
            base.extrapolation.limit,
            100.0 * base_err,
            100.0 * ratio_err
        ),
    )
}

fn run_cli(args: &[&str], out: &Path) -> std::result::Result<(), String> {
    let run = Command::new(env!("CARGO_BIN_EXE_pucci"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if run.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?} exited with {}: {}", run.status, String::from_utf8_lossy(&run.stderr).trim()))
    }
}

fn same_tree(a: &Path, b: &Path) -> std::result::Result<usize, String> {
    let names = |d: &Path| -> std::result::Result<Vec<PathBuf>, String> {
        let mut v: Vec<PathBuf> = std::fs::read_dir(d)
            .map_err(|e| e.to_string())?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| e.to_string())?;
        v.sort();
        Ok(v)
    };
    let (fa, fb) = (names(a)?, names(b)?);
    if fa.iter().map(|p| p.file_name()).ne(fb.iter().map(|p| p.file_name())) {
        return Err(format!("{} and {} hold different files", a.display(), b.display()));
    }
    for (x, y) in fa.iter().zip(&fb) {
        if std::fs::read(x).map_err(|e| e.to_string())? != std::fs::read(y).map_err(|e| e.to_string())? {
            return Err(format!("{} differs between runs", x.display()));
        }
    }
    Ok(fa.len())
}

fn determinism() -> Result<Verdict> {
    let root = std::env::temp_dir().join(format!("pucci-acceptance-{}", std::process::id()));
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut runs: Vec<(String, Vec<String>)> = vec![("selftest".into(), vec!["selftest".into()])];
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&configs)
        .map_err(|e| pucci_core::Error::Io(e.to_string()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    entries.sort();
    for path in entries {
        let stem = path.file_stem().unwrap().to_string_lossy().to_string();
        let command = command_for(&stem);
        runs.push((stem, vec![command, "--config".into(), path.display().to_string()]));
    }
    let mut files = 0;
    let mut problems = Vec::new();
    for (name, args) in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (root.join(name).join("a"), root.join(name).join("b"));
        let outcome = run_cli(&args, &a).and_then(|_| run_cli(&args, &b)).and_then(|_| same_tree(&a, &b));
        match outcome {
            Ok(n) => files += n,
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    let _ = std::fs::remove_dir_all(&root);
    verdict(
        problems.is_empty(),
        format!("{} runs twice each, {files} files byte-identical; problems {problems:?}", runs.len()),
    )
}

/// Subcommand for a config file, read from its name prefix.
fn command_for(stem: &str) -> String {
    let prefix = stem.split('_').next().unwrap_or(stem);
    match prefix {
        "elliptic" => "solve-elliptic".into(),
        "parabolic" => "solve-parabolic".into(),
        other => other.into(),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Result<Verdict>); 10] = [
        ("operator correctness", operators),
        ("special functions", special_functions),
        ("radial rates", radial_rates),
        ("regime classification", regimes),
        ("grid vs exact", fd_vs_exact),
        ("barrier bracketing", barriers),
        ("parabolic rates", parabolic_rates),
        ("elliptic q-mean limits", elliptic_qmeans),
        ("parabolic q-mean limits", parabolic_qmeans),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| *f == id.to_string()) {
            continue;
        }
        let t0 = Instant::now();
        let (passed, detail) = match run() {
            Ok(v) => (v.passed, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = t0.elapsed().as_secs_f64();
        println!("criterion {id:>2} {} {name}: {detail} [{secs:.1} s]", if passed { "PASS" } else { "FAIL" });
        failed += usize::from(!passed);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
