//! One function per subcommand: validate, compute, write artifacts.

use crate::config::*;
use crate::output::{float, Csv, OutDir};
use pucci_core::asym::{big_c_constant, c_constant, qmean_limit, varadhan_sweep, QMeanSettings};
use pucci_core::fd::{solve_elliptic, solve_parabolic, ScalarField};
use pucci_core::geometry::{contact_ball, Domain};
use pucci_core::radial::RadialEllipticSolution;
use pucci_core::selftest::run_selftest;
use pucci_core::special::{ode_residual_check, profile, ProfileParams};
use pucci_core::{Error, Result};
use serde_json::{json, Value};
use std::path::Path;

pub enum Outcome {
    Done(Value),
    /// Ran to completion but some checks failed.
    Failed(Value),
}

fn two_dimensional(dom: &Domain) -> Result<()> {
    if dom.dim() != 2 {
        return Err(Error::Input(format!("grid solvers are two-dimensional; domain has dimension {}", dom.dim())));
    }
    Ok(())
}

fn field_artifacts(out: &mut OutDir, stem: &str, field: &ScalarField) -> Result<()> {
    let mut csv = Vec::new();
    field.write_csv(&mut csv)?;
    out.write(&format!("{stem}.csv"), &csv)?;
    out.write(&format!("{stem}.bin"), &field.to_binary())
}

pub fn special(cfg: &SpecialConfig, out: &mut OutDir) -> Result<Outcome> {
    let pp = ProfileParams::new(cfg.a, cfg.b)?;
    let mut csv = Csv::new(&["sigma", "value", "log_value", "rel_error_estimate", "ode_residual"]);
    let mut rows = Vec::new();
    for &s in &cfg.sigma {
        let r = profile(cfg.kind, s, &pp)?;
        let ode = ode_residual_check(cfg.kind, &pp, s)?;
        csv.float_row(&[], &[s, r.value, r.log_value, r.rel_error_estimate, ode]);
        rows.push(json!({"sigma": s, "report": r, "ode_residual": ode}));
    }
    out.write("profile.csv", &csv.into_bytes())?;
    out.write_json("profile.json", &json!({"kind": cfg.kind, "a": cfg.a, "b": cfg.b, "rows": rows}))?;
    Ok(Outcome::Done(json!({"points": cfg.sigma.len()})))
}

pub fn radial(cfg: &RadialConfig, out: &mut OutDir) -> Result<Outcome> {
    let sol = RadialEllipticSolution::new(cfg.kind, cfg.sign, cfg.radius, cfg.epsilon, cfg.params)?;
    let mut csv = Csv::new(&["r", "log_u", "discrepancy"]);
    for &r in &cfg.points {
        csv.float_row(&[], &[r, sol.log_u(r)?, sol.discrepancy(r)?]);
    }
    out.write("radial.csv", &csv.into_bytes())?;
    Ok(Outcome::Done(json!({"points": cfg.points.len()})))
}

pub fn solve_elliptic_cmd(cfg: &EllipticConfig, base: &Path, out: &mut OutDir) -> Result<Outcome> {
    let dom = cfg.domain.build(base)?;
    two_dimensional(&dom)?;
    let sol = solve_elliptic(&dom, cfg.sign, cfg.epsilon, &cfg.params, &cfg.grid, &cfg.options)?;
    field_artifacts(out, "field", &sol.field)?;
    let g = &sol.field.grid;
    let report = json!({
        "report": sol.report,
        "meta": sol.field.meta,
        "grid": {"nx": g.nx, "ny": g.ny, "h": g.h, "origin": g.origin, "interior": g.interior_count()},
    });
    out.write_json("report.json", &report)?;
    Ok(Outcome::Done(json!({
        "max_residual": sol.report.max_residual,
        "iterations": sol.report.iterations,
        "unknowns": sol.report.unknowns,
    })))
}

pub fn solve_parabolic_cmd(cfg: &ParabolicConfig, base: &Path, out: &mut OutDir) -> Result<Outcome> {
    let dom = cfg.domain.build(base)?;
    two_dimensional(&dom)?;
    let sol = solve_parabolic(&dom, cfg.sign, cfg.t_final, &cfg.params, &cfg.grid, &cfg.options)?;
    for (k, snap) in sol.snapshots.iter().enumerate() {
        field_artifacts(out, &format!("snapshot_{k:03}"), snap)?;
    }
    let g = sol.grid();
    let report = json!({
        "times": sol.times,
        "dt": sol.dt,
        "report": sol.report,
        "grid": {"nx": g.nx, "ny": g.ny, "h": g.h, "origin": g.origin, "interior": g.interior_count()},
    });
    out.write_json("report.json", &report)?;
    Ok(Outcome::Done(json!({"snapshots": sol.times.len(), "steps": sol.report.iterations, "dt": sol.dt})))
}

pub fn varadhan(cfg: &VaradhanConfig, base: &Path, out: &mut OutDir) -> Result<Outcome> {
    let dom = cfg.domain.build(base)?;
    let study = varadhan_sweep(cfg.kind, &dom, cfg.sign, &cfg.params, &cfg.probes, &cfg.parameters, &cfg.source)?;
    let mut csv = Csv::new(&["probe", "k", "parameter", "x", "distance", "log_value", "discrepancy"]);
    for (i, probe) in study.probes.iter().enumerate() {
        for (k, &s) in study.parameters.iter().enumerate() {
            let at = probe.evaluated[k].iter().map(|v| float(*v)).collect::<Vec<_>>().join(" ");
            let lead = [i.to_string(), k.to_string(), float(s), at];
            csv.float_row(&lead, &[probe.distance[k], study.log_values[i][k], study.observed[i][k]]);
        }
    }
    out.write("study.csv", &csv.into_bytes())?;
    out.write_json("study.json", &study)?;
    let best: Vec<Value> = study
        .fits
        .iter()
        .map(|f| json!({"predicted": f.predicted, "selection": f.selection.best, "tie": f.selection.tie}))
        .collect();
    Ok(Outcome::Done(json!({"theoretical": study.theoretical, "fits": best})))
}

pub fn qmean(cfg: &QMeanConfig, base: &Path, out: &mut OutDir) -> Result<Outcome> {
    let dom = cfg.domain.build(base)?;
    two_dimensional(&dom)?;
    let contact = contact_ball(&dom, &cfg.x)?;
    let set = cfg.settings.clone().unwrap_or_else(|| QMeanSettings::for_kind(cfg.kind));
    let study = qmean_limit(cfg.kind, &dom, &contact, cfg.sign, &cfg.params, cfg.q.0, &cfg.parameters, &set)?;
    let mut csv = Csv::new(&["parameter", "value", "scaled", "predicted", "samples"]);
    for r in &study.results {
        csv.row(&[float(r.parameter), float(r.value), float(r.scaled), float(r.predicted), r.samples.to_string()]);
    }
    out.write("qmean.csv", &csv.into_bytes())?;
    out.write_json("qmean.json", &json!({"contact": contact, "settings": set, "study": study}))?;
    Ok(Outcome::Done(json!({
        "limit": study.extrapolation.limit,
        "error_bar": study.extrapolation.error_bar,
        "predicted": study.predicted,
        "relative_error": study.relative_error,
    })))
}

pub fn constants(cfg: &ConstantsConfig, out: Option<&mut OutDir>) -> Result<Outcome> {
    let v = json!({
        "N": cfg.n,
        "q": cfg.q,
        "c": c_constant(cfg.n, cfg.q.0)?,
        "C": big_c_constant(cfg.n, cfg.q.0)?,
    });
    if let Some(out) = out {
        out.write_json("constants.json", &v)?;
    }
    Ok(Outcome::Done(v))
}

pub fn selftest(cfg: &SelftestConfig, out: &mut OutDir) -> Result<Outcome> {
    let report = run_selftest(cfg.seed)?;
    out.write_json("selftest.json", &report)?;
    let failed: Vec<&str> = report.failures().iter().map(|c| c.name.as_str()).collect();
    let summary = json!({"checks": report.checks.len(), "failed": failed});
    Ok(if failed.is_empty() { Outcome::Done(summary) } else { Outcome::Failed(summary) })
}
