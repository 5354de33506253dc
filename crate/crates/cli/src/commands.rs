use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use nlcomp_core::simulator::{classify_outcome, run, write_snapshot_csv, Trajectory};
use nlcomp_core::spectral::{critical_length, nodes_for, principal_eigenvalue_with, EigenOptions};
use nlcomp_core::speed::{dispersal_lower_bound, faster_spreader, semiwave, spreading_speed, speed_c2};
use nlcomp_core::thresholds::{build_scenario, find_mu_star, verify_scenario, Scenario};

use crate::config::RunConfig;
use crate::error::CliError;

/// Where artifacts land plus the config that produced them.
pub struct Workspace {
    pub dir: PathBuf,
}

impl Workspace {
    pub fn create(root: &Path, cfg: &RunConfig) -> Result<Self, CliError> {
        let dir = root.join(&cfg.output.dir);
        fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        fs::write(dir.join("config.toml"), cfg.echo())?;
        Ok(Workspace { dir })
    }

    fn file(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(BufWriter::new(f))
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    fn trajectory(&self, traj: &Trajectory) -> Result<(), CliError> {
        let mut w = self.file("trajectory.csv")?;
        traj.write_csv(&mut w)?;
        w.flush()?;
        for (i, snap) in traj.snapshots.iter().enumerate() {
            let mut w = self.file(&format!("snapshot_{i:03}.csv"))?;
            write_snapshot_csv(snap, &mut w)?;
            w.flush()?;
        }
        Ok(())
    }
}

/// Outcome of a command: a summary for stdout and whether checks held.
pub struct Outcome {
    pub summary: serde_json::Value,
    pub passed: bool,
}

impl Outcome {
    fn ok(summary: serde_json::Value) -> Self {
        Outcome { summary, passed: true }
    }
}

pub fn simulate(cfg: &RunConfig, ws: &Workspace) -> Result<Outcome, CliError> {
    let (j1, j2) = cfg.kernels()?;
    let traj = run(&cfg.initial_data(), &cfg.model, &j1, &j2, &cfg.run_options())?;
    let report = classify_outcome(&traj, &cfg.model, &j1, &cfg.classify)?;
    ws.trajectory(&traj)?;
    ws.json("outcome.json", &report)?;
    let end = &traj.final_state;
    Ok(Outcome::ok(json!({
        "classification": report.classification.to_string(),
        "t": end.t,
        "g": end.g,
        "h": end.h,
        "dt": traj.dt,
        "snapshots": traj.snapshots.len(),
    })))
}

pub fn eigen(cfg: &RunConfig, ws: &Workspace) -> Result<Outcome, CliError> {
    let (j1, _) = cfg.kernels()?;
    let opts = EigenOptions {
        max_iter: cfg.eigen.max_iter,
        tol: cfg.eigen.tol,
    };
    let mut w = ws.file("eigen.csv")?;
    writeln!(w, "# nlcomp eigen v1")?;
    writeln!(w, "l,lambda_p,nodes,residual")?;
    let mut rows = Vec::new();
    for &l in &cfg.eigen.lengths {
        let n = nodes_for(&j1, l, cfg.eigen.per_radius);
        let r = principal_eigenvalue_with(cfg.model.d1, &j1, cfg.eigen.a, l, n, opts)?;
        writeln!(w, "{l:.16e},{:.16e},{},{:.3e}", r.lambda_p, r.n, r.residual)?;
        rows.push(json!({ "l": l, "lambda_p": r.lambda_p }));
    }
    w.flush()?;
    Ok(Outcome::ok(json!({ "d1": cfg.model.d1, "eigen": rows })))
}

pub fn lsigma(cfg: &RunConfig, ws: &Workspace) -> Result<Outcome, CliError> {
    let (j1, _) = cfg.kernels()?;
    let d1 = cfg.model.d1;
    let lengths = cfg
        .lsigma
        .fractions
        .iter()
        .map(|f| critical_length(d1, &j1, f * d1))
        .collect::<Result<Vec<_>, _>>()?;
    ws.json("lsigma.json", &lengths)?;
    let rows: Vec<_> = lengths.iter().map(|c| json!({ "sigma": c.sigma, "length": c.length })).collect();
    Ok(Outcome::ok(json!({ "d1": d1, "critical_lengths": rows })))
}

pub fn speed(cfg: &RunConfig, ws: &Workspace) -> Result<Outcome, CliError> {
    let (j1, j2) = cfg.kernels()?;
    let p = &cfg.model;
    let c1 = spreading_speed(p.d1, 1.0, &j1)?;
    let c2 = speed_c2(p, &j2)?;
    let value = json!({
        "c1_star": c1.c_star,
        "c1_argmin_lambda": c1.argmin_lambda,
        "c2": c2,
        "dispersal_lower_bound": dispersal_lower_bound(p.d1, &j1)?,
        "kernel1": j1.label(),
        "kernel2": j2.label(),
    });
    ws.json("speed.json", &value)?;
    Ok(Outcome::ok(value))
}

pub fn semiwave_cmd(cfg: &RunConfig, ws: &Workspace) -> Result<Outcome, CliError> {
    let (j1, j2) = cfg.kernels()?;
    let sw = semiwave(&cfg.model, &j1, cfg.semiwave.rho, &cfg.semiwave.options())?;
    let mut w = ws.file("semiwave_profile.csv")?;
    writeln!(w, "# nlcomp semiwave v1")?;
    writeln!(w, "x,phi")?;
    for (x, phi) in sw.nodes().zip(&sw.profile) {
        writeln!(w, "{x:.16e},{phi:.16e}")?;
    }
    w.flush()?;
    // Only meaningful when the invasion regime's speeds are finite.
    let faster = faster_spreader(&cfg.model, &j1, &j2).ok();
    let value = json!({
        "c1_rho": sw.c1_rho,
        "rho": sw.rho,
        "mu": sw.mu,
        "x_sw": sw.x_sw,
        "identity_residual": sw.identity_residual,
        "c_star_rho": sw.c_star_rho,
        "faster_spreader": faster,
    });
    ws.json("semiwave.json", &value)?;
    Ok(Outcome::ok(value))
}

fn config_scenario(cfg: &RunConfig) -> Result<Scenario, CliError> {
    let (j1, j2) = cfg.kernels()?;
    Ok(Scenario {
        name: "config".into(),
        params: cfg.model,
        init: cfg.initial_data(),
        j1,
        j2,
        run: cfg.run_options(),
        classify: cfg.classify.clone(),
        expectations: Vec::new(),
        notes: Vec::new(),
    })
}

pub fn mustar(cfg: &RunConfig, ws: &Workspace) -> Result<Outcome, CliError> {
    let scenario = config_scenario(cfg)?;
    let m = &cfg.mustar;
    let result = find_mu_star(&scenario, (m.mu_min, m.mu_max), &m.options())?;
    let mut w = ws.file("mustar.csv")?;
    result.write_csv(&mut w)?;
    w.flush()?;
    ws.json("mustar.json", &result)?;
    Ok(Outcome::ok(json!({
        "status": result.status,
        "mu_lo": result.mu_lo,
        "mu_hi": result.mu_hi,
        "runs": result.evaluations.len(),
        "monotone_consistent": result.monotone_consistent,
        "endpoints_stable": result.endpoints_stable,
    })))
}

pub fn scenario(cfg: &RunConfig, name: Option<&str>, ws: &Workspace) -> Result<Outcome, CliError> {
    let name = name
        .or(cfg.scenario.name.as_deref())
        .ok_or_else(|| CliError::Validation("scenario needs a template name".into()))?;
    let (j1, j2) = cfg.kernels()?;
    let mut s = build_scenario(name, &cfg.model, &j1, &j2)?;
    if let Some(t) = cfg.scenario.horizon {
        s.run.horizon = t;
    }
    for note in &s.notes {
        log::warn!("{note}");
    }
    let (traj, report) = verify_scenario(&s)?;
    ws.trajectory(&traj)?;
    ws.json("report.json", &report)?;
    let failed: Vec<_> = report.results.iter().filter(|r| !r.passed).map(|r| r.detail.clone()).collect();
    Ok(Outcome {
        summary: json!({
            "scenario": report.name,
            "classification": report.outcome.classification.to_string(),
            "passed": report.passed(),
            "failed": failed,
        }),
        passed: report.passed(),
    })
}

#[derive(Serialize)]
struct SweepRow {
    value: f64,
    classification: String,
    g: f64,
    h: f64,
    u_max: f64,
}

pub fn sweep(cfg: &RunConfig, ws: &Workspace) -> Result<Outcome, CliError> {
    let base = cfg.echo();
    let key = cfg.sweep.parameter.clone();
    let configs = cfg
        .sweep
        .values
        .iter()
        .map(|v| RunConfig::parse(&base, &[format!("{key}={v:?}")]).map(|c| (*v, c)))
        .collect::<Result<Vec<_>, _>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.sweep.workers)
        .build()
        .map_err(|e| CliError::Validation(format!("sweep.workers: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        configs
            .par_iter()
            .map(|(value, c)| -> Result<SweepRow, CliError> {
                let (j1, j2) = c.kernels()?;
                let traj = run(&c.initial_data(), &c.model, &j1, &j2, &c.run_options())?;
                let report = classify_outcome(&traj, &c.model, &j1, &c.classify)?;
                Ok(SweepRow {
                    value: *value,
                    classification: report.classification.to_string(),
                    g: traj.final_state.g,
                    h: traj.final_state.h,
                    u_max: report.u_max_final,
                })
            })
            .collect::<Result<_, _>>()
    })?;
    let mut w = ws.file("sweep.csv")?;
    writeln!(w, "# nlcomp sweep v1")?;
    writeln!(w, "{key},classification,g,h,u_max")?;
    for r in &rows {
        writeln!(w, "{:.16e},{},{:.16e},{:.16e},{:.16e}", r.value, r.classification, r.g, r.h, r.u_max)?;
    }
    w.flush()?;
    Ok(Outcome::ok(json!({ "parameter": key, "rows": rows })))
}
