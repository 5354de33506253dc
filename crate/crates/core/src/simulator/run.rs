use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::model::ModelParams;
use crate::speed::speed_c1;

use super::state::{FreeBoundaryState, Grid, InitialData};
use super::step::{Scratch, Simulator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    pub dx: f64,
    /// Truncation half-width; sized from the spreading speed when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    /// Requested time step, snapped down so probes fall on steps; defaults to the stable bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub horizon: f64,
    pub probe_interval: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Admit `v0 = 0` (single-species runs).
    #[serde(default)]
    pub allow_absent_native: bool,
}

impl RunOptions {
    pub fn new(dx: f64, horizon: f64) -> Self {
        RunOptions {
            dx,
            x_max: None,
            dt: None,
            horizon,
            probe_interval: 0.5,
            snapshot_times: Vec::new(),
            allow_absent_native: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub t: f64,
    pub g: f64,
    pub h: f64,
    pub u_max: f64,
    pub u_mass: f64,
    pub u_center: f64,
    pub v_center: f64,
}

impl ProbeRecord {
    fn of(s: &FreeBoundaryState) -> Self {
        ProbeRecord {
            t: s.t,
            g: s.g,
            h: s.h,
            u_max: s.u_max(),
            u_mass: s.u_mass(),
            u_center: s.u_center(),
            v_center: s.v_center(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub g0: f64,
    pub h0: f64,
    pub dt: f64,
    pub dt_max: f64,
    pub probes: Vec<ProbeRecord>,
    pub snapshots: Vec<FreeBoundaryState>,
    pub final_state: FreeBoundaryState,
}

impl Trajectory {
    pub fn horizon(&self) -> f64 {
        self.final_state.t
    }

    /// Probe closest to time `t`.
    pub fn probe_at(&self, t: f64) -> &ProbeRecord {
        self.probes
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .expect("trajectory has at least one probe")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# nlcomp trajectory v1")?;
        writeln!(out, "t,g,h,u_max,u_mass,u0_center,v_center")?;
        for p in &self.probes {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.t, p.g, p.h, p.u_max, p.u_mass, p.u_center, p.v_center
            )?;
        }
        Ok(())
    }
}

/// Writes one snapshot as `x,u,v` rows.
pub fn write_snapshot_csv<W: Write>(state: &FreeBoundaryState, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# nlcomp snapshot v1")?;
    writeln!(out, "# t = {:.16e}, g = {:.16e}, h = {:.16e}", state.t, state.g, state.h)?;
    writeln!(out, "x,u,v")?;
    for i in 0..state.grid.len() {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", state.grid.x(i), state.u[i], state.v[i])?;
    }
    Ok(())
}

/// Truncation half-width large enough that the fronts stay clear of the
/// edges: `max(|g0|, h0) + (C1 + 1) T + 4 S`. Heavy-tailed kernels have no
/// speed estimate, so `x_max` must then be given.
pub fn auto_half_width(init: &InitialData, params: &ModelParams, j1: &Kernel, j2: &Kernel, horizon: f64) -> Result<f64> {
    let s = j1.support_radius().max(j2.support_radius());
    let c1 = speed_c1(params, j1).map_err(|e| match e {
        Error::DivergentMgf(_) => Error::InvalidInput("heavy-tailed kernel: set the truncation half-width explicitly".into()),
        other => other,
    })?;
    let (g0, h0) = init.habitat();
    Ok(g0.abs().max(h0) + (c1 + 1.0) * horizon + 4.0 * s)
}

/// Integrates the system to `opts.horizon`.
pub fn run(init: &InitialData, params: &ModelParams, j1: &Kernel, j2: &Kernel, opts: &RunOptions) -> Result<Trajectory> {
    if !(opts.horizon > 0.0 && opts.probe_interval > 0.0) {
        return Err(Error::InvalidInput("horizon and probe interval must be positive".into()));
    }
    if opts.snapshot_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("snapshot times must be sorted".into()));
    }
    params.validate()?;
    let x_max = match opts.x_max {
        Some(x) => x,
        None => auto_half_width(init, params, j1, j2, opts.horizon)?,
    };
    let grid = Grid::covering(opts.dx, x_max)?;
    let (u0, v0) = init.resolve(opts.allow_absent_native)?;
    let sim = Simulator::new(*params, j1, j2, grid, u0.sup(), v0.sup())?;
    let mut state = FreeBoundaryState::initial(init, grid, opts.allow_absent_native)?;

    let dt_req = opts.dt.unwrap_or(sim.dt_max());
    if dt_req > sim.dt_max() {
        return Err(Error::StabilityViolation {
            dt: dt_req,
            dt_max: sim.dt_max(),
        });
    }
    let per_probe = (opts.probe_interval / dt_req).ceil().max(1.0) as usize;
    let dt = opts.probe_interval / per_probe as f64;
    let total = (opts.horizon / dt).round() as usize;

    let mut probes = vec![ProbeRecord::of(&state)];
    let mut snapshots = Vec::new();
    let mut pending = opts.snapshot_times.iter().peekable();
    let mut scratch = Scratch::default();
    for n in 1..=total {
        sim.advance(&mut state, dt, &mut scratch)?;
        // exact multiple of dt keeps probe times free of accumulated rounding
        state.t = n as f64 * dt;
        if n % per_probe == 0 || n == total {
            probes.push(ProbeRecord::of(&state));
        }
        while pending.peek().is_some_and(|&&ts| ts <= state.t + 0.5 * dt) {
            pending.next();
            snapshots.push(state.clone());
        }
    }
    let (g0, h0) = init.habitat();
    Ok(Trajectory {
        g0,
        h0,
        dt,
        dt_max: sim.dt_max(),
        probes,
        snapshots,
        final_state: state,
    })
}
