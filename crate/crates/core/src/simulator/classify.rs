use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kernel::Kernel;
use crate::model::ModelParams;
use crate::numerics::ls_slope;
use crate::spectral::{critical_length, nodes_for, principal_eigenvalue};

use super::run::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Spreading,
    Vanishing,
    Undecided,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Spreading => "Spreading",
            Classification::Vanishing => "Vanishing",
            Classification::Undecided => "Undecided",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyOptions {
    /// Span a spreading run must reach; derived from the initial habitat and
    /// the critical length `l_{1-k}` when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span_threshold: Option<f64>,
    pub u_max_tol: f64,
    /// Largest total front movement over the last half for a stall.
    pub stall_tol: f64,
    /// Relative span growth over the last half required for spreading.
    pub growth_fraction: f64,
    /// Slack on `lambda_p <= k - 1` in the vanishing consistency check.
    pub theorem_a_slack: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            span_threshold: None,
            u_max_tol: 1e-3,
            stall_tol: 1e-2,
            growth_fraction: 0.2,
            theorem_a_slack: 0.02,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeReport {
    pub classification: Classification,
    pub horizon: f64,
    pub front_span: f64,
    pub span_threshold: f64,
    /// Least-squares slopes of `g(t)` and `h(t)` over the last half.
    pub slope_g: f64,
    pub slope_h: f64,
    pub u_max_final: f64,
    pub u_mass_final: f64,
    pub u_at_0: f64,
    pub v_at_0: f64,
    /// Front movement `|h(T) - h(T/2)| + |g(T) - g(T/2)|`.
    pub late_front_movement: f64,
    /// Evaluated for vanishing runs only.
    pub theorem_a_consistent: Option<bool>,
    /// `lambda_p` on the final habitat, for vanishing runs.
    pub lambda_p_final: Option<f64>,
    /// Right front advancing while the left one stalls.
    pub one_sided: bool,
    /// Vanishing relies on the finite-horizon stall heuristic.
    pub stall_heuristic: bool,
}

/// `max(4 l_{1-k}, 10 (h0 - g0))`, the first term only when `l_{1-k}` exists
/// (`0 < 1 - k < d1`).
pub fn default_span_threshold(params: &ModelParams, j1: &Kernel, g0: f64, h0: f64) -> Result<f64> {
    let base = 10.0 * (h0 - g0);
    let sigma = 1.0 - params.k;
    if sigma > 0.0 && sigma < params.d1 {
        Ok(base.max(4.0 * critical_length(params.d1, j1, sigma)?.length))
    } else {
        Ok(base)
    }
}

/// Classifies a finished run as spreading, vanishing or undecided.
pub fn classify_outcome(traj: &Trajectory, params: &ModelParams, j1: &Kernel, opts: &ClassifyOptions) -> Result<OutcomeReport> {
    let end = traj.probes.last().expect("trajectory has probes");
    let horizon = end.t;
    let mid = traj.probe_at(0.5 * horizon);
    let span = end.h - end.g;
    let span_threshold = match opts.span_threshold {
        Some(s) => s,
        None => default_span_threshold(params, j1, traj.g0, traj.h0)?,
    };

    let late: Vec<_> = traj.probes.iter().filter(|p| p.t >= mid.t).collect();
    let ts: Vec<f64> = late.iter().map(|p| p.t).collect();
    let slope_g = ls_slope(&ts, &late.iter().map(|p| p.g).collect::<Vec<_>>());
    let slope_h = ls_slope(&ts, &late.iter().map(|p| p.h).collect::<Vec<_>>());

    let dh = (end.h - mid.h).abs();
    let dg = (end.g - mid.g).abs();
    let movement = dh + dg;
    let grew = span >= (1.0 + opts.growth_fraction) * (mid.h - mid.g);

    let classification = if span >= span_threshold && grew {
        Classification::Spreading
    } else if end.u_max <= opts.u_max_tol && movement <= opts.stall_tol {
        Classification::Vanishing
    } else {
        Classification::Undecided
    };

    let (theorem_a_consistent, lambda_p_final) = if classification == Classification::Vanishing {
        let n = nodes_for(j1, span, 16.0);
        let lp = principal_eigenvalue(params.d1, j1, end.g, span, n)?.lambda_p;
        let ok = params.d1 > 1.0 - params.k && lp <= params.k - 1.0 + opts.theorem_a_slack;
        (Some(ok), Some(lp))
    } else {
        (None, None)
    };

    Ok(OutcomeReport {
        classification,
        horizon,
        front_span: span,
        span_threshold,
        slope_g,
        slope_h,
        u_max_final: end.u_max,
        u_mass_final: end.u_mass,
        u_at_0: end.u_center,
        v_at_0: end.v_center,
        late_front_movement: movement,
        theorem_a_consistent,
        lambda_p_final,
        one_sided: dh > opts.stall_tol && dg <= opts.stall_tol,
        stall_heuristic: classification == Classification::Vanishing,
    })
}
