//! Critical expansion coefficient `mu*` and the invasion scenario templates.

mod scenario;

pub use scenario::{
    build_scenario, template, templates, verify_scenario, Expectation, ExpectationResult, Scenario, ScenarioReport,
    ScenarioTemplate,
};

use std::io::Write;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::{classify_outcome, default_span_threshold, run, Classification};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MuStarOptions {
    /// Final bracket width relative to its upper end.
    pub tol: f64,
    /// Undecided runs are repeated with the horizon doubled up to this factor.
    pub horizon_cap: f64,
    /// Fail with `UndecidableAtCap` instead of recording a spreading lean.
    pub strict: bool,
    /// Points of a concurrent geometric pre-scan that narrows the bracket.
    pub prescan: usize,
    /// Re-run both bracket ends with the horizon doubled.
    pub verify_doubling: bool,
}

impl Default for MuStarOptions {
    fn default() -> Self {
        MuStarOptions {
            tol: 0.05,
            horizon_cap: 8.0,
            strict: false,
            prescan: 0,
            verify_doubling: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MuStarStatus {
    /// `mu*` lies in `[mu_lo, mu_hi]`.
    Bracketed,
    /// Spreading already at the lower end: `mu*` is below the range (possibly zero).
    BelowBracket,
    /// Vanishing even at the upper end: `mu*` is above the range (possibly infinite).
    AboveBracket,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub mu: f64,
    pub classification: Classification,
    pub span: f64,
    pub horizon: f64,
    /// Still undecided at the horizon cap and counted as spreading.
    pub lean: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdResult {
    pub status: MuStarStatus,
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub evaluations: Vec<Evaluation>,
    pub monotone_consistent: bool,
    /// Whether both ends keep their classification with the horizon doubled.
    pub endpoints_stable: Option<bool>,
    pub span_threshold: f64,
}

impl ThresholdResult {
    pub fn width(&self) -> f64 {
        self.mu_hi - self.mu_lo
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# nlcomp mu-star v1")?;
        writeln!(out, "mu,classification,span,horizon,lean")?;
        for e in &self.evaluations {
            writeln!(out, "{:.16e},{},{:.16e},{:.16e},{}", e.mu, e.classification, e.span, e.horizon, e.lean)?;
        }
        Ok(())
    }
}

/// No vanishing run above a spreading one, after ordering by `mu`.
pub fn is_monotone(evals: &[Evaluation]) -> bool {
    let mut sorted: Vec<_> = evals.iter().filter(|e| e.classification != Classification::Undecided).collect();
    sorted.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    let first_spread = sorted.iter().position(|e| e.classification == Classification::Spreading);
    match first_spread {
        Some(i) => sorted[i..].iter().all(|e| e.classification == Classification::Spreading),
        None => true,
    }
}

struct Prober<'a> {
    scenario: &'a Scenario,
    opts: &'a MuStarOptions,
}

impl Prober<'_> {
    fn once(&self, mu: f64, horizon: f64) -> Result<(Classification, f64)> {
        let s = self.scenario;
        let params = s.params.with_mu(mu);
        let mut run_opts = s.run.clone();
        run_opts.horizon = horizon;
        run_opts.snapshot_times.clear();
        let traj = run(&s.init, &params, &s.j1, &s.j2, &run_opts)?;
        let report = classify_outcome(&traj, &params, &s.j1, &s.classify)?;
        Ok((report.classification, report.front_span))
    }

    fn evaluate(&self, mu: f64) -> Result<Evaluation> {
        let base = self.scenario.run.horizon;
        let mut horizon = base;
        loop {
            let (classification, span) = self.once(mu, horizon)?;
            if classification != Classification::Undecided {
                info!("mu = {mu}: {classification} at T = {horizon}");
                return Ok(Evaluation {
                    mu,
                    classification,
                    span,
                    horizon,
                    lean: false,
                });
            }
            if 2.0 * horizon > self.opts.horizon_cap * base * (1.0 + 1e-12) {
                if self.opts.strict {
                    return Err(Error::UndecidableAtCap { mu, horizon });
                }
                info!("mu = {mu}: undecided at the cap T = {horizon}, counted as spreading");
                return Ok(Evaluation {
                    mu,
                    classification: Classification::Spreading,
                    span,
                    horizon,
                    lean: true,
                });
            }
            horizon *= 2.0;
        }
    }
}

/// Brackets `mu*` by bisection on run-and-classify over `bracket`.
/// The scenario's own `mu` is ignored.
pub fn find_mu_star(scenario: &Scenario, bracket: (f64, f64), opts: &MuStarOptions) -> Result<ThresholdResult> {
    let (mu_min, mu_max) = bracket;
    if !(mu_min > 0.0 && mu_max > mu_min) {
        return Err(Error::InvalidInput(format!("mu bracket must satisfy 0 < min < max, got ({mu_min}, {mu_max})")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("mu* tolerance must be positive".into()));
    }
    let mut scenario = scenario.clone();
    let (g0, h0) = scenario.init.habitat();
    let span_threshold = match scenario.classify.span_threshold {
        Some(t) => t,
        None => default_span_threshold(&scenario.params, &scenario.j1, g0, h0)?,
    };
    // fixed across mu and horizons so that classifications are comparable
    scenario.classify.span_threshold = Some(span_threshold);
    let prober = Prober {
        scenario: &scenario,
        opts,
    };

    let mut evaluations = Vec::new();
    let mut lo = prober.evaluate(mu_min)?;
    let mut hi = prober.evaluate(mu_max)?;
    evaluations.extend([lo, hi]);

    let degenerate = |status, evaluations: Vec<Evaluation>| ThresholdResult {
        status,
        mu_lo: mu_min,
        mu_hi: mu_max,
        monotone_consistent: is_monotone(&evaluations),
        evaluations,
        endpoints_stable: None,
        span_threshold,
    };
    if lo.classification == Classification::Spreading {
        return Ok(degenerate(MuStarStatus::BelowBracket, evaluations));
    }
    if hi.classification == Classification::Vanishing {
        return Ok(degenerate(MuStarStatus::AboveBracket, evaluations));
    }

    if opts.prescan > 0 {
        let ratio = (mu_max / mu_min).powf(1.0 / (opts.prescan + 1) as f64);
        let grid: Vec<f64> = (1..=opts.prescan).map(|i| mu_min * ratio.powi(i as i32)).collect();
        let scanned: Vec<Evaluation> = grid.par_iter().map(|&mu| prober.evaluate(mu)).collect::<Result<_>>()?;
        for e in &scanned {
            match e.classification {
                Classification::Vanishing if e.mu > lo.mu && e.mu < hi.mu => lo = *e,
                Classification::Spreading if e.mu < hi.mu => hi = *e,
                _ => {}
            }
        }
        if lo.mu > hi.mu {
            // non-monotone scan; fall back to the outer bracket
            lo = evaluations[0];
            hi = evaluations[1];
        }
        evaluations.extend(scanned);
    }

    while hi.mu - lo.mu > opts.tol * hi.mu {
        let mid = prober.evaluate(0.5 * (lo.mu + hi.mu))?;
        evaluations.push(mid);
        if mid.classification == Classification::Vanishing {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let endpoints_stable = if opts.verify_doubling {
        let lo_again = prober.once(lo.mu, 2.0 * lo.horizon)?.0;
        let hi_again = prober.once(hi.mu, 2.0 * hi.horizon)?.0;
        Some(lo_again == Classification::Vanishing && hi_again == Classification::Spreading)
    } else {
        None
    };

    Ok(ThresholdResult {
        status: MuStarStatus::Bracketed,
        mu_lo: lo.mu,
        mu_hi: hi.mu,
        monotone_consistent: is_monotone(&evaluations),
        evaluations,
        endpoints_stable,
        span_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(mu: f64, c: Classification) -> Evaluation {
        Evaluation {
            mu,
            classification: c,
            span: 0.0,
            horizon: 1.0,
            lean: false,
        }
    }

    #[test]
    fn monotonicity_check() {
        use Classification::*;
        assert!(is_monotone(&[ev(1.0, Vanishing), ev(3.0, Spreading), ev(2.0, Vanishing)]));
        assert!(!is_monotone(&[ev(1.0, Vanishing), ev(3.0, Vanishing), ev(2.0, Spreading)]));
        assert!(is_monotone(&[]));
    }
}
