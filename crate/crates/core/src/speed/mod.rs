//! Asymptotic spreading speeds of the nonlocal logistic equation
//! `w_t = d (J * w - w) + a w - b w^2` and the semi-wave of the
//! free-boundary problem.

mod semiwave;

pub use semiwave::{semiwave, SemiWave, SemiWaveOptions};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::model::ModelParams;
use crate::numerics::golden_section;

/// Smallest rate on the bracketing grid.
pub const LAMBDA_MIN: f64 = 1e-3;
const LAMBDA_GROWTH: f64 = 1.25;
/// Largest admissible `lambda * S` (keeps `cosh` finite).
const MAX_LAMBDA_S: f64 = 600.0;

#[derive(Debug, Clone, Serialize)]
pub struct SpeedResult {
    pub c_star: f64,
    pub argmin_lambda: f64,
    pub d: f64,
    pub a: f64,
    pub kernel_id: String,
}

/// `F(lambda) = (d mgf(lambda) - d + a) / lambda`.
pub fn speed_objective(d: f64, a: f64, kernel: &Kernel, lambda: f64) -> Result<f64> {
    Ok((d * kernel.mgf(lambda)? - d + a) / lambda)
}

fn lambda_grid(kernel: &Kernel) -> Vec<f64> {
    let lmax = MAX_LAMBDA_S / kernel.support_radius();
    let mut grid = Vec::new();
    let mut l = LAMBDA_MIN;
    while l <= lmax {
        grid.push(l);
        l *= LAMBDA_GROWTH;
    }
    grid
}

/// `c* = min_{lambda > 0} F(lambda)`: geometric-grid bracketing followed by
/// golden-section refinement.
pub fn spreading_speed(d: f64, a: f64, kernel: &Kernel) -> Result<SpeedResult> {
    if !(d > 0.0 && a > 0.0) {
        return Err(Error::InvalidInput(format!("d and a must be positive (d={d}, a={a})")));
    }
    if !kernel.thin_tailed() {
        return Err(Error::DivergentMgf(LAMBDA_MIN));
    }
    let f = |l: f64| speed_objective(d, a, kernel, l);
    let grid = lambda_grid(kernel);
    let values: Vec<f64> = grid.iter().map(|&l| f(l)).collect::<Result<_>>()?;
    let (imin, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    if imin == 0 || imin + 1 == grid.len() {
        return Err(Error::NoBracket);
    }
    let (lambda, c) = golden_section(f, grid[imin - 1], grid[imin + 1], 1e-12)?;
    Ok(SpeedResult {
        c_star: c,
        argmin_lambda: lambda,
        d,
        a,
        kernel_id: kernel.label(),
    })
}

/// `d * inf_{lambda > 0} (mgf(lambda) - 1) / lambda`, evaluated over the
/// admissible rate grid. The quotient increases with `lambda`, so the
/// infimum is approached as `lambda -> 0` and the value is close to zero.
pub fn dispersal_lower_bound(d: f64, kernel: &Kernel) -> Result<f64> {
    let mut best = f64::INFINITY;
    for l in lambda_grid(kernel) {
        best = best.min((kernel.mgf(l)? - 1.0) / l);
    }
    Ok(d * best)
}

/// Spreading speed of `u` with the free boundaries removed.
pub fn speed_c1(params: &ModelParams, j1: &Kernel) -> Result<f64> {
    spreading_speed(params.d1, 1.0, j1).map(|r| r.c_star)
}

/// Spreading speed of `v` in the absence of `u`.
pub fn speed_c2(params: &ModelParams, j2: &Kernel) -> Result<f64> {
    spreading_speed(params.d2, params.gamma, j2).map(|r| r.c_star)
}

/// Regularization used as the proxy for the free-boundary speed `c1`.
pub const FASTER_SPREADER_RHO: f64 = 1e-2;

#[derive(Debug, Clone, Serialize)]
pub struct FasterSpreader {
    pub c1_rho: f64,
    pub rho: f64,
    pub c1: f64,
    pub c2: f64,
    pub margin: f64,
    pub holds: bool,
}

/// Whether `u` outruns `v`: the semi-wave speed at `rho = 1e-2` must exceed `C2`.
pub fn faster_spreader(params: &ModelParams, j1: &Kernel, j2: &Kernel) -> Result<FasterSpreader> {
    let c1 = speed_c1(params, j1)?;
    let c2 = speed_c2(params, j2)?;
    let sw = semiwave(params, j1, FASTER_SPREADER_RHO, &SemiWaveOptions::default())?;
    let margin = sw.c1_rho - c2;
    Ok(FasterSpreader {
        c1_rho: sw.c1_rho,
        rho: FASTER_SPREADER_RHO,
        c1,
        c2,
        margin,
        holds: margin > 0.0,
    })
}
