//! Semi-wave of the free-boundary problem for `u` alone.
//!
//! On `x < 0` the profile solves
//! `d1 int_{-inf}^0 J(x - y) phi(y) dy - d1 phi + c phi' + phi (1 - rho - phi) = 0`
//! with `phi(0) = 0`, `phi(-inf) = 1 - rho`, and the speed satisfies
//! `c = mu int_{-inf}^0 phi(x) int_0^inf J(x - y) dy dx`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{DiscreteKernel, Kernel};
use crate::model::ModelParams;
use crate::numerics::illinois;

use super::spreading_speed;

#[derive(Debug, Clone)]
pub struct SemiWaveOptions {
    /// Half-line length; defaults to `40 S`.
    pub x_sw: Option<f64>,
    /// Node count; defaults to 16 nodes per kernel radius.
    pub n: Option<usize>,
    /// Sweep stopping tolerance on the max profile update.
    pub sweep_tol: f64,
    pub max_sweeps: usize,
    /// Gauss-Seidel relaxation factor in `(0, 1]`.
    pub relaxation: f64,
    /// Tolerance on successive speed iterates.
    pub speed_tol: f64,
}

impl Default for SemiWaveOptions {
    fn default() -> Self {
        SemiWaveOptions {
            x_sw: None,
            n: None,
            sweep_tol: 1e-12,
            max_sweeps: 200_000,
            relaxation: 1.0,
            speed_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SemiWave {
    pub c1_rho: f64,
    pub rho: f64,
    pub mu: f64,
    pub x_sw: f64,
    /// Profile at `x_i = -x_sw + i h`, `i = 0..n`; the last node is `x = 0`.
    pub profile: Vec<f64>,
    /// `|c - mu * flux(phi)|` at the returned pair.
    pub identity_residual: f64,
    /// Spreading speed of `w_t = d1 (J * w - w) + w (1 - rho - w)`; bounds `c1_rho` from above.
    pub c_star_rho: f64,
}

impl SemiWave {
    pub fn spacing(&self) -> f64 {
        self.x_sw / (self.profile.len() - 1) as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.profile.len()).map(move |i| -self.x_sw + i as f64 * h)
    }
}

struct Problem<'a> {
    d1: f64,
    rho: f64,
    h: f64,
    n: usize,
    disc: DiscreteKernel,
    /// `T(-x_i)` for the flux functional.
    outward: Vec<f64>,
    opts: &'a SemiWaveOptions,
}

impl Problem<'_> {
    fn left_limit(&self) -> f64 {
        1.0 - self.rho
    }

    /// Solves the profile equation for fixed `c`, starting from `phi`.
    fn solve_profile(&self, c: f64, phi: &mut [f64]) -> Result<()> {
        let n = self.n;
        let r = self.disc.reach() as isize;
        let limit = self.left_limit();
        let self_weight = self.disc.weight(0);
        let diag = self.d1 * self_weight - self.d1 - c / self.h + limit;
        let omega = self.opts.relaxation;
        let mut change = f64::INFINITY;
        for _ in 0..self.opts.max_sweeps {
            change = 0.0;
            for i in (1..n - 1).rev() {
                let ii = i as isize;
                let mut conv = 0.0;
                for off in -r..=r {
                    if off == 0 {
                        continue;
                    }
                    let j = ii + off;
                    let val = if j < 0 {
                        limit
                    } else if j as usize >= n {
                        0.0
                    } else {
                        phi[j as usize]
                    };
                    conv += self.disc.weight(off) * val;
                }
                let rhs = self.d1 * conv + c * phi[i + 1] / self.h;
                let root = 0.5 * (diag + (diag * diag + 4.0 * rhs).sqrt());
                let new = (1.0 - omega) * phi[i] + omega * root;
                change = f64::max(change, (new - phi[i]).abs());
                phi[i] = new;
            }
            if change <= self.opts.sweep_tol {
                return Ok(());
            }
        }
        Err(Error::NoConvergence {
            what: "semi-wave profile sweeps",
            iterations: self.opts.max_sweeps,
            residual: change,
        })
    }

    /// `int_{-inf}^0 phi(x) T(-x) dx` by the trapezoid rule.
    fn flux(&self, phi: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * phi[i] * self.outward[i];
        }
        acc * self.h
    }
}

/// Computes `(c1_rho, phi_rho)` for the free-boundary problem of `u` alone.
///
/// For each trial speed the profile is obtained by nonlinear Gauss-Seidel
/// sweeps (right to left, upwind `phi'`), and the speed is then corrected
/// toward `mu * flux(phi)`; the correction is a safeguarded regula-falsi step
/// on `c - mu * flux(phi_c)`, which is increasing in `c`.
pub fn semiwave(params: &ModelParams, j1: &Kernel, rho: f64, opts: &SemiWaveOptions) -> Result<SemiWave> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidInput(format!("rho must lie in (0, 1), got {rho}")));
    }
    if !(params.mu > 0.0 && params.d1 > 0.0) {
        return Err(Error::InvalidInput("mu and d1 must be positive".into()));
    }
    let s = j1.support_radius();
    let x_sw = opts.x_sw.unwrap_or(40.0 * s);
    if x_sw < 40.0 * s * (1.0 - 1e-12) {
        return Err(Error::InvalidInput(format!("semi-wave domain {x_sw} shorter than 40 S = {}", 40.0 * s)));
    }
    let n = opts.n.unwrap_or_else(|| (16.0 * x_sw / s).ceil() as usize + 1);
    let h = x_sw / (n - 1) as f64;
    j1.check_resolved(h)?;
    let outward = (0..n).map(|i| j1.tail(x_sw - i as f64 * h)).collect();
    let prob = Problem {
        d1: params.d1,
        rho,
        h,
        n,
        disc: j1.discretize(h),
        outward,
        opts,
    };
    let limit = prob.left_limit();
    let c_star_rho = spreading_speed(params.d1, limit, j1)?.c_star;

    let fresh = || {
        let mut phi = vec![limit; n];
        phi[n - 1] = 0.0;
        phi
    };
    let mut phi = fresh();
    let eval = |c: f64, phi: &mut Vec<f64>| -> Result<f64> {
        prob.solve_profile(c, phi)?;
        Ok(c - params.mu * prob.flux(phi))
    };

    // bracket: g(0+) < 0, and g > 0 once c reaches the speed of the Cauchy problem
    let c_lo = 1e-6 * c_star_rho;
    let g_lo = eval(c_lo, &mut phi)?;
    let mut c_hi = c_star_rho;
    let mut phi_hi = fresh();
    let mut g_hi = eval(c_hi, &mut phi_hi)?;
    let mut grow = 0;
    while g_hi <= 0.0 {
        grow += 1;
        if grow > 20 {
            return Err(Error::NoConvergence {
                what: "semi-wave speed bracketing",
                iterations: grow,
                residual: g_hi,
            });
        }
        c_hi *= 1.1;
        g_hi = eval(c_hi, &mut phi_hi)?;
    }

    let mut work = phi.clone();
    let c = illinois(
        |c| {
            let mut trial = work.clone();
            let g = eval(c, &mut trial)?;
            work = trial;
            Ok(g)
        },
        c_lo,
        c_hi,
        g_lo,
        g_hi,
        opts.speed_tol,
        1e-7,
    )?;
    let mut profile = fresh();
    prob.solve_profile(c, &mut profile)?;
    let identity_residual = (c - params.mu * prob.flux(&profile)).abs();

    let mid = profile[(n - 1) / 2];
    if (mid - limit).abs() > 1e-3 {
        return Err(Error::DomainTooShort((mid - limit).abs()));
    }

    Ok(SemiWave {
        c1_rho: c,
        rho,
        mu: params.mu,
        x_sw,
        profile,
        identity_residual,
        c_star_rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;

    fn uniform() -> Kernel {
        KernelSpec::Uniform { radius: 1.0 }.build().unwrap()
    }

    #[test]
    fn profile_shape_and_identity() {
        let p = ModelParams::default();
        let sw = semiwave(&p, &uniform(), 0.01, &SemiWaveOptions::default()).unwrap();
        assert!(sw.identity_residual <= 1e-4);
        assert_eq!(*sw.profile.last().unwrap(), 0.0);
        assert!(sw.profile.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!((sw.profile[0] - 0.99).abs() <= 1e-3);
        assert!(sw.c1_rho > 0.0 && sw.c1_rho < sw.c_star_rho);
    }

    #[test]
    fn rejects_bad_rho() {
        let p = ModelParams::default();
        assert!(semiwave(&p, &uniform(), 0.0, &SemiWaveOptions::default()).is_err());
        assert!(semiwave(&p, &uniform(), 1.0, &SemiWaveOptions::default()).is_err());
    }
}
