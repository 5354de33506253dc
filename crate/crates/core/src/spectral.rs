//! Principal eigenvalue of the nonlocal operator
//! `L[phi](x) = d1 (int_a^{a+l} J(x - y) phi(y) dy - phi(x))` and the
//! critical interval length at which it crosses a prescribed level.

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::Kernel;

/// Smallest admissible node count.
pub const MIN_NODES: usize = 16;

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub max_iter: usize,
    /// Stop once `||K psi - theta psi||_inf <= tol * ||psi||_inf`.
    pub tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            max_iter: 2_000_000,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub lambda_p: f64,
    /// Eigenfunction at the nodes, scaled to `max = 1`.
    pub phi: Vec<f64>,
    pub interval: (f64, f64),
    pub n: usize,
    /// `||L phi - lambda_p phi||_inf` with `max phi = 1`.
    pub residual: f64,
    pub iterations: usize,
}

impl SpectralResult {
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let (a, b) = self.interval;
        let h = (b - a) / (self.n - 1) as f64;
        (0..self.n).map(move |i| a + i as f64 * h)
    }
}

/// Symmetrized trapezoid discretization of the integral part on `n` nodes of
/// spacing `h`: `S_ij = h sqrt(w_i w_j) J((i - j) h)`.
#[derive(Debug, Clone)]
pub struct IntervalOperator {
    n: usize,
    /// `h * J_m`, cell-averaged kernel weights.
    band: Vec<f64>,
    sqrt_w: Vec<f64>,
}

impl IntervalOperator {
    pub fn new(kernel: &Kernel, l: f64, n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::InvalidInput(format!("need at least {MIN_NODES} nodes, got {n}")));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidInput(format!("interval length must be positive, got {l}")));
        }
        let h = l / (n - 1) as f64;
        kernel.check_resolved(h)?;
        let disc = kernel.discretize(h);
        let reach = disc.reach().min(n - 1);
        let band: Vec<f64> = (0..=reach).map(|m| disc.weight(m as isize)).collect();
        let mut sqrt_w = vec![1.0; n];
        sqrt_w[0] = 0.5f64.sqrt();
        sqrt_w[n - 1] = 0.5f64.sqrt();
        Ok(IntervalOperator { n, band, sqrt_w })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let m = i.abs_diff(j);
        if m < self.band.len() {
            self.sqrt_w[i] * self.sqrt_w[j] * self.band[m]
        } else {
            0.0
        }
    }

    /// `y = S x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        let r = self.band.len() - 1;
        for i in 0..n {
            let lo = i.saturating_sub(r);
            let hi = (i + r).min(n - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += self.band[i.abs_diff(j)] * self.sqrt_w[j] * x[j];
            }
            y[i] = self.sqrt_w[i] * acc;
        }
    }

    /// Dense symmetric matrix, row-major.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = self.entry(i, j);
            }
        }
        m
    }

    /// Maps an eigenvector of the symmetric form back to the trapezoid form.
    pub fn unsymmetrize(&self, psi: &[f64]) -> Vec<f64> {
        psi.iter().zip(&self.sqrt_w).map(|(p, s)| p / s).collect()
    }
}

/// Principal eigenvalue of `d1 (K - I)` on `(a, a + l)` with `n` nodes.
///
/// Power iteration runs on the nonnegative matrix `d1 K`, i.e. the operator
/// shifted by `d1 I`, so the Perron root is the dominant eigenvalue.
pub fn principal_eigenvalue(d1: f64, kernel: &Kernel, a: f64, l: f64, n: usize) -> Result<SpectralResult> {
    principal_eigenvalue_with(d1, kernel, a, l, n, EigenOptions::default())
}

pub fn principal_eigenvalue_with(
    d1: f64,
    kernel: &Kernel,
    a: f64,
    l: f64,
    n: usize,
    opts: EigenOptions,
) -> Result<SpectralResult> {
    if !(d1 > 0.0) {
        return Err(Error::InvalidInput(format!("d1 must be positive, got {d1}")));
    }
    let op = IntervalOperator::new(kernel, l, n)?;
    let (theta, psi, iterations) = perron_pair(&op, opts)?;

    let mut phi = op.unsymmetrize(&psi);
    let top = phi.iter().cloned().fold(0.0, f64::max);
    for v in phi.iter_mut() {
        *v /= top;
    }
    let lambda_p = d1 * (theta - 1.0);

    // residual of d1 (K - I) phi = lambda phi in the unsymmetrized form
    let mut ks = vec![0.0; n];
    let psi_n: Vec<f64> = phi.iter().zip(&op.sqrt_w).map(|(p, s)| p * s).collect();
    op.apply(&psi_n, &mut ks);
    let residual = ks
        .iter()
        .zip(&op.sqrt_w)
        .zip(&phi)
        .map(|((k, s), p)| (d1 * (k / s - p) - lambda_p * p).abs())
        .fold(0.0, f64::max);

    Ok(SpectralResult {
        lambda_p,
        phi,
        interval: (a, a + l),
        n,
        residual,
        iterations,
    })
}

fn perron_pair(op: &IntervalOperator, opts: EigenOptions) -> Result<(f64, Vec<f64>, usize)> {
    let n = op.len();
    let mut x: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::PI * (i + 1) as f64 / (n + 1) as f64).sin())
        .collect();
    let mut y = vec![0.0; n];
    let mut change = f64::INFINITY;
    for it in 1..=opts.max_iter {
        op.apply(&x, &mut y);
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let theta = xy / xx;
        let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let res = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (b - theta * a).abs())
            .fold(0.0, f64::max);
        change = res / xmax;
        if change <= opts.tol * theta.abs().max(f64::MIN_POSITIVE) {
            return Ok((theta, x, it));
        }
        let ymax = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in x.iter_mut().zip(&y) {
            *a = b / ymax;
        }
    }
    Err(Error::NoConvergence {
        what: "power iteration",
        iterations: opts.max_iter,
        residual: change,
    })
}

/// Node count giving spacing at most `S / per_radius` on an interval of length `l`.
pub fn nodes_for(kernel: &Kernel, l: f64, per_radius: f64) -> usize {
    let n = (per_radius * l / kernel.support_radius()).ceil() as usize + 1;
    n.max(4 * MIN_NODES)
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalLength {
    pub sigma: f64,
    pub length: f64,
    /// `lambda_p(0, length)` at the working resolution.
    pub lambda_p: f64,
    pub n: usize,
    /// Same root on the grid refined by two.
    pub refined_length: f64,
    pub warning: Option<String>,
}

impl CriticalLength {
    pub fn eigen_residual(&self) -> f64 {
        (self.lambda_p + self.sigma).abs()
    }
}

/// Tolerance on `|lambda_p(0, l) + sigma|` at the returned length.
pub const CRITICAL_LENGTH_TOL: f64 = 1e-6;
/// Refinement discrepancy above which a warning is attached.
pub const RICHARDSON_WARN: f64 = 1e-3;

/// Unique `l` with `lambda_p(0, l) = -sigma`, for `sigma` in `(0, d1)`.
pub fn critical_length(d1: f64, kernel: &Kernel, sigma: f64) -> Result<CriticalLength> {
    if !(sigma > 0.0 && sigma < d1) {
        return Err(Error::SigmaOutOfRange { sigma, d1 });
    }
    let s = kernel.support_radius();
    let eig = |l: f64, n: usize| principal_eigenvalue(d1, kernel, 0.0, l, n).map(|r| r.lambda_p);

    let mut l_hi = s;
    while eig(l_hi, nodes_for(kernel, l_hi, 16.0))? <= -sigma {
        l_hi *= 2.0;
        if l_hi > 1e6 * s {
            return Err(Error::NoConvergence {
                what: "critical length bracketing",
                iterations: 0,
                residual: sigma,
            });
        }
    }
    let n = nodes_for(kernel, l_hi, 16.0);
    let coarse = bisect_length(&eig, sigma, l_hi, n)?;
    let fine = bisect_length(&eig, sigma, l_hi, 2 * n - 1)?;
    let warning = if (coarse.0 - fine.0).abs() > RICHARDSON_WARN {
        let msg = format!(
            "critical length for sigma={sigma}: n={n} gives {:.6}, n={} gives {:.6}",
            coarse.0,
            2 * n - 1,
            fine.0
        );
        warn!("{msg}");
        Some(msg)
    } else {
        None
    };
    Ok(CriticalLength {
        sigma,
        length: coarse.0,
        lambda_p: coarse.1,
        n,
        refined_length: fine.0,
        warning,
    })
}

fn bisect_length(
    eig: &impl Fn(f64, usize) -> Result<f64>,
    sigma: f64,
    l_hi_start: f64,
    n: usize,
) -> Result<(f64, f64)> {
    let mut hi = l_hi_start;
    let mut lam_hi = eig(hi, n)?;
    while lam_hi <= -sigma {
        hi *= 2.0;
        lam_hi = eig(hi, n)?;
    }
    let mut lo = hi / 4.0;
    let mut lam_lo = eig(lo, n)?;
    while lam_lo >= -sigma {
        hi = lo;
        lam_hi = lam_lo;
        lo /= 4.0;
        lam_lo = eig(lo, n)?;
    }
    for _ in 0..200 {
        if (lam_hi + sigma).abs() <= 0.1 * CRITICAL_LENGTH_TOL {
            return Ok((hi, lam_hi));
        }
        if (lam_lo + sigma).abs() <= 0.1 * CRITICAL_LENGTH_TOL {
            return Ok((lo, lam_lo));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let lam = eig(mid, n)?;
        if lam < -sigma {
            lo = mid;
            lam_lo = lam;
        } else {
            hi = mid;
            lam_hi = lam;
        }
    }
    let (l, lam) = if (lam_hi + sigma).abs() < (lam_lo + sigma).abs() {
        (hi, lam_hi)
    } else {
        (lo, lam_lo)
    };
    if (lam + sigma).abs() <= CRITICAL_LENGTH_TOL {
        Ok((l, lam))
    } else {
        Err(Error::NoConvergence {
            what: "critical length bisection",
            iterations: 200,
            residual: (lam + sigma).abs(),
        })
    }
}
