//! Independent reference computations shared by the integration tests and
//! the acceptance harness.
#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use nalgebra::DMatrix;
use nlcomp_core::simulator::FreeBoundaryState;
use nlcomp_core::spectral::IntervalOperator;
use nlcomp_core::{Kernel, ModelParams};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// `w[m] = int over the cell of width h around m h`, built from the tail and
/// renormalized to unit sum.
pub fn cell_weights(j: &Kernel, h: f64) -> Vec<f64> {
    let reach = (j.support_radius() / h + 0.5).floor() as usize;
    let mut w = vec![1.0 - 2.0 * j.tail(0.5 * h)];
    for m in 1..=reach {
        w.push(j.tail((m as f64 - 0.5) * h) - j.tail((m as f64 + 0.5) * h));
    }
    let total: f64 = w[0] + 2.0 * w[1..].iter().sum::<f64>();
    w.iter().map(|v| v / total).collect()
}

fn weight(w: &[f64], d: isize) -> f64 {
    w.get(d.unsigned_abs()).copied().unwrap_or(0.0)
}

/// Double loop over the window.
pub fn brute_convolve(w: &[f64], field: &[f64], lo: usize, hi: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for i in lo..=hi {
        let mut acc = 0.0;
        for j in lo..=hi {
            acc += weight(w, i as isize - j as isize) * field[j];
        }
        out.push(acc);
    }
    out
}

/// Nodes strictly inside `(g, h)` by direct scan.
pub fn inside(state: &FreeBoundaryState) -> Vec<usize> {
    (0..state.grid.len())
        .filter(|&i| {
            let x = state.grid.x(i);
            x > state.g && x < state.h
        })
        .collect()
}

/// Right and left outward fluxes, cells clipped to the habitat.
pub fn brute_fluxes(j: &Kernel, state: &FreeBoundaryState) -> (f64, f64) {
    let idx = inside(state);
    let dx = state.grid.dx;
    let (mut right, mut left) = (0.0, 0.0);
    for (k, &i) in idx.iter().enumerate() {
        let x = state.grid.x(i);
        let a = if k == 0 { state.g } else { x - 0.5 * dx };
        let b = if k + 1 == idx.len() { state.h } else { x + 0.5 * dx };
        right += state.u[i] * (j.tail_integral(state.h - b) - j.tail_integral(state.h - a));
        left += state.u[i] * (j.tail_integral(a - state.g) - j.tail_integral(b - state.g));
    }
    (right, left)
}

/// Forward Euler step written out loop by loop.
pub fn brute_step(
    state: &FreeBoundaryState,
    p: &ModelParams,
    j1: &Kernel,
    j2: &Kernel,
    dt: f64,
) -> FreeBoundaryState {
    let dx = state.grid.dx;
    let n = state.grid.len();
    let w1 = cell_weights(j1, dx);
    let w2 = cell_weights(j2, dx);
    let idx = inside(state);
    let mut next = state.clone();
    for &i in &idx {
        let mut conv = 0.0;
        for &jj in &idx {
            conv += weight(&w1, i as isize - jj as isize) * state.u[jj];
        }
        let u = state.u[i];
        next.u[i] = u + dt * (p.d1 * (conv - u) + u * (1.0 - u - p.k * state.v[i]));
    }
    let r2 = w2.len() as isize - 1;
    for i in 0..n {
        let mut conv = 0.0;
        for m in -r2..=r2 {
            let jj = (i as isize + m).clamp(0, n as isize - 1) as usize;
            conv += weight(&w2, m) * state.v[jj];
        }
        let v = state.v[i];
        next.v[i] = v + dt * (p.d2 * (conv - v) + p.gamma * v * (1.0 - v - p.b * state.u[i]));
    }
    let (right, left) = brute_fluxes(j1, state);
    next.h = state.h + dt * p.mu * right;
    next.g = state.g - dt * p.mu * left;
    next.t = state.t + dt;
    next
}

/// Principal eigenvalue from a full symmetric eigendecomposition.
pub fn dense_lambda_p(d1: f64, op: &IntervalOperator) -> f64 {
    let n = op.len();
    let m = DMatrix::from_row_slice(n, n, &op.to_dense());
    let top = m.symmetric_eigenvalues().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    d1 * (top - 1.0)
}

/// Closed-form moment generating functions.
pub fn mgf_uniform(s: f64, l: f64) -> f64 {
    (l * s).sinh() / (l * s)
}

pub fn mgf_triangle(s: f64, l: f64) -> f64 {
    2.0 * ((l * s).cosh() - 1.0) / (l * s).powi(2)
}

/// `min (d mgf(l) - d + a) / l` over a uniform rate grid.
pub fn scan_speed(d: f64, a: f64, mgf: impl Fn(f64) -> f64, step: f64, l_max: f64) -> f64 {
    let mut best = f64::INFINITY;
    let mut l = step;
    while l <= l_max {
        best = best.min((d * mgf(l) - d + a) / l);
        l += step;
    }
    best
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_field(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen::<f64>()).collect()
}
