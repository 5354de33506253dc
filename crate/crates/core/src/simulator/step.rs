use crate::error::{Error, Result};
use crate::kernel::{DiscreteKernel, Kernel};
use crate::model::ModelParams;

use super::state::{FreeBoundaryState, Grid};

/// Safety factor applied to the explicit stability bound.
pub const DT_SAFETY: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Largest stable forward-Euler step for densities bounded by
/// `u_bar = max(1, sup u0)` and `v_bar = max(1, sup v0)`.
///
/// With this step every update coefficient stays nonnegative, which keeps
/// both densities nonnegative and makes the scheme order preserving.
pub fn dt_bound(params: &ModelParams, u_sup: f64, v_sup: f64) -> f64 {
    let u_bar = u_sup.max(1.0);
    let v_bar = v_sup.max(1.0);
    let reaction = (2.0 * u_bar + params.k * v_bar).max(params.gamma * (2.0 * v_bar + params.b * u_bar));
    DT_SAFETY / (params.d1 + params.d2 + reaction)
}

/// Full weight stencil `w[r + m] = h J(m h)` for `m = -r..=r`.
fn stencil(disc: &DiscreteKernel) -> (Vec<f64>, usize) {
    let r = disc.reach();
    let w = (-(r as isize)..=r as isize).map(|m| disc.weight(m)).collect();
    (w, r)
}

/// `sum_{j in window} h J(x_i - x_j) field_j` for every `i` in the window.
/// Nodes outside the window contribute nothing.
pub fn convolve_on_interval(kernel: &DiscreteKernel, field: &[f64], window: (usize, usize)) -> Vec<f64> {
    let (w, r) = stencil(kernel);
    let mut out = vec![0.0; window.1 + 1 - window.0];
    conv_window(&w, r, field, window, &mut out);
    out
}

#[inline]
fn conv_window(w: &[f64], r: usize, field: &[f64], (lo, hi): (usize, usize), out: &mut [f64]) {
    for (k, i) in (lo..=hi).enumerate() {
        let jlo = i.saturating_sub(r).max(lo);
        let jhi = (i + r).min(hi);
        let ws = &w[r + jlo - i..=r + jhi - i];
        out[k] = ws.iter().zip(&field[jlo..=jhi]).map(|(a, b)| a * b).sum();
    }
}

/// Convolution over the whole truncated line; values beyond the ends are
/// taken equal to the nearest end value.
fn conv_replicate(w: &[f64], r: usize, field: &[f64], out: &mut [f64]) {
    let n = field.len();
    for i in 0..n {
        if i >= r && i + r < n {
            out[i] = w.iter().zip(&field[i - r..=i + r]).map(|(a, b)| a * b).sum();
        } else {
            let mut acc = 0.0;
            for (m, wm) in w.iter().enumerate() {
                let j = (i + m) as isize - r as isize;
                let j = j.clamp(0, n as isize - 1) as usize;
                acc += wm * field[j];
            }
            out[i] = acc;
        }
    }
}

/// Cells partitioning `[g, h]`, one per active node: interior cells are
/// `[x_i - dx/2, x_i + dx/2]`, the outermost ones extend to the fronts.
fn cell(grid: &Grid, i: usize, (lo, hi): (usize, usize), g: f64, h: f64) -> (f64, f64) {
    let half = 0.5 * grid.dx;
    let x = grid.x(i);
    let a = if i == lo { g } else { x - half };
    let b = if i == hi { h } else { x + half };
    (a, b)
}

/// Outward dispersal flux through one front,
/// `int_g^h u(x) int_h^inf J(x - y) dy dx` (right) or its mirror (left),
/// without the factor `mu`. `u` is read as constant on each node's cell.
pub fn boundary_flux(kernel: &Kernel, grid: &Grid, u: &[f64], g: f64, h: f64, side: Side) -> f64 {
    let Some(window) = grid.window(g, h) else {
        return 0.0;
    };
    let (lo, hi) = window;
    let mut acc = 0.0;
    match side {
        Side::Right => {
            for i in (lo..=hi).rev() {
                if u[i] != 0.0 {
                    let (a, b) = cell(grid, i, window, g, h);
                    acc += u[i] * (kernel.tail_integral(h - b) - kernel.tail_integral(h - a));
                }
            }
        }
        Side::Left => {
            for i in lo..=hi {
                if u[i] != 0.0 {
                    let (a, b) = cell(grid, i, window, g, h);
                    acc += u[i] * (kernel.tail_integral(a - g) - kernel.tail_integral(b - g));
                }
            }
        }
    }
    acc
}

/// Time stepper for fixed parameters, kernels and grid.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: ModelParams,
    grid: Grid,
    j1: Kernel,
    w1: Vec<f64>,
    r1: usize,
    w2: Vec<f64>,
    r2: usize,
    guard: f64,
    dt_max: f64,
}

/// Work buffers reused across steps.
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    conv_u: Vec<f64>,
    conv_v: Vec<f64>,
    v_new: Vec<f64>,
}

impl Simulator {
    /// `u_sup`, `v_sup` bound the initial densities and fix the stable step.
    pub fn new(params: ModelParams, j1: &Kernel, j2: &Kernel, grid: Grid, u_sup: f64, v_sup: f64) -> Result<Self> {
        params.validate()?;
        j1.check_resolved(grid.dx)?;
        j2.check_resolved(grid.dx)?;
        let (w1, r1) = stencil(&j1.discretize(grid.dx));
        let (w2, r2) = stencil(&j2.discretize(grid.dx));
        Ok(Simulator {
            params,
            grid,
            j1: j1.clone(),
            w1,
            r1,
            w2,
            r2,
            guard: 2.0 * j1.support_radius().max(j2.support_radius()),
            dt_max: dt_bound(&params, u_sup, v_sup),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dt_max(&self) -> f64 {
        self.dt_max
    }

    /// Distance the fronts must keep from the truncation edges.
    pub fn guard(&self) -> f64 {
        self.guard
    }

    pub fn step(&self, state: &FreeBoundaryState, dt: f64) -> Result<FreeBoundaryState> {
        let mut next = state.clone();
        self.advance(&mut next, dt, &mut Scratch::default())?;
        Ok(next)
    }

    /// One forward-Euler step in place.
    pub fn advance(&self, state: &mut FreeBoundaryState, dt: f64, scratch: &mut Scratch) -> Result<()> {
        if !(dt > 0.0) || dt > self.dt_max * (1.0 + 1e-12) {
            return Err(Error::StabilityViolation { dt, dt_max: self.dt_max });
        }
        let x_max = self.grid.half_width();
        if state.h > x_max - self.guard {
            return Err(Error::TruncationBreach { front: state.h, edge: x_max });
        }
        if state.g < -x_max + self.guard {
            return Err(Error::TruncationBreach { front: state.g, edge: -x_max });
        }
        let p = &self.params;
        let n = self.grid.len();

        let flux_right = boundary_flux(&self.j1, &self.grid, &state.u, state.g, state.h, Side::Right);
        let flux_left = boundary_flux(&self.j1, &self.grid, &state.u, state.g, state.h, Side::Left);

        scratch.conv_v.resize(n, 0.0);
        scratch.v_new.resize(n, 0.0);
        conv_replicate(&self.w2, self.r2, &state.v, &mut scratch.conv_v);
        for i in 0..n {
            let v = state.v[i];
            let growth = p.gamma * v * (1.0 - v - p.b * state.u[i]);
            scratch.v_new[i] = v + dt * (p.d2 * (scratch.conv_v[i] - v) + growth);
        }

        if let Some(window) = state.window() {
            let (lo, hi) = window;
            scratch.conv_u.resize(hi + 1 - lo, 0.0);
            conv_window(&self.w1, self.r1, &state.u, window, &mut scratch.conv_u);
            for (k, i) in (lo..=hi).enumerate() {
                let u = state.u[i];
                let growth = u * (1.0 - u - p.k * state.v[i]);
                state.u[i] = u + dt * (p.d1 * (scratch.conv_u[k] - u) + growth);
            }
        }
        std::mem::swap(&mut state.v, &mut scratch.v_new);

        state.h += dt * p.mu * flux_right;
        state.g -= dt * p.mu * flux_left;
        state.t += dt;
        Ok(())
    }
}

/// Single step with a stepper built from the state itself.
pub fn step(
    state: &FreeBoundaryState,
    params: &ModelParams,
    j1: &Kernel,
    j2: &Kernel,
    dt: f64,
) -> Result<FreeBoundaryState> {
    let u_sup = state.u.iter().cloned().fold(0.0, f64::max);
    let v_sup = state.v.iter().cloned().fold(0.0, f64::max);
    Simulator::new(*params, j1, j2, state.grid, u_sup, v_sup)?.step(state, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;

    fn uniform() -> Kernel {
        KernelSpec::Uniform { radius: 1.0 }.build().unwrap()
    }

    fn flat_state(grid: Grid, g: f64, h: f64, u_val: f64, v_val: f64) -> FreeBoundaryState {
        let u = (0..grid.len())
            .map(|i| if grid.x(i) > g && grid.x(i) < h { u_val } else { 0.0 })
            .collect();
        FreeBoundaryState {
            t: 0.0,
            g,
            h,
            u,
            v: vec![v_val; grid.len()],
            grid,
        }
    }

    #[test]
    fn zero_field_convolves_to_zero() {
        let d = uniform().discretize(0.125);
        let out = convolve_on_interval(&d, &vec![0.0; 100], (10, 80));
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_field_convolves_to_mass() {
        let d = uniform().discretize(0.125);
        let out = convolve_on_interval(&d, &vec![1.0; 200], (0, 199));
        assert!((out[100] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn native_equilibrium_is_stationary() {
        let k = uniform();
        let grid = Grid::covering(0.125, 20.0).unwrap();
        let s = flat_state(grid, -2.0, 2.0, 0.0, 1.0);
        let p = ModelParams::default();
        let next = step(&s, &p, &k, &k, 0.05).unwrap();
        assert!(next.u.iter().all(|&u| u == 0.0));
        assert!(next.v.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert_eq!((next.g, next.h), (s.g, s.h));
    }

    #[test]
    fn invader_equilibrium_moves_fronts_only() {
        let k = uniform();
        let grid = Grid::covering(0.125, 30.0).unwrap();
        let s = flat_state(grid, -10.0, 10.0, 1.0, 0.0);
        let p = ModelParams::default();
        let next = step(&s, &p, &k, &k, 0.05).unwrap();
        assert!((next.u[grid.center] - 1.0).abs() < 1e-14);
        assert!(next.h > s.h && next.g < s.g);
    }

    #[test]
    fn flat_flux_equals_first_moment() {
        let k = uniform();
        let grid = Grid::covering(0.125, 30.0).unwrap();
        let s = flat_state(grid, -10.03, 9.97, 0.7, 0.0);
        let right = boundary_flux(&k, &grid, &s.u, s.g, s.h, Side::Right);
        let moment = k.first_moment_tail().unwrap();
        assert!((right - 0.7 * moment).abs() <= 1e-6);
    }

    #[test]
    fn stability_and_truncation_guards() {
        let k = uniform();
        let grid = Grid::covering(0.125, 20.0).unwrap();
        let p = ModelParams::default();
        let s = flat_state(grid, -2.0, 2.0, 0.5, 1.0);
        assert!(matches!(step(&s, &p, &k, &k, 1.0), Err(Error::StabilityViolation { .. })));
        let near_edge = flat_state(grid, -2.0, 18.5, 0.5, 1.0);
        assert!(matches!(step(&near_edge, &p, &k, &k, 0.05), Err(Error::TruncationBreach { .. })));
    }
}
