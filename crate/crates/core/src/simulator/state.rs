use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::profile::{Profile, ProfileSpec};

/// Uniform grid `x_i = (i - c) dx`, `i = 0..=2c`, symmetric about zero so
/// that `x = 0` is a node and mirrored nodes are exact negatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub dx: f64,
    pub center: usize,
}

impl Grid {
    /// Smallest symmetric grid covering `[-x_max, x_max]`.
    pub fn covering(dx: f64, x_max: f64) -> Result<Self> {
        if !(dx > 0.0 && x_max > 0.0) {
            return Err(Error::InvalidInput(format!("grid needs dx > 0 and X > 0 (dx={dx}, X={x_max})")));
        }
        let center = (x_max / dx).ceil() as usize;
        Ok(Grid { dx, center })
    }

    pub fn len(&self) -> usize {
        2 * self.center + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.center as f64) * self.dx
    }

    /// Truncation half-width `X`.
    pub fn half_width(&self) -> f64 {
        self.center as f64 * self.dx
    }

    /// Indices of the nodes strictly inside `(g, h)`, as an inclusive range;
    /// `None` when no node lies inside.
    pub fn window(&self, g: f64, h: f64) -> Option<(usize, usize)> {
        let n = self.len();
        let mut lo = ((g / self.dx).floor() + self.center as f64).clamp(0.0, (n - 1) as f64) as usize;
        while lo < n && self.x(lo) <= g {
            lo += 1;
        }
        while lo > 0 && self.x(lo - 1) > g {
            lo -= 1;
        }
        let mut hi = ((h / self.dx).ceil() + self.center as f64).clamp(0.0, (n - 1) as f64) as usize;
        while hi > 0 && self.x(hi) >= h {
            hi -= 1;
        }
        while hi + 1 < n && self.x(hi + 1) < h {
            hi += 1;
        }
        if lo < n && lo <= hi && self.x(lo) > g && self.x(hi) < h {
            Some((lo, hi))
        } else {
            None
        }
    }
}

/// Initial habitat and densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub h0: f64,
    /// Left endpoint; `-h0` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
    pub u0: ProfileSpec,
    pub v0: ProfileSpec,
}

impl InitialData {
    pub fn symmetric(h0: f64, u0: ProfileSpec, v0: ProfileSpec) -> Self {
        InitialData { h0, g0: None, u0, v0 }
    }

    pub fn g0(&self) -> f64 {
        self.g0.unwrap_or(-self.h0)
    }

    pub fn habitat(&self) -> (f64, f64) {
        (self.g0(), self.h0)
    }

    /// Resolves and validates the data. `allow_absent_native` admits `v0 = 0`
    /// (single-species runs).
    pub fn resolve(&self, allow_absent_native: bool) -> Result<(Profile, Profile)> {
        let (g0, h0) = self.habitat();
        if !(h0 > 0.0) || !(g0 < h0) || !g0.is_finite() || !h0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "initial habitat needs h0 > 0 and g0 < h0 (g0={g0}, h0={h0})"
            )));
        }
        let u0 = self.u0.resolve(Some((g0, h0)))?;
        let v0 = self.v0.resolve(None)?;
        match u0.support() {
            Some((a, b)) if a >= g0 && b <= h0 => {}
            _ => {
                return Err(Error::InvalidInput(format!(
                    "u0 must vanish at and outside the initial habitat [{g0}, {h0}]"
                )))
            }
        }
        if v0.sup() <= 0.0 && !allow_absent_native {
            return Err(Error::InvalidInput("v0 must not vanish identically".into()));
        }
        Ok((u0, v0))
    }
}

/// Discrete state of the system.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeBoundaryState {
    pub t: f64,
    pub g: f64,
    pub h: f64,
    /// Invader density on every grid node; zero outside `(g, h)`.
    pub u: Vec<f64>,
    /// Native density on every grid node of `[-X, X]`.
    pub v: Vec<f64>,
    pub grid: Grid,
}

impl FreeBoundaryState {
    /// Samples validated initial data on `grid`.
    pub fn initial(data: &InitialData, grid: Grid, allow_absent_native: bool) -> Result<Self> {
        let (u0, v0) = data.resolve(allow_absent_native)?;
        let (g0, h0) = data.habitat();
        let x_max = grid.half_width();
        if g0 <= -x_max || h0 >= x_max {
            return Err(Error::InvalidInput(format!("initial habitat [{g0}, {h0}] exceeds the grid half-width {x_max}")));
        }
        let window = grid.window(g0, h0).ok_or_else(|| {
            Error::InvalidInput(format!("no grid node lies strictly inside [{g0}, {h0}] at dx = {}", grid.dx))
        })?;
        let mut u = vec![0.0; grid.len()];
        for (i, ui) in u.iter_mut().enumerate().take(window.1 + 1).skip(window.0) {
            *ui = u0.eval(grid.x(i));
            if !(*ui > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "u0 must be positive inside the initial habitat; u0({}) = {}",
                    grid.x(i),
                    *ui
                )));
            }
        }
        let v: Vec<f64> = (0..grid.len()).map(|i| v0.eval(grid.x(i))).collect();
        Ok(FreeBoundaryState {
            t: 0.0,
            g: g0,
            h: h0,
            u,
            v,
            grid,
        })
    }

    pub fn window(&self) -> Option<(usize, usize)> {
        self.grid.window(self.g, self.h)
    }

    pub fn u_max(&self) -> f64 {
        self.u.iter().cloned().fold(0.0, f64::max)
    }

    pub fn u_mass(&self) -> f64 {
        self.grid.dx * self.u.iter().sum::<f64>()
    }

    pub fn u_center(&self) -> f64 {
        self.u[self.grid.center]
    }

    pub fn v_center(&self) -> f64 {
        self.v[self.grid.center]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_mirror_symmetric() {
        let g = Grid::covering(0.1, 5.0).unwrap();
        for m in 0..g.center {
            assert_eq!(g.x(g.center + m), -g.x(g.center - m));
        }
        assert_eq!(g.x(g.center), 0.0);
    }

    #[test]
    fn window_excludes_nodes_on_fronts() {
        let g = Grid::covering(0.5, 10.0).unwrap();
        let (lo, hi) = g.window(-1.0, 1.0).unwrap();
        assert_eq!((g.x(lo), g.x(hi)), (-0.5, 0.5));
        let (lo, hi) = g.window(-1.2, 0.9).unwrap();
        assert_eq!((g.x(lo), g.x(hi)), (-1.0, 0.5));
        assert!(g.window(0.1, 0.4).is_none());
    }

    #[test]
    fn wide_u0_rejected() {
        let data = InitialData::symmetric(
            2.0,
            ProfileSpec::Plateau {
                height: 1.0,
                ramp: 0.5,
                left: Some(-3.0),
                right: Some(3.0),
            },
            ProfileSpec::Constant { value: 1.0 },
        );
        let err = data.resolve(false).unwrap_err();
        assert!(err.to_string().contains("vanish at and outside"), "{err}");
    }

    #[test]
    fn narrow_u0_rejected() {
        let data = InitialData::symmetric(
            2.0,
            ProfileSpec::Plateau {
                height: 1.0,
                ramp: 0.5,
                left: Some(-1.0),
                right: Some(1.0),
            },
            ProfileSpec::Constant { value: 1.0 },
        );
        let grid = Grid::covering(0.125, 10.0).unwrap();
        let err = FreeBoundaryState::initial(&data, grid, false).unwrap_err();
        assert!(err.to_string().contains("positive inside"), "{err}");
    }

    #[test]
    fn zero_native_needs_opt_in() {
        let data = InitialData::symmetric(
            1.0,
            ProfileSpec::Parabola {
                height: 1.0,
                left: None,
                right: None,
            },
            ProfileSpec::Constant { value: 0.0 },
        );
        assert!(data.resolve(false).is_err());
        assert!(data.resolve(true).is_ok());
    }
}
