use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{linear_interp, parse_two_column};

/// Shape of an initial density. Shapes with optional `left`/`right` fall back
/// to the initial habitat `[g0, h0]` when used for `u0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant {
        value: f64,
    },
    /// `height * 4 (x - left)(right - x) / (right - left)^2` on `[left, right]`.
    Parabola {
        height: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        left: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        right: Option<f64>,
    },
    /// Flat top with linear ramps of width `ramp` down to zero at `left`/`right`.
    Plateau {
        height: f64,
        ramp: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        left: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        right: Option<f64>,
    },
    /// `height * cos^2(pi (x - center) / (2 radius))` for `|x - center| < radius`.
    Bump {
        height: f64,
        center: f64,
        radius: f64,
    },
    /// Linear interpolation through `[x, value]` points; zero outside.
    Piecewise {
        points: Vec<[f64; 2]>,
    },
    /// Two-column `(x, value)` file, interpolated linearly; zero outside.
    Table {
        path: PathBuf,
    },
}

/// A profile with all defaults and files resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant(f64),
    Parabola { height: f64, left: f64, right: f64 },
    Plateau { height: f64, ramp: f64, left: f64, right: f64 },
    Bump { height: f64, center: f64, radius: f64 },
    Linear { xs: Vec<f64>, ys: Vec<f64> },
}

impl ProfileSpec {
    /// Resolves defaults against `habitat` (if given) and loads tables.
    pub fn resolve(&self, habitat: Option<(f64, f64)>) -> Result<Profile> {
        let pick = |v: Option<f64>, side: usize, what: &str| -> Result<f64> {
            v.or(habitat.map(|h| if side == 0 { h.0 } else { h.1 }))
                .ok_or_else(|| Error::InvalidInput(format!("profile needs an explicit '{what}'")))
        };
        let p = match self {
            ProfileSpec::Constant { value } => Profile::Constant(*value),
            ProfileSpec::Parabola { height, left, right } => Profile::Parabola {
                height: *height,
                left: pick(*left, 0, "left")?,
                right: pick(*right, 1, "right")?,
            },
            ProfileSpec::Plateau { height, ramp, left, right } => Profile::Plateau {
                height: *height,
                ramp: *ramp,
                left: pick(*left, 0, "left")?,
                right: pick(*right, 1, "right")?,
            },
            ProfileSpec::Bump { height, center, radius } => Profile::Bump {
                height: *height,
                center: *center,
                radius: *radius,
            },
            ProfileSpec::Piecewise { points } => {
                let xs = points.iter().map(|p| p[0]).collect();
                let ys = points.iter().map(|p| p[1]).collect();
                Profile::Linear { xs, ys }
            }
            ProfileSpec::Table { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Table {
                    line: 0,
                    reason: format!("{}: {e}", path.display()),
                })?;
                let (xs, ys) = parse_two_column(&text)?;
                Profile::Linear { xs, ys }
            }
        };
        p.check()?;
        Ok(p)
    }
}

impl Profile {
    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        match self {
            Profile::Constant(v) if !(v.is_finite() && *v >= 0.0) => bad("constant profile must be finite and nonnegative"),
            Profile::Parabola { height, left, right } if !(*height > 0.0 && right > left) => {
                bad("parabola needs height > 0 and right > left")
            }
            Profile::Plateau {
                height,
                ramp,
                left,
                right,
            } if !(*height > 0.0 && *ramp > 0.0 && right - left >= 2.0 * ramp) => {
                bad("plateau needs height > 0, ramp > 0 and right - left >= 2 ramp")
            }
            Profile::Bump { height, radius, .. } if !(*height > 0.0 && *radius > 0.0) => {
                bad("bump needs positive height and radius")
            }
            Profile::Linear { xs, ys } => {
                if xs.len() < 2 {
                    return bad("piecewise profile needs at least two points");
                }
                if xs.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("piecewise profile abscissae must be strictly increasing");
                }
                if ys.iter().any(|y| !(*y >= 0.0 && y.is_finite())) {
                    return bad("piecewise profile values must be finite and nonnegative");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::Parabola { height, left, right } => {
                if x <= *left || x >= *right {
                    0.0
                } else {
                    let w = right - left;
                    height * 4.0 * (x - left) * (right - x) / (w * w)
                }
            }
            Profile::Plateau {
                height,
                ramp,
                left,
                right,
            } => {
                if x <= *left || x >= *right {
                    0.0
                } else {
                    height * ((x - left) / ramp).min((right - x) / ramp).min(1.0)
                }
            }
            Profile::Bump { height, center, radius } => {
                let z = (x - center) / radius;
                if z.abs() >= 1.0 {
                    0.0
                } else {
                    let c = (0.5 * std::f64::consts::PI * z).cos();
                    height * c * c
                }
            }
            Profile::Linear { xs, ys } => linear_interp(xs, ys, x),
        }
    }

    /// Closed interval outside which the profile vanishes; `None` for the whole line.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Profile::Constant(v) if *v == 0.0 => Some((0.0, 0.0)),
            Profile::Constant(_) => None,
            Profile::Parabola { left, right, .. } | Profile::Plateau { left, right, .. } => Some((*left, *right)),
            Profile::Bump { center, radius, .. } => Some((center - radius, center + radius)),
            Profile::Linear { xs, .. } => Some((xs[0], xs[xs.len() - 1])),
        }
    }

    /// Largest value, used for the a priori bounds of the solution.
    pub fn sup(&self) -> f64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::Parabola { height, .. } | Profile::Plateau { height, .. } | Profile::Bump { height, .. } => *height,
            Profile::Linear { ys, .. } => ys.iter().cloned().fold(0.0, f64::max),
        }
    }

    /// Infimum over the whole line.
    pub fn inf(&self) -> f64 {
        match self {
            Profile::Constant(v) => *v,
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_ramps() {
        let p = ProfileSpec::Plateau {
            height: 0.9,
            ramp: 1.0,
            left: None,
            right: None,
        }
        .resolve(Some((-3.0, 3.0)))
        .unwrap();
        assert_eq!(p.eval(-3.0), 0.0);
        assert!((p.eval(-2.5) - 0.45).abs() < 1e-15);
        assert_eq!(p.eval(0.0), 0.9);
        assert_eq!(p.support(), Some((-3.0, 3.0)));
    }

    #[test]
    fn missing_bounds_without_habitat() {
        let spec = ProfileSpec::Parabola {
            height: 1.0,
            left: None,
            right: None,
        };
        assert!(spec.resolve(None).is_err());
    }

    #[test]
    fn bump_is_compact() {
        let p = ProfileSpec::Bump {
            height: 1.0,
            center: 2.0,
            radius: 1.0,
        }
        .resolve(None)
        .unwrap();
        assert_eq!(p.eval(2.0), 1.0);
        assert_eq!(p.eval(3.0), 0.0);
        assert_eq!(p.support(), Some((1.0, 3.0)));
    }
}
