//! Dispersal kernels.
//!
//! A kernel is a symmetric probability density `J` with `J(0) > 0`. Every
//! shape is a [`KernelProfile`]; [`Kernel`] wraps a profile together with its
//! renormalization and the cumulative tables used by the free-boundary flux.
//!
//! All integral functionals use the composite trapezoid rule on a uniform
//! spacing that divides the support radius exactly, and the density is
//! rescaled so that this discrete mass is one.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadrature nodes per unit of support radius used when no spacing is given.
pub const DEFAULT_QUAD_NODES: usize = 4000;

/// Non-compact profiles are cut at this many scale lengths.
pub const TRUNCATION_SCALES: f64 = 8.0;

/// A kernel shape. Only `x >= 0` is queried; symmetry is structural.
pub trait KernelProfile: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    /// Human-readable identifier including parameters.
    fn label(&self) -> String;
    /// Unnormalized density at `x >= 0`.
    fn density(&self, x: f64) -> f64;
    /// Radius beyond which the sampled kernel vanishes.
    fn radius(&self) -> f64;
    /// True when the underlying density genuinely has compact support
    /// (as opposed to being truncated for sampling).
    fn is_compact(&self) -> bool {
        true
    }
    /// Whether the exponential moment is finite for some positive rate.
    fn thin_tailed(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone)]
pub struct Uniform {
    pub radius: f64,
}

impl KernelProfile for Uniform {
    fn name(&self) -> &'static str {
        "uniform"
    }
    fn label(&self) -> String {
        format!("uniform(radius={})", self.radius)
    }
    fn density(&self, x: f64) -> f64 {
        if x <= self.radius {
            0.5 / self.radius
        } else {
            0.0
        }
    }
    fn radius(&self) -> f64 {
        self.radius
    }
}

#[derive(Debug, Clone)]
pub struct Triangle {
    pub radius: f64,
}

impl KernelProfile for Triangle {
    fn name(&self) -> &'static str {
        "triangle"
    }
    fn label(&self) -> String {
        format!("triangle(radius={})", self.radius)
    }
    fn density(&self, x: f64) -> f64 {
        ((self.radius - x) / (self.radius * self.radius)).max(0.0)
    }
    fn radius(&self) -> f64 {
        self.radius
    }
}

/// Gaussian restricted to `[-radius, radius]`. With `compact = false` the
/// radius is the automatic `8 sigma` cut of a full Gaussian.
#[derive(Debug, Clone)]
pub struct TruncatedGaussian {
    pub sigma: f64,
    pub radius: f64,
    pub compact: bool,
}

impl KernelProfile for TruncatedGaussian {
    fn name(&self) -> &'static str {
        if self.compact {
            "truncated_gaussian"
        } else {
            "gaussian"
        }
    }
    fn label(&self) -> String {
        if self.compact {
            format!("truncated_gaussian(sigma={}, radius={})", self.sigma, self.radius)
        } else {
            format!("gaussian(sigma={})", self.sigma)
        }
    }
    fn density(&self, x: f64) -> f64 {
        if x <= self.radius {
            let z = x / self.sigma;
            (-0.5 * z * z).exp()
        } else {
            0.0
        }
    }
    fn radius(&self) -> f64 {
        self.radius
    }
    fn is_compact(&self) -> bool {
        self.compact
    }
}

/// Cauchy density cut at `8 scale`. Fat-tailed: the exponential moment of the
/// untruncated density is infinite for every positive rate.
#[derive(Debug, Clone)]
pub struct Cauchy {
    pub scale: f64,
}

impl KernelProfile for Cauchy {
    fn name(&self) -> &'static str {
        "cauchy"
    }
    fn label(&self) -> String {
        format!("cauchy(scale={})", self.scale)
    }
    fn density(&self, x: f64) -> f64 {
        if x <= self.radius() {
            let z = x / self.scale;
            1.0 / (1.0 + z * z)
        } else {
            0.0
        }
    }
    fn radius(&self) -> f64 {
        TRUNCATION_SCALES * self.scale
    }
    fn is_compact(&self) -> bool {
        false
    }
    fn thin_tailed(&self) -> bool {
        false
    }
}

/// Piecewise-linear density read from an `(offset, density)` table.
#[derive(Debug, Clone)]
pub struct TableProfile {
    source: String,
    offsets: Vec<f64>,
    values: Vec<f64>,
    radius: f64,
}

impl TableProfile {
    pub fn new(source: impl Into<String>, offsets: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if offsets.len() != values.len() || offsets.len() < 2 {
            return Err(Error::Table {
                line: 0,
                reason: "need at least two (offset, density) rows".into(),
            });
        }
        for (i, w) in offsets.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::Table {
                    line: i + 2,
                    reason: "offsets must be strictly increasing".into(),
                });
            }
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Table {
                line: i + 1,
                reason: format!("density {v} is negative or not finite"),
            });
        }
        let scale = values.iter().cloned().fold(0.0, f64::max);
        let tol = 1e-9 * scale.max(f64::MIN_POSITIVE);
        let interp = |x: f64| linear_interp(&offsets, &values, x);
        for &x in &offsets {
            let (left, right) = (interp(x), interp(-x));
            if (left - right).abs() > tol {
                return Err(Error::NonSymmetricTable {
                    offset: x.abs(),
                    left,
                    right,
                });
            }
        }
        let at_zero = interp(0.0);
        if !(at_zero > 0.0) {
            return Err(Error::NonPositiveAtZero(at_zero));
        }
        let radius = offsets[0].abs().max(offsets[offsets.len() - 1].abs());
        Ok(TableProfile {
            source: source.into(),
            offsets,
            values,
            radius,
        })
    }

    /// Loads a whitespace-delimited two-column table. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Table {
            line: 0,
            reason: format!("{}: {e}", path.display()),
        })?;
        let (offsets, values) = parse_two_column(&text)?;
        Self::new(path.display().to_string(), offsets, values)
    }
}

impl KernelProfile for TableProfile {
    fn name(&self) -> &'static str {
        "table"
    }
    fn label(&self) -> String {
        format!("table({})", self.source)
    }
    fn density(&self, x: f64) -> f64 {
        linear_interp(&self.offsets, &self.values, x)
    }
    fn radius(&self) -> f64 {
        self.radius
    }
}

/// Parses `x y` rows; used for kernel tables and tabulated initial profiles.
pub fn parse_two_column(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let mut next = |what: &str| -> Result<f64> {
            let tok = cols.next().ok_or_else(|| Error::Table {
                line: i + 1,
                reason: format!("missing {what} column"),
            })?;
            tok.parse::<f64>().map_err(|_| Error::Table {
                line: i + 1,
                reason: format!("cannot parse {what} '{tok}'"),
            })
        };
        let x = next("offset")?;
        let y = next("value")?;
        if cols.next().is_some() {
            return Err(Error::Table {
                line: i + 1,
                reason: "expected exactly two columns".into(),
            });
        }
        xs.push(x);
        ys.push(y);
    }
    Ok((xs, ys))
}

/// Linear interpolation on sorted abscissae, zero outside the table.
pub fn linear_interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return 0.0;
    }
    let k = xs.partition_point(|&v| v <= x);
    if k == 0 {
        return ys[0];
    }
    if k >= n {
        return ys[n - 1];
    }
    let (x0, x1) = (xs[k - 1], xs[k]);
    let t = (x - x0) / (x1 - x0);
    ys[k - 1] + t * (ys[k] - ys[k - 1])
}

/// Serializable description of a kernel, as written in run configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Uniform { radius: f64 },
    Triangle { radius: f64 },
    TruncatedGaussian { sigma: f64, radius: f64 },
    Gaussian { sigma: f64 },
    Cauchy { scale: f64 },
    Table { path: PathBuf },
}

impl KernelSpec {
    pub fn profile(&self) -> Result<Arc<dyn KernelProfile>> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidInput(format!("kernel {name} must be positive, got {v}")))
            }
        };
        Ok(match self {
            KernelSpec::Uniform { radius } => Arc::new(Uniform {
                radius: positive("radius", *radius)?,
            }),
            KernelSpec::Triangle { radius } => Arc::new(Triangle {
                radius: positive("radius", *radius)?,
            }),
            KernelSpec::TruncatedGaussian { sigma, radius } => Arc::new(TruncatedGaussian {
                sigma: positive("sigma", *sigma)?,
                radius: positive("radius", *radius)?,
                compact: true,
            }),
            KernelSpec::Gaussian { sigma } => {
                let sigma = positive("sigma", *sigma)?;
                Arc::new(TruncatedGaussian {
                    sigma,
                    radius: TRUNCATION_SCALES * sigma,
                    compact: false,
                })
            }
            KernelSpec::Cauchy { scale } => Arc::new(Cauchy {
                scale: positive("scale", *scale)?,
            }),
            KernelSpec::Table { path } => Arc::new(TableProfile::from_file(path)?),
        })
    }

    pub fn build(&self) -> Result<Kernel> {
        Kernel::new(self.profile()?)
    }
}

/// Names accepted in the `shape` field of a [`KernelSpec`].
pub const KERNEL_SHAPES: &[&str] = &["uniform", "triangle", "truncated_gaussian", "gaussian", "cauchy", "table"];

/// A normalized, validated kernel. Immutable and cheap to clone.
#[derive(Clone)]
pub struct Kernel {
    profile: Arc<dyn KernelProfile>,
    scale: f64,
    radius: f64,
    dx: f64,
    /// `scale * density(m dx)` for `m = 0..=M`, `M dx = radius`.
    samples: Arc<Vec<f64>>,
    /// `T(m dx) = int_{m dx}^inf J`.
    tail: Arc<Vec<f64>>,
    /// `I(m dx) = int_{m dx}^inf T`.
    tail_integral: Arc<Vec<f64>>,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("label", &self.label())
            .field("radius", &self.radius)
            .field("dx", &self.dx)
            .finish()
    }
}

impl Kernel {
    pub fn new(profile: Arc<dyn KernelProfile>) -> Result<Self> {
        let dx = profile.radius() / DEFAULT_QUAD_NODES as f64;
        Self::with_spacing(profile, dx)
    }

    /// Builds the kernel with quadrature spacing close to `dx`; the spacing is
    /// adjusted so that it divides the support radius.
    pub fn with_spacing(profile: Arc<dyn KernelProfile>, dx: f64) -> Result<Self> {
        let radius = profile.radius();
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("kernel radius must be positive, got {radius}")));
        }
        if !(dx > 0.0) {
            return Err(Error::InvalidInput(format!("quadrature spacing must be positive, got {dx}")));
        }
        let nodes = ((radius / dx).round() as usize).max(1);
        let dx = radius / nodes as f64;

        let at_zero = profile.density(0.0);
        if !(at_zero > 0.0) {
            return Err(Error::NonPositiveAtZero(at_zero));
        }
        let raw: Vec<f64> = (0..=nodes).map(|m| profile.density(m as f64 * dx)).collect();
        if raw.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput(format!("{} has negative or non-finite values", profile.label())));
        }
        let mass = trapezoid_symmetric(&raw, dx);
        if !(mass > 0.0) {
            return Err(Error::ZeroMass);
        }
        let scale = 1.0 / mass;
        let samples: Vec<f64> = raw.iter().map(|v| v * scale).collect();

        let mut tail = vec![0.0; nodes + 1];
        for m in (0..nodes).rev() {
            tail[m] = tail[m + 1] + 0.5 * dx * (samples[m] + samples[m + 1]);
        }
        let mut tail_integral = vec![0.0; nodes + 1];
        for m in (0..nodes).rev() {
            tail_integral[m] = tail_integral[m + 1] + 0.5 * dx * (tail[m] + tail[m + 1]);
        }

        Ok(Kernel {
            profile,
            scale,
            radius,
            dx,
            samples: Arc::new(samples),
            tail: Arc::new(tail),
            tail_integral: Arc::new(tail_integral),
        })
    }

    pub fn label(&self) -> String {
        self.profile.label()
    }

    pub fn profile(&self) -> &dyn KernelProfile {
        self.profile.as_ref()
    }

    /// Effective support radius `S` (the truncation radius for non-compact shapes).
    pub fn support_radius(&self) -> f64 {
        self.radius
    }

    pub fn quadrature_spacing(&self) -> f64 {
        self.dx
    }

    pub fn is_compact(&self) -> bool {
        self.profile.is_compact()
    }

    pub fn thin_tailed(&self) -> bool {
        self.profile.thin_tailed()
    }

    /// Normalized density.
    pub fn eval(&self, x: f64) -> f64 {
        let a = x.abs();
        if a > self.radius {
            0.0
        } else {
            self.scale * self.profile.density(a)
        }
    }

    pub fn max_value(&self) -> f64 {
        self.samples.iter().cloned().fold(0.0, f64::max)
    }

    pub fn mass(&self) -> f64 {
        trapezoid_symmetric(&self.samples, self.dx)
    }

    /// `int_R J(x) e^{lambda x} dx`.
    pub fn mgf(&self, lambda: f64) -> Result<f64> {
        if lambda == 0.0 {
            return Ok(self.mass());
        }
        if !self.thin_tailed() {
            return Err(Error::DivergentMgf(lambda));
        }
        let last = self.samples.len() - 1;
        let mut acc = self.samples[0];
        for (m, s) in self.samples.iter().enumerate().skip(1) {
            let w = if m == last { 0.5 } else { 1.0 };
            acc += w * s * 2.0 * (lambda * m as f64 * self.dx).cosh();
        }
        let value = acc * self.dx;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::DivergentMgf(lambda))
        }
    }

    /// Second moment `int_R x^2 J(x) dx`.
    pub fn second_moment(&self) -> f64 {
        let last = self.samples.len() - 1;
        let mut acc = 0.0;
        for (m, s) in self.samples.iter().enumerate().skip(1) {
            let w = if m == last { 0.5 } else { 1.0 };
            let x = m as f64 * self.dx;
            acc += w * s * 2.0 * x * x;
        }
        acc * self.dx
    }

    /// `int_0^inf y J(y) dy`, the bound on the outward flux per unit density.
    pub fn first_moment_tail(&self) -> Result<f64> {
        if !self.thin_tailed() {
            return Err(Error::DivergentMoment);
        }
        let last = self.samples.len() - 1;
        let mut acc = 0.0;
        for (m, s) in self.samples.iter().enumerate().skip(1) {
            let w = if m == last { 0.5 } else { 1.0 };
            acc += w * s * m as f64 * self.dx;
        }
        Ok(acc * self.dx)
    }

    /// `T(z) = int_z^inf J(y) dy`.
    pub fn tail(&self, z: f64) -> f64 {
        if z < 0.0 {
            return 1.0 - self.tail(-z);
        }
        if z >= self.radius {
            return 0.0;
        }
        let pos = z / self.dx;
        let m = (pos.floor() as usize).min(self.tail.len() - 2);
        let t = pos - m as f64;
        self.tail[m] + t * (self.tail[m + 1] - self.tail[m])
    }

    /// `I(z) = int_z^inf T(s) ds`, exact for the piecewise-linear `T`.
    pub fn tail_integral(&self, z: f64) -> f64 {
        if z < 0.0 {
            return -z + self.tail_integral(-z);
        }
        if z >= self.radius {
            return 0.0;
        }
        let pos = z / self.dx;
        let m = (pos.floor() as usize).min(self.tail.len() - 2);
        let t = pos - m as f64;
        let tz = self.tail[m] + t * (self.tail[m + 1] - self.tail[m]);
        self.tail_integral[m + 1] + 0.5 * (1.0 - t) * self.dx * (tz + self.tail[m + 1])
    }

    /// Kernel weights on a grid of spacing `h`: `half[m]` is the average of
    /// `J` over the cell `[(m - 1/2) h, (m + 1/2) h]`. The cells partition the
    /// line, so `h * sum` is one, and the weights depend continuously on `h`.
    pub fn discretize(&self, h: f64) -> DiscreteKernel {
        assert!(h > 0.0, "grid spacing must be positive");
        let reach = (self.radius / h + 0.5).floor() as usize;
        let mut half = Vec::with_capacity(reach + 1);
        half.push((1.0 - 2.0 * self.tail(0.5 * h)) / h);
        for m in 1..=reach {
            let a = (m as f64 - 0.5) * h;
            half.push((self.tail(a) - self.tail(a + h)) / h);
        }
        while half.len() > 1 && half[half.len() - 1] == 0.0 {
            half.pop();
        }
        let mass = h * (half[0] + 2.0 * half[1..].iter().sum::<f64>());
        for v in half.iter_mut() {
            *v /= mass;
        }
        DiscreteKernel { h, half }
    }

    /// Checks the resolution rule `h <= S/8`.
    pub fn check_resolved(&self, h: f64) -> Result<()> {
        if h > self.radius / 8.0 * (1.0 + 1e-12) {
            Err(Error::UnresolvedKernel {
                dx: h,
                support: self.radius,
            })
        } else {
            Ok(())
        }
    }
}

impl PartialEq for Kernel {
    fn eq(&self, other: &Self) -> bool {
        self.label() == other.label() && self.dx == other.dx
    }
}

fn trapezoid_symmetric(samples: &[f64], dx: f64) -> f64 {
    let last = samples.len() - 1;
    let mut acc = samples[0];
    for (m, s) in samples.iter().enumerate().skip(1) {
        let w = if m == last { 0.5 } else { 1.0 };
        acc += 2.0 * w * s;
    }
    acc * dx
}

/// Kernel samples on a uniform grid; `half[m]` is the weight density at
/// offset `+-m h`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteKernel {
    pub h: f64,
    pub half: Vec<f64>,
}

impl DiscreteKernel {
    /// Number of nodes reached on each side.
    pub fn reach(&self) -> usize {
        self.half.len() - 1
    }

    /// Quadrature weight `h * J(m h)` for a signed node offset.
    #[inline]
    pub fn weight(&self, offset: isize) -> f64 {
        let m = offset.unsigned_abs();
        if m < self.half.len() {
            self.h * self.half[m]
        } else {
            0.0
        }
    }

    pub fn mass(&self) -> f64 {
        self.h * (self.half[0] + 2.0 * self.half[1..].iter().sum::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(r: f64) -> Kernel {
        KernelSpec::Uniform { radius: r }.build().unwrap()
    }

    fn triangle(r: f64) -> Kernel {
        KernelSpec::Triangle { radius: r }.build().unwrap()
    }

    #[test]
    fn uniform_density_and_mass() {
        let k = uniform(1.0);
        assert!((k.eval(0.0) - 0.5).abs() < 1e-14);
        assert!((k.eval(-0.7) - 0.5).abs() < 1e-14);
        assert_eq!(k.eval(1.2), 0.0);
        assert!((k.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_mass() {
        let k = triangle(1.0);
        assert!((k.eval(0.25) - 0.75).abs() < 1e-12);
        assert!((k.mass() - 1.0).abs() < 1e-12);
        assert!((triangle(2.0).mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mgf_values() {
        let k = uniform(1.0);
        assert!((k.mgf(0.0).unwrap() - 1.0).abs() < 1e-12);
        let sinh1 = (1f64.exp() - (-1f64).exp()) / 2.0;
        assert!((k.mgf(1.0).unwrap() - sinh1).abs() < 1e-7);
        for lambda in [0.3, 1.7, 4.0] {
            assert_eq!(k.mgf(lambda).unwrap(), k.mgf(-lambda).unwrap());
            assert!(k.mgf(lambda).unwrap() > 1.0);
        }
    }

    #[test]
    fn first_moment_tail_values() {
        assert!((uniform(1.0).first_moment_tail().unwrap() - 0.25).abs() < 1e-12);
        // trapezoid error is dx^2/6 here
        assert!((triangle(1.0).first_moment_tail().unwrap() - 1.0 / 6.0).abs() < 2e-8);
        let tiny = uniform(1e-12).first_moment_tail().unwrap();
        assert!((0.0..1e-11).contains(&tiny));
    }

    #[test]
    fn asymmetric_table_rejected() {
        let offs = vec![-0.6, -0.3, 0.0, 0.3, 0.6];
        let vals = vec![0.0, 0.5, 1.0, 0.7, 0.0];
        let err = TableProfile::new("t", offs, vals).unwrap_err();
        assert!(matches!(err, Error::NonSymmetricTable { .. }), "{err:?}");
    }

    #[test]
    fn table_zero_at_origin_rejected() {
        let err = TableProfile::new("t", vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveAtZero(_)));
    }

    #[test]
    fn zero_mass_rejected() {
        #[derive(Debug)]
        struct Spike;
        impl KernelProfile for Spike {
            fn name(&self) -> &'static str {
                "spike"
            }
            fn label(&self) -> String {
                "spike".into()
            }
            fn density(&self, x: f64) -> f64 {
                if x == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            fn radius(&self) -> f64 {
                1.0
            }
        }
        // a single positive sample at the origin still has positive trapezoid mass
        assert!(Kernel::new(Arc::new(Spike)).is_ok());
        #[derive(Debug)]
        struct Nothing;
        impl KernelProfile for Nothing {
            fn name(&self) -> &'static str {
                "nothing"
            }
            fn label(&self) -> String {
                "nothing".into()
            }
            fn density(&self, _x: f64) -> f64 {
                0.0
            }
            fn radius(&self) -> f64 {
                1.0
            }
        }
        assert_eq!(Kernel::new(Arc::new(Nothing)).unwrap_err(), Error::NonPositiveAtZero(0.0));
    }

    #[test]
    fn table_kernel_round_trip() {
        let offs = vec![-1.0, 0.0, 1.0];
        let vals = vec![0.0, 3.0, 0.0];
        let p = TableProfile::new("tri", offs, vals).unwrap();
        let k = Kernel::new(Arc::new(p)).unwrap();
        let t = triangle(1.0);
        for x in [0.0, 0.1, 0.5, 0.9] {
            assert!((k.eval(x) - t.eval(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn parse_table_errors_carry_line() {
        let err = parse_two_column("0 1\n0.5 x\n").unwrap_err();
        assert_eq!(
            err,
            Error::Table {
                line: 2,
                reason: "cannot parse value 'x'".into()
            }
        );
    }

    #[test]
    fn heavy_tail_diverges() {
        let k = KernelSpec::Cauchy { scale: 1.0 }.build().unwrap();
        assert!((k.mgf(0.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(k.mgf(0.5).unwrap_err(), Error::DivergentMgf(0.5));
        assert_eq!(k.first_moment_tail().unwrap_err(), Error::DivergentMoment);
        assert!(!k.thin_tailed());
    }

    #[test]
    fn tail_tables_match_uniform_closed_form() {
        let k = uniform(1.0);
        for z in [0.0, 0.13, 0.5, 0.99, 1.5] {
            let t = if z < 1.0 { (1.0 - z) / 2.0 } else { 0.0 };
            let i = if z < 1.0 { (1.0 - z) * (1.0 - z) / 4.0 } else { 0.0 };
            assert!((k.tail(z) - t).abs() < 1e-12, "T({z})");
            assert!((k.tail_integral(z) - i).abs() < 1e-12, "I({z})");
        }
        assert!((k.tail(-0.3) - 0.65).abs() < 1e-12);
        assert!((k.tail_integral(0.0) - k.first_moment_tail().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn discrete_kernel_has_unit_mass() {
        let k = uniform(1.0);
        for h in [0.125, 0.1, 1.0 / 48.0, 0.3] {
            let d = k.discretize(h);
            assert!((d.mass() - 1.0).abs() < 1e-14);
        }
        let d = k.discretize(0.125);
        assert_eq!(d.reach(), 8);
        assert!((d.half[8] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn resolution_rule() {
        let k = uniform(1.0);
        assert!(k.check_resolved(0.125).is_ok());
        assert!(matches!(k.check_resolved(0.2), Err(Error::UnresolvedKernel { .. })));
    }
}
