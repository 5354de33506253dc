//! Small scalar solvers shared by the speed and threshold code.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
/// Returns `(x_min, f(x_min))`.
pub fn golden_section<F>(mut f: F, mut a: f64, mut b: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..500 {
        if (b - a).abs() <= rel_tol * (c.abs() + d.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Root of `g` on `[lo, hi]` given `g(lo) < 0 < g(hi)`, by the Illinois
/// variant of regula falsi. Stops when the bracket is narrower than `x_tol`
/// and `|g| <= g_tol` at the returned point.
pub fn illinois<G>(mut g: G, mut lo: f64, mut hi: f64, mut g_lo: f64, mut g_hi: f64, x_tol: f64, g_tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(Error::InvalidInput(format!(
            "root not bracketed: g({lo}) = {g_lo}, g({hi}) = {g_hi}"
        )));
    }
    let mut side = 0i8;
    let mut best = if -g_lo < g_hi { (lo, g_lo) } else { (hi, g_hi) };
    for _ in 0..200 {
        let mut x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let gx = g(x)?;
        if gx.abs() < best.1.abs() {
            best = (x, gx);
        }
        if gx.abs() <= g_tol && (hi - lo) <= x_tol.max(1e3 * f64::EPSILON * x.abs()) {
            return Ok(x);
        }
        if gx < 0.0 {
            lo = x;
            g_lo = gx;
            if side == -1 {
                g_hi *= 0.5;
            }
            side = -1;
        } else if gx > 0.0 {
            hi = x;
            g_hi = gx;
            if side == 1 {
                g_lo *= 0.5;
            }
            side = 1;
        } else {
            return Ok(x);
        }
        if (hi - lo) <= x_tol && best.1.abs() <= g_tol {
            return Ok(best.0);
        }
    }
    if best.1.abs() <= g_tol {
        Ok(best.0)
    } else {
        Err(Error::NoConvergence {
            what: "scalar root",
            iterations: 200,
            residual: best.1.abs(),
        })
    }
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| Ok((x - 1.3) * (x - 1.3) + 2.0), 0.0, 4.0, 1e-12).unwrap();
        assert!((x - 1.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn illinois_solves_cubic() {
        let g = |x: f64| Ok(x * x * x - 2.0);
        let r = illinois(g, 0.0, 2.0, -2.0, 6.0, 1e-12, 1e-12).unwrap();
        assert!((r - 2f64.powf(1.0 / 3.0)).abs() < 1e-10);
    }

    #[test]
    fn slope_of_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.7 * x - 1.0).collect();
        assert!((ls_slope(&xs, &ys) - 0.7).abs() < 1e-14);
    }
}
