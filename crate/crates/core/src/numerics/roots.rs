//! Bracketing root refinement (Brent's method) and sign-change scanning.

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 300;

/// Refine a root of `f` inside `[a, b]`, where `fa = f(a)` and `fb = f(b)`
/// have opposite signs. Converges when the bracket is narrower than
/// `rel_tol * |x|` (plus a few ulps).
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    rel_tol: f64,
) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootFailure(format!("[{a}, {b}] does not bracket a sign change")));
    }
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITERATIONS {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs() + f64::MIN_POSITIVE;
        let half = 0.5 * (c - b);
        if half.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(half) };
        fb = f(b);
    }
    Err(Error::RootFailure(format!("no convergence after {MAX_ITERATIONS} iterations")))
}

/// Geometric grid with `per_decade` points per decade covering `[lo, hi]`
/// (both endpoints included).
pub fn geometric_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && per_decade > 0);
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    let ratio = (hi / lo).ln() / n as f64;
    let mut grid: Vec<f64> = (0..=n).map(|i| lo * (ratio * i as f64).exp()).collect();
    grid[0] = lo;
    grid[n] = hi;
    grid
}

/// Brackets `[x_i, x_{i+1}]` of `grid` on which `values` change sign, plus
/// grid points where the value is exactly zero (returned as degenerate
/// brackets).
pub fn sign_change_brackets(grid: &[f64], values: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (v0, v1) = (values[i], values[i + 1]);
        if v0 == 0.0 {
            out.push((i, i));
        } else if v1 != 0.0 && v0.signum() != v1.signum() {
            out.push((i, i + 1));
        }
    }
    if let Some(&last) = values.last() {
        if last == 0.0 {
            out.push((grid.len() - 1, grid.len() - 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_sqrt_two() {
        let f = |x: f64| x * x - 2.0;
        let r = brent(f, 0.0, 2.0, f(0.0), f(2.0), 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn brent_rejects_non_bracket() {
        let f = |x: f64| x * x + 1.0;
        assert!(brent(f, -1.0, 1.0, f(-1.0), f(1.0), 1e-12).is_err());
    }

    #[test]
    fn brent_handles_steep_functions() {
        let f = |x: f64| (x - 0.3).powi(3) * 1e6;
        let r = brent(f, 0.0, 1.0, f(0.0), f(1.0), 1e-12).unwrap();
        assert!((r - 0.3).abs() < 1e-6);
    }

    #[test]
    fn grid_covers_interval() {
        let g = geometric_grid(1e-8, 1.0, 512);
        assert_eq!(g.len(), 8 * 512 + 1);
        assert_eq!(g[0], 1e-8);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn brackets_and_exact_zeros() {
        let grid = [0.0, 1.0, 2.0, 3.0, 4.0];
        let vals = [1.0, -1.0, 0.0, 2.0, 3.0];
        assert_eq!(sign_change_brackets(&grid, &vals), vec![(0, 1), (2, 2)]);
    }
}
