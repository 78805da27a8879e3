//! Central finite differences, kept as an independent oracle for the jet
//! machinery. Nothing in the evaluation paths of the library depends on this
//! module; tests compare against it.

use alloc::vec;
use alloc::vec::Vec;

/// Central-difference gradient of `f` at `x` with step `h` (O(h^2)).
pub fn gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut y = x.to_vec();
    for i in 0..n {
        y[i] = x[i] + h;
        let fp = f(&y);
        y[i] = x[i] - h;
        let fm = f(&y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Central-difference Hessian of `f` at `x` with step `h` (O(h^2)).
pub fn hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let f0 = f(x);
    let mut out = vec![vec![0.0; n]; n];
    let mut y = x.to_vec();
    for i in 0..n {
        y[i] = x[i] + h;
        let fp = f(&y);
        y[i] = x[i] - h;
        let fm = f(&y);
        y[i] = x[i];
        out[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            y[i] = x[i] + h;
            y[j] = x[j] + h;
            let fpp = f(&y);
            y[j] = x[j] - h;
            let fpm = f(&y);
            y[i] = x[i] - h;
            let fmm = f(&y);
            y[j] = x[j] + h;
            let fmp = f(&y);
            y[i] = x[i];
            y[j] = x[j];
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// Directional derivative of `f` at `x` along `v` by central differences.
pub fn directional(f: &dyn Fn(&[f64]) -> f64, x: &[f64], v: &[f64], h: f64) -> f64 {
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    for i in 0..x.len() {
        xp[i] += h * v[i];
        xm[i] -= h * v[i];
    }
    (f(&xp) - f(&xm)) / (2.0 * h)
}
