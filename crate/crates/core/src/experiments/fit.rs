//! Small least-squares fits shared by the experiments.

use crate::{Error, Result};

/// Minimizes a unimodal `f` on [a, b].
pub(crate) fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Scans `n` points of [a, b] and polishes the best bracket by golden section.
pub(crate) fn scan_minimum<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize, tol: f64) -> f64 {
    let step = (b - a) / (n - 1) as f64;
    let mut best = (a, f64::INFINITY);
    for i in 0..n {
        let x = a + step * i as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    golden_section(f, (best.0 - step).max(a), (best.0 + step).min(b), tol)
}

/// Ordinary least squares y = slope·x + intercept.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len() as f64;
    if x.len() < 2 || x.len() != y.len() {
        return Err(Error::FitFailure("linear fit needs at least two points".into()));
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::FitFailure("degenerate abscissa".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Vertex of the least-squares parabola through (x, y).
pub(crate) fn parabola_vertex(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 3 {
        return None;
    }
    let x0 = x.iter().sum::<f64>() / x.len() as f64;
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut aty = nalgebra::Vector3::<f64>::zeros();
    for (&xi, &yi) in x.iter().zip(y) {
        let u = xi - x0;
        let row = nalgebra::Vector3::new(1.0, u, u * u);
        ata += row * row.transpose();
        aty += row * yi;
    }
    let c = ata.lu().solve(&aty)?;
    if c[2] <= 0.0 {
        return None;
    }
    Some(x0 - c[1] / (2.0 * c[2]))
}

/// Fits y ≈ A·sin²(Ω t) and returns (A, Ω). Ω is searched between one half
/// period over the record and `max_omega`.
pub(crate) fn fit_sin_squared(t: &[f64], y: &[f64], max_omega: f64) -> Result<(f64, f64)> {
    let span = t.last().copied().unwrap_or(0.0) - t.first().copied().unwrap_or(0.0);
    if t.len() < 8 || span <= 0.0 {
        return Err(Error::FitFailure("too few samples for an oscillation fit".into()));
    }
    let cost = |omega: f64| {
        let s: Vec<f64> = t.iter().map(|&ti| (omega * ti).sin().powi(2)).collect();
        let ss: f64 = s.iter().map(|v| v * v).sum();
        if ss == 0.0 {
            return f64::INFINITY;
        }
        let a = s.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / ss;
        s.iter().zip(y).map(|(si, yi)| (yi - a * si).powi(2)).sum::<f64>()
    };
    let lo = 0.5 * std::f64::consts::PI / span;
    let omega = scan_minimum(cost, lo, max_omega.max(2.0 * lo), 4000, 1e-12 * max_omega.max(1.0));
    let s: Vec<f64> = t.iter().map(|&ti| (omega * ti).sin().powi(2)).collect();
    let amplitude = s.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / s.iter().map(|v| v * v).sum::<f64>();
    Ok((amplitude, omega))
}
