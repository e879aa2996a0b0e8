//! Bounded Nelder–Mead simplex minimizer.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Initial simplex edge as a fraction of each coordinate's scale.
    pub initial_step: f64,
    /// Stop once the simplex diameter relative to the scale drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.02,
            tolerance: 1e-4,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub best: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub hit_iteration_cap: bool,
    /// Best value after each iteration.
    pub history: Vec<f64>,
}

/// Minimizes `f` from `start`, clamping every trial point to `bounds`.
/// NaN objective values count as +∞.
pub fn nelder_mead<F>(mut f: F, start: &[f64], bounds: &[(f64, f64)], options: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    assert_eq!(bounds.len(), n, "one bound pair per coordinate");
    let clamp = |x: &mut Vec<f64>| {
        for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
            *v = v.clamp(lo, hi);
        }
    };
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let scale: Vec<f64> = start.iter().map(|v| v.abs().max(1e-3)).collect();

    let mut x0 = start.to_vec();
    clamp(&mut x0);
    let mut simplex = vec![x0.clone()];
    for i in 0..n {
        let mut p = x0.clone();
        let step = options.initial_step * scale[i];
        p[i] += step;
        clamp(&mut p);
        if p[i] == x0[i] {
            p[i] -= step;
            clamp(&mut p);
        }
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();
    let mut history = Vec::new();
    let mut iterations = 0;

    let diameter = |s: &[Vec<f64>]| {
        s.iter()
            .skip(1)
            .map(|p| {
                p.iter()
                    .zip(&s[0])
                    .zip(&scale)
                    .map(|((a, b), sc)| ((a - b) / sc).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    };

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if n == 0 || diameter(&simplex) < options.tolerance || iterations >= options.max_iterations {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect();
            clamp(&mut p);
            p
        };

        let reflected = along(options.reflection);
        let fr = eval(&reflected);
        if fr < values[0] {
            let expanded = along(options.reflection * options.expansion);
            let fe = eval(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let (trial, ft) = if fr < values[n] {
                let p = along(options.reflection * options.contraction);
                let v = eval(&p);
                (p, v)
            } else {
                let p = along(-options.contraction);
                let v = eval(&p);
                (p, v)
            };
            if ft < values[n].min(fr) {
                simplex[n] = trial;
                values[n] = ft;
            } else {
                for i in 1..=n {
                    let mut p: Vec<f64> = simplex[0]
                        .iter()
                        .zip(&simplex[i])
                        .map(|(b, x)| b + options.shrink * (x - b))
                        .collect();
                    clamp(&mut p);
                    values[i] = eval(&p);
                    simplex[i] = p;
                }
            }
        }
        history.push(values.iter().copied().fold(f64::INFINITY, f64::min));
    }

    NelderMeadResult {
        best: simplex[0].clone(),
        value: values[0],
        iterations,
        evaluations,
        hit_iteration_cap: iterations >= options.max_iterations,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2) + 0.5 * (x[2] - 0.5).powi(2);
        let options = NelderMeadOptions {
            tolerance: 1e-9,
            max_iterations: 5000,
            initial_step: 0.5,
            ..Default::default()
        };
        let r = nelder_mead(f, &[0.0, 0.0, 0.0], &[(-10.0, 10.0); 3], &options);
        assert!(!r.hit_iteration_cap);
        for (x, want) in r.best.iter().zip([3.0, -1.0, 0.5]) {
            assert!((x - want).abs() < 1e-6, "{:?}", r.best);
        }
    }

    #[test]
    fn respects_bounds() {
        let f = |x: &[f64]| (x[0] - 5.0).powi(2);
        let r = nelder_mead(f, &[0.5], &[(0.0, 1.0)], &NelderMeadOptions::default());
        assert!(r.best[0] <= 1.0 && (r.best[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn nan_is_treated_as_worst() {
        let f = |x: &[f64]| if x[0] > 1.0 { f64::NAN } else { (x[0] - 1.0).powi(2) };
        let r = nelder_mead(f, &[0.5], &[(0.0, 3.0)], &NelderMeadOptions::default());
        assert!(r.value.is_finite());
        assert!(r.best[0] <= 1.0);
    }

    #[test]
    fn history_is_monotone() {
        let f = |x: &[f64]| x[0].powi(2) + x[1].powi(4);
        let r = nelder_mead(f, &[1.0, 1.0], &[(-5.0, 5.0); 2], &NelderMeadOptions::default());
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }
}
