use num_complex::Complex64;
use rustfft::FftPlanner;

use super::response::LineResponse;
use crate::{Error, Result};

/// Relative regularization λ/max|H|² used when the caller passes none.
pub const DEFAULT_RELATIVE_REGULARIZATION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Deconvolution {
    pub drive: Vec<f64>,
    /// Absolute λ actually applied.
    pub regularization: f64,
    /// max |h ∗ x − y_d| over the waveform.
    pub round_trip_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResponse {
    pub trace: Vec<f64>,
    /// max |trace − target| inside the settling window, relative to max |target|.
    pub settling_deviation: f64,
}

/// Causal linear convolution truncated to the length of `x`.
pub fn convolve(x: &[f64], h: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|n| {
            let kmax = n.min(h.len().saturating_sub(1));
            (0..=kmax).map(|k| h[k] * x[n - k]).sum()
        })
        .collect()
}

/// Tikhonov-regularized spectral inversion X = Y·H*/(|H|² + λ).
///
/// `regularization` is the absolute λ; `None` selects 1e−6·max|H|². The
/// target is extended by holding its final value and then zero-filled, so
/// the wrap-around of the circular transform lands in the discarded padding.
pub fn deconvolve(target: &[f64], response: &LineResponse, regularization: Option<f64>) -> Result<Deconvolution> {
    response.validate("response")?;
    if target.is_empty() || target.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("target", "waveform must be non-empty and finite"));
    }
    if let Some(l) = regularization {
        if !(l.is_finite() && l >= 0.0) {
            return Err(Error::validation("regularization", "must be non-negative"));
        }
    }
    let h = response.impulse();
    let n = target.len();
    let size = (2 * (n + 2 * h.len())).next_power_of_two();
    let hold_end = n + (size - n) / 2;

    let mut y: Vec<Complex64> = (0..size)
        .map(|k| {
            let v = if k < n {
                target[k]
            } else if k < hold_end {
                target[n - 1]
            } else {
                0.0
            };
            Complex64::new(v, 0.0)
        })
        .collect();
    let mut hf: Vec<Complex64> = (0..size)
        .map(|k| Complex64::new(h.get(k).copied().unwrap_or(0.0), 0.0))
        .collect();

    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    forward.process(&mut y);
    forward.process(&mut hf);

    let peak = hf.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
    let lambda = regularization.unwrap_or(DEFAULT_RELATIVE_REGULARIZATION * peak);
    if lambda == 0.0 {
        let y_peak = y.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let starved = y
            .iter()
            .zip(&hf)
            .any(|(yk, hk)| hk.norm_sqr() <= 1e-12 * peak && yk.norm() > 1e-9 * y_peak);
        if starved {
            return Err(Error::AmplificationOverflow);
        }
    }

    let mut x: Vec<Complex64> = y
        .iter()
        .zip(&hf)
        .map(|(yk, hk)| {
            let denom = hk.norm_sqr() + lambda;
            if denom == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                yk * hk.conj() / denom
            }
        })
        .collect();
    inverse.process(&mut x);
    let drive: Vec<f64> = x[..n].iter().map(|c| c.re / size as f64).collect();

    let round_trip_error = convolve(&drive, &h)
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Deconvolution {
        drive,
        regularization: lambda,
        round_trip_error,
    })
}

/// Passes `drive` through the line and scores settling against `target`
/// inside `window` (ns from the first sample).
pub fn simulate_step_response(
    response: &LineResponse,
    drive: &[f64],
    target: &[f64],
    window: (f64, f64),
    scale: f64,
) -> Result<StepResponse> {
    response.validate("response")?;
    if drive.len() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            actual: drive.len(),
        });
    }
    let trace: Vec<f64> = convolve(drive, &response.impulse()).iter().map(|v| v * scale).collect();
    let rate = response.sample_rate();
    let amplitude = target.iter().map(|v| (v * scale).abs()).fold(0.0, f64::max);
    let worst = trace
        .iter()
        .zip(target)
        .enumerate()
        .filter(|(k, _)| {
            let t = *k as f64 / rate;
            t >= window.0 && t <= window.1
        })
        .map(|(_, (a, b))| (a - b * scale).abs())
        .fold(0.0, f64::max);
    let settling_deviation = if amplitude > 0.0 { worst / amplitude } else { worst };
    Ok(StepResponse {
        trace,
        settling_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::ParametricResponse;

    #[test]
    fn unit_impulse_is_transparent() {
        let target: Vec<f64> = (0..50).map(|k| (k as f64 * 0.3).sin()).collect();
        let d = deconvolve(&target, &LineResponse::ideal(1.0), Some(0.0)).unwrap();
        for (a, b) in d.drive.iter().zip(&target) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_drive_gives_zero_trace() {
        let r = simulate_step_response(&LineResponse::default(), &[0.0; 64], &[0.0; 64], (5.0, 30.0), 1.0).unwrap();
        assert!(r.trace.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn starved_band_without_regularization_overflows() {
        // h = (1, 1) has a spectral zero at the Nyquist frequency.
        let r = LineResponse::Sampled {
            sample_rate: 1.0,
            impulse: vec![0.5, 0.5],
        };
        let target: Vec<f64> = (0..32).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!(matches!(deconvolve(&target, &r, Some(0.0)), Err(Error::AmplificationOverflow)));
        assert!(deconvolve(&target, &r, Some(1e-3)).is_ok());
    }

    #[test]
    fn negative_regularization_rejected() {
        assert!(deconvolve(&[1.0], &LineResponse::default(), Some(-1.0)).is_err());
    }

    #[test]
    fn length_mismatch_rejected() {
        let p = LineResponse::Parametric(ParametricResponse::default());
        assert!(simulate_step_response(&p, &[1.0; 3], &[1.0; 4], (0.0, 1.0), 1.0).is_err());
    }
}
