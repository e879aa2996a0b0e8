use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// First-order rise plus one damped ringing mode, rendered as the impulse
/// response of the sampled step s(t) = 1 − e^{−t/τ_r} + A e^{−t/τ_d} sin(2πft).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParametricResponse {
    /// GS/s
    pub sample_rate: f64,
    /// ns
    pub rise_time: f64,
    pub ringing_amplitude: f64,
    /// MHz
    pub ringing_frequency: f64,
    /// ns
    pub ringing_decay: f64,
    /// Rendered span in ns.
    pub duration: f64,
}

impl Default for ParametricResponse {
    fn default() -> Self {
        Self {
            sample_rate: 2.0,
            rise_time: 2.0,
            ringing_amplitude: 0.05,
            ringing_frequency: 100.0,
            ringing_decay: 10.0,
            duration: 100.0,
        }
    }
}

impl ParametricResponse {
    /// Continuous step response at `t` ns.
    pub fn step(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        1.0 - (-t / self.rise_time).exp()
            + self.ringing_amplitude * (-t / self.ringing_decay).exp() * (TAU * self.ringing_frequency * 1e-3 * t).sin()
    }

    pub fn impulse(&self) -> Vec<f64> {
        let dt = 1.0 / self.sample_rate;
        let len = (self.duration * self.sample_rate).round().max(1.0) as usize;
        (0..len)
            .map(|k| self.step((k + 1) as f64 * dt) - self.step(k as f64 * dt))
            .collect()
    }
}

/// Control-line response: explicit impulse samples or the parametric model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LineResponse {
    Sampled { sample_rate: f64, impulse: Vec<f64> },
    Parametric(ParametricResponse),
}

impl Default for LineResponse {
    fn default() -> Self {
        LineResponse::Parametric(ParametricResponse::default())
    }
}

impl LineResponse {
    /// Unit impulse: the ideal line.
    pub fn ideal(sample_rate: f64) -> Self {
        LineResponse::Sampled {
            sample_rate,
            impulse: vec![1.0],
        }
    }

    pub fn sample_rate(&self) -> f64 {
        match self {
            LineResponse::Sampled { sample_rate, .. } => *sample_rate,
            LineResponse::Parametric(p) => p.sample_rate,
        }
    }

    pub fn impulse(&self) -> Vec<f64> {
        match self {
            LineResponse::Sampled { impulse, .. } => impulse.clone(),
            LineResponse::Parametric(p) => p.impulse(),
        }
    }

    pub fn dc_gain(&self) -> f64 {
        self.impulse().iter().sum()
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        let rate = self.sample_rate();
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::validation(format!("{path}.sample_rate"), "must be positive"));
        }
        match self {
            LineResponse::Sampled { impulse, .. } => {
                if impulse.is_empty() || impulse.iter().any(|v| !v.is_finite()) {
                    return Err(Error::validation(format!("{path}.impulse"), "must be non-empty and finite"));
                }
            }
            LineResponse::Parametric(p) => {
                for (name, v) in [
                    ("rise_time", p.rise_time),
                    ("ringing_decay", p.ringing_decay),
                    ("duration", p.duration),
                ] {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::validation(format!("{path}.{name}"), "must be positive"));
                    }
                }
                if !(p.ringing_amplitude.is_finite() && p.ringing_frequency.is_finite() && p.ringing_frequency >= 0.0) {
                    return Err(Error::validation(format!("{path}.ringing_frequency"), "must be finite and non-negative"));
                }
            }
        }
        let gain = self.dc_gain();
        if !(gain > 0.5 && gain < 2.0) {
            return Err(Error::validation(path, format!("DC gain {gain} outside (0.5, 2.0)")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_with_unit_gain() {
        let r = LineResponse::default();
        r.validate("r").unwrap();
        assert!((r.dc_gain() - 1.0).abs() < 1e-9);
        assert_eq!(r.impulse().len(), 200);
    }

    #[test]
    fn rendering_is_deterministic() {
        let r = LineResponse::default();
        assert_eq!(r.impulse(), r.impulse());
    }

    #[test]
    fn gain_band_enforced() {
        let r = LineResponse::Sampled {
            sample_rate: 1.0,
            impulse: vec![3.0],
        };
        assert!(r.validate("r").is_err());
        assert!(LineResponse::ideal(1.0).validate("r").is_ok());
    }

    #[test]
    fn round_trips_through_toml() {
        #[derive(Serialize, Deserialize)]
        struct Doc {
            response: LineResponse,
        }
        let text = toml::to_string(&Doc {
            response: LineResponse::default(),
        })
        .unwrap();
        let back: Doc = toml::from_str(&text).unwrap();
        assert_eq!(back.response, LineResponse::default());
    }
}
