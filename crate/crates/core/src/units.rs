//! Conversions between document units and the internal rad/ns, ns system.

use std::f64::consts::TAU;

/// `f` in MHz (ω/2π) to angular frequency in rad/ns.
#[inline]
pub fn mhz_to_rad_ns(f: f64) -> f64 {
    TAU * f * 1e-3
}

/// `f` in GHz (ω/2π) to angular frequency in rad/ns.
#[inline]
pub fn ghz_to_rad_ns(f: f64) -> f64 {
    TAU * f
}

/// Angular frequency in rad/ns to MHz (ω/2π).
#[inline]
pub fn rad_ns_to_mhz(w: f64) -> f64 {
    w / TAU * 1e3
}

#[inline]
pub fn us_to_ns(t: f64) -> f64 {
    t * 1e3
}

#[inline]
pub fn ns_to_us(t: f64) -> f64 {
    t * 1e-3
}
