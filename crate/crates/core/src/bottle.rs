//! Cancelling the second-order Doppler shift with a magnetic bottle.
//!
//! The bottle field B(z, r) = B0 + B2(z² − r²/2) shifts an oscillating ion by
//! β·B2·⟨z²⟩, while its motion shifts it by −f⟨v²⟩/(2c²). On the axial mode
//! ⟨v²⟩ = ω_z²⟨z²⟩, so a single B2 nulls both for every amplitude.

use std::f64::consts::PI;

use crate::coefficients::CoefficientTable;
use crate::constants::{BOLTZMANN, LIGHT_SPEED, MASS_H2PLUS};
use crate::error::{Error, Result};
use crate::systematics::{sensitivity_beta, TransitionSpec, TrapConfig};

/// Largest bottle strength considered practical, T/m².
pub const PRACTICAL_B2_LIMIT: f64 = 250e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BottleField {
    /// T
    pub b0: f64,
    /// T/m²
    pub b2: f64,
    /// m, axial equilibrium offset from the bottle centre
    pub z0: f64,
}

impl BottleField {
    pub fn new(b0: f64, b2: f64, z0: f64) -> Result<Self> {
        if !(b0 > 0.0 && b2.is_finite() && z0.is_finite()) {
            return Err(Error::invalid("bottle needs B0 > 0 and finite B2, z0"));
        }
        Ok(BottleField { b0, b2, z0 })
    }
}

/// Axial field component at (z, r).
pub fn bottle_field_axial(bottle: &BottleField, z: f64, r: f64) -> f64 {
    bottle.b0 + bottle.b2 * (z * z - 0.5 * r * r)
}

/// Bottle strength that cancels the axial second-order Doppler shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagicBottle {
    /// T/m²
    pub b2: f64,
    /// Set when β < 0 forces a negative B2, which is harder to build.
    pub inverted: bool,
}

/// B2 = (f/β)·ω_z²/(2c²) for sensitivity `beta` (Hz/T), transition frequency
/// `frequency` (Hz) and axial frequency `nu_z` (Hz).
pub fn magic_b2(beta: f64, frequency: f64, nu_z: f64) -> Result<MagicBottle> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::invalid("zero magnetic sensitivity cannot cancel the Doppler shift"));
    }
    if !(frequency > 0.0 && nu_z > 0.0) {
        return Err(Error::invalid("transition and axial frequencies must be positive"));
    }
    let w = 2.0 * PI * nu_z;
    let b2 = frequency / beta * w * w / (2.0 * LIGHT_SPEED * LIGHT_SPEED);
    Ok(MagicBottle { b2, inverted: b2 < 0.0 })
}

/// Period-averaged shift (Hz, relative to f(B0)) of an axial oscillation of
/// amplitude `amplitude` about the bottle offset z0.
pub fn axial_period_averaged_shift(bottle: &BottleField, beta: f64, frequency: f64, nu_z: f64, amplitude: f64) -> f64 {
    let w = 2.0 * PI * nu_z;
    let doppler = w * w * frequency / (2.0 * LIGHT_SPEED * LIGHT_SPEED);
    beta * bottle.b2 * bottle.z0 * bottle.z0 + 0.5 * amplitude * amplitude * (beta * bottle.b2 - doppler)
}

/// Period-averaged shift (Hz) of the two radial modes with mean squared
/// speeds `v_plus_sq` and `v_minus_sq` (m²/s²).
pub fn radial_period_averaged_shift(
    bottle: &BottleField,
    beta: f64,
    frequency: f64,
    (nu_plus, nu_minus): (f64, f64),
    (v_plus_sq, v_minus_sq): (f64, f64),
) -> Result<f64> {
    if !(nu_plus > 0.0 && nu_minus > 0.0) {
        return Err(Error::invalid("radial mode frequencies must be positive"));
    }
    let doppler = frequency / (2.0 * LIGHT_SPEED * LIGHT_SPEED);
    let per_mode = |nu: f64, v_sq: f64| (-beta * bottle.b2 / (2.0 * (2.0 * PI * nu).powi(2)) - doppler) * v_sq;
    Ok(per_mode(nu_minus, v_minus_sq) + per_mode(nu_plus, v_plus_sq))
}

/// B2 that nulls the magnetron contribution. It has the opposite sign to the
/// axial magic value.
pub fn magnetron_null_b2(beta: f64, frequency: f64, nu_minus: f64) -> Result<f64> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::invalid("zero magnetic sensitivity cannot cancel the Doppler shift"));
    }
    let w = 2.0 * PI * nu_minus;
    Ok(-frequency * w * w / (beta * LIGHT_SPEED * LIGHT_SPEED))
}

/// Highest axial frequency whose magic B2 stays within `limit` (T/m²).
pub fn max_axial_frequency(beta: f64, frequency: f64, limit: f64) -> f64 {
    (limit * 2.0 * beta.abs() * LIGHT_SPEED * LIGHT_SPEED / frequency).sqrt() / (2.0 * PI)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CancellationReport {
    /// Hz/T at the trap's B0
    pub beta: f64,
    /// `None` when β vanishes.
    pub bottle: Option<MagicBottle>,
    pub feasible: bool,
    /// Hz
    pub max_axial_frequency: f64,
    /// Radial shifts (Hz) without a bottle and with the axial magic bottle.
    pub radial_shift_plain: Option<f64>,
    pub radial_shift_with_bottle: Option<f64>,
    /// B2 that would null the magnetron term instead.
    pub magnetron_null_b2: Option<f64>,
}

/// Magic bottle for `spec` in `trap`, checked against [`PRACTICAL_B2_LIMIT`].
/// Radial penalties need both radial frequencies and use ⟨v²⟩ = k_B·T/m per mode.
pub fn cancellation_report(spec: &TransitionSpec, table: &CoefficientTable, trap: &TrapConfig) -> Result<CancellationReport> {
    trap.validate()?;
    let beta = sensitivity_beta(spec, table, trap.b0)?;
    let f = spec.zero_field_frequency;
    let bottle = magic_b2(beta, f, trap.nu_z).ok();
    let radial = match (trap.nu_plus, trap.nu_minus, trap.t_plus) {
        (Some(nu_p), Some(nu_m), Some(t_p)) => {
            let v_sq = |t: f64| BOLTZMANN * t / MASS_H2PLUS;
            let plain = BottleField { b0: trap.b0, b2: 0.0, z0: 0.0 };
            let speeds = (v_sq(t_p), v_sq(trap.t_minus));
            let without = radial_period_averaged_shift(&plain, beta, f, (nu_p, nu_m), speeds)?;
            let with = bottle
                .map(|m| radial_period_averaged_shift(&BottleField { b2: m.b2, ..plain }, beta, f, (nu_p, nu_m), speeds))
                .transpose()?;
            (Some(without), with, magnetron_null_b2(beta, f, nu_m).ok())
        }
        _ => (None, None, None),
    };
    Ok(CancellationReport {
        beta,
        bottle,
        feasible: bottle.is_some_and(|m| m.b2.abs() <= PRACTICAL_B2_LIMIT),
        max_axial_frequency: if beta == 0.0 { 0.0 } else { max_axial_frequency(beta, f, PRACTICAL_B2_LIMIT) },
        radial_shift_plain: radial.0,
        radial_shift_with_bottle: radial.1,
        magnetron_null_b2: radial.2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn magic_bottle_nulls_axial_shift_for_any_amplitude() {
        let (f, beta, nu) = (127e12, 5e3, 300e3);
        let m = magic_b2(beta, f, nu).unwrap();
        let bottle = BottleField { b0: 4.0, b2: m.b2, z0: 0.0 };
        for amp in [1e-6, 1e-5, 1e-4] {
            let s = axial_period_averaged_shift(&bottle, beta, f, nu, amp);
            assert!(s.abs() < 1e-12 * f);
        }
        assert!(magic_b2(-beta, f, nu).unwrap().inverted);
        assert!(magic_b2(0.0, f, nu).is_err());
    }

    #[test]
    fn limit_frequency_gives_limit_strength() {
        let nu = max_axial_frequency(2e4, 127e12, PRACTICAL_B2_LIMIT);
        let at_max = magic_b2(2e4, 127e12, nu).unwrap();
        assert!((at_max.b2 / PRACTICAL_B2_LIMIT - 1.0).abs() < 1e-12);
    }

    #[test]
    fn magnetron_null() {
        let (f, beta, nu_m) = (127e12, 1e4, 8e3);
        let b2 = magnetron_null_b2(beta, f, nu_m).unwrap();
        let bottle = BottleField { b0: 4.0, b2, z0: 0.0 };
        let s = radial_period_averaged_shift(&bottle, beta, f, (60e6, nu_m), (0.0, 1.0)).unwrap();
        assert!(s.abs() < 1e-12 * f / (LIGHT_SPEED * LIGHT_SPEED));
    }
}
