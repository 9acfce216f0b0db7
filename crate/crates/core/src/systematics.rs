//! Systematic shifts of single spin components, magnetic sensitivities and
//! shift budgets.
//!
//! Every shift is the upper-level energy minus the lower-level energy, in Hz.
//! The magnetic shift Δf_mag is referenced to the spin-averaged frequency: the
//! first-order spin-rotation offset c_e·M_s·M_N of each level is removed, while
//! the scalar dia/paramagnetic offsets stay in.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::coefficients::{CoefficientTable, LevelCoefficients};
use crate::constants::{
    nuclear_frequency_per_tesla, polarizability_energy_hz, susceptibility_unit_hz, BOLTZMANN, ELEMENTARY_CHARGE,
    LIGHT_SPEED, MASS_H2PLUS, PLANCK, POLARIZABILITY_AU, REDUCED_PLANCK,
};
use crate::e2::{selection_check, Selection};
use crate::error::{Error, Result};
use crate::spin::{laser_field_sq, para_state_energy, quadrupole_energy_hz, FieldEnvironment};
use crate::state::SpinState;

/// Relative step of the central difference used for β.
pub const BETA_RELATIVE_STEP: f64 = 1e-4;

/// Largest magic field still reported.
pub const MAGIC_FIELD_CAP: f64 = 100.0;

/// Fractional bound quoted for the blackbody shift at cryogenic temperature.
pub const BLACKBODY_FRACTIONAL_BOUND: f64 = 1e-19;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionKind {
    /// Rovibrational E2 component.
    Optical,
    /// Electron spin flip within one rotational level.
    SpinFlip,
}

/// A spin component (lower → upper) and its spin-averaged zero-field frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionSpec {
    pub lower: SpinState,
    pub upper: SpinState,
    /// Hz
    pub zero_field_frequency: f64,
}

impl TransitionSpec {
    pub fn new(lower: SpinState, upper: SpinState, zero_field_frequency: f64) -> Result<Self> {
        let spec = TransitionSpec { lower, upper, zero_field_frequency };
        spec.kind()?;
        Ok(spec)
    }

    pub fn kind(&self) -> Result<TransitionKind> {
        let (lo, up) = (&self.lower, &self.upper);
        if lo.species != up.species {
            return Err(Error::invalid("both states must belong to the same species"));
        }
        if !(self.zero_field_frequency.is_finite() && self.zero_field_frequency >= 0.0) {
            return Err(Error::invalid("zero-field frequency must be finite and non-negative"));
        }
        if lo.level == up.level && lo.m_s != up.m_s && lo.m_n == up.m_n && lo.m_i == up.m_i {
            return Ok(TransitionKind::SpinFlip);
        }
        match selection_check(lo, up) {
            Selection::Allowed => Ok(TransitionKind::Optical),
            Selection::Forbidden(reason) => Err(Error::Forbidden(reason)),
        }
    }

    /// The same component in the other species, with conjugated labels.
    pub fn conjugate(&self) -> Self {
        TransitionSpec {
            lower: self.lower.charge_conjugate(),
            upper: self.upper.charge_conjugate(),
            zero_field_frequency: self.zero_field_frequency,
        }
    }

    fn pair<'a>(&self, table: &'a CoefficientTable) -> Result<(&'a LevelCoefficients, &'a LevelCoefficients)> {
        Ok((table.get(self.lower.level)?, table.get(self.upper.level)?))
    }
}

impl fmt::Display for TransitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lower, self.upper)
    }
}

/// Penning-trap parameters that set the fields seen by the ion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    /// T. Zero switches the magnetic budget item off.
    pub b0: f64,
    /// T/m²
    pub b2: f64,
    /// Hz
    pub nu_z: f64,
    pub nu_plus: Option<f64>,
    pub nu_minus: Option<f64>,
    /// K
    pub t_z: f64,
    /// K. One of `t_plus` and `r_orbital` sets the motional electric field.
    pub t_plus: Option<f64>,
    pub t_minus: f64,
    /// m, cyclotron orbit radius.
    pub r_orbital: Option<f64>,
    /// K
    pub environment_temperature: f64,
}

impl TrapConfig {
    /// A trap at field `b0` and axial frequency `nu_z` with every motion frozen.
    pub fn cold(b0: f64, nu_z: f64) -> Self {
        TrapConfig {
            b0,
            b2: 0.0,
            nu_z,
            nu_plus: None,
            nu_minus: None,
            t_z: 0.0,
            t_plus: None,
            t_minus: 0.0,
            r_orbital: Some(0.0),
            environment_temperature: 4.2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !finite_nonneg(self.b0) {
            return Err(Error::invalid("B0 must be finite and non-negative"));
        }
        if !self.b2.is_finite() || !finite_nonneg(self.nu_z) {
            return Err(Error::invalid("B2 and nu_z must be finite, nu_z non-negative"));
        }
        let temps = [self.t_z, self.t_minus, self.t_plus.unwrap_or(0.0), self.environment_temperature];
        if !temps.iter().all(|&t| finite_nonneg(t)) {
            return Err(Error::invalid("temperatures must be finite and non-negative"));
        }
        if !finite_nonneg(self.r_orbital.unwrap_or(0.0)) {
            return Err(Error::invalid("orbit radius must be finite and non-negative"));
        }
        if let (Some(p), Some(m)) = (self.nu_plus, self.nu_minus) {
            if !(m < self.nu_z && self.nu_z < p) {
                return Err(Error::invalid("trap frequencies must satisfy nu_minus < nu_z < nu_plus"));
            }
        }
        Ok(())
    }
}

fn transition_difference<F>(spec: &TransitionSpec, table: &CoefficientTable, mut level_shift: F) -> Result<f64>
where
    F: FnMut(&LevelCoefficients, &SpinState) -> Result<f64>,
{
    let (lo, up) = spec.pair(table)?;
    Ok(level_shift(up, &spec.upper)? - level_shift(lo, &spec.lower)?)
}

/// 2M_N² − ⅔N(N+1), the tensor weight of the Stark and light shifts.
fn stark_weight(state: &SpinState) -> f64 {
    let n = state.level.n as f64;
    2.0 * (state.m_n * state.m_n) as f64 - 2.0 / 3.0 * n * (n + 1.0)
}

/// M_N² − N(N+1)/3
fn quadrupole_weight(state: &SpinState) -> f64 {
    let n = state.level.n as f64;
    (state.m_n * state.m_n) as f64 - n * (n + 1.0) / 3.0
}

/// Level energy of the nuclear rotational Zeeman term −s_n·g_r·μ_n·M_N·B, in Hz.
pub fn rotational_zeeman_level(coeffs: &LevelCoefficients, state: &SpinState, b: f64) -> Result<f64> {
    if state.m_n == 0 {
        return Ok(0.0);
    }
    let sign = state.species.sign_factors().nuclear;
    Ok(-sign * coeffs.g_r()? * nuclear_frequency_per_tesla() * state.m_n as f64 * b)
}

pub fn rotational_zeeman_shift(spec: &TransitionSpec, table: &CoefficientTable, b: f64) -> Result<f64> {
    transition_difference(spec, table, |c, s| rotational_zeeman_level(c, s, b))
}

/// (scalar, tensor) dia/paramagnetic shift in Hz.
pub fn diamagnetic_shift(spec: &TransitionSpec, table: &CoefficientTable, b: f64) -> Result<(f64, f64)> {
    if b == 0.0 {
        return Ok((0.0, 0.0));
    }
    let unit = susceptibility_unit_hz(b);
    let scalar = transition_difference(spec, table, |c, _| Ok(-0.5 * unit * c.chi_s()?))?;
    let tensor = transition_difference(spec, table, |c, s| {
        let w = quadrupole_weight(s);
        if w == 0.0 {
            Ok(0.0)
        } else {
            Ok(-0.5 * unit * c.chi_t()? * w)
        }
    })?;
    Ok((scalar, tensor))
}

/// Mean squared (axial, radial) electric fields in (V/m)² for an ion of the
/// given mass and |charge|.
pub fn stark_fields(trap: &TrapConfig, mass: f64, charge: f64) -> Result<(f64, f64)> {
    let q = charge.abs();
    let omega_z = 2.0 * std::f64::consts::PI * trap.nu_z;
    let axial = mass * omega_z * omega_z * BOLTZMANN * trap.t_z / (q * q);
    let radial = match (trap.r_orbital, trap.t_plus) {
        (Some(r), _) => (q * trap.b0 * trap.b0 * r / mass).powi(2),
        (None, Some(t)) => BOLTZMANN * t * trap.b0 * trap.b0 / mass,
        (None, None) => {
            return Err(Error::invalid("d.c. Stark shift needs either r_orbital or T_plus"));
        }
    };
    Ok((axial, radial))
}

/// Level energy in Hz for axial and radial mean squared fields.
fn stark_level(coeffs: &LevelCoefficients, state: &SpinState, axial: f64, radial: f64, dc: bool) -> Result<f64> {
    let total = axial + radial;
    if total == 0.0 {
        return Ok(0.0);
    }
    let alpha_s = if dc { coeffs.alpha_s_dc()? } else { coeffs.alpha_s_ac()? };
    let mut e = -0.5 * polarizability_energy_hz(alpha_s, total);
    let tilde = axial - 0.5 * radial;
    let w = stark_weight(state);
    if tilde != 0.0 && w != 0.0 {
        let alpha_t = if dc { coeffs.alpha_t_dc()? } else { coeffs.alpha_t_ac()? };
        e -= 0.5 * polarizability_energy_hz(alpha_t, tilde) * w;
    }
    Ok(e)
}

/// d.c. Stark shift of the molecular ion from the trap and motional fields.
pub fn dc_stark_shift(spec: &TransitionSpec, table: &CoefficientTable, trap: &TrapConfig) -> Result<f64> {
    let (axial, radial) = stark_fields(trap, MASS_H2PLUS, ELEMENTARY_CHARGE)?;
    transition_difference(spec, table, |c, s| stark_level(c, s, axial, radial, true))
}

/// Light shift of a beam polarized along B with intensity in W/m².
pub fn ac_stark_shift(spec: &TransitionSpec, table: &CoefficientTable, intensity: f64) -> Result<f64> {
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(Error::invalid("intensity must be finite and non-negative"));
    }
    // A field along B has Ẽ² = F².
    let f_sq = laser_field_sq(intensity);
    transition_difference(spec, table, |c, s| stark_level(c, s, f_sq, 0.0, false))
}

/// Axial field gradient V_zz = m·ω_z²/|q| in V/m².
pub fn field_gradient(nu_z: f64, mass: f64, charge: f64) -> f64 {
    let omega = 2.0 * std::f64::consts::PI * nu_z;
    mass * omega * omega / charge.abs()
}

/// Electric quadrupole shift. Both the quadrupole moment and the trap gradient
/// change sign for the antimatter ion, so the shift is the same for both.
pub fn eqs_shift(spec: &TransitionSpec, table: &CoefficientTable, nu_z: f64, mass: f64, charge: f64) -> Result<f64> {
    if !(nu_z > 0.0) {
        return Err(Error::invalid("nu_z must be positive"));
    }
    let v_zz = field_gradient(nu_z, mass, charge);
    transition_difference(spec, table, |c, s| {
        let w = quadrupole_weight(s);
        if w == 0.0 {
            return Ok(0.0);
        }
        let sign = s.species.charge_sign();
        Ok(1.5_f64.powf(1.5) * quadrupole_energy_hz(sign * c.e14()?, sign * v_zz) * w)
    })
}

/// Thermal second-order Doppler shift −f₀·k_B(T_z + T₊ + T₋)/(2mc²).
pub fn qds_mean(mass: f64, t_z: f64, t_plus: f64, t_minus: f64, f0: f64) -> Result<f64> {
    if [t_z, t_plus, t_minus].iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::invalid("temperatures must be finite and non-negative"));
    }
    Ok(-f0 * BOLTZMANN * (t_z + t_plus + t_minus) / (2.0 * mass * LIGHT_SPEED * LIGHT_SPEED))
}

/// Second-order Doppler shift of a quantized cyclotron mode with mean
/// occupation `n_plus`, using ⟨v²⟩ = (n + ½)ħω₊/m. At n = 0 this leaves the
/// zero-point value −ħω₊f₀/(4mc²).
pub fn qds_quantum(mass: f64, n_plus: f64, nu_plus: f64, f0: f64) -> Result<f64> {
    if !(n_plus.is_finite() && n_plus >= 0.0) {
        return Err(Error::invalid("occupation must be finite and non-negative"));
    }
    let omega = 2.0 * std::f64::consts::PI * nu_plus;
    let v_sq = (n_plus + 0.5) * REDUCED_PLANCK * omega / mass;
    Ok(-f0 * v_sq / (2.0 * LIGHT_SPEED * LIGHT_SPEED))
}

/// Δf_mag in Hz: all magnetic interactions, first-order spin-rotation removed.
pub fn total_magnetic_shift(spec: &TransitionSpec, table: &CoefficientTable, b: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::invalid("magnetic field must be positive"));
    }
    transition_difference(spec, table, |c, s| {
        let env = FieldEnvironment::magnetic(b, s.species);
        let e = para_state_energy(c, &env, s)?;
        let first_order = if s.m_n == 0 { 0.0 } else { c.c_e()? * s.m_s.value() * s.m_n as f64 };
        Ok(e - first_order)
    })
}

/// β = dΔf_mag/dB in Hz/T by central difference.
pub fn sensitivity_beta(spec: &TransitionSpec, table: &CoefficientTable, b: f64) -> Result<f64> {
    let h = BETA_RELATIVE_STEP * b;
    let plus = total_magnetic_shift(spec, table, b + h)?;
    let minus = total_magnetic_shift(spec, table, b - h)?;
    Ok((plus - minus) / (2.0 * h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub b: f64,
    pub shift: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityScan {
    pub rows: Vec<ScanRow>,
    /// Fields where β changes sign, linearly interpolated.
    pub zero_crossings: Vec<f64>,
}

pub fn sensitivity_scan(
    spec: &TransitionSpec,
    table: &CoefficientTable,
    b_range: (f64, f64),
    steps: usize,
) -> Result<SensitivityScan> {
    let (lo, hi) = b_range;
    if !(lo > 0.1 && hi < 10.0 && lo <= hi) || steps == 0 {
        return Err(Error::invalid("scan range must lie within (0.1, 10) T with at least one step"));
    }
    let rows = (0..steps)
        .map(|i| {
            let b = if steps == 1 { lo } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 };
            Ok(ScanRow { b, shift: total_magnetic_shift(spec, table, b)?, beta: sensitivity_beta(spec, table, b)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let zero_crossings = rows
        .windows(2)
        .filter(|w| w[0].beta == 0.0 || w[0].beta.signum() != w[1].beta.signum())
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if a.beta == b.beta {
                a.b
            } else {
                a.b + (b.b - a.b) * a.beta / (a.beta - b.beta)
            }
        })
        .collect();
    Ok(SensitivityScan { rows, zero_crossings })
}

/// Resistive-cooling time constant m·D²/(R·q²).
pub fn thermalization_time(mass: f64, trap_length: f64, resistance: f64, charge: f64) -> Result<f64> {
    if !(mass > 0.0 && trap_length > 0.0 && resistance > 0.0 && charge != 0.0) {
        return Err(Error::invalid("mass, length and resistance must be positive, charge nonzero"));
    }
    Ok(mass * trap_length * trap_length / (resistance * charge * charge))
}

/// Polarizability (atomic units) of a level in a field transverse to B.
fn transverse_polarizability(coeffs: &LevelCoefficients, state: &SpinState) -> Result<f64> {
    let w = stark_weight(state);
    let tensor = if w == 0.0 { 0.0 } else { coeffs.alpha_t_dc()? * w };
    Ok(coeffs.alpha_s_dc()? - 0.5 * tensor)
}

/// Field at which the motional Stark shift cancels the radial QDS, for a
/// transverse polarizability difference in SI units (C·m²/V).
pub fn magic_field_for(delta_alpha_si: f64, f0: f64) -> Option<f64> {
    if !(delta_alpha_si < 0.0) {
        return None;
    }
    let b = (PLANCK * f0 / (-delta_alpha_si * LIGHT_SPEED * LIGHT_SPEED)).sqrt();
    (b <= MAGIC_FIELD_CAP).then_some(b)
}

pub fn magic_magnetic_field(spec: &TransitionSpec, table: &CoefficientTable) -> Result<Option<f64>> {
    let delta = transition_difference(spec, table, transverse_polarizability)?;
    Ok(magic_field_for(delta * POLARIZABILITY_AU, spec.zero_field_frequency))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetItem {
    pub name: &'static str,
    /// Hz
    pub value: f64,
    pub fractional: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftBudget {
    pub transition: TransitionSpec,
    pub items: Vec<BudgetItem>,
    /// Hz
    pub total: f64,
}

impl ShiftBudget {
    pub fn item(&self, name: &str) -> Option<&BudgetItem> {
        self.items.iter().find(|i| i.name == name)
    }

    pub fn total_fractional(&self) -> f64 {
        fractional(self.total, self.transition.zero_field_frequency)
    }
}

fn fractional(value: f64, f0: f64) -> f64 {
    if f0 > 0.0 {
        value / f0
    } else {
        0.0
    }
}

pub const MAGNETIC: &str = "magnetic";
pub const QUADRUPOLE: &str = "electric quadrupole";
pub const DC_STARK: &str = "dc stark";
pub const LIGHT_SHIFT: &str = "light shift";
pub const DOPPLER: &str = "second-order doppler";
pub const BLACKBODY: &str = "blackbody";

/// Itemized shifts of `spec` in `trap` under a spectroscopy beam of `intensity`.
pub fn shift_budget(
    spec: &TransitionSpec,
    table: &CoefficientTable,
    trap: &TrapConfig,
    intensity: f64,
) -> Result<ShiftBudget> {
    trap.validate()?;
    spec.kind()?;
    let f0 = spec.zero_field_frequency;
    let mut items = Vec::with_capacity(6);
    let mut push = |name, value: f64, note: String| {
        items.push(BudgetItem { name, value, fractional: fractional(value, f0), note });
    };

    if trap.b0 > 0.0 {
        push(MAGNETIC, total_magnetic_shift(spec, table, trap.b0)?, format!("B0 = {} T", trap.b0));
    } else {
        push(MAGNETIC, 0.0, "no magnetic field".into());
    }
    let eqs = if trap.nu_z > 0.0 { eqs_shift(spec, table, trap.nu_z, MASS_H2PLUS, ELEMENTARY_CHARGE)? } else { 0.0 };
    push(QUADRUPOLE, eqs, format!("nu_z = {} Hz", trap.nu_z));
    let source = if trap.r_orbital.is_some() { "cyclotron orbit radius" } else { "cyclotron temperature" };
    push(DC_STARK, dc_stark_shift(spec, table, trap)?, format!("radial field from {source}"));
    push(LIGHT_SHIFT, ac_stark_shift(spec, table, intensity)?, format!("I = {intensity} W/m^2"));
    let qds = qds_mean(MASS_H2PLUS, trap.t_z, trap.t_plus.unwrap_or(0.0), trap.t_minus, f0)?;
    push(DOPPLER, qds, "thermal average over all modes".into());
    push(
        BLACKBODY,
        0.0,
        format!("bound |df/f| < {BLACKBODY_FRACTIONAL_BOUND:e} at {} K", trap.environment_temperature),
    );

    let total = items.iter().map(|i| i.value).sum();
    Ok(ShiftBudget { transition: *spec, items, total })
}

/// Matter and antimatter budgets of conjugate components in identical traps.
#[derive(Debug, Clone, PartialEq)]
pub struct CptComparison {
    pub matter: ShiftBudget,
    pub antimatter: ShiftBudget,
    /// Per item, f(matter) − f(antimatter) in Hz.
    pub differences: Vec<(&'static str, f64)>,
    pub total_difference: f64,
}

pub fn cpt_comparison(
    spec: &TransitionSpec,
    table: &CoefficientTable,
    trap: &TrapConfig,
    intensity: f64,
) -> Result<CptComparison> {
    let matter = shift_budget(spec, table, trap, intensity)?;
    let antimatter = shift_budget(&spec.conjugate(), table, trap, intensity)?;
    let differences = matter.items.iter().zip(&antimatter.items).map(|(m, a)| (m.name, m.value - a.value)).collect();
    let total_difference = matter.total - antimatter.total;
    Ok(CptComparison { matter, antimatter, differences, total_difference })
}

/// A measured spin component at a fixed field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredComponent {
    pub lower: SpinState,
    pub upper: SpinState,
    /// Hz
    pub frequency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombinationScheme {
    /// Mean over a set closed under M_N → −M_N; the rotational Zeeman term cancels.
    RotationalZeemanMean,
    /// Least-squares fit of the M_N²-coefficient of diagonal components, the
    /// slot shared by the tensor susceptibility, tensor polarizability and
    /// quadrupole terms.
    TensorSlot,
}

pub fn component_combination(components: &[MeasuredComponent], scheme: CombinationScheme) -> Result<f64> {
    if components.len() < 2 {
        return Err(Error::DependentComponents("at least two components are required".into()));
    }
    for (i, a) in components.iter().enumerate() {
        if components[..i].iter().any(|b| b.lower == a.lower && b.upper == a.upper) {
            return Err(Error::DependentComponents(format!("component {} -> {} appears twice", a.lower, a.upper)));
        }
    }
    let levels = (components[0].lower.level, components[0].upper.level);
    if components.iter().any(|c| (c.lower.level, c.upper.level) != levels) {
        return Err(Error::invalid("all components must belong to the same rovibrational line"));
    }
    if components.iter().any(|c| c.lower.m_s != c.upper.m_s || c.lower.m_n != c.upper.m_n) {
        return Err(Error::invalid("components must conserve M_s and M_N"));
    }
    match scheme {
        CombinationScheme::RotationalZeemanMean => {
            let mirrored = components.iter().all(|a| {
                components.iter().any(|b| b.lower.m_s == a.lower.m_s && b.lower.m_n == -a.lower.m_n)
            });
            if !mirrored {
                return Err(Error::DependentComponents("set is not closed under M_N -> -M_N".into()));
            }
            Ok(components.iter().map(|c| c.frequency).sum::<f64>() / components.len() as f64)
        }
        CombinationScheme::TensorSlot => {
            const COLUMNS: usize = 6;
            const SLOT: usize = 4;
            if components.len() < COLUMNS {
                return Err(Error::DependentComponents(format!("{COLUMNS} components are required")));
            }
            let design = DMatrix::from_fn(components.len(), COLUMNS, |r, c| {
                let ms = components[r].lower.m_s.value();
                let mn = components[r].lower.m_n as f64;
                [1.0, ms, mn, ms * mn, mn * mn, ms * mn * mn][c]
            });
            let y = DVector::from_iterator(components.len(), components.iter().map(|c| c.frequency));
            let svd = design.svd(true, true);
            let largest = svd.singular_values.max();
            if svd.singular_values.min() <= 1e-10 * largest {
                return Err(Error::DependentComponents("projection pattern does not determine the tensor slot".into()));
            }
            let solution = svd.solve(&y, 1e-12 * largest).map_err(|e| Error::invalid(e.to_string()))?;
            Ok(solution[SLOT])
        }
    }
}
