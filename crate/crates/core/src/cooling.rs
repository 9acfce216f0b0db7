//! One-dimensional dynamics of a Be⁺ ion and a molecular ion in a double-well
//! coupling trap.
//!
//! Particle `a` is the laser-cooled Be⁺ in the left well at −s0/2, particle
//! `b` the molecular ion in the right well at +s0/2. The landscape is stored as
//! e·Φ(z); a particle of charge q sees (q/e)·e·Φ. For the antimatter pair the
//! right-hand part of Φ is inverted so the negative ion is still trapped.
//!
//! Each well is a harmonic term plus a quartic double-well term that bends the
//! potential over into a barrier. The two halves are joined around z = 0 with
//! a quintic smoothstep, which keeps the landscape C².

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use crate::constants::{BOLTZMANN, COULOMB, ELEMENTARY_CHARGE, MASS_BE9PLUS, MASS_H2PLUS, REDUCED_PLANCK, VACUUM_PERMITTIVITY};
use crate::error::{Error, Result};

/// Default time step of the integrator.
pub const DEFAULT_TIME_STEP: f64 = 50e-9;
/// Default softening length of the 1D Coulomb force.
pub const DEFAULT_SOFTENING: f64 = 1e-6;
/// Separations below this many softening lengths count as a collision.
pub const COLLISION_FACTOR: f64 = 5.0;

const S0_RANGE: (f64, f64) = (0.1e-3, 2e-3);
const FREQUENCY_RANGE: (f64, f64) = (50e3, 1000e3);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    /// kg
    pub mass: f64,
    /// C, signed
    pub charge: f64,
    /// m
    pub z: f64,
    /// m/s
    pub v: f64,
}

impl ParticleState {
    pub fn new(mass: f64, charge: f64, z: f64, v: f64) -> Result<Self> {
        if !(mass > 0.0) || charge == 0.0 || !charge.is_finite() || !z.is_finite() || !v.is_finite() {
            return Err(Error::invalid("particle needs positive mass, nonzero charge and finite phase space"));
        }
        Ok(ParticleState { mass, charge, z, v })
    }

    fn units_of_e(&self) -> f64 {
        self.charge / ELEMENTARY_CHARGE
    }

    fn kinetic(&self) -> f64 {
        0.5 * self.mass * self.v * self.v
    }
}

/// Sign of the molecular ion's charge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    MatterPair,
    AntimatterPair,
}

impl Polarity {
    pub fn molecule_sign(self) -> f64 {
        match self {
            Polarity::MatterPair => 1.0,
            Polarity::AntimatterPair => -1.0,
        }
    }
}

/// Shape parameters shared by both wells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellProfile {
    /// Fraction h of the reference curvature that stays harmonic; the rest,
    /// (1 − h)·m·ω_ref², is carried by the quartic term.
    pub harmonic_fraction: f64,
    /// Hz
    pub reference_frequency: f64,
    /// Half-width of the blend region in units of s0/2.
    pub blend_fraction: f64,
}

impl Default for WellProfile {
    fn default() -> Self {
        WellProfile { harmonic_fraction: 0.5, reference_frequency: 300e3, blend_fraction: 0.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWell {
    pub s0: f64,
    pub mass_a: f64,
    pub mass_b: f64,
    pub polarity: Polarity,
    pub profile: WellProfile,
    // spring constants of the full and quartic parts of each well
    k_a: f64,
    k_b: f64,
    quartic_a: f64,
    quartic_b: f64,
}

fn in_range(x: f64, (lo, hi): (f64, f64)) -> bool {
    x >= lo * (1.0 - 1e-12) && x <= hi * (1.0 + 1e-12)
}

/// One well centred at c·a: quartic double well plus harmonic remainder.
#[inline]
fn piece(z: f64, a: f64, k: f64, kq: f64, c: f64) -> (f64, f64) {
    let a2 = a * a;
    let zz = z * z - a2;
    let off = z - c * a;
    let u = kq * (zz * zz - a2 * a2) / (8.0 * a2) + (k - kq) * (off * off - a2) / 2.0;
    let du = kq * 4.0 * z * zz / (8.0 * a2) + (k - kq) * off;
    (u, du)
}

impl DoubleWell {
    /// Wells for arbitrary masses with curvature m·ω² at ±s0/2.
    pub fn new(
        s0: f64,
        omega_a: f64,
        omega_b: f64,
        mass_a: f64,
        mass_b: f64,
        polarity: Polarity,
        profile: WellProfile,
    ) -> Result<Self> {
        if !in_range(s0, S0_RANGE) {
            return Err(Error::invalid("well separation must lie in [0.1, 2] mm"));
        }
        let nu_range = (2.0 * PI * FREQUENCY_RANGE.0, 2.0 * PI * FREQUENCY_RANGE.1);
        if !in_range(omega_a, nu_range) || !in_range(omega_b, nu_range) {
            return Err(Error::invalid("well frequencies must lie in 2pi x [50, 1000] kHz"));
        }
        if !(mass_a > 0.0 && mass_b > 0.0) {
            return Err(Error::invalid("masses must be positive"));
        }
        let h = profile.harmonic_fraction;
        if !((0.0..=1.0).contains(&h) && profile.reference_frequency > 0.0 && profile.blend_fraction > 0.0 && profile.blend_fraction < 1.0) {
            return Err(Error::invalid("profile needs h in [0,1], positive reference frequency, blend in (0,1)"));
        }
        let w_ref = 2.0 * PI * profile.reference_frequency;
        Ok(DoubleWell {
            s0,
            mass_a,
            mass_b,
            polarity,
            profile,
            k_a: mass_a * omega_a * omega_a,
            k_b: mass_b * omega_b * omega_b,
            quartic_a: (1.0 - h) * mass_a * w_ref * w_ref,
            quartic_b: (1.0 - h) * mass_b * w_ref * w_ref,
        })
    }

    pub fn half_separation(&self) -> f64 {
        0.5 * self.s0
    }

    pub fn omega_a(&self) -> f64 {
        (self.k_a / self.mass_a).sqrt()
    }

    pub fn omega_b(&self) -> f64 {
        (self.k_b / self.mass_b).sqrt()
    }

    /// Retunes the Be⁺ well without re-validating; used inside sweeps.
    pub fn set_omega_a_sq(&mut self, omega_sq: f64) {
        self.k_a = self.mass_a * omega_sq;
    }

    fn scale_springs(&mut self, factor_a: f64, factor_b: f64) {
        self.k_a *= factor_a;
        self.k_b *= factor_b;
    }

    /// e·Φ(z) and its derivative.
    #[inline]
    pub fn landscape(&self, z: f64) -> (f64, f64) {
        let a = self.half_separation();
        let w = self.profile.blend_fraction * a;
        let sign = self.polarity.molecule_sign();
        if z <= -w {
            return piece(z, a, self.k_a, self.quartic_a, -1.0);
        }
        let (ur, dur) = piece(z, a, self.k_b, self.quartic_b, 1.0);
        let (ur, dur) = (sign * ur, sign * dur);
        if z >= w {
            return (ur, dur);
        }
        let (ul, dul) = piece(z, a, self.k_a, self.quartic_a, -1.0);
        let t = (z + w) / (2.0 * w);
        let s = t * t * t * (t * (6.0 * t - 15.0) + 10.0);
        let ds = 30.0 * t * t * (t - 1.0) * (t - 1.0) / (2.0 * w);
        ((1.0 - s) * ul + s * ur, (1.0 - s) * dul + s * dur + ds * (ur - ul))
    }

    /// Potential energy of a particle of `charge` at `z`.
    pub fn potential_energy(&self, charge: f64, z: f64) -> f64 {
        charge / ELEMENTARY_CHARGE * self.landscape(z).0
    }

    /// d²(e·Φ)/dz² by central difference of the analytic slope.
    pub fn curvature(&self, z: f64) -> f64 {
        let h = 1e-6 * self.half_separation();
        (self.landscape(z + h).1 - self.landscape(z - h).1) / (2.0 * h)
    }

    /// Charge of the molecular ion for this polarity.
    pub fn molecule_charge(&self) -> f64 {
        self.polarity.molecule_sign() * ELEMENTARY_CHARGE
    }
}

/// Be⁺ and H₂⁺ (or its antimatter partner) wells with the default profile.
pub fn build_double_well(s0: f64, omega_a: f64, omega_b: f64, polarity: Polarity) -> Result<DoubleWell> {
    DoubleWell::new(s0, omega_a, omega_b, MASS_BE9PLUS, MASS_H2PLUS, polarity, WellProfile::default())
}

/// Piecewise-linear frequency ramp of the Be⁺ well; ω² is linear in time
/// within each of the `n_steps` segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepProtocol {
    pub f_start: f64,
    pub f_end: f64,
    pub duration: f64,
    pub n_steps: u32,
}

impl SweepProtocol {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || self.n_steps == 0 {
            return Err(Error::invalid("sweep needs positive duration and at least one step"));
        }
        if !in_range(self.f_start, FREQUENCY_RANGE) || !in_range(self.f_end, FREQUENCY_RANGE) {
            return Err(Error::invalid("sweep frequencies must lie in [50, 1000] kHz"));
        }
        Ok(())
    }

    /// Angular frequency squared of the Be⁺ well at time `t`.
    pub fn omega_sq_at(&self, t: f64) -> f64 {
        let node = |k: u32| 2.0 * PI * (self.f_start + (self.f_end - self.f_start) * k as f64 / self.n_steps as f64);
        if t >= self.duration {
            return node(self.n_steps).powi(2);
        }
        let segment = self.duration / self.n_steps as f64;
        let k = ((t.max(0.0) / segment) as u32).min(self.n_steps - 1);
        let x = (t - k as f64 * segment) / segment;
        (1.0 - x) * node(k).powi(2) + x * node(k + 1).powi(2)
    }
}

/// τ_ex = 2π²ε₀s0³√(m_a m_b)ω_z/|q_a q_b| and the sign of q_a·q_b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeTime {
    pub duration: f64,
    pub coupling_sign: f64,
}

pub fn exchange_time(m_a: f64, m_b: f64, q_a: f64, q_b: f64, omega_z: f64, s0: f64) -> Result<ExchangeTime> {
    if !(m_a > 0.0 && m_b > 0.0 && omega_z > 0.0 && s0 > 0.0) || q_a * q_b == 0.0 {
        return Err(Error::invalid("exchange time needs positive masses, frequency, separation and nonzero charges"));
    }
    let duration = 2.0 * PI * PI * VACUUM_PERMITTIVITY * s0.powi(3) * (m_a * m_b).sqrt() * omega_z / (q_a * q_b).abs();
    Ok(ExchangeTime { duration, coupling_sign: (q_a * q_b).signum() })
}

/// Softened Coulomb forces (on a, on b) for a pair; they cancel exactly.
#[inline]
pub fn coulomb_forces(a: &ParticleState, b: &ParticleState, softening: f64) -> (f64, f64) {
    let d = b.z - a.z;
    let f = COULOMB * a.charge * b.charge * d / (d * d + softening * softening).powf(1.5);
    (-f, f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Record every n-th step; `None` keeps only the final state.
    pub sample_stride: Option<usize>,
    pub softening: f64,
    pub coulomb: bool,
}

impl IntegrationConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        IntegrationConfig { dt, t_end, sample_stride: None, softening: DEFAULT_SOFTENING, coulomb: true }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sample_stride = Some(stride);
        self
    }

    pub fn without_coulomb(mut self) -> Self {
        self.coulomb = false;
        self
    }

    fn steps(&self) -> Result<u64> {
        if !(self.dt > 0.0 && self.dt <= 100e-9) {
            return Err(Error::invalid("time step must lie in (0, 100] ns"));
        }
        if !(self.t_end >= 0.0 && self.t_end / self.dt <= 1e9) {
            return Err(Error::invalid("t_end must be non-negative and at most 1e9 steps"));
        }
        if !(self.softening > 0.0) || self.sample_stride == Some(0) {
            return Err(Error::invalid("softening must be positive and stride nonzero"));
        }
        Ok((self.t_end / self.dt).round() as u64)
    }
}

/// Kinetic plus potential energy of each particle, referenced to the bottom of
/// its own well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    pub t: f64,
    pub z_a: f64,
    pub v_a: f64,
    pub e_a: f64,
    pub z_b: f64,
    pub v_b: f64,
    pub e_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<EnergySample>,
    pub final_pair: (ParticleState, ParticleState),
    /// Final energies of a and b.
    pub final_energy: (f64, f64),
    /// Time and separation of a collision, if one stopped the run.
    pub collision: Option<(f64, f64)>,
    pub steps: u64,
}

fn energies(well: &DoubleWell, a: &ParticleState, b: &ParticleState) -> (f64, f64) {
    let half = well.half_separation();
    let e_a = a.kinetic() + a.units_of_e() * (well.landscape(a.z).0 - well.landscape(-half).0);
    let e_b = b.kinetic() + b.units_of_e() * (well.landscape(b.z).0 - well.landscape(half).0);
    (e_a, e_b)
}

/// Velocity-Verlet integration of the pair. A sweep retunes the Be⁺ well.
pub fn integrate(
    pair: (ParticleState, ParticleState),
    well: &DoubleWell,
    config: &IntegrationConfig,
    sweep: Option<&SweepProtocol>,
) -> Result<Trajectory> {
    let steps = config.steps()?;
    if let Some(s) = sweep {
        s.validate()?;
    }
    let mut well = *well;
    let (mut a, mut b) = pair;
    let dt = config.dt;
    let floor = COLLISION_FACTOR * config.softening;
    let forces = |well: &DoubleWell, a: &ParticleState, b: &ParticleState| {
        let mut fa = -a.units_of_e() * well.landscape(a.z).1;
        let mut fb = -b.units_of_e() * well.landscape(b.z).1;
        if config.coulomb {
            let (ca, cb) = coulomb_forces(a, b, config.softening);
            fa += ca;
            fb += cb;
        }
        (fa, fb)
    };
    if let Some(s) = sweep {
        well.set_omega_a_sq(s.omega_sq_at(0.0));
    }
    let record = |well: &DoubleWell, t: f64, a: &ParticleState, b: &ParticleState| {
        let (e_a, e_b) = energies(well, a, b);
        EnergySample { t, z_a: a.z, v_a: a.v, e_a, z_b: b.z, v_b: b.v, e_b }
    };
    let mut samples = Vec::new();
    if config.sample_stride.is_some() {
        let cap = steps / config.sample_stride.unwrap_or(1) as u64 + 1;
        samples.reserve(cap.min(1 << 24) as usize);
        samples.push(record(&well, 0.0, &a, &b));
    }
    let (mut fa, mut fb) = forces(&well, &a, &b);
    let mut collision = None;
    let mut done = 0;
    for i in 1..=steps {
        let t = i as f64 * dt;
        a.v += 0.5 * dt * fa / a.mass;
        b.v += 0.5 * dt * fb / b.mass;
        a.z += dt * a.v;
        b.z += dt * b.v;
        if let Some(s) = sweep {
            well.set_omega_a_sq(s.omega_sq_at(t));
        }
        (fa, fb) = forces(&well, &a, &b);
        a.v += 0.5 * dt * fa / a.mass;
        b.v += 0.5 * dt * fb / b.mass;
        done = i;
        if let Some(stride) = config.sample_stride {
            if i % stride as u64 == 0 {
                samples.push(record(&well, t, &a, &b));
            }
        }
        let d = (b.z - a.z).abs();
        if config.coulomb && d < floor {
            collision = Some((t, d));
            break;
        }
    }
    let final_energy = energies(&well, &a, &b);
    Ok(Trajectory { samples, final_pair: (a, b), final_energy, collision, steps: done })
}

/// Relative change of the mean over the first and last tenth of a series.
pub fn relative_drift(series: &[f64]) -> f64 {
    let m = (series.len() / 10).max(1);
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let head = mean(&series[..m]);
    let tail = mean(&series[series.len() - m..]);
    (tail - head).abs() / mean(series).abs()
}

/// Static wells whose Coulomb-dressed frequencies equal ω_z, and the dressed
/// equilibrium positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedPair {
    pub well: DoubleWell,
    pub z_a: f64,
    pub z_b: f64,
}

const NEWTON_STEPS: usize = 20;
const DRESSING_ROUNDS: usize = 4;

/// Equilibrium of both ions including their Coulomb interaction, and the
/// squared normal frequencies of each ion about it with the partner held fixed.
fn dressed_equilibrium(well: &DoubleWell) -> (f64, f64, f64, f64) {
    let half = well.half_separation();
    let qa = 1.0;
    let qb = well.polarity.molecule_sign();
    let coupling = COULOMB * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE * qa * qb;
    let (mut za, mut zb) = (-half, half);
    for _ in 0..NEWTON_STEPS {
        let d = zb - za;
        let fc = coupling * d / d.abs().powi(3);
        let ga = qa * well.landscape(za).1 + fc;
        let gb = qb * well.landscape(zb).1 - fc;
        let k = 2.0 * coupling / d.abs().powi(3);
        let (haa, hbb) = (qa * well.curvature(za) + k, qb * well.curvature(zb) + k);
        let det = haa * hbb - k * k;
        za -= (hbb * ga + k * gb) / det;
        zb -= (k * ga + haa * gb) / det;
    }
    let k = 2.0 * coupling / (zb - za).abs().powi(3);
    (za, zb, (qa * well.curvature(za) + k) / well.mass_a, (qb * well.curvature(zb) + k) / well.mass_b)
}

/// Rescales the bare wells until each ion's dressed frequency is ω_z.
pub fn dress_wells(s0: f64, omega_z: f64, polarity: Polarity, profile: WellProfile) -> Result<DressedPair> {
    let mut well = DoubleWell::new(s0, omega_z, omega_z, MASS_BE9PLUS, MASS_H2PLUS, polarity, profile)?;
    let target = omega_z * omega_z;
    for _ in 0..DRESSING_ROUNDS {
        let (_, _, wa2, wb2) = dressed_equilibrium(&well);
        if !(wa2 > 0.0 && wb2 > 0.0) {
            return Err(Error::invalid("Coulomb coupling destabilizes the wells"));
        }
        well.scale_springs(target / wa2, target / wb2);
    }
    let (z_a, z_b, _, _) = dressed_equilibrium(&well);
    Ok(DressedPair { well, z_a, z_b })
}

/// Window over which the running maximum of the molecular energy is taken.
const ENVELOPE_WINDOW: f64 = 100e-6;
const EXCHANGE_STRIDE: usize = 20;

/// Time of the first minimum of the molecular-ion energy envelope when it
/// starts at the dressed equilibrium with energy `e0` and Be⁺ at rest.
pub fn measure_exchange_time(pair: &DressedPair, e0: f64, dt: f64, t_max: f64) -> Result<f64> {
    let a = ParticleState::new(MASS_BE9PLUS, ELEMENTARY_CHARGE, pair.z_a, 0.0)?;
    let b = ParticleState::new(MASS_H2PLUS, pair.well.molecule_charge(), pair.z_b, (2.0 * e0 / MASS_H2PLUS).sqrt())?;
    let config = IntegrationConfig::new(dt, t_max).with_stride(EXCHANGE_STRIDE);
    let run = integrate((a, b), &pair.well, &config, None)?;
    if let Some((time, separation)) = run.collision {
        return Err(Error::Collision { time, separation });
    }
    let energy: Vec<f64> = run.samples.iter().map(|s| s.e_b).collect();
    let sample_dt = EXCHANGE_STRIDE as f64 * dt;
    let window = ((ENVELOPE_WINDOW / sample_dt).round() as usize).max(2);
    let hop = (window / 5).max(1);
    if energy.len() <= window {
        return Err(Error::invalid("run too short to resolve the energy envelope"));
    }
    let (best, _) = (0..energy.len() - window)
        .step_by(hop)
        .map(|i| (i, energy[i..i + window].iter().cloned().fold(f64::NEG_INFINITY, f64::max)))
        .fold((0, f64::INFINITY), |acc, (i, e)| if e < acc.1 { (i, e) } else { acc });
    Ok((best + window / 2) as f64 * sample_dt)
}

/// Sweep cooling set-up for one polarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingProtocol {
    pub s0: f64,
    pub polarity: Polarity,
    pub sweep: SweepProtocol,
    /// Hz, fixed frequency of the molecular-ion well.
    pub molecule_frequency: f64,
    /// Extra time at the final sweep frequency.
    pub hold_time: f64,
    pub dt: f64,
    pub softening: f64,
    pub profile: WellProfile,
}

impl CoolingProtocol {
    /// 270 → 300 kHz in ten ramps over 0.8 s, molecule well at 288 kHz, s0 = 0.7 mm.
    pub fn standard(polarity: Polarity) -> Self {
        CoolingProtocol {
            s0: 0.7e-3,
            polarity,
            sweep: SweepProtocol { f_start: 270e3, f_end: 300e3, duration: 0.8, n_steps: 10 },
            molecule_frequency: 288e3,
            hold_time: 0.0,
            dt: DEFAULT_TIME_STEP,
            softening: DEFAULT_SOFTENING,
            profile: WellProfile::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sweep.validate()?;
        if !(self.hold_time >= 0.0) {
            return Err(Error::invalid("hold time must be non-negative"));
        }
        self.well().map(|_| ())
    }

    fn well(&self) -> Result<DoubleWell> {
        let w = 2.0 * PI;
        DoubleWell::new(
            self.s0,
            w * self.sweep.f_start,
            w * self.molecule_frequency,
            MASS_BE9PLUS,
            MASS_H2PLUS,
            self.polarity,
            self.profile,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingOutcome {
    /// J
    pub molecule_energy: f64,
    /// J
    pub coolant_energy: f64,
}

/// Runs the sweep for a molecular ion with `initial_energy` (J) whose axial
/// oscillation starts at `phase` (rad; 0 means at the well centre moving
/// outward). Be⁺ starts at its well centre with ground-state-scale speed.
pub fn simulate_cooling(initial_energy: f64, phase: f64, protocol: &CoolingProtocol) -> Result<CoolingOutcome> {
    let run = cooling_trajectory(initial_energy, phase, protocol, None)?;
    if let Some((time, separation)) = run.collision {
        return Err(Error::Collision { time, separation });
    }
    Ok(CoolingOutcome { molecule_energy: run.final_energy.1, coolant_energy: run.final_energy.0 })
}

/// The run behind [`simulate_cooling`], sampled every `stride` steps. A
/// collision is reported in the trajectory rather than as an error.
pub fn cooling_trajectory(
    initial_energy: f64,
    phase: f64,
    protocol: &CoolingProtocol,
    stride: Option<usize>,
) -> Result<Trajectory> {
    if !(initial_energy >= 0.0 && initial_energy.is_finite()) {
        return Err(Error::invalid("initial energy must be finite and non-negative"));
    }
    protocol.validate()?;
    let well = protocol.well()?;
    let half = well.half_separation();
    let omega_a = 2.0 * PI * protocol.sweep.f_start;
    let omega_b = 2.0 * PI * protocol.molecule_frequency;
    let speed = (2.0 * initial_energy / MASS_H2PLUS).sqrt();
    let a = ParticleState::new(MASS_BE9PLUS, ELEMENTARY_CHARGE, -half, (REDUCED_PLANCK * omega_a / MASS_BE9PLUS).sqrt())?;
    let b = ParticleState::new(
        MASS_H2PLUS,
        well.molecule_charge(),
        half + speed / omega_b * phase.sin(),
        speed * phase.cos(),
    )?;
    let mut config = IntegrationConfig::new(protocol.dt, protocol.sweep.duration + protocol.hold_time);
    config.softening = protocol.softening;
    config.sample_stride = stride;
    integrate((a, b), &well, &config, Some(&protocol.sweep))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoolingMap {
    /// J
    pub energies: Vec<f64>,
    /// Hz
    pub frequencies: Vec<f64>,
    /// Final molecular energy per [frequency][energy]; NaN after a collision.
    pub final_energy: Vec<Vec<f64>>,
    pub success: Vec<Vec<bool>>,
    /// Largest successful initial energy per frequency.
    pub boundary: Vec<Option<f64>>,
    /// Least-squares slope of the boundary in mK per kHz.
    pub slope_mk_per_khz: Option<f64>,
}

/// Resonant exchange in Coulomb-dressed static wells for one τ_ex; a cell
/// succeeds when the molecular ion ends below `threshold` (J).
pub fn cooling_map(energy_grid: &[f64], nu_z_grid: &[f64], s0: f64, threshold: f64, dt: f64) -> Result<CoolingMap> {
    let monotone = |g: &[f64]| g.windows(2).all(|w| w[1] > w[0]);
    if !monotone(energy_grid) || !monotone(nu_z_grid) || energy_grid.iter().any(|&e| e < 0.0) {
        return Err(Error::invalid("grids must be strictly increasing and energies non-negative"));
    }
    let pairs = nu_z_grid
        .iter()
        .map(|&nu| {
            let omega = 2.0 * PI * nu;
            let pair = dress_wells(s0, omega, Polarity::MatterPair, WellProfile::default())?;
            let tau = exchange_time(MASS_BE9PLUS, MASS_H2PLUS, ELEMENTARY_CHARGE, ELEMENTARY_CHARGE, omega, s0)?.duration;
            Ok((pair, tau))
        })
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(usize, usize)> =
        (0..nu_z_grid.len()).flat_map(|i| (0..energy_grid.len()).map(move |j| (i, j))).collect();
    let finals = cells
        .par_iter()
        .map(|&(i, j)| {
            let (pair, tau) = &pairs[i];
            let a = ParticleState::new(MASS_BE9PLUS, ELEMENTARY_CHARGE, pair.z_a, 0.0)?;
            let v = (2.0 * energy_grid[j] / MASS_H2PLUS).sqrt();
            let b = ParticleState::new(MASS_H2PLUS, ELEMENTARY_CHARGE, pair.z_b, v)?;
            let run = integrate((a, b), &pair.well, &IntegrationConfig::new(dt, *tau), None)?;
            Ok(if run.collision.is_some() { f64::NAN } else { run.final_energy.1 })
        })
        .collect::<Result<Vec<f64>>>()?;
    let final_energy: Vec<Vec<f64>> = finals.chunks(energy_grid.len()).map(|c| c.to_vec()).collect();
    let success: Vec<Vec<bool>> =
        final_energy.iter().map(|row| row.iter().map(|&e| e < threshold).collect()).collect();
    let boundary: Vec<Option<f64>> = success
        .iter()
        .map(|row| row.iter().zip(energy_grid).filter(|(ok, _)| **ok).map(|(_, &e)| e).last())
        .collect();
    let points: Vec<(f64, f64)> = nu_z_grid
        .iter()
        .zip(&boundary)
        .filter_map(|(&nu, b)| b.map(|e| (nu / 1e3, e / BOLTZMANN * 1e3)))
        .collect();
    Ok(CoolingMap {
        energies: energy_grid.to_vec(),
        frequencies: nu_z_grid.to_vec(),
        final_energy,
        success,
        boundary,
        slope_mk_per_khz: linear_slope(&points),
    })
}

fn linear_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `n` exponential axial energies (J) with mean k_B·T, reproducible from `seed`.
pub fn boltzmann_ensemble(temperature: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(temperature > 0.0 && temperature.is_finite()) || n == 0 {
        return Err(Error::invalid("ensemble needs positive temperature and size"));
    }
    let dist = Exp::new(1.0 / (BOLTZMANN * temperature)).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| dist.sample(&mut rng)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOutcome {
    pub initial_energies: Vec<f64>,
    /// NaN marks a run stopped by a collision.
    pub final_energies: Vec<f64>,
    pub fraction: f64,
}

/// Fraction of a thermal ensemble cooled below `threshold` (J). Energies come
/// from [`boltzmann_ensemble`]; oscillation phases are uniform, drawn from a
/// second stream of the same seed.
pub fn ensemble_cooling_fraction(
    temperature: f64,
    protocol: &CoolingProtocol,
    n: usize,
    threshold: f64,
    seed: u64,
) -> Result<EnsembleOutcome> {
    let initial_energies = boltzmann_ensemble(temperature, n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let phases: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    protocol.validate()?;
    let final_energies = initial_energies
        .par_iter()
        .zip(phases.par_iter())
        .map(|(&e, &phase)| match simulate_cooling(e, phase, protocol) {
            Ok(out) => Ok(out.molecule_energy),
            Err(Error::Collision { .. }) => Ok(f64::NAN),
            Err(other) => Err(other),
        })
        .collect::<Result<Vec<f64>>>()?;
    let cooled = final_energies.iter().filter(|&&e| e < threshold).count();
    Ok(EnsembleOutcome { initial_energies, final_energies, fraction: cooled as f64 / n as f64 })
}
