//! CODATA 2018 values in SI units.

use std::f64::consts::PI;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const REDUCED_PLANCK: f64 = 1.054_571_817e-34;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const NUCLEAR_MAGNETON: f64 = 5.050_783_746_1e-27;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const LIGHT_SPEED: f64 = 299_792_458.0;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const PROTON_MASS: f64 = 1.672_621_923_69e-27;
/// Free-electron g factor, negative by the sign convention used throughout.
pub const ELECTRON_G_FREE: f64 = -2.002_319_304_362_56;
pub const PROTON_G_BARE: f64 = 5.585_694_689_3;

/// Molecular binding energy (~16 eV) is below 1e-8 of the mass and ignored.
pub const MASS_H2PLUS: f64 = 2.0 * PROTON_MASS + ELECTRON_MASS;
/// Atomic mass of 9Be minus one electron.
pub const MASS_BE9PLUS: f64 = 9.012_183_065 * ATOMIC_MASS_UNIT - ELECTRON_MASS;

/// One atomic unit of polarizability, 4πε₀a₀³, in C·m²/V.
pub const POLARIZABILITY_AU: f64 = 4.0 * PI * VACUUM_PERMITTIVITY * BOHR_RADIUS * BOHR_RADIUS * BOHR_RADIUS;

/// Coulomb constant 1/(4πε₀).
pub const COULOMB: f64 = 1.0 / (4.0 * PI * VACUUM_PERMITTIVITY);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub bohr_magneton: f64,
    pub nuclear_magneton: f64,
    pub boltzmann: f64,
    pub planck: f64,
    pub reduced_planck: f64,
    pub light_speed: f64,
    pub elementary_charge: f64,
    pub bohr_radius: f64,
    pub vacuum_permittivity: f64,
    pub vacuum_permeability: f64,
    pub fine_structure: f64,
    pub atomic_mass_unit: f64,
    pub electron_g_free: f64,
    pub proton_g_bare: f64,
    pub mass_h2plus: f64,
    pub mass_be9plus: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    bohr_magneton: BOHR_MAGNETON,
    nuclear_magneton: NUCLEAR_MAGNETON,
    boltzmann: BOLTZMANN,
    planck: PLANCK,
    reduced_planck: REDUCED_PLANCK,
    light_speed: LIGHT_SPEED,
    elementary_charge: ELEMENTARY_CHARGE,
    bohr_radius: BOHR_RADIUS,
    vacuum_permittivity: VACUUM_PERMITTIVITY,
    vacuum_permeability: VACUUM_PERMEABILITY,
    fine_structure: FINE_STRUCTURE,
    atomic_mass_unit: ATOMIC_MASS_UNIT,
    electron_g_free: ELECTRON_G_FREE,
    proton_g_bare: PROTON_G_BARE,
    mass_h2plus: MASS_H2PLUS,
    mass_be9plus: MASS_BE9PLUS,
};

impl PhysicalConstants {
    /// Every field, with its name, for bulk checks.
    pub fn entries(&self) -> [(&'static str, f64); 16] {
        [
            ("bohr_magneton", self.bohr_magneton),
            ("nuclear_magneton", self.nuclear_magneton),
            ("boltzmann", self.boltzmann),
            ("planck", self.planck),
            ("reduced_planck", self.reduced_planck),
            ("light_speed", self.light_speed),
            ("elementary_charge", self.elementary_charge),
            ("bohr_radius", self.bohr_radius),
            ("vacuum_permittivity", self.vacuum_permittivity),
            ("vacuum_permeability", self.vacuum_permeability),
            ("fine_structure", self.fine_structure),
            ("atomic_mass_unit", self.atomic_mass_unit),
            ("electron_g_free", self.electron_g_free),
            ("proton_g_bare", self.proton_g_bare),
            ("mass_h2plus", self.mass_h2plus),
            ("mass_be9plus", self.mass_be9plus),
        ]
    }
}

/// μ_B/h in Hz/T.
pub fn bohr_frequency_per_tesla() -> f64 {
    BOHR_MAGNETON / PLANCK
}

/// μ_n/h in Hz/T.
pub fn nuclear_frequency_per_tesla() -> f64 {
    NUCLEAR_MAGNETON / PLANCK
}

/// α²·B̃² in Hz for a laboratory field `b` (T): the energy unit multiplying a
/// susceptibility given in atomic units.
pub fn susceptibility_unit_hz(b: f64) -> f64 {
    FINE_STRUCTURE * FINE_STRUCTURE * (4.0 * PI / VACUUM_PERMEABILITY) * BOHR_RADIUS.powi(3) * b * b
        / PLANCK
}

/// Energy in Hz of a polarizability `alpha_au` (atomic units) times a squared field (V/m)².
pub fn polarizability_energy_hz(alpha_au: f64, field_sq: f64) -> f64 {
    alpha_au * POLARIZABILITY_AU * field_sq / PLANCK
}
