//! Effective spin Hamiltonian of para levels in a strong magnetic field, plus
//! the decoupled-limit energies of para and ortho states.

use nalgebra::SMatrix;

use crate::coefficients::LevelCoefficients;
use crate::constants::{
    bohr_frequency_per_tesla, nuclear_frequency_per_tesla, polarizability_energy_hz, susceptibility_unit_hz,
    BOHR_MAGNETON, LIGHT_SPEED, NUCLEAR_MAGNETON, PROTON_G_BARE, VACUUM_PERMITTIVITY,
};
use crate::error::{Error, Result};
use crate::state::{Species, SpinProjection, SpinState};

pub type SpinMatrix = SMatrix<f64, 10, 10>;

/// One product state |M_N; M_s⟩ of the N = 2 basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisState {
    /// 1-based position in the basis.
    pub index: usize,
    pub m_n: i32,
    pub m_s: SpinProjection,
}

impl BasisState {
    pub fn twice_m_f(&self) -> i32 {
        2 * self.m_n + self.m_s.twice()
    }
}

const fn basis(index: usize, m_n: i32, m_s: SpinProjection) -> BasisState {
    BasisState { index, m_n, m_s }
}

/// Ordered by M_F; within a block the M_s = −1/2 state comes first.
pub const N2_BASIS: [BasisState; 10] = [
    basis(1, -2, SpinProjection::Down),
    basis(2, -1, SpinProjection::Down),
    basis(3, -2, SpinProjection::Up),
    basis(4, 0, SpinProjection::Down),
    basis(5, -1, SpinProjection::Up),
    basis(6, 1, SpinProjection::Down),
    basis(7, 0, SpinProjection::Up),
    basis(8, 2, SpinProjection::Down),
    basis(9, 1, SpinProjection::Up),
    basis(10, 2, SpinProjection::Up),
];

/// ⟨M_N−1; +1/2| c_e s⁺N⁻/2 |M_N; −1/2⟩
fn ladder_element(c_e: f64, n: u32, m_n_down: i32) -> f64 {
    let nn = (n * (n + 1)) as f64;
    let m = m_n_down as f64;
    0.5 * c_e * (nn - m * (m - 1.0)).max(0.0).sqrt()
}

/// c_e (s·N) in the N = 2 product basis, in Hz.
pub fn build_spin_rotation_matrix(c_e: f64) -> SpinMatrix {
    let mut h = SpinMatrix::zeros();
    for (i, a) in N2_BASIS.iter().enumerate() {
        h[(i, i)] = c_e * a.m_s.value() * a.m_n as f64;
        for (j, b) in N2_BASIS.iter().enumerate() {
            if a.m_s == SpinProjection::Down && b.m_s == SpinProjection::Up && b.m_n == a.m_n - 1 {
                let x = ladder_element(c_e, 2, a.m_n);
                h[(i, j)] = x;
                h[(j, i)] = x;
            }
        }
    }
    h
}

/// External fields seen by the ion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldEnvironment {
    /// T
    pub magnetic_field: f64,
    /// ⟨E_z²⟩ in (V/m)²
    pub axial_field_sq: f64,
    /// ⟨E_x² + E_y²⟩ in (V/m)²
    pub radial_field_sq: f64,
    /// V_zz in V/m² as produced by a trap holding a positive ion. The inverted
    /// antimatter trap flips this together with the quadrupole moment.
    pub field_gradient: f64,
    /// Laser intensity in W/m², polarized along B.
    pub intensity: f64,
    pub species: Species,
}

impl FieldEnvironment {
    pub fn magnetic(b: f64, species: Species) -> Self {
        FieldEnvironment {
            magnetic_field: b,
            axial_field_sq: 0.0,
            radial_field_sq: 0.0,
            field_gradient: 0.0,
            intensity: 0.0,
            species,
        }
    }

    /// Ẽ² = E_z² − (E_x² + E_y²)/2
    pub fn tensor_field_sq(&self) -> f64 {
        self.axial_field_sq - 0.5 * self.radial_field_sq
    }

    pub fn total_field_sq(&self) -> f64 {
        self.axial_field_sq + self.radial_field_sq
    }

    /// Squared laser field amplitude 2I/(ε₀c).
    pub fn laser_field_sq(&self) -> f64 {
        laser_field_sq(self.intensity)
    }
}

pub fn laser_field_sq(intensity: f64) -> f64 {
    2.0 * intensity / (VACUUM_PERMITTIVITY * LIGHT_SPEED)
}

/// Coefficients of the diagonal part of the Hamiltonian for one level:
/// −g_e'·μ_B B s_z − g_l·μ_B B N_z + γ N_z² + ζB s_z N_z² + ξ.
///
/// The species signs of μ_B and μ_n are folded into `g_e_prime`, `g_l` and
/// `zeta_b`. γ collects the tensor susceptibility, tensor Stark, quadrupole and
/// tensor light-shift terms; ξ all state-independent offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalTerms {
    pub g_e_prime: f64,
    pub g_l: f64,
    /// Hz
    pub gamma: f64,
    /// Hz
    pub zeta_b: f64,
    /// Hz
    pub xi: f64,
    /// μ_B B/h in Hz
    pub bohr_hz: f64,
    pub species: Species,
}

impl DiagonalTerms {
    /// Energy of a product state, without ξ and without spin-rotation.
    pub fn basis_energy(&self, m_s: SpinProjection, m_n: i32) -> f64 {
        let ms = m_s.value();
        let mn = m_n as f64;
        -self.g_e_prime * self.bohr_hz * ms - self.g_l * self.bohr_hz * mn
            + self.gamma * mn * mn
            + self.zeta_b * ms * mn * mn
    }

    /// Dimensionless Z = ζB/(μ_B B).
    pub fn z(&self) -> f64 {
        if self.bohr_hz == 0.0 {
            0.0
        } else {
            self.zeta_b / self.bohr_hz
        }
    }
}

/// √(N(N+1)(2N−1)(2N+3)), zero for N = 0.
fn tensor_norm(n: u32) -> f64 {
    let n = n as f64;
    (n * (n + 1.0) * (2.0 * n - 1.0) * (2.0 * n + 3.0)).max(0.0).sqrt()
}

pub fn build_diagonal_terms(coeffs: &LevelCoefficients, env: &FieldEnvironment) -> Result<DiagonalTerms> {
    if env.magnetic_field < 0.0 {
        return Err(Error::invalid("magnetic field must be non-negative"));
    }
    let signs = env.species.sign_factors();
    let n = coeffs.level.n;
    let nn = (n * (n + 1)) as f64;
    let b = env.magnetic_field;
    let bohr_hz = bohr_frequency_per_tesla() * b;

    let g_e = coeffs.g_e()?;
    let (g_t, g_r) = if n == 0 { (0.0, 0.0) } else { (coeffs.g_t()?, coeffs.g_r()?) };
    let norm = tensor_norm(n);
    let (g_e_prime, zeta_b) = if norm > 0.0 {
        (g_e - g_t * nn / norm, -3.0 * g_t * bohr_hz / norm)
    } else {
        (g_e, 0.0)
    };

    let mut gamma = 0.0;
    let mut xi = 0.0;

    if b != 0.0 {
        let unit = susceptibility_unit_hz(b);
        let chi_s = coeffs.chi_s()?;
        let chi_t = if n == 0 { 0.0 } else { coeffs.chi_t()? };
        gamma -= 0.5 * chi_t * unit;
        xi -= 0.5 * unit * (chi_s - chi_t * nn / 3.0);
    }

    let e_sq = env.total_field_sq();
    if e_sq != 0.0 {
        xi -= 0.5 * polarizability_energy_hz(coeffs.alpha_s_dc()?, e_sq);
    }
    let e_tilde = env.tensor_field_sq();
    if e_tilde != 0.0 && n > 0 {
        let w = polarizability_energy_hz(coeffs.alpha_t_dc()?, e_tilde);
        gamma -= w;
        xi += w * nn / 3.0;
    }

    if env.field_gradient != 0.0 && n > 0 {
        let sign = env.species.charge_sign();
        let e14 = sign * coeffs.e14()?;
        let v_zz = sign * env.field_gradient;
        let q = 1.5_f64.powf(1.5) * quadrupole_energy_hz(e14, v_zz);
        gamma += q;
        xi -= q * nn / 3.0;
    }

    if env.intensity > 0.0 {
        let f_sq = env.laser_field_sq();
        xi -= 0.5 * polarizability_energy_hz(coeffs.alpha_s_ac()?, f_sq);
        if n > 0 {
            let w = polarizability_energy_hz(coeffs.alpha_t_ac()?, f_sq);
            gamma -= w;
            xi += w * nn / 3.0;
        }
    }

    Ok(DiagonalTerms {
        g_e_prime: signs.bohr * g_e_prime,
        g_l: signs.nuclear * g_r * NUCLEAR_MAGNETON / BOHR_MAGNETON,
        gamma,
        zeta_b: signs.bohr * zeta_b,
        xi,
        bohr_hz,
        species: env.species,
    })
}

/// E₁₄ (MHz·m²/GV) times V_zz (V/m²), in Hz.
pub fn quadrupole_energy_hz(e14: f64, v_zz: f64) -> f64 {
    e14 * 1e6 * v_zz * 1e-9
}

/// An eigenstate of the spin Hamiltonian with its adiabatic label.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenLevel {
    /// Hz, relative to the state-independent offset ξ.
    pub energy: f64,
    pub label: SpinState,
    pub twice_m_f: i32,
    /// Components on the block's basis states, M_s = −1/2 first.
    pub amplitudes: Vec<f64>,
}

/// Closed-form eigensystem of [[a, v], [v, d]]: (lower, upper) with unit eigenvectors.
fn eigen_2x2(a: f64, d: f64, v: f64) -> ((f64, [f64; 2]), (f64, [f64; 2])) {
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(v);
    let theta = 0.5 * v.atan2(half);
    let (s, c) = theta.sin_cos();
    ((mean - r, [-s, c]), (mean + r, [c, s]))
}

/// All spin levels of a para level (N even), sorted by M_F then energy.
pub fn spin_levels(coeffs: &LevelCoefficients, diag: &DiagonalTerms) -> Result<Vec<EigenLevel>> {
    let level = coeffs.level;
    if !level.is_para() {
        return Err(Error::UnsupportedLevel { level, reason: "ortho levels use the decoupled energy" });
    }
    let n = level.n as i32;
    let c_e = if n == 0 { 0.0 } else { coeffs.c_e()? };
    let state = |m_s, m_n| SpinState {
        level,
        m_s,
        m_n,
        m_i: 0,
        species: diag.species,
    };
    let mut out = Vec::with_capacity(2 * (2 * n as usize + 1));
    for twice_m_f in (-(2 * n + 1)..=(2 * n + 1)).step_by(2) {
        let m_n_down = (twice_m_f + 1) / 2;
        let m_n_up = (twice_m_f - 1) / 2;
        let down = (m_n_down.abs() <= n).then_some(m_n_down);
        let up = (m_n_up.abs() <= n).then_some(m_n_up);
        let diag_energy =
            |m_s: SpinProjection, m_n: i32| diag.basis_energy(m_s, m_n) + c_e * m_s.value() * m_n as f64;
        match (down, up) {
            (Some(md), Some(mu)) => {
                let a = diag_energy(SpinProjection::Down, md);
                let d = diag_energy(SpinProjection::Up, mu);
                let v = ladder_element(c_e, level.n, md);
                let ((e_lo, x_lo), (e_hi, x_hi)) = eigen_2x2(a, d, v);
                // label the lower eigenvector by its dominant component; a
                // perfect tie goes to the lower-M_s state
                let lower_is_down = x_lo[0].abs() >= x_lo[1].abs();
                let (lab_lo, lab_hi) = if lower_is_down {
                    (state(SpinProjection::Down, md), state(SpinProjection::Up, mu))
                } else {
                    (state(SpinProjection::Up, mu), state(SpinProjection::Down, md))
                };
                out.push(EigenLevel { energy: e_lo, label: lab_lo, twice_m_f, amplitudes: x_lo.to_vec() });
                out.push(EigenLevel { energy: e_hi, label: lab_hi, twice_m_f, amplitudes: x_hi.to_vec() });
            }
            (Some(m), None) | (None, Some(m)) => {
                let m_s = if down.is_some() { SpinProjection::Down } else { SpinProjection::Up };
                out.push(EigenLevel {
                    energy: diag_energy(m_s, m),
                    label: state(m_s, m),
                    twice_m_f,
                    amplitudes: vec![1.0],
                });
            }
            (None, None) => {}
        }
    }
    Ok(out)
}

/// The ten N = 2 levels of App.-A form.
pub fn diagonalize_para_n2(coeffs: &LevelCoefficients, diag: &DiagonalTerms) -> Result<Vec<EigenLevel>> {
    if coeffs.level.n != 2 {
        return Err(Error::UnsupportedLevel { level: coeffs.level, reason: "only N = 2 has the 10-state basis" });
    }
    spin_levels(coeffs, diag)
}

/// Full N = 2 matrix: spin-rotation plus the diagonal terms (ξ excluded).
pub fn total_matrix_n2(coeffs: &LevelCoefficients, diag: &DiagonalTerms) -> Result<SpinMatrix> {
    if coeffs.level.n != 2 {
        return Err(Error::UnsupportedLevel { level: coeffs.level, reason: "only N = 2 has the 10-state basis" });
    }
    let mut h = build_spin_rotation_matrix(coeffs.c_e()?);
    for (i, b) in N2_BASIS.iter().enumerate() {
        h[(i, i)] += diag.basis_energy(b.m_s, b.m_n);
    }
    Ok(h)
}

/// Energy in Hz of the adiabatically labeled para state, including ξ.
pub fn para_state_energy(coeffs: &LevelCoefficients, env: &FieldEnvironment, state: &SpinState) -> Result<f64> {
    if state.level != coeffs.level {
        return Err(Error::invalid(format!("state {state} does not belong to level {}", coeffs.level)));
    }
    let diag = build_diagonal_terms(coeffs, &FieldEnvironment { species: state.species, ..*env })?;
    let levels = spin_levels(coeffs, &diag)?;
    levels
        .iter()
        .find(|l| l.label.m_s == state.m_s && l.label.m_n == state.m_n)
        .map(|l| l.energy + diag.xi)
        .ok_or_else(|| Error::invalid(format!("state {state} not found among the spin levels")))
}

/// Column of the large-field expansion table; the lower group carries the
/// M_s = −1/2 labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpansionGroup {
    Lower,
    Higher,
}

impl ExpansionGroup {
    pub fn name(self) -> &'static str {
        match self {
            ExpansionGroup::Lower => "lower",
            ExpansionGroup::Higher => "higher",
        }
    }

    pub fn spin(self) -> SpinProjection {
        match self {
            ExpansionGroup::Lower => SpinProjection::Down,
            ExpansionGroup::Higher => SpinProjection::Up,
        }
    }
}

/// Whether Z is kept in the second-order denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Denominators {
    #[default]
    KeepZ,
    DropZ,
}

/// Large-field expansion of an N = 2 level to first order in 1/B.
pub fn expansion_energy(
    coeffs: &LevelCoefficients,
    diag: &DiagonalTerms,
    twice_m_f: i32,
    group: ExpansionGroup,
    denominators: Denominators,
) -> Result<f64> {
    if coeffs.level.n != 2 {
        return Err(Error::UnsupportedLevel { level: coeffs.level, reason: "expansion is for N = 2" });
    }
    if diag.bohr_hz == 0.0 {
        return Err(Error::invalid("expansion diverges at zero field"));
    }
    let c = coeffs.c_e()?;
    let x = diag.bohr_hz;
    let ge = diag.g_e_prime;
    let gl = diag.g_l;
    let g = diag.gamma;
    let z = diag.z();
    let zd = if denominators == Denominators::KeepZ { z } else { 0.0 };
    let d5 = x * (2.0 * ge - 2.0 * gl - 5.0 * zd);
    let d1 = x * (2.0 * ge - 2.0 * gl - zd);
    let c2 = c * c;
    use ExpansionGroup::{Higher, Lower};
    let e = match (twice_m_f, group) {
        (-5, Lower) => c + 4.0 * g + 0.5 * x * (ge + 4.0 * gl - 4.0 * z),
        (-3, Lower) => 0.5 * c + g + 2.0 * c2 / d5 + 0.5 * x * (ge + 2.0 * gl - z),
        (-3, Higher) => -c + 4.0 * g - 2.0 * c2 / d5 - 0.5 * x * (ge - 4.0 * (gl + z)),
        (-1, Lower) => 0.5 * x * ge + 3.0 * c2 / d1,
        (-1, Higher) => -0.5 * c + g - 3.0 * c2 / d1 - 0.5 * x * (ge - 2.0 * gl - z),
        (1, Lower) => -0.5 * c + g + 3.0 * c2 / d1 + 0.5 * x * (ge - 2.0 * gl - z),
        (1, Higher) => -0.5 * x * ge - 3.0 * c2 / d1,
        (3, Lower) => -c + 4.0 * g + 2.0 * c2 / d5 + 0.5 * x * (ge - 4.0 * (gl + z)),
        (3, Higher) => 0.5 * c + g - 2.0 * c2 / d5 - 0.5 * x * (ge + 2.0 * gl - z),
        (5, Higher) => c + 4.0 * g - 0.5 * x * (ge + 4.0 * gl - 4.0 * z),
        _ => return Err(Error::NoSuchState { twice_m_f, group: group.name() }),
    };
    Ok(e)
}

/// First-order-in-1/B energy of an N = 2 product state: the diagonal terms,
/// first-order spin-rotation and the dominant c_e² correction, with Z dropped
/// from its denominator.
pub fn perturbative_energy(
    coeffs: &LevelCoefficients,
    diag: &DiagonalTerms,
    m_s: SpinProjection,
    m_n: i32,
) -> Result<f64> {
    if coeffs.level.n != 2 {
        return Err(Error::UnsupportedLevel { level: coeffs.level, reason: "perturbative form is for N = 2" });
    }
    if diag.bohr_hz == 0.0 {
        return Err(Error::invalid("perturbative form diverges at zero field"));
    }
    let c_e = coeffs.c_e()?;
    let ms = m_s.value();
    let mn = m_n as f64;
    let denom = 2.0 * diag.bohr_hz * (diag.g_e_prime - diag.g_l);
    let second = c_e * c_e / denom * ((ms + mn).powi(2) - 6.25) * ms;
    Ok(diag.basis_energy(m_s, m_n) + c_e * ms * mn + second)
}

/// Strong-field energy of a para state with every projection treated as a
/// good quantum number (no dia/paramagnetic or electric terms).
pub fn decoupled_energy(state: &SpinState, coeffs: &LevelCoefficients, b: f64) -> Result<f64> {
    if !state.level.is_para() || state.m_i != 0 {
        return Err(Error::UnsupportedLevel { level: state.level, reason: "use the ortho energy for odd N" });
    }
    check_level(state, coeffs)?;
    let signs = state.species.sign_factors();
    let n = state.level.n;
    let ms = state.m_s.value();
    let mn = state.m_n as f64;
    let mut e = -signs.bohr * bohr_frequency_per_tesla() * coeffs.g_e()? * ms * b;
    if n > 0 {
        let nn = (n * (n + 1)) as f64;
        e += coeffs.c_e()? * ms * mn;
        e -= signs.nuclear * nuclear_frequency_per_tesla() * coeffs.g_r()? * mn * b;
        e -= signs.bohr * bohr_frequency_per_tesla() * coeffs.g_t()? * b * ms * (3.0 * mn * mn - nn) / tensor_norm(n);
    }
    Ok(e)
}

/// Strong-field spin energy of an ortho state (odd N) including hyperfine
/// terms.
pub fn ortho_energy(state: &SpinState, coeffs: &LevelCoefficients, b: f64) -> Result<f64> {
    if state.level.is_para() {
        return Err(Error::UnsupportedLevel { level: state.level, reason: "ortho energy needs odd N" });
    }
    check_level(state, coeffs)?;
    let signs = state.species.sign_factors();
    let n = state.level.n as f64;
    let ms = state.m_s.value();
    let mn = state.m_n as f64;
    let mi = state.m_i as f64;
    let d_term = coeffs.d_1()? / ((2.0 * n - 1.0) * (2.0 * n + 3.0))
        * (2.0 / 3.0 * n * (n + 1.0) * mn - 2.0 * mn * mn * mi)
        * ms;
    let mut e = coeffs.c_e()? * ms * mn + coeffs.b_f()? * ms * mi + d_term;
    if b != 0.0 {
        e -= signs.bohr * bohr_frequency_per_tesla() * coeffs.g_e()? * ms * b;
        e -= signs.nuclear * nuclear_frequency_per_tesla() * PROTON_G_BARE * mi * b;
        e -= signs.nuclear * nuclear_frequency_per_tesla() * coeffs.g_r()? * mn * b;
    }
    Ok(e)
}

/// f↑ − f↓ of the two nuclear-spin-flip lines at fixed M_N, in Hz.
pub fn nuclear_spinflip_difference(coeffs: &LevelCoefficients, m_n: i32) -> Result<f64> {
    let level = coeffs.level;
    if level.is_para() {
        return Err(Error::UnsupportedLevel { level, reason: "needs odd N" });
    }
    let n = level.n as f64;
    let mn = m_n as f64;
    Ok(coeffs.b_f()? - 2.0 * coeffs.d_1()? * mn * mn / (4.0 * n * (n + 1.0) - 3.0))
}

fn check_level(state: &SpinState, coeffs: &LevelCoefficients) -> Result<()> {
    if state.level != coeffs.level {
        return Err(Error::invalid(format!("state {state} does not belong to level {}", coeffs.level)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{Coefficient, CoefficientTable};
    use crate::state::Level;

    fn l02() -> LevelCoefficients {
        CoefficientTable::shipped().get(Level::new(0, 2)).unwrap().clone()
    }

    #[test]
    fn spin_rotation_matrix_elements() {
        let h = build_spin_rotation_matrix(1.0);
        assert_eq!(h[(0, 0)], 1.0);
        assert_eq!(h[(1, 2)], 1.0);
        assert!((h[(3, 4)] - 1.5_f64.sqrt()).abs() < 1e-15);
        assert_eq!(h[(1, 1)], 0.5);
        assert_eq!(h[(2, 2)], -1.0);
        assert_eq!(h[(9, 9)], 1.0);
        assert_eq!(h.trace(), 0.0);
        assert_eq!(h, h.transpose());
        assert_eq!(build_spin_rotation_matrix(0.0), SpinMatrix::zeros());
    }

    #[test]
    fn blocks_do_not_mix() {
        let h = build_spin_rotation_matrix(3.7);
        for (i, a) in N2_BASIS.iter().enumerate() {
            for (j, b) in N2_BASIS.iter().enumerate() {
                if a.twice_m_f() != b.twice_m_f() {
                    assert_eq!(h[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn zero_fields_give_zero_offsets() {
        let d = build_diagonal_terms(&l02(), &FieldEnvironment::magnetic(0.0, Species::Matter)).unwrap();
        assert_eq!((d.gamma, d.zeta_b, d.xi), (0.0, 0.0, 0.0));
    }

    #[test]
    fn stretched_states_are_unmixed() {
        let c = l02();
        let d = build_diagonal_terms(&c, &FieldEnvironment::magnetic(4.0, Species::Matter)).unwrap();
        let levels = diagonalize_para_n2(&c, &d).unwrap();
        assert_eq!(levels.len(), 10);
        for l in levels.iter().filter(|l| l.twice_m_f.abs() == 5) {
            assert_eq!(l.amplitudes, vec![1.0]);
        }
    }

    #[test]
    fn zero_field_spin_rotation_doublet() {
        let c = l02();
        let d = build_diagonal_terms(&c, &FieldEnvironment::magnetic(0.0, Species::Matter)).unwrap();
        let ce = c.c_e().unwrap();
        let mut e: Vec<f64> = diagonalize_para_n2(&c, &d).unwrap().iter().map(|l| l.energy).collect();
        e.sort_by(f64::total_cmp);
        // F = 3/2 at −3c_e/2 (4 states), F = 5/2 at +c_e (6 states)
        for x in &e[..4] {
            assert!((x + 1.5 * ce).abs() < 1e-6);
        }
        for x in &e[4..] {
            assert!((x - ce).abs() < 1e-6);
        }
    }

    #[test]
    fn paschen_back_limit() {
        let c = l02();
        let d = build_diagonal_terms(&c, &FieldEnvironment::magnetic(1e6, Species::Matter)).unwrap();
        for l in diagonalize_para_n2(&c, &d).unwrap() {
            let big = l.amplitudes.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            assert!(big > 1.0 - 1e-9);
        }
    }

    #[test]
    fn expansion_pure_zeeman() {
        let c = l02().with(Coefficient::SpinRotation, 0.0);
        let d = DiagonalTerms {
            g_e_prime: -2.0,
            g_l: 1e-3,
            gamma: 0.0,
            zeta_b: 0.0,
            xi: 0.0,
            bohr_hz: 5.6e10,
            species: Species::Matter,
        };
        let e = expansion_energy(&c, &d, 1, ExpansionGroup::Higher, Denominators::KeepZ).unwrap();
        assert_eq!(e, -0.5 * 5.6e10 * -2.0);
        assert!(matches!(
            expansion_energy(&c, &d, -5, ExpansionGroup::Higher, Denominators::KeepZ),
            Err(Error::NoSuchState { .. })
        ));
        assert!(expansion_energy(&c, &d, 5, ExpansionGroup::Lower, Denominators::KeepZ).is_err());
    }

    #[test]
    fn stretched_expansion_is_exact() {
        let c = l02();
        let d = build_diagonal_terms(&c, &FieldEnvironment::magnetic(4.0, Species::Matter)).unwrap();
        let exact = diagonalize_para_n2(&c, &d).unwrap();
        let top = exact.iter().find(|l| l.twice_m_f == 5).unwrap().energy;
        let e = expansion_energy(&c, &d, 5, ExpansionGroup::Higher, Denominators::KeepZ).unwrap();
        assert!((top - e).abs() < 1e-6 * top.abs());
    }

    #[test]
    fn spinflip_difference_examples() {
        let c = LevelCoefficients::new(Level::new(0, 1))
            .with(Coefficient::FermiContact, 0.93e9)
            .with(Coefficient::TensorHyperfine, 0.13e9);
        assert_eq!(nuclear_spinflip_difference(&c, 0).unwrap(), 0.93e9);
        let d = nuclear_spinflip_difference(&c, 1).unwrap();
        assert!((d - 0.878e9).abs() < 1.0);
        assert!(nuclear_spinflip_difference(&l02(), 0).is_err());
    }

    #[test]
    fn decoupled_m_n_zero_has_no_rotational_term() {
        let c = l02();
        let s = SpinState::para(0, 2, SpinProjection::Down, 0).unwrap();
        let e = decoupled_energy(&s, &c, 4.0).unwrap();
        let g_e = c.g_e().unwrap();
        let g_t = c.g_t().unwrap();
        let expect = bohr_frequency_per_tesla() * 4.0 * (0.5 * g_e - 0.5 * g_t * 6.0 / 126f64.sqrt());
        assert!((e - expect).abs() < 1e-6);
    }
}
