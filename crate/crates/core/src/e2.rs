//! Electric-quadrupole transition amplitudes and Rabi frequencies.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use crate::constants::{BOHR_RADIUS, ELEMENTARY_CHARGE, LIGHT_SPEED, REDUCED_PLANCK};
use crate::error::{Error, Result};
use crate::state::{Level, SpinState};
use crate::tabular::{RawRow, RawTable};

/// Laser field amplitude in V/m per √(W/m²): √(2/(ε₀c)).
pub const FIELD_PER_ROOT_INTENSITY: f64 = 27.45;

const AMPLITUDE_FLOOR: f64 = 1e-14;

fn factorial(n: i64) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// ⟨j1 m1; j2 m2 | j m⟩ for integer angular momenta, Condon–Shortley phase.
///
/// Returns 0 for unphysical projections, a broken triangle rule or
/// m1 + m2 ≠ m; use [`projections_valid`] to tell those cases apart.
pub fn clebsch_gordan(j1: u32, m1: i32, j2: u32, m2: i32, j: u32, m: i32) -> f64 {
    if !projections_valid(j1, m1, j2, m2, j, m) || m1 + m2 != m || !triangle(j1, j2, j) {
        return 0.0;
    }
    let (j1, m1, j2, m2, j, m) = (j1 as i64, m1 as i64, j2 as i64, m2 as i64, j as i64, m as i64);
    let prefactor = ((2 * j + 1) as f64 * factorial(j + j1 - j2) * factorial(j - j1 + j2) * factorial(j1 + j2 - j)
        / factorial(j1 + j2 + j + 1))
    .sqrt();
    let norm = (factorial(j + m)
        * factorial(j - m)
        * factorial(j1 - m1)
        * factorial(j1 + m1)
        * factorial(j2 - m2)
        * factorial(j2 + m2))
    .sqrt();
    let k_min = 0.max(j2 - j - m1).max(j1 - j + m2);
    let k_max = (j1 + j2 - j).min(j1 - m1).min(j2 + m2);
    let sum: f64 = (k_min..=k_max)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign / (factorial(k)
                * factorial(j1 + j2 - j - k)
                * factorial(j1 - m1 - k)
                * factorial(j2 + m2 - k)
                * factorial(j - j2 + m1 + k)
                * factorial(j - j1 - m2 + k))
        })
        .sum();
    prefactor * norm * sum
}

/// Whether every projection lies within its angular momentum.
pub fn projections_valid(j1: u32, m1: i32, j2: u32, m2: i32, j: u32, m: i32) -> bool {
    m1.unsigned_abs() <= j1 && m2.unsigned_abs() <= j2 && m.unsigned_abs() <= j
}

fn triangle(a: u32, b: u32, c: u32) -> bool {
    c <= a + b && a <= b + c && b <= a + c
}

/// Coupling of the lower rotational state to the rank-2 operator:
/// ⟨N M_N; 2 q | N' M_N'⟩.
pub fn e2_clebsch_gordan(n: u32, m_n: i32, q: i32, n_prime: u32, m_n_prime: i32) -> f64 {
    clebsch_gordan(n, m_n, 2, q, n_prime, m_n_prime)
}

/// Orientation of the laser relative to B: ξ is the angle between B and the
/// wave vector, γ the remaining Euler angle, and (cos θ, sin θ e^{iφ}, 0) the
/// polarization in the beam frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub xi: f64,
    pub gamma: f64,
    pub theta: f64,
    pub phi: f64,
}

impl Geometry {
    /// Beam at 45° to B, linear polarization in the plane of k and B.
    pub const DEG45: Geometry = Geometry { xi: PI / 4.0, gamma: 0.0, theta: 0.0, phi: 0.0 };

    /// Beam along B with linear polarization.
    pub const AXIAL: Geometry = Geometry { xi: 0.0, gamma: 0.0, theta: 0.0, phi: 0.0 };

    pub fn validate(&self) -> Result<()> {
        if [self.xi, self.gamma, self.theta, self.phi].iter().all(|a| a.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("geometry angles must be finite"))
        }
    }

    /// ξ folded into [0, π] and the other angles into [0, 2π).
    pub fn canonical(&self) -> Geometry {
        let wrap = |a: f64| a.rem_euclid(2.0 * PI);
        let xi = wrap(self.xi);
        Geometry {
            xi: if xi > PI { 2.0 * PI - xi } else { xi },
            gamma: wrap(self.gamma),
            theta: wrap(self.theta),
            phi: wrap(self.phi),
        }
    }
}

/// |T̂^(2)q|² for the given geometry.
pub fn tensor_factor_sq(q: i32, g: &Geometry) -> Result<f64> {
    let Geometry { xi, gamma, theta, phi } = *g;
    let (sx, cx) = xi.sin_cos();
    let cos2 = |a: f64| a.cos().powi(2);
    let sin2 = |a: f64| a.sin().powi(2);
    let cc = cos2(gamma + theta) + cos2(gamma - theta);
    let ss = sin2(gamma + theta) + sin2(gamma - theta);
    let cross = (2.0 * gamma).sin() * (2.0 * theta).sin() * phi.cos();
    let handed = (2.0 * theta).sin() * phi.sin();
    let sign = q.signum() as f64;
    let value = match q.abs() {
        0 => (2.0 * xi).sin().powi(2) / 8.0 * (cc - cross),
        1 => {
            let c2x = (2.0 * xi).cos();
            c2x * c2x * cc / 12.0 + cx * cx * ss / 12.0 + (1.0 + 2.0 * c2x) * sx * sx * cross / 12.0
                - sign * cx * c2x * handed / 6.0
        }
        2 => {
            let s4 = sx.powi(4);
            sx * sx / 6.0 - s4 * cc / 12.0 + s4 * cross / 12.0 - sign * sx * (2.0 * xi).sin() * handed / 12.0
        }
        _ => return Err(Error::Forbidden(format!("rank-2 component q = {q} does not exist"))),
    };
    Ok(value)
}

/// One row of the E2 table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E2Element {
    pub lower: Level,
    pub upper: Level,
    /// Reduced element over √(2N'+1), e·a₀², Born–Oppenheimer.
    pub reduced_bo: f64,
    /// Same from the variational calculation when available.
    pub reduced_var: Option<f64>,
    /// Rabi prefactor for the field conversion of [`FIELD_PER_ROOT_INTENSITY`].
    pub f_if: f64,
}

/// E2 matrix elements keyed by (lower, upper).
#[derive(Debug, Clone, PartialEq)]
pub struct E2Table {
    entries: BTreeMap<(Level, Level), E2Element>,
}

const SHIPPED_E2: &str = include_str!("../data/e2.tsv");
const SHIPPED_FREQUENCIES: &str = include_str!("../data/frequencies.tsv");

fn level_pair(table: &RawTable, row: &RawRow) -> Result<(Level, Level)> {
    let v = table.u32(row, table.require_column("v")?)?;
    let n = table.u32(row, table.require_column("N")?)?;
    let vp = table.u32(row, table.require_column("v'")?)?;
    let np = table.u32(row, table.require_column("N'")?)?;
    Ok((Level::new(v, n), Level::new(vp, np)))
}

impl E2Table {
    pub fn shipped() -> Self {
        Self::parse(SHIPPED_E2, "e2.tsv").expect("shipped E2 table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let table = RawTable::parse(text, source_name)?;
        let bo = table.require_column("reduced_bo")?;
        let var = table.column("reduced_var");
        let f_if = table.require_column("F_if")?;
        let mut entries = BTreeMap::new();
        for row in &table.rows {
            let (lower, upper) = level_pair(&table, row)?;
            let element = E2Element {
                lower,
                upper,
                reduced_bo: table.f64(row, bo)?,
                reduced_var: match var {
                    Some(c) => table.optional_f64(row, c)?,
                    None => None,
                },
                f_if: table.f64(row, f_if)?,
            };
            entries.insert((lower, upper), element);
        }
        Ok(E2Table { entries })
    }

    pub fn get(&self, lower: Level, upper: Level) -> Result<&E2Element> {
        self.entries.get(&(lower, upper)).ok_or(Error::MissingTransition { lower, upper })
    }

    pub fn elements(&self) -> impl Iterator<Item = &E2Element> {
        self.entries.values()
    }
}

/// Approximate transition frequencies (Hz) keyed by (lower, upper).
pub fn shipped_frequencies() -> BTreeMap<(Level, Level), f64> {
    parse_frequencies(SHIPPED_FREQUENCIES, "frequencies.tsv").expect("shipped frequency list is valid")
}

pub fn parse_frequencies(text: &str, source_name: &str) -> Result<BTreeMap<(Level, Level), f64>> {
    let table = RawTable::parse(text, source_name)?;
    let col = table.require_column("frequency")?;
    let mut out = BTreeMap::new();
    for row in &table.rows {
        let key = level_pair(&table, row)?;
        let f = table.f64(row, col)?;
        out.insert(key, f);
    }
    Ok(out)
}

/// F_if implied by a reduced element and a transition frequency:
/// ω·e·a₀²·reduced/(2ħc) times the field conversion.
pub fn rabi_prefactor(reduced: f64, frequency: f64) -> f64 {
    let omega = 2.0 * PI * frequency;
    omega * ELEMENTARY_CHARGE * BOHR_RADIUS * BOHR_RADIUS * reduced / (2.0 * REDUCED_PLANCK * LIGHT_SPEED)
}

/// Outcome of the E2 selection rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    Allowed,
    Forbidden(String),
}

impl Selection {
    pub fn is_allowed(&self) -> bool {
        matches!(self, Selection::Allowed)
    }
}

/// Selection rules for an optical E2 component between two spin states.
pub fn selection_check(lower: &SpinState, upper: &SpinState) -> Selection {
    let (n, np) = (lower.level.n as i32, upper.level.n as i32);
    if lower.species != upper.species {
        return Selection::Forbidden("states belong to different species".into());
    }
    if n == 0 && np == 0 {
        return Selection::Forbidden("N = 0 -> N' = 0 is excluded".into());
    }
    if !matches!((np - n).abs(), 0 | 2) {
        return Selection::Forbidden(format!("Delta N = {} (allowed: 0, +-2)", np - n));
    }
    if lower.m_i != upper.m_i {
        return Selection::Forbidden("nuclear spin projection must not change".into());
    }
    if lower.m_s != upper.m_s {
        return Selection::Forbidden("electron spin projection must not change".into());
    }
    let q = upper.m_n - lower.m_n;
    if q.abs() > 2 {
        return Selection::Forbidden(format!("|Delta M_N| = {} exceeds 2", q.abs()));
    }
    let df = (upper.twice_m_f() - lower.twice_m_f()) / 2;
    if df.abs() > 2 {
        return Selection::Forbidden(format!("|Delta M_F| = {} exceeds 2", df.abs()));
    }
    Selection::Allowed
}

/// Rabi frequency of one spin component and the factors behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiResult {
    /// rad/s
    pub omega_rabi: f64,
    pub q: i32,
    pub cg: f64,
    pub tensor_factor: f64,
    pub f_if: f64,
}

impl RabiResult {
    /// Ω/√I in rad s⁻¹ (W/m²)^-1/2.
    pub fn per_root_intensity(&self) -> f64 {
        FIELD_PER_ROOT_INTENSITY * self.f_if * self.cg.abs() * self.tensor_factor.abs()
    }
}

pub fn rabi_frequency(
    lower: &SpinState,
    upper: &SpinState,
    table: &E2Table,
    intensity: f64,
    geometry: &Geometry,
) -> Result<RabiResult> {
    if intensity < 0.0 {
        return Err(Error::invalid("intensity must be non-negative"));
    }
    geometry.validate()?;
    if let Selection::Forbidden(reason) = selection_check(lower, upper) {
        return Err(Error::Forbidden(reason));
    }
    let element = table.get(lower.level, upper.level)?;
    let q = upper.m_n - lower.m_n;
    let cg = e2_clebsch_gordan(lower.level.n, lower.m_n, q, upper.level.n, upper.m_n);
    let tensor_factor = tensor_factor_sq(q, geometry)?.max(0.0).sqrt();
    let mut result = RabiResult { omega_rabi: 0.0, q, cg, tensor_factor, f_if: element.f_if };
    result.omega_rabi = result.per_root_intensity() * intensity.sqrt();
    Ok(result)
}

/// Intensity (W/m²) that drives the component at `target_rabi` rad/s.
pub fn required_intensity(
    lower: &SpinState,
    upper: &SpinState,
    table: &E2Table,
    target_rabi: f64,
    geometry: &Geometry,
) -> Result<f64> {
    let unit = rabi_frequency(lower, upper, table, 1.0, geometry)?;
    // the tensor factors sum to 1/3, so anything this small is rounding noise
    if unit.tensor_factor.powi(2) < AMPLITUDE_FLOOR || unit.cg.abs() < AMPLITUDE_FLOOR {
        return Err(Error::ZeroAmplitude);
    }
    Ok((target_rabi / unit.per_root_intensity()).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::SpinProjection::Down;

    #[test]
    fn cg_values() {
        assert!((clebsch_gordan(2, 0, 2, 0, 2, 0) + (2.0f64 / 7.0).sqrt()).abs() < 1e-14);
        assert!((clebsch_gordan(1, 1, 1, -1, 0, 0) - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert_eq!(clebsch_gordan(2, 1, 2, 0, 2, 0), 0.0);
        assert_eq!(clebsch_gordan(2, 3, 2, 0, 2, 3), 0.0);
        assert!(!projections_valid(2, 3, 2, 0, 2, 3));
    }

    #[test]
    fn tensor_anchor_at_45_degrees() {
        let g = Geometry::DEG45;
        assert!((tensor_factor_sq(0, &g).unwrap() - 0.25).abs() < 1e-12);
        assert!(tensor_factor_sq(1, &g).unwrap().abs() < 1e-12);
        assert!((tensor_factor_sq(-2, &g).unwrap() - 1.0 / 24.0).abs() < 1e-12);
        assert!(tensor_factor_sq(3, &g).is_err());
    }

    #[test]
    fn canonical_ranges() {
        let g = Geometry { xi: -PI / 4.0, gamma: 7.0, theta: -1.0, phi: 2.0 * PI }.canonical();
        assert!((g.xi - PI / 4.0).abs() < 1e-12);
        assert!((0.0..2.0 * PI).contains(&g.gamma) && (0.0..2.0 * PI).contains(&g.theta));
        assert!(g.phi.abs() < 1e-12);
    }

    #[test]
    fn selection_rules() {
        let s = |v, n, m| SpinState::para(v, n, Down, m).unwrap();
        assert!(!selection_check(&s(0, 0, 0), &s(2, 0, 0)).is_allowed());
        assert!(selection_check(&s(0, 2, 0), &s(2, 2, 0)).is_allowed());
        assert!(!selection_check(&s(0, 2, -1), &s(2, 4, 2)).is_allowed());
        assert!(selection_check(&s(0, 2, 0), &s(2, 4, 0)).is_allowed());
        let up = SpinState::para(2, 2, Down.flip(), 0).unwrap();
        assert!(!selection_check(&s(0, 2, 0), &up).is_allowed());
    }

    #[test]
    fn shipped_tables_load() {
        let t = E2Table::shipped();
        assert_eq!(t.elements().count(), 20);
        let e = t.get(Level::new(0, 2), Level::new(2, 2)).unwrap();
        assert!((e.f_if - 0.08028).abs() < 1e-12);
        assert!(t.get(Level::new(0, 2), Level::new(7, 2)).is_err());
        assert_eq!(shipped_frequencies().len(), 2);
    }
}
