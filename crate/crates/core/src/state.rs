use std::fmt;

use crate::error::{Error, Result};

/// Rovibrational level (v, N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level {
    pub v: u32,
    pub n: u32,
}

impl Level {
    pub const fn new(v: u32, n: u32) -> Self {
        Level { v, n }
    }

    pub fn is_para(self) -> bool {
        self.n % 2 == 0
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.v, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Species {
    Matter,
    Antimatter,
}

/// Multipliers applied to μ_B and μ_n for a species.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignFactors {
    pub bohr: f64,
    pub nuclear: f64,
}

impl Species {
    pub fn conjugate(self) -> Self {
        match self {
            Species::Matter => Species::Antimatter,
            Species::Antimatter => Species::Matter,
        }
    }

    pub fn sign_factors(self) -> SignFactors {
        sign_factors(self)
    }

    /// Sign of the molecular ion's charge.
    pub fn charge_sign(self) -> f64 {
        match self {
            Species::Matter => 1.0,
            Species::Antimatter => -1.0,
        }
    }
}

pub fn sign_factors(species: Species) -> SignFactors {
    match species {
        Species::Matter => SignFactors { bohr: 1.0, nuclear: 1.0 },
        Species::Antimatter => SignFactors { bohr: -1.0, nuclear: -1.0 },
    }
}

/// Electron-spin projection M_s = ±1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinProjection {
    Down,
    Up,
}

impl SpinProjection {
    pub fn value(self) -> f64 {
        match self {
            SpinProjection::Down => -0.5,
            SpinProjection::Up => 0.5,
        }
    }

    /// 2·M_s as an integer.
    pub fn twice(self) -> i32 {
        match self {
            SpinProjection::Down => -1,
            SpinProjection::Up => 1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            SpinProjection::Down => SpinProjection::Up,
            SpinProjection::Up => SpinProjection::Down,
        }
    }

    pub fn from_twice(twice: i32) -> Option<Self> {
        match twice {
            -1 => Some(SpinProjection::Down),
            1 => Some(SpinProjection::Up),
            _ => None,
        }
    }
}

/// Magnetic sublevel (v, N, M_s, M_N, M_I) of one species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinState {
    pub level: Level,
    pub m_s: SpinProjection,
    pub m_n: i32,
    pub m_i: i32,
    pub species: Species,
}

impl SpinState {
    pub fn new(level: Level, m_s: SpinProjection, m_n: i32, m_i: i32, species: Species) -> Result<Self> {
        if m_n.unsigned_abs() > level.n {
            return Err(Error::invalid(format!("|M_N| = {} exceeds N = {}", m_n.abs(), level.n)));
        }
        if level.is_para() && m_i != 0 {
            return Err(Error::invalid(format!("para level {level} requires M_I = 0, got {m_i}")));
        }
        if m_i.abs() > 1 {
            return Err(Error::invalid(format!("M_I = {m_i} outside -1..=1")));
        }
        Ok(SpinState { level, m_s, m_n, m_i, species })
    }

    /// Para state of H2+ (M_I = 0).
    pub fn para(v: u32, n: u32, m_s: SpinProjection, m_n: i32) -> Result<Self> {
        Self::new(Level::new(v, n), m_s, m_n, 0, Species::Matter)
    }

    pub fn with_species(mut self, species: Species) -> Self {
        self.species = species;
        self
    }

    /// 2·M_F, with M_F = M_s + M_N + M_I.
    pub fn twice_m_f(&self) -> i32 {
        self.m_s.twice() + 2 * (self.m_n + self.m_i)
    }

    pub fn m_f(&self) -> f64 {
        0.5 * self.twice_m_f() as f64
    }

    pub fn charge_conjugate(&self) -> Self {
        charge_conjugate(*self)
    }
}

impl fmt::Display for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms = if self.m_s == SpinProjection::Up { "+1/2" } else { "-1/2" };
        let tag = match self.species {
            Species::Matter => "",
            Species::Antimatter => " anti",
        };
        if self.level.is_para() {
            write!(f, "({},{},{},{}){}", self.level.v, self.level.n, ms, self.m_n, tag)
        } else {
            write!(f, "({},{},{},{},M_I={}){}", self.level.v, self.level.n, ms, self.m_n, self.m_i, tag)
        }
    }
}

/// Flips the species and negates all three projections.
pub fn charge_conjugate(state: SpinState) -> SpinState {
    SpinState {
        level: state.level,
        m_s: state.m_s.flip(),
        m_n: -state.m_n,
        m_i: -state.m_i,
        species: state.species.conjugate(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugation_negates_projections() {
        let s = SpinState::para(0, 2, SpinProjection::Up, 1).unwrap();
        let c = charge_conjugate(s);
        assert_eq!(c.m_s, SpinProjection::Down);
        assert_eq!(c.m_n, -1);
        assert_eq!(c.species, Species::Antimatter);
        assert_eq!(c.level, Level::new(0, 2));
        assert_eq!(charge_conjugate(c), s);
    }

    #[test]
    fn m_n_zero_is_fixed() {
        let s = SpinState::para(0, 0, SpinProjection::Up, 0).unwrap();
        let c = s.charge_conjugate();
        assert_eq!(c.m_n, 0);
        assert_eq!(c.m_s, SpinProjection::Down);
    }

    #[test]
    fn sign_factor_table() {
        assert_eq!(sign_factors(Species::Matter), SignFactors { bohr: 1.0, nuclear: 1.0 });
        assert_eq!(sign_factors(Species::Antimatter), SignFactors { bohr: -1.0, nuclear: -1.0 });
    }

    #[test]
    fn rejects_bad_projections() {
        assert!(SpinState::para(0, 2, SpinProjection::Up, 3).is_err());
        assert!(SpinState::new(Level::new(0, 2), SpinProjection::Up, 0, 1, Species::Matter).is_err());
        assert!(SpinState::new(Level::new(0, 1), SpinProjection::Up, 0, 1, Species::Matter).is_ok());
    }

    #[test]
    fn total_projection() {
        let s = SpinState::new(Level::new(0, 1), SpinProjection::Down, 1, 1, Species::Matter).unwrap();
        assert_eq!(s.twice_m_f(), 3);
        assert_eq!(s.m_f(), 1.5);
    }
}
