//! Per-level coefficient table and its text format.

use std::collections::BTreeMap;
use std::path::Path;

use crate::constants::ELECTRON_G_FREE;
use crate::error::{Error, Result};
use crate::state::Level;
use crate::tabular::{format_value, RawTable};

const SHIPPED_LEVELS: &str = include_str!("../data/levels.tsv");

/// One stored quantity of a level. The column name doubles as the field name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficient {
    SpinRotation,
    ElectronG,
    TensorG,
    RotationalG,
    ScalarPolarizabilityDc,
    TensorPolarizabilityDc,
    ScalarPolarizabilityAc,
    TensorPolarizabilityAc,
    ScalarSusceptibility,
    TensorSusceptibility,
    Quadrupole,
    FermiContact,
    TensorHyperfine,
}

impl Coefficient {
    pub const ALL: [Coefficient; 13] = [
        Coefficient::SpinRotation,
        Coefficient::ElectronG,
        Coefficient::TensorG,
        Coefficient::RotationalG,
        Coefficient::ScalarPolarizabilityDc,
        Coefficient::TensorPolarizabilityDc,
        Coefficient::ScalarPolarizabilityAc,
        Coefficient::TensorPolarizabilityAc,
        Coefficient::ScalarSusceptibility,
        Coefficient::TensorSusceptibility,
        Coefficient::Quadrupole,
        Coefficient::FermiContact,
        Coefficient::TensorHyperfine,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Coefficient::SpinRotation => "c_e",
            Coefficient::ElectronG => "g_e",
            Coefficient::TensorG => "g_t",
            Coefficient::RotationalG => "g_r",
            Coefficient::ScalarPolarizabilityDc => "alpha_s_dc",
            Coefficient::TensorPolarizabilityDc => "alpha_t_dc",
            Coefficient::ScalarPolarizabilityAc => "alpha_s_ac",
            Coefficient::TensorPolarizabilityAc => "alpha_t_ac",
            Coefficient::ScalarSusceptibility => "chi_s",
            Coefficient::TensorSusceptibility => "chi_t",
            Coefficient::Quadrupole => "e14",
            Coefficient::FermiContact => "b_F",
            Coefficient::TensorHyperfine => "d_1",
        }
    }

    fn index(self) -> usize {
        Self::ALL.iter().position(|&c| c == self).expect("listed")
    }

    /// Quantities that vanish identically for N = 0.
    fn vanishes_without_rotation(self) -> bool {
        matches!(
            self,
            Coefficient::SpinRotation
                | Coefficient::TensorG
                | Coefficient::RotationalG
                | Coefficient::TensorPolarizabilityDc
                | Coefficient::TensorPolarizabilityAc
                | Coefficient::TensorSusceptibility
        )
    }
}

/// Coefficients of one rovibrational level. Values that are not available are
/// absent; asking for them is an error, never a silent default.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCoefficients {
    pub level: Level,
    values: [Option<f64>; 13],
}

impl LevelCoefficients {
    pub fn new(level: Level) -> Self {
        LevelCoefficients { level, values: [None; 13] }
    }

    pub fn with(mut self, which: Coefficient, value: f64) -> Self {
        self.values[which.index()] = Some(value);
        self
    }

    pub fn set(&mut self, which: Coefficient, value: Option<f64>) {
        self.values[which.index()] = value;
    }

    pub fn value(&self, which: Coefficient) -> Option<f64> {
        self.values[which.index()]
    }

    pub fn get(&self, which: Coefficient) -> Result<f64> {
        self.value(which).ok_or(Error::MissingCoefficient { level: self.level, field: which.column() })
    }

    /// Spin-rotation constant in Hz.
    pub fn c_e(&self) -> Result<f64> {
        self.get(Coefficient::SpinRotation)
    }
    pub fn g_e(&self) -> Result<f64> {
        self.get(Coefficient::ElectronG)
    }
    pub fn g_t(&self) -> Result<f64> {
        self.get(Coefficient::TensorG)
    }
    pub fn g_r(&self) -> Result<f64> {
        self.get(Coefficient::RotationalG)
    }
    pub fn alpha_s_dc(&self) -> Result<f64> {
        self.get(Coefficient::ScalarPolarizabilityDc)
    }
    pub fn alpha_t_dc(&self) -> Result<f64> {
        self.get(Coefficient::TensorPolarizabilityDc)
    }
    pub fn alpha_s_ac(&self) -> Result<f64> {
        self.get(Coefficient::ScalarPolarizabilityAc)
    }
    pub fn alpha_t_ac(&self) -> Result<f64> {
        self.get(Coefficient::TensorPolarizabilityAc)
    }
    pub fn chi_s(&self) -> Result<f64> {
        self.get(Coefficient::ScalarSusceptibility)
    }
    pub fn chi_t(&self) -> Result<f64> {
        self.get(Coefficient::TensorSusceptibility)
    }
    /// Quadrupole coefficient in MHz·m²/GV.
    pub fn e14(&self) -> Result<f64> {
        self.get(Coefficient::Quadrupole)
    }
    pub fn b_f(&self) -> Result<f64> {
        self.get(Coefficient::FermiContact)
    }
    pub fn d_1(&self) -> Result<f64> {
        self.get(Coefficient::TensorHyperfine)
    }

    pub fn validate(&self) -> Result<()> {
        let reject = |message: String| Err(Error::InvalidLevel { level: self.level, message });
        if self.level.n == 0 {
            for c in Coefficient::ALL.into_iter().filter(|c| c.vanishes_without_rotation()) {
                match self.value(c) {
                    Some(x) if x == 0.0 => {}
                    Some(x) => return reject(format!("{} = {x} but N = 0 requires 0", c.column())),
                    None => return reject(format!("{} must be 0 for N = 0, found na", c.column())),
                }
            }
        }
        if self.level.is_para() {
            for c in [Coefficient::FermiContact, Coefficient::TensorHyperfine] {
                match self.value(c) {
                    Some(x) if x == 0.0 => {}
                    Some(x) => return reject(format!("{} = {x} but para levels require 0", c.column())),
                    None => return reject(format!("{} must be 0 for a para level", c.column())),
                }
            }
        }
        if let Some(g) = self.value(Coefficient::ElectronG) {
            if g >= 0.0 {
                return reject(format!("g_e = {g} must be negative"));
            }
        }
        Ok(())
    }
}

/// How a g-factor column is encoded, taken from its header tag.
#[derive(Debug, Clone, Copy, PartialEq)]
enum GColumn {
    Direct,
    /// 1 − g_e/g_e,free
    Anomaly,
    /// g_t/g_e,free
    Ratio,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    levels: BTreeMap<Level, LevelCoefficients>,
    provenance: String,
}

impl CoefficientTable {
    pub fn new(provenance: impl Into<String>) -> Self {
        CoefficientTable { levels: BTreeMap::new(), provenance: provenance.into() }
    }

    /// The table shipped with the crate.
    pub fn shipped() -> Self {
        Self::parse(SHIPPED_LEVELS, "levels.tsv").expect("shipped coefficient table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let raw = RawTable::parse(text, source_name)?;
        let v_col = raw.require_column("v")?;
        let n_col = raw.require_column("N")?;

        let mut columns: Vec<(Coefficient, usize, GColumn)> = Vec::new();
        for c in Coefficient::ALL {
            let found = match c {
                Coefficient::ElectronG => locate_g(&raw, "g_e", "anomaly", GColumn::Anomaly)?,
                Coefficient::TensorG => locate_g(&raw, "g_t", "ratio", GColumn::Ratio)?,
                _ => (raw.require_column(c.column())?, GColumn::Direct),
            };
            columns.push((c, found.0, found.1));
        }

        let mut table = CoefficientTable::new(raw.directive("provenance").unwrap_or(source_name));
        for row in &raw.rows {
            let level = Level::new(raw.u32(row, v_col)?, raw.u32(row, n_col)?);
            let mut entry = LevelCoefficients::new(level);
            for &(c, col, encoding) in &columns {
                let stored = raw.optional_f64(row, col)?;
                let value = stored.map(|x| match encoding {
                    GColumn::Direct => x,
                    GColumn::Anomaly => ELECTRON_G_FREE * (1.0 - x),
                    GColumn::Ratio => ELECTRON_G_FREE * x,
                });
                entry.set(c, value);
            }
            if table.levels.contains_key(&level) {
                return Err(Error::Parse {
                    source_name: source_name.to_owned(),
                    line: row.line,
                    field: "v".into(),
                    message: format!("duplicate level {level}"),
                });
            }
            table.insert(entry)?;
        }
        Ok(table)
    }

    /// Text in the loader's format with g factors stored directly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("#! provenance = {}\n", self.provenance));
        out.push_str("v\tN");
        for c in Coefficient::ALL {
            out.push('\t');
            out.push_str(c.column());
        }
        out.push('\n');
        for entry in self.levels.values() {
            out.push_str(&format!("{}\t{}", entry.level.v, entry.level.n));
            for c in Coefficient::ALL {
                out.push('\t');
                out.push_str(&format_value(entry.value(c)));
            }
            out.push('\n');
        }
        out
    }

    pub fn insert(&mut self, entry: LevelCoefficients) -> Result<()> {
        entry.validate()?;
        self.levels.insert(entry.level, entry);
        Ok(())
    }

    pub fn get(&self, level: Level) -> Result<&LevelCoefficients> {
        self.levels.get(&level).ok_or(Error::MissingLevel(level))
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn levels(&self) -> impl Iterator<Item = &LevelCoefficients> {
        self.levels.values()
    }
}

fn locate_g(raw: &RawTable, name: &str, tag: &str, tagged: GColumn) -> Result<(usize, GColumn)> {
    let tagged_name = format!("{name}[{tag}]");
    match (raw.column(name), raw.column(&tagged_name)) {
        (Some(col), None) => Ok((col, GColumn::Direct)),
        (None, Some(col)) => Ok((col, tagged)),
        (Some(_), Some(_)) => Err(Error::Parse {
            source_name: raw.source_name.clone(),
            line: 1,
            field: name.to_owned(),
            message: format!("both `{name}` and `{tagged_name}` present"),
        }),
        (None, None) => raw.require_column(name).map(|c| (c, GColumn::Direct)),
    }
}

pub fn load_coefficients(path: impl AsRef<Path>) -> Result<CoefficientTable> {
    CoefficientTable::load(path)
}
