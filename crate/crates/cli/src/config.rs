//! Run configuration: one text file of named blocks holding `key = value` lines.
//!
//! ```text
//! coefficients = shipped        # or a path, relative to this file
//! seed = 2024
//! out = results
//!
//! [trap]
//! b0 = 4.0
//! nu_z = 1e6
//!
//! [transition]
//! lower = (0,2,+1/2,0)
//! upper = (2,2,+1/2,0)
//! ```
//!
//! Levels are written `(v,N)` and spin states `(v,N,M_s,M_N)`. Every block is
//! optional; a command names the blocks it needs and fails with exit code 2 when
//! one is absent. Unknown blocks and keys are rejected so typos surface early.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use h2ion::cooling::{WellProfile, DEFAULT_SOFTENING, DEFAULT_TIME_STEP};
use h2ion::e2::shipped_frequencies;
use h2ion::{
    CoefficientTable, CoolingProtocol, Geometry, Level, Polarity, Species, SpinProjection, SpinState, SweepProtocol,
    TransitionSpec, TrapConfig,
};
use ini::{Ini, Properties};

use crate::error::CliError;

const BLOCKS: [&str; 10] =
    ["trap", "transition", "levels", "sensitivity", "geometry", "rabi", "budget", "lineshape", "cooling", "bottle"];

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub coeff_file: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct LevelsBlock {
    pub levels: Vec<Level>,
    /// T
    pub field: f64,
    /// Hz; larger expansion errors are flagged.
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct SensitivityBlock {
    pub transitions: Vec<(Level, Level)>,
    /// T
    pub field: f64,
    pub scan: (f64, f64),
    pub scan_points: usize,
    /// M_N of the M_N → M_N components that are scanned.
    pub scan_m_n: i32,
}

#[derive(Debug, Clone)]
pub struct RabiBlock {
    /// W/m²
    pub intensity: f64,
    /// rad/s
    pub target_rabi: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BudgetBlock {
    /// W/m²
    pub intensity: f64,
}

#[derive(Debug, Clone)]
pub struct LineshapeBlock {
    /// Hz
    pub delta_int: f64,
    /// Hz
    pub qds_scale: f64,
    pub radial_offset: f64,
    /// Hz, converts a fitted QDS scale back to a temperature.
    pub f0: f64,
    pub multipliers: Vec<f64>,
    pub grid: (f64, f64, usize),
    /// Relative noise of a synthetic scan to fit; no fit when absent.
    pub fit_noise: Option<f64>,
    pub fit_points: usize,
}

#[derive(Debug, Clone)]
pub struct EnsembleSettings {
    /// K
    pub temperature: f64,
    pub size: usize,
    /// K
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectorySettings {
    /// K
    pub energy: f64,
    pub phase: f64,
    pub stride: usize,
}

#[derive(Debug, Clone)]
pub struct MapSettings {
    /// K
    pub energies: Vec<f64>,
    /// Hz
    pub frequencies: Vec<f64>,
    /// K
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub struct CoolingBlock {
    pub protocol: CoolingProtocol,
    pub ensemble: Option<EnsembleSettings>,
    pub trajectory: Option<TrajectorySettings>,
    pub map: Option<MapSettings>,
}

#[derive(Debug, Clone)]
pub struct BottleBlock {
    /// μm
    pub amplitudes: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub table: CoefficientTable,
    pub seed: u64,
    pub out: PathBuf,
    pub trap: Option<TrapConfig>,
    pub transition: Option<TransitionSpec>,
    pub levels: Option<LevelsBlock>,
    pub sensitivity: Option<SensitivityBlock>,
    pub geometry: Option<Geometry>,
    pub rabi: Option<RabiBlock>,
    pub budget: Option<BudgetBlock>,
    pub lineshape: Option<LineshapeBlock>,
    pub cooling: Option<CoolingBlock>,
    pub bottle: Option<BottleBlock>,
}

/// Borrows a block that a command cannot run without.
pub fn require<'a, T>(block: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    block.as_ref().ok_or_else(|| CliError::config(format!("missing [{name}] block")))
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, overrides)
    }

    /// Parses `text`; relative paths in the file resolve against `base`.
    pub fn parse(text: &str, base: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        for name in ini.sections().flatten() {
            if !BLOCKS.contains(&name) {
                return Err(CliError::config(format!("unknown block [{name}]")));
            }
        }
        let top = Block::new("top level", ini.general_section());
        top.allow(&["coefficients", "seed", "out"])?;

        let table = match (&overrides.coeff_file, top.raw("coefficients")) {
            (Some(file), _) => load_table(file)?,
            (None, Some("shipped")) => CoefficientTable::shipped(),
            (None, Some(file)) => load_table(&base.join(file))?,
            (None, None) => return Err(top.error("coefficients", "required (a file path or `shipped`)")),
        };
        let seed = match overrides.seed {
            Some(s) => s,
            None => top.parsed::<u64>("seed")?.unwrap_or(0),
        };
        let out = match (&overrides.out, top.raw("out")) {
            (Some(dir), _) => dir.clone(),
            (None, Some(dir)) => base.join(dir),
            (None, None) => PathBuf::from("h2ion-out"),
        };

        let block = |name: &'static str| ini.section(Some(name)).map(|p| Block::new(name, p));
        let trap = block("trap").map(|b| trap_block(&b)).transpose()?;
        let config = RunConfig {
            transition: block("transition").map(|b| transition_block(&b)).transpose()?,
            levels: block("levels").map(|b| levels_block(&b, trap.as_ref())).transpose()?,
            sensitivity: block("sensitivity").map(|b| sensitivity_block(&b, trap.as_ref())).transpose()?,
            geometry: block("geometry").map(|b| geometry_block(&b)).transpose()?,
            rabi: block("rabi").map(|b| rabi_block(&b)).transpose()?,
            budget: block("budget").map(|b| budget_block(&b)).transpose()?,
            lineshape: block("lineshape").map(|b| lineshape_block(&b)).transpose()?,
            cooling: block("cooling").map(|b| cooling_block(&b)).transpose()?,
            bottle: block("bottle").map(|b| bottle_block(&b)).transpose()?,
            trap,
            table,
            seed,
            out,
        };
        config.check_levels()?;
        Ok(config)
    }

    /// Every level a block refers to must have coefficients.
    fn check_levels(&self) -> Result<(), CliError> {
        let mut levels = BTreeSet::new();
        if let Some(t) = &self.transition {
            levels.extend([t.lower.level, t.upper.level]);
        }
        if let Some(l) = &self.levels {
            levels.extend(l.levels.iter().copied());
        }
        if let Some(s) = &self.sensitivity {
            levels.extend(s.transitions.iter().flat_map(|&(a, b)| [a, b]));
        }
        for level in levels {
            self.table.get(level).map_err(|e| CliError::config(e.to_string()))?;
        }
        match self.levels.iter().flat_map(|l| &l.levels).find(|l| l.n != 2) {
            Some(level) => Err(CliError::config(format!("[levels] levels: {level}: the expansion covers N = 2 only"))),
            None => Ok(()),
        }
    }
}

fn load_table(path: &Path) -> Result<CoefficientTable, CliError> {
    CoefficientTable::load(path).map_err(|e| CliError::config(e.to_string()))
}

/// Typed access to the keys of one block.
struct Block<'a> {
    name: &'static str,
    props: &'a Properties,
}

impl<'a> Block<'a> {
    fn new(name: &'static str, props: &'a Properties) -> Self {
        Block { name, props }
    }

    fn error(&self, key: &str, message: impl std::fmt::Display) -> CliError {
        CliError::config(format!("[{}] {key}: {message}", self.name))
    }

    fn allow(&self, keys: &[&str]) -> Result<(), CliError> {
        match self.props.iter().find(|(k, _)| !keys.contains(k)) {
            Some((k, _)) => Err(self.error(k, "unknown key")),
            None => Ok(()),
        }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.props.get(key).map(str::trim)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key).map(|v| v.parse::<T>().map_err(|e| self.error(key, format!("`{v}`: {e}")))).transpose()
    }

    fn float(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.parsed::<f64>(key)? {
            Some(x) if !x.is_finite() => Err(self.error(key, "must be finite")),
            other => Ok(other),
        }
    }

    fn required_float(&self, key: &str) -> Result<f64, CliError> {
        self.float(key)?.ok_or_else(|| self.error(key, "required"))
    }

    fn floats(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|e| self.error(key, format!("`{}`: {e}", x.trim()))))
                    .collect()
            })
            .transpose()
    }

    fn tokens(&self, key: &str) -> Result<Option<Vec<Token<'a>>>, CliError> {
        self.raw(key).map(|v| tokenize(v).map_err(|m| self.error(key, m))).transpose()
    }
}

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Tuple(Vec<&'a str>),
    Arrow,
}

/// Splits `(a,b), (c,d) -> (e,f)` into tuples and arrows; commas between
/// tuples are separators.
fn tokenize(text: &str) -> Result<Vec<Token<'_>>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("->") {
            out.push(Token::Arrow);
            rest = r;
        } else if let Some(r) = rest.strip_prefix('(') {
            let end = r.find(')').ok_or("unclosed `(`")?;
            out.push(Token::Tuple(r[..end].split(',').map(str::trim).collect()));
            rest = &r[end + 1..];
        } else if let Some(r) = rest.strip_prefix(',') {
            rest = r;
        } else {
            return Err(format!("unexpected `{rest}`"));
        }
        rest = rest.trim_start();
    }
    Ok(out)
}

fn level_of(parts: &[&str]) -> Result<Level, String> {
    match parts {
        [v, n] => Ok(Level::new(
            v.parse().map_err(|_| format!("bad v `{v}`"))?,
            n.parse().map_err(|_| format!("bad N `{n}`"))?,
        )),
        _ => Err(format!("expected (v,N), got ({})", parts.join(","))),
    }
}

fn projection_of(text: &str) -> Result<SpinProjection, String> {
    match text {
        "+1/2" | "1/2" | "+0.5" | "0.5" => Ok(SpinProjection::Up),
        "-1/2" | "-0.5" => Ok(SpinProjection::Down),
        other => Err(format!("M_s must be +1/2 or -1/2, got `{other}`")),
    }
}

fn state_of(parts: &[&str], species: Species) -> Result<SpinState, String> {
    match parts {
        [v, n, m_s, m_n] => {
            let level = level_of(&[v, n])?;
            let m_n: i32 = m_n.parse().map_err(|_| format!("bad M_N `{m_n}`"))?;
            SpinState::new(level, projection_of(m_s)?, m_n, 0, species).map_err(|e| e.to_string())
        }
        _ => Err(format!("expected (v,N,M_s,M_N), got ({})", parts.join(","))),
    }
}

fn single_state(block: &Block, key: &str, species: Species) -> Result<SpinState, CliError> {
    match block.tokens(key)?.as_deref() {
        Some([Token::Tuple(parts)]) => state_of(parts, species).map_err(|m| block.error(key, m)),
        Some(_) => Err(block.error(key, "expected one state (v,N,M_s,M_N)")),
        None => Err(block.error(key, "required")),
    }
}

/// Falls back to the trap's B0 when the block has no `field`.
fn field_of(block: &Block, trap: Option<&TrapConfig>) -> Result<f64, CliError> {
    let b = match (block.float("field")?, trap) {
        (Some(b), _) => b,
        (None, Some(t)) => t.b0,
        (None, None) => return Err(block.error("field", "required when there is no [trap] block")),
    };
    if b > 0.0 {
        Ok(b)
    } else {
        Err(block.error("field", "must be positive"))
    }
}

fn trap_block(b: &Block) -> Result<TrapConfig, CliError> {
    b.allow(&[
        "b0", "b2", "nu_z", "nu_plus", "nu_minus", "t_z", "t_plus", "t_minus", "r_orbital", "environment_temperature",
    ])?;
    let mut trap = TrapConfig::cold(b.required_float("b0")?, b.required_float("nu_z")?);
    trap.b2 = b.float("b2")?.unwrap_or(0.0);
    trap.nu_plus = b.float("nu_plus")?;
    trap.nu_minus = b.float("nu_minus")?;
    trap.t_z = b.float("t_z")?.unwrap_or(0.0);
    trap.t_plus = b.float("t_plus")?;
    trap.t_minus = b.float("t_minus")?.unwrap_or(0.0);
    trap.r_orbital = match (b.float("r_orbital")?, trap.t_plus) {
        (Some(r), _) => Some(r),
        (None, Some(_)) => None,
        (None, None) => Some(0.0),
    };
    if let Some(t) = b.float("environment_temperature")? {
        trap.environment_temperature = t;
    }
    trap.validate().map_err(|e| CliError::config(format!("[trap] {e}")))?;
    Ok(trap)
}

fn species_of(b: &Block) -> Result<Species, CliError> {
    match b.raw("species").unwrap_or("matter") {
        "matter" => Ok(Species::Matter),
        "antimatter" => Ok(Species::Antimatter),
        other => Err(b.error("species", format!("expected matter or antimatter, got `{other}`"))),
    }
}

fn transition_block(b: &Block) -> Result<TransitionSpec, CliError> {
    b.allow(&["lower", "upper", "f0", "species"])?;
    let species = species_of(b)?;
    let lower = single_state(b, "lower", species)?;
    let upper = single_state(b, "upper", species)?;
    let f0 = match b.float("f0")? {
        Some(f) => f,
        None => *shipped_frequencies()
            .get(&(lower.level, upper.level))
            .ok_or_else(|| b.error("f0", format!("no bundled frequency for {} -> {}", lower.level, upper.level)))?,
    };
    TransitionSpec::new(lower, upper, f0).map_err(|e| b.error("upper", e))
}

fn levels_block(b: &Block, trap: Option<&TrapConfig>) -> Result<LevelsBlock, CliError> {
    b.allow(&["levels", "field", "tolerance"])?;
    let levels = match b.tokens("levels")? {
        None => vec![Level::new(0, 2)],
        Some(tokens) => tokens
            .iter()
            .map(|t| match t {
                Token::Tuple(parts) => level_of(parts),
                Token::Arrow => Err("unexpected `->`".to_string()),
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|m| b.error("levels", m))?,
    };
    let tolerance = b.float("tolerance")?.unwrap_or(50.0);
    Ok(LevelsBlock { levels, field: field_of(b, trap)?, tolerance })
}

fn sensitivity_block(b: &Block, trap: Option<&TrapConfig>) -> Result<SensitivityBlock, CliError> {
    b.allow(&["transitions", "field", "scan", "scan_points", "scan_m_n"])?;
    let tokens = b.tokens("transitions")?.ok_or_else(|| b.error("transitions", "required"))?;
    let mut transitions = Vec::new();
    for chunk in tokens.chunks(3) {
        match chunk {
            [Token::Tuple(lo), Token::Arrow, Token::Tuple(up)] => {
                let pair = (level_of(lo), level_of(up));
                transitions.push((pair.0.map_err(|m| b.error("transitions", m))?, pair.1.map_err(|m| b.error("transitions", m))?));
            }
            _ => return Err(b.error("transitions", "expected (v,N) -> (v',N') items separated by commas")),
        }
    }
    if transitions.is_empty() {
        return Err(b.error("transitions", "list is empty"));
    }
    let scan = match b.floats("scan")?.as_deref() {
        None => (1.0, 7.0),
        Some(&[lo, hi]) if lo < hi => (lo, hi),
        Some(_) => return Err(b.error("scan", "expected `low, high` with low < high")),
    };
    let scan_points = b.parsed::<usize>("scan_points")?.unwrap_or(121);
    if scan_points < 2 {
        return Err(b.error("scan_points", "need at least 2"));
    }
    Ok(SensitivityBlock {
        transitions,
        field: field_of(b, trap)?,
        scan,
        scan_points,
        scan_m_n: b.parsed("scan_m_n")?.unwrap_or(0),
    })
}

fn geometry_block(b: &Block) -> Result<Geometry, CliError> {
    b.allow(&["xi", "gamma", "theta", "phi"])?;
    let angle = |key: &str| Ok::<_, CliError>(b.float(key)?.unwrap_or(0.0).to_radians());
    Ok(Geometry { xi: angle("xi")?, gamma: angle("gamma")?, theta: angle("theta")?, phi: angle("phi")? })
}

fn rabi_block(b: &Block) -> Result<RabiBlock, CliError> {
    b.allow(&["intensity", "target_rabi"])?;
    let intensity = b.float("intensity")?.unwrap_or(1.0);
    if intensity < 0.0 {
        return Err(b.error("intensity", "must be non-negative"));
    }
    let target_rabi = b.float("target_rabi")?;
    if target_rabi.is_some_and(|r| r <= 0.0) {
        return Err(b.error("target_rabi", "must be positive"));
    }
    Ok(RabiBlock { intensity, target_rabi })
}

fn budget_block(b: &Block) -> Result<BudgetBlock, CliError> {
    b.allow(&["intensity"])?;
    let intensity = b.required_float("intensity")?;
    if intensity < 0.0 {
        return Err(b.error("intensity", "must be non-negative"));
    }
    Ok(BudgetBlock { intensity })
}

fn lineshape_block(b: &Block) -> Result<LineshapeBlock, CliError> {
    b.allow(&[
        "delta_int", "qds_scale", "t_z", "f0", "radial_offset", "multipliers", "grid", "fit_noise", "fit_points",
    ])?;
    let delta_int = b.required_float("delta_int")?;
    if delta_int <= 0.0 {
        return Err(b.error("delta_int", "must be positive"));
    }
    let f0 = b.float("f0")?.unwrap_or(127e12);
    let qds_scale = match (b.float("qds_scale")?, b.float("t_z")?) {
        (Some(s), None) => s,
        (None, Some(t)) => {
            h2ion::lineshape::qds_scale_from_temperature(h2ion::constants::MASS_H2PLUS, t, f0)
                .map_err(|e| b.error("t_z", e))?
        }
        _ => return Err(b.error("qds_scale", "give exactly one of qds_scale and t_z")),
    };
    if qds_scale < 0.0 {
        return Err(b.error("qds_scale", "must be non-negative"));
    }
    let multipliers = b.floats("multipliers")?.unwrap_or_else(|| vec![1.0, 10.0, 50.0]);
    if multipliers.is_empty() || multipliers.iter().any(|&m| !(m > 0.0)) {
        return Err(b.error("multipliers", "must be positive"));
    }
    let widest = delta_int * multipliers.iter().cloned().fold(0.0, f64::max);
    let grid = match b.floats("grid")?.as_deref() {
        None => (-(12.0 * qds_scale + 10.0 * widest), 5.0 * widest, 4001),
        Some(&[lo, hi, n]) if lo < hi && n >= 2.0 && n.fract() == 0.0 => (lo, hi, n as usize),
        Some(_) => return Err(b.error("grid", "expected `start, end, points` with start < end")),
    };
    let fit_noise = b.float("fit_noise")?;
    if fit_noise.is_some_and(|n| !(n > 0.0)) {
        return Err(b.error("fit_noise", "must be positive"));
    }
    let fit_points = b.parsed::<usize>("fit_points")?.unwrap_or(61);
    if fit_points < 8 {
        return Err(b.error("fit_points", "need at least 8"));
    }
    Ok(LineshapeBlock {
        delta_int,
        qds_scale,
        radial_offset: b.float("radial_offset")?.unwrap_or(0.0),
        f0,
        multipliers,
        grid,
        fit_noise,
        fit_points,
    })
}

fn cooling_block(b: &Block) -> Result<CoolingBlock, CliError> {
    b.allow(&[
        "polarity",
        "s0",
        "f_start",
        "f_end",
        "duration",
        "n_steps",
        "molecule_frequency",
        "hold_time",
        "dt",
        "softening",
        "ensemble_temperature",
        "ensemble_size",
        "threshold",
        "trajectory_energy",
        "trajectory_phase",
        "trajectory_stride",
        "map_energies",
        "map_frequencies",
        "map_threshold",
    ])?;
    let polarity = match b.raw("polarity").unwrap_or("matter") {
        "matter" => Polarity::MatterPair,
        "antimatter" => Polarity::AntimatterPair,
        other => return Err(b.error("polarity", format!("expected matter or antimatter, got `{other}`"))),
    };
    let standard = CoolingProtocol::standard(polarity);
    let protocol = CoolingProtocol {
        s0: b.float("s0")?.unwrap_or(standard.s0),
        polarity,
        sweep: SweepProtocol {
            f_start: b.float("f_start")?.unwrap_or(standard.sweep.f_start),
            f_end: b.float("f_end")?.unwrap_or(standard.sweep.f_end),
            duration: b.float("duration")?.unwrap_or(standard.sweep.duration),
            n_steps: b.parsed("n_steps")?.unwrap_or(standard.sweep.n_steps),
        },
        molecule_frequency: b.float("molecule_frequency")?.unwrap_or(standard.molecule_frequency),
        hold_time: b.float("hold_time")?.unwrap_or(0.0),
        dt: b.float("dt")?.unwrap_or(DEFAULT_TIME_STEP),
        softening: b.float("softening")?.unwrap_or(DEFAULT_SOFTENING),
        profile: WellProfile::default(),
    };
    protocol.validate().map_err(|e| CliError::config(format!("[cooling] {e}")))?;

    let ensemble = match b.float("ensemble_temperature")? {
        None => None,
        Some(temperature) => {
            let size = b.parsed("ensemble_size")?.unwrap_or(200);
            if !(temperature > 0.0) || size == 0 {
                return Err(b.error("ensemble_temperature", "needs a positive temperature and size"));
            }
            Some(EnsembleSettings { temperature, size, threshold: b.float("threshold")?.unwrap_or(1.0) })
        }
    };
    let trajectory = match b.float("trajectory_energy")? {
        None => None,
        Some(energy) if energy < 0.0 => return Err(b.error("trajectory_energy", "must be non-negative")),
        Some(energy) => {
            let stride = b.parsed("trajectory_stride")?.unwrap_or(1000);
            if stride == 0 {
                return Err(b.error("trajectory_stride", "must be positive"));
            }
            Some(TrajectorySettings { energy, phase: b.float("trajectory_phase")?.unwrap_or(0.0), stride })
        }
    };
    let map = match (b.floats("map_energies")?, b.floats("map_frequencies")?) {
        (None, None) => None,
        (Some(energies), Some(frequencies)) => {
            Some(MapSettings { energies, frequencies, threshold: b.float("map_threshold")?.unwrap_or(1e-3) })
        }
        _ => return Err(b.error("map_energies", "map_energies and map_frequencies go together")),
    };
    if ensemble.is_none() && trajectory.is_none() && map.is_none() {
        return Err(b.error("ensemble_temperature", "nothing to run; set an ensemble, trajectory or map"));
    }
    Ok(CoolingBlock { protocol, ensemble, trajectory, map })
}

fn bottle_block(b: &Block) -> Result<BottleBlock, CliError> {
    b.allow(&["amplitudes"])?;
    let microns = b.floats("amplitudes")?.unwrap_or_else(|| vec![1.0, 10.0, 100.0]);
    if microns.iter().any(|&a| !(a >= 0.0)) {
        return Err(b.error("amplitudes", "must be non-negative"));
    }
    Ok(BottleBlock { amplitudes: microns })
}
