use std::path::PathBuf;

use h2ion::bottle::{axial_period_averaged_shift, cancellation_report, PRACTICAL_B2_LIMIT};
use h2ion::constants::{BOLTZMANN, MASS_H2PLUS};
use h2ion::cooling::{cooling_map, cooling_trajectory, ensemble_cooling_fraction};
use h2ion::e2::{rabi_frequency, required_intensity, tensor_factor_sq};
use h2ion::lineshape::{fit_line_center, line_profile, synthetic_samples, uniform_grid, LineParams};
use h2ion::spin::{build_diagonal_terms, diagonalize_para_n2, expansion_energy, Denominators, ExpansionGroup};
use h2ion::systematics::{cpt_comparison, sensitivity_beta, sensitivity_scan, total_magnetic_shift};
use h2ion::{
    BottleField, E2Table, Error, FieldEnvironment, Level, Species, SpinProjection, SpinState, TransitionSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{require, RunConfig};
use crate::error::CliError;
use crate::output::{num, opt, Outputs, Report};

type Written = Result<Vec<PathBuf>, CliError>;

const SPINS: [SpinProjection; 2] = [SpinProjection::Up, SpinProjection::Down];

fn m_s_text(m_s: SpinProjection) -> String {
    match m_s {
        SpinProjection::Up => "+1/2".into(),
        SpinProjection::Down => "-1/2".into(),
    }
}

fn pair_text(lower: Level, upper: Level) -> String {
    format!("{lower}->{upper}")
}

/// Components (M_N, M_N') of lower → upper with |ΔM_N| ≤ 2.
fn components(lower: Level, upper: Level) -> Vec<(i32, i32)> {
    let (n, n_up) = (lower.n as i32, upper.n as i32);
    (-n..=n).flat_map(|m| (-n_up..=n_up).filter(move |mp| (mp - m).abs() <= 2).map(move |mp| (m, mp))).collect()
}

fn spec_of(lower: Level, upper: Level, m_s: SpinProjection, m_n: i32, m_n_up: i32, species: Species) -> Result<TransitionSpec, Error> {
    let state = |level: Level, m| SpinState::new(level, m_s, m, 0, species);
    let f0 = h2ion::e2::shipped_frequencies().get(&(lower, upper)).copied().unwrap_or(0.0);
    TransitionSpec::new(state(lower, m_n)?, state(upper, m_n_up)?, f0)
}

pub fn levels(cfg: &RunConfig, dry_run: bool) -> Written {
    let block = require(&cfg.levels, "levels")?;
    if dry_run {
        return Ok(Vec::new());
    }
    let mut rows = Vec::new();
    let mut report = Report::default();
    report.line(format!("Spin levels at B = {} T: exact diagonalization vs large-field expansion", block.field));
    for &level in &block.levels {
        let coeffs = cfg.table.get(level)?;
        let diag = build_diagonal_terms(coeffs, &FieldEnvironment::magnetic(block.field, Species::Matter))?;
        let mut worst: f64 = 0.0;
        for l in diagonalize_para_n2(coeffs, &diag)? {
            let group = match l.label.m_s {
                SpinProjection::Down => ExpansionGroup::Lower,
                SpinProjection::Up => ExpansionGroup::Higher,
            };
            let approx = expansion_energy(coeffs, &diag, l.twice_m_f, group, Denominators::KeepZ)?;
            let difference = l.energy - approx;
            worst = worst.max(difference.abs());
            rows.push(vec![
                level.to_string(),
                num(0.5 * l.twice_m_f as f64),
                group.name().to_string(),
                num(l.energy),
                num(approx),
                num(difference),
                (difference.abs() <= block.tolerance).to_string(),
            ]);
        }
        let verdict = if worst <= block.tolerance { "reliable" } else { "expansion unreliable" };
        report.line(format!("{level}: max |difference| = {worst:.3} Hz (tolerance {} Hz): {verdict}", block.tolerance));
    }
    let mut out = Outputs::create(&cfg.out)?;
    out.csv("levels.csv", &["level", "M_F", "group", "E_exact_Hz", "E_table2_Hz", "difference", "reliable"], rows)?;
    out.text("levels_report.txt", &report)?;
    Ok(out.finish())
}

pub fn sensitivity(cfg: &RunConfig, dry_run: bool) -> Written {
    let block = require(&cfg.sensitivity, "sensitivity")?;
    if dry_run {
        return Ok(Vec::new());
    }
    let table = &cfg.table;
    let mut rows = Vec::new();
    for &(lower, upper) in &block.transitions {
        for m_s in SPINS {
            for (m_n, m_n_up) in components(lower, upper) {
                let spec = spec_of(lower, upper, m_s, m_n, m_n_up, Species::Matter)?;
                rows.push(vec![
                    pair_text(lower, upper),
                    m_s_text(m_s),
                    m_n.to_string(),
                    m_n_up.to_string(),
                    num(sensitivity_beta(&spec, table, block.field)?),
                    num(total_magnetic_shift(&spec, table, block.field)?),
                ]);
            }
        }
    }

    let mut scan_rows = Vec::new();
    let mut report = Report::default();
    report.line(format!("Sensitivity table at B = {} T: {} components", block.field, rows.len()));
    report.line(format!(
        "Insensitive fields, M_N = {m} -> {m} components, scan {} to {} T:",
        block.scan.0,
        block.scan.1,
        m = block.scan_m_n
    ));
    let mut crossings = 0;
    for &(lower, upper) in &block.transitions {
        if block.scan_m_n.unsigned_abs() > lower.n.min(upper.n) {
            continue;
        }
        for m_s in SPINS {
            let spec = spec_of(lower, upper, m_s, block.scan_m_n, block.scan_m_n, Species::Matter)?;
            let scan = sensitivity_scan(&spec, table, block.scan, block.scan_points)?;
            let label = format!("{} M_s = {}", pair_text(lower, upper), m_s_text(m_s));
            for r in &scan.rows {
                scan_rows.push(vec![
                    pair_text(lower, upper),
                    m_s_text(m_s),
                    block.scan_m_n.to_string(),
                    block.scan_m_n.to_string(),
                    num(r.b),
                    num(r.shift),
                    num(r.beta),
                ]);
            }
            if scan.zero_crossings.is_empty() {
                report.line(format!("  {label}: none"));
            }
            for b in &scan.zero_crossings {
                report.line(format!("  {label}: beta = 0 at B = {b:.4} T"));
                crossings += 1;
            }
        }
    }
    report.line(format!("insensitive fields found: {crossings}"));

    let mut out = Outputs::create(&cfg.out)?;
    out.csv("table4.csv", &["transition", "M_s", "M_N", "M_N'", "beta_Hz_per_T", "shift_Hz"], rows)?;
    out.csv("fig2_scan.csv", &["transition", "M_s", "M_N", "M_N'", "B_T", "shift_Hz", "beta_Hz_per_T"], scan_rows)?;
    out.text("sensitivity_report.txt", &report)?;
    Ok(out.finish())
}

pub fn budget(cfg: &RunConfig, dry_run: bool) -> Written {
    let trap = require(&cfg.trap, "trap")?;
    let spec = require(&cfg.transition, "transition")?;
    let block = require(&cfg.budget, "budget")?;
    if dry_run {
        return Ok(Vec::new());
    }
    let cmp = cpt_comparison(spec, &cfg.table, trap, block.intensity)?;
    let mut rows: Vec<Vec<String>> = cmp
        .matter
        .items
        .iter()
        .zip(&cmp.antimatter.items)
        .map(|(m, a)| {
            vec![
                m.name.to_string(),
                num(m.value),
                num(m.fractional),
                num(a.value),
                num(a.fractional),
                num(m.value - a.value),
                m.note.clone(),
            ]
        })
        .collect();
    rows.push(vec![
        "total".into(),
        num(cmp.matter.total),
        num(cmp.matter.total_fractional()),
        num(cmp.antimatter.total),
        num(cmp.antimatter.total_fractional()),
        num(cmp.total_difference),
        String::new(),
    ]);

    let mut report = Report::default();
    report.line(format!("Shift budget for {spec} and its conjugate {}", spec.conjugate()));
    for item in &cmp.matter.items {
        report.field(item.name, format!("{:+.4e} Hz ({:+.2e}) {}", item.value, item.fractional, item.note));
    }
    report.field("total", format!("{:+.4e} Hz ({:+.2e})", cmp.matter.total, cmp.matter.total_fractional()));
    report.field("matter - antimatter", format!("{:+.4e} Hz", cmp.total_difference));

    let mut out = Outputs::create(&cfg.out)?;
    out.csv(
        "budget.csv",
        &["item", "matter_Hz", "matter_fractional", "antimatter_Hz", "antimatter_fractional", "difference_Hz", "note"],
        rows,
    )?;
    out.text("budget_report.txt", &report)?;
    Ok(out.finish())
}

pub fn rabi(cfg: &RunConfig, dry_run: bool) -> Written {
    let spec = require(&cfg.transition, "transition")?;
    let geometry = require(&cfg.geometry, "geometry")?;
    let block = require(&cfg.rabi, "rabi")?;
    if dry_run {
        return Ok(Vec::new());
    }
    let e2 = E2Table::shipped();
    let (lower, upper) = (spec.lower.level, spec.upper.level);
    let m_s = spec.lower.m_s;
    let species = spec.lower.species;
    let state = |level: Level, m: i32| SpinState::new(level, m_s, m, 0, species);
    let mut rows = Vec::new();
    let mut report = Report::default();
    report.line(format!(
        "E2 couplings of {} at I = {} W/m^2, geometry xi = {:.2} deg, gamma = {:.2} deg, theta = {:.2} deg, phi = {:.2} deg",
        pair_text(lower, upper),
        block.intensity,
        geometry.xi.to_degrees(),
        geometry.gamma.to_degrees(),
        geometry.theta.to_degrees(),
        geometry.phi.to_degrees()
    ));
    for q in -2..=2 {
        report.field(&format!("|T_{q}|^2"), num(tensor_factor_sq(q, geometry)?));
    }
    for (m_n, m_n_up) in components(lower, upper) {
        let (lo, up) = (state(lower, m_n)?, state(upper, m_n_up)?);
        let r = rabi_frequency(&lo, &up, &e2, block.intensity, geometry)?;
        let needed = match block.target_rabi.map(|t| required_intensity(&lo, &up, &e2, t, geometry)) {
            None | Some(Err(Error::ZeroAmplitude)) => None,
            Some(result) => Some(result?),
        };
        if m_n == m_n_up && m_n.abs() <= 1 {
            report.field(
                &format!("M_N = {m_n} -> {m_n_up}"),
                format!("{:.4} rad/s per sqrt(W/m^2)", r.per_root_intensity()),
            );
        }
        rows.push(vec![
            m_s_text(m_s),
            m_n.to_string(),
            m_n_up.to_string(),
            r.q.to_string(),
            num(r.cg),
            num(r.tensor_factor),
            num(r.per_root_intensity()),
            num(r.omega_rabi),
            opt(needed),
        ]);
    }
    if let Some(t) = block.target_rabi {
        report.line(format!("required_intensity column: W/m^2 for a Rabi frequency of {t} rad/s"));
    }
    let mut out = Outputs::create(&cfg.out)?;
    out.csv(
        "rabi.csv",
        &["M_s", "M_N", "M_N'", "q", "clebsch_gordan", "tensor_factor", "rabi_per_root_intensity", "omega_rabi", "required_intensity"],
        rows,
    )?;
    out.text("rabi_report.txt", &report)?;
    Ok(out.finish())
}

pub fn lineshape(cfg: &RunConfig, dry_run: bool) -> Written {
    let block = require(&cfg.lineshape, "lineshape")?;
    if dry_run {
        return Ok(Vec::new());
    }
    let (lo, hi, points) = block.grid;
    let grid = uniform_grid(lo, hi, points);
    let profiles = block
        .multipliers
        .iter()
        .map(|m| line_profile(m * block.delta_int, block.qds_scale, block.radial_offset, &grid))
        .collect::<Result<Vec<_>, _>>()?;

    let mut report = Report::default();
    report.line(format!(
        "Line profiles, QDS scale {} Hz, radial offset {} Hz, grid {lo} to {hi} Hz ({points} points)",
        block.qds_scale, block.radial_offset
    ));
    for (m, p) in block.multipliers.iter().zip(&profiles) {
        report.line(format!(
            "delta_int = {} Hz (x{m}): peak {:.4} Hz, rising edge {:.4} Hz, mean {:.4} Hz, integral {:.4}{}",
            p.delta_int,
            p.peak_detuning(),
            p.rising_edge(),
            p.mean_detuning(),
            p.integral(),
            if p.coarse_grid { ", grid too coarse" } else { "" }
        ));
    }
    if let Some(noise) = block.fit_noise {
        let truth = LineParams { center: 0.0, delta_int: block.delta_int, qds_scale: block.qds_scale, amplitude: 1.0 };
        let span = 5.0 * block.qds_scale + 8.0 * block.delta_int;
        let scan = uniform_grid(-span, 5.0 * block.delta_int, block.fit_points);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let samples = synthetic_samples(&truth, &scan, noise, &mut rng);
        let fit = fit_line_center(&samples, &LineParams::guess(&samples)?)?;
        let (t, t_sigma) = fit.temperature(MASS_H2PLUS, block.f0);
        report.line(format!("Fit of a synthetic scan, {} points, relative noise {noise}, seed {}:", block.fit_points, cfg.seed));
        report.field("centre", format!("{:.6} +- {:.6} Hz", fit.params.center, fit.center_sigma()));
        report.field("delta_int", format!("{:.6} +- {:.6} Hz", fit.params.delta_int, fit.delta_int_sigma()));
        report.field("qds_scale", format!("{:.6} +- {:.6} Hz", fit.params.qds_scale, fit.qds_scale_sigma()));
        report.field("axial temperature", format!("{t:.4} +- {t_sigma:.4} K"));
    }

    let header: Vec<String> = std::iter::once("detuning_Hz".to_string())
        .chain(block.multipliers.iter().map(|m| format!("density_x{m}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, &f)| std::iter::once(num(f)).chain(profiles.iter().map(|p| num(p.amplitude[i]))).collect::<Vec<_>>());
    let mut out = Outputs::create(&cfg.out)?;
    out.csv("lineshape.csv", &header, rows)?;
    out.text("lineshape_report.txt", &report)?;
    Ok(out.finish())
}

pub fn cooling(cfg: &RunConfig, dry_run: bool) -> Written {
    let block = require(&cfg.cooling, "cooling")?;
    if dry_run {
        return Ok(Vec::new());
    }
    let protocol = &block.protocol;
    let mut out = Outputs::create(&cfg.out)?;
    let mut report = Report::default();
    report.line(format!(
        "Sweep {} -> {} Hz in {} ramps over {} s, molecule well {} Hz, s0 = {} m",
        protocol.sweep.f_start,
        protocol.sweep.f_end,
        protocol.sweep.n_steps,
        protocol.sweep.duration,
        protocol.molecule_frequency,
        protocol.s0
    ));

    if let Some(e) = &block.ensemble {
        let outcome = ensemble_cooling_fraction(e.temperature, protocol, e.size, e.threshold * BOLTZMANN, cfg.seed)?;
        let collisions = outcome.final_energies.iter().filter(|x| x.is_nan()).count();
        report.line(format!(
            "ensemble at {} K, n = {}, seed {}: fraction below {} K = {} ({collisions} collisions)",
            e.temperature, e.size, cfg.seed, e.threshold, outcome.fraction
        ));
        let rows = outcome.initial_energies.iter().zip(&outcome.final_energies).enumerate().map(|(i, (&a, &b))| {
            vec![i.to_string(), num(a), num(b), (b < e.threshold * BOLTZMANN).to_string()]
        });
        out.csv("cooling_ensemble.csv", &["index", "E_init_J", "E_final_J", "cooled"], rows)?;
    }

    if let Some(t) = &block.trajectory {
        let run = cooling_trajectory(t.energy * BOLTZMANN, t.phase, protocol, Some(t.stride))?;
        let (e_a, e_b) = run.final_energy;
        report.line(format!(
            "trajectory from {} K at phase {} rad: final molecule {:.4e} K, Be+ {:.4e} K{}",
            t.energy,
            t.phase,
            e_b / BOLTZMANN,
            e_a / BOLTZMANN,
            run.collision.map(|(time, _)| format!(", collision at {time:.4e} s")).unwrap_or_default()
        ));
        let rows = run.samples.iter().map(|s| [s.t, s.z_a, s.v_a, s.e_a, s.z_b, s.v_b, s.e_b].map(num));
        out.csv("trajectory.csv", &["t", "z_a", "v_a", "E_a", "z_b", "v_b", "E_b"], rows)?;
    }

    if let Some(m) = &block.map {
        let energies: Vec<f64> = m.energies.iter().map(|e| e * BOLTZMANN).collect();
        let map = cooling_map(&energies, &m.frequencies, protocol.s0, m.threshold * BOLTZMANN, protocol.dt)?;
        let mut rows = Vec::new();
        for (i, &nu) in map.frequencies.iter().enumerate() {
            for (j, &e) in map.energies.iter().enumerate() {
                rows.push(vec![num(e), num(nu), map.success[i][j].to_string(), num(map.final_energy[i][j])]);
            }
            let edge = map.boundary[i].map(|b| format!("{:.4e} K", b / BOLTZMANN)).unwrap_or_else(|| "none".into());
            report.line(format!("map: nu_z = {nu} Hz, largest cooled start energy {edge}"));
        }
        if let Some(slope) = map.slope_mk_per_khz {
            report.line(format!("map: boundary slope {slope:.4} mK/kHz"));
        }
        out.csv("cooling_map.csv", &["E_init", "nu_z", "success", "E_final"], rows)?;
    }
    out.text("cooling_report.txt", &report)?;
    Ok(out.finish())
}

pub fn bottle(cfg: &RunConfig, dry_run: bool) -> Written {
    let trap = require(&cfg.trap, "trap")?;
    let spec = require(&cfg.transition, "transition")?;
    let amplitudes = cfg.bottle.as_ref().map(|b| b.amplitudes.clone()).unwrap_or_else(|| vec![1.0, 10.0, 100.0]);
    if dry_run {
        return Ok(Vec::new());
    }
    let r = cancellation_report(spec, &cfg.table, trap)?;
    let f0 = spec.zero_field_frequency;
    let mut rows: Vec<[String; 2]> = vec![
        ["beta_Hz_per_T".into(), num(r.beta)],
        ["magic_b2_T_per_m2".into(), opt(r.bottle.map(|m| m.b2))],
        ["inverted".into(), r.bottle.map(|m| m.inverted.to_string()).unwrap_or_default()],
        ["practical_limit_T_per_m2".into(), num(PRACTICAL_B2_LIMIT)],
        ["feasible".into(), r.feasible.to_string()],
        ["max_nu_z_Hz".into(), num(r.max_axial_frequency)],
        ["radial_shift_plain_Hz".into(), opt(r.radial_shift_plain)],
        ["radial_shift_bottle_Hz".into(), opt(r.radial_shift_with_bottle)],
        ["magnetron_null_b2_T_per_m2".into(), opt(r.magnetron_null_b2)],
    ];
    let mut report = Report::default();
    report.line(format!("Magnetic-bottle cancellation for {spec} at B0 = {} T, nu_z = {} Hz", trap.b0, trap.nu_z));
    report.field("beta", format!("{:.4} kHz/T", r.beta / 1e3));
    match r.bottle {
        Some(m) => {
            report.field("magic B2", format!("{:.2} kT/m^2{}", m.b2 / 1e3, if m.inverted { " (inverted)" } else { "" }));
            let field = BottleField::new(trap.b0, m.b2, 0.0)?;
            for microns in &amplitudes {
                let residual = axial_period_averaged_shift(&field, r.beta, f0, trap.nu_z, microns * 1e-6);
                rows.push([format!("axial_residual_Hz_at_{microns}um"), num(residual)]);
                report.field(&format!("axial residual, A = {microns} um"), format!("{residual:.3e} Hz"));
            }
        }
        None => report.line("beta vanishes: no bottle can cancel the axial shift"),
    }
    report.field("feasible", format!("{} (limit {} kT/m^2)", r.feasible, PRACTICAL_B2_LIMIT / 1e3));
    report.field("highest usable nu_z", format!("{:.4} MHz", r.max_axial_frequency / 1e6));
    if let (Some(plain), Some(with)) = (r.radial_shift_plain, r.radial_shift_with_bottle) {
        report.field("radial shift without / with bottle", format!("{plain:.4e} / {with:.4e} Hz"));
    }
    let mut out = Outputs::create(&cfg.out)?;
    out.csv("bottle.csv", &["key", "value"], rows)?;
    out.text("bottle_report.txt", &report)?;
    Ok(out.finish())
}
