//! Line shapes broadened by the axial second-order Doppler shift, their
//! centre fit and the counting-statistics limit.
//!
//! The thermal axial energy is exponentially distributed, so the Doppler shift
//! is a one-sided exponential on the red side with scale σ. The observed line
//! is that exponential convolved with a Lorentzian of full width δ_int.
//! Radial motion only adds a rigid red offset.

use std::f64::consts::{FRAC_PI_2, PI};

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, Matrix4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::constants::{BOLTZMANN, LIGHT_SPEED};
use crate::error::{Error, Result};

/// Mean axial Doppler shift magnitude f₀·k_B·T_z/(2mc²), the exponential scale.
pub fn qds_scale_from_temperature(mass: f64, t_z: f64, f0: f64) -> Result<f64> {
    if !(t_z.is_finite() && t_z >= 0.0) {
        return Err(Error::invalid("T_z must be finite and non-negative"));
    }
    Ok(f0 * BOLTZMANN * t_z / (2.0 * mass * LIGHT_SPEED * LIGHT_SPEED))
}

/// Axial temperature whose Doppler scale at `f0` is `qds_scale`.
pub fn temperature_from_qds_scale(mass: f64, qds_scale: f64, f0: f64) -> f64 {
    qds_scale * 2.0 * mass * LIGHT_SPEED * LIGHT_SPEED / (f0 * BOLTZMANN)
}

/// Lorentzian of full width `width` at half maximum.
pub fn lorentzian(x: f64, width: f64) -> f64 {
    let g = 0.5 * width;
    g / (PI * (x * x + g * g))
}

/// Density at detuning `f` of the Lorentzian (FWHM `delta_int`) convolved
/// with a red exponential of scale `qds_scale`.
///
/// With x = (δ/2)·tan θ the Lorentzian measure becomes dθ/π, leaving a smooth
/// bounded integrand on [θ₀, π/2].
pub fn profile_density(f: f64, delta_int: f64, qds_scale: f64) -> f64 {
    if qds_scale == 0.0 {
        return lorentzian(f, delta_int);
    }
    let g = 0.5 * delta_int;
    let theta0 = (f / g).atan();
    let integrand = |theta: f64| {
        let s = g * theta.tan() - f;
        if s.is_finite() {
            (-s.max(0.0) / qds_scale).exp()
        } else {
            0.0
        }
    };
    let tol = 1e-9 * (qds_scale / g).min(1.0);
    let out = quadrature::double_exponential::integrate(integrand, theta0, FRAC_PI_2, tol);
    out.integral / (PI * qds_scale)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineProfile {
    /// Hz from the unperturbed frequency.
    pub detuning: Vec<f64>,
    /// 1/Hz
    pub amplitude: Vec<f64>,
    pub delta_int: f64,
    pub qds_scale: f64,
    /// Rigid red offset from the radial modes, Hz.
    pub radial_offset: f64,
    /// Set when the grid spacing exceeds δ_int/4 somewhere.
    pub coarse_grid: bool,
}

impl LineProfile {
    /// Trapezoid integral over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.detuning, &self.amplitude)
    }

    pub fn mean_detuning(&self) -> f64 {
        let weighted: Vec<f64> = self.detuning.iter().zip(&self.amplitude).map(|(x, y)| x * y).collect();
        trapezoid(&self.detuning, &weighted) / self.integral()
    }

    pub fn peak_detuning(&self) -> f64 {
        let (i, _) = self
            .amplitude
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &a)| if a > best.1 { (i, a) } else { best });
        self.detuning[i]
    }

    /// Detuning where the density falls through half its maximum on the blue
    /// side of the peak, linearly interpolated.
    pub fn rising_edge(&self) -> f64 {
        let peak = self.amplitude.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let half = 0.5 * peak;
        let start = self.amplitude.iter().position(|&a| a == peak).unwrap_or(0);
        for i in start..self.amplitude.len().saturating_sub(1) {
            let (a, b) = (self.amplitude[i], self.amplitude[i + 1]);
            if a >= half && b < half {
                let t = (a - half) / (a - b);
                return self.detuning[i] + t * (self.detuning[i + 1] - self.detuning[i]);
            }
        }
        *self.detuning.last().unwrap_or(&0.0)
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// Evenly spaced grid of `points` detunings from `start` to `end`.
pub fn uniform_grid(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points).map(|i| start + (end - start) * i as f64 / (points - 1) as f64).collect(),
    }
}

pub fn line_profile(delta_int: f64, qds_scale: f64, radial_offset: f64, grid: &[f64]) -> Result<LineProfile> {
    if !(delta_int > 0.0 && delta_int.is_finite()) {
        return Err(Error::invalid("delta_int must be positive"));
    }
    if !(qds_scale >= 0.0 && qds_scale.is_finite() && radial_offset.is_finite()) {
        return Err(Error::invalid("qds_scale must be finite and non-negative"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("grid must be strictly increasing"));
    }
    let coarse_grid = grid.windows(2).any(|w| w[1] - w[0] > 0.25 * delta_int);
    let amplitude = grid.iter().map(|&f| profile_density(f + radial_offset, delta_int, qds_scale)).collect();
    Ok(LineProfile { detuning: grid.to_vec(), amplitude, delta_int, qds_scale, radial_offset, coarse_grid })
}

/// One measured point: detuning (Hz), excitation signal, weight (1/variance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSample {
    pub detuning: f64,
    pub signal: f64,
    pub weight: f64,
}

/// Parameters of the fitted line: signal = amplitude·p(f − center).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParams {
    pub center: f64,
    pub delta_int: f64,
    pub qds_scale: f64,
    pub amplitude: f64,
}

impl LineParams {
    pub fn model(&self, detuning: f64) -> f64 {
        self.amplitude * profile_density(detuning - self.center, self.delta_int, self.qds_scale)
    }

    fn to_vec(self) -> Vec<f64> {
        vec![self.center, self.delta_int, self.qds_scale, self.amplitude]
    }

    fn from_slice(p: &[f64]) -> Self {
        LineParams { center: p[0], delta_int: p[1].abs(), qds_scale: p[2].abs(), amplitude: p[3] }
    }

    /// Starting point read off the data: the blue half-maximum crossing for the
    /// centre, the distance to the signal-weighted mean for σ.
    pub fn guess(samples: &[LineSample]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::DegenerateDesign("no samples".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.detuning.total_cmp(&b.detuning));
        let x: Vec<f64> = sorted.iter().map(|s| s.detuning).collect();
        let y: Vec<f64> = sorted.iter().map(|s| s.signal).collect();
        let peak = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let area = trapezoid(&x, &y);
        if !(peak > 0.0 && area > 0.0) {
            return Err(Error::DegenerateDesign("signal has no positive peak".into()));
        }
        // last detuning at or above a fraction of the peak
        let edge = |level: f64| x.iter().zip(&y).rev().find(|(_, &v)| v >= level * peak).map(|(&f, _)| f).unwrap_or(x[0]);
        let center = edge(0.5);
        let weighted: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();
        let mean = trapezoid(&x, &weighted) / area;
        let spacing = x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let qds_scale = (center - mean).max(0.0);
        let delta_int = (edge(0.25) - edge(0.75)).max(spacing);
        Ok(LineParams { center, delta_int, qds_scale, amplitude: area })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineFit {
    pub params: LineParams,
    /// Covariance of (center, delta_int, qds_scale, amplitude).
    pub covariance: Matrix4<f64>,
    pub iterations: u64,
    pub restarts: usize,
    /// Weighted sum of squared residuals.
    pub cost: f64,
}

impl LineFit {
    pub fn center_sigma(&self) -> f64 {
        self.covariance[(0, 0)].sqrt()
    }

    pub fn delta_int_sigma(&self) -> f64 {
        self.covariance[(1, 1)].sqrt()
    }

    pub fn qds_scale_sigma(&self) -> f64 {
        self.covariance[(2, 2)].sqrt()
    }

    /// Axial temperature and its 1σ uncertainty for an ion of `mass` at `f0`.
    pub fn temperature(&self, mass: f64, f0: f64) -> (f64, f64) {
        (
            temperature_from_qds_scale(mass, self.params.qds_scale, f0),
            temperature_from_qds_scale(mass, self.qds_scale_sigma(), f0),
        )
    }
}

/// Nelder–Mead iterations allowed per run.
pub const FIT_MAX_ITERATIONS: u64 = 200;
/// Runs restarted from the best point before giving up.
pub const FIT_MAX_RESTARTS: usize = 6;
pub const FIT_MIN_SAMPLES: usize = 8;
/// Relative cost gain below which a restart counts as stalled; far below one unit of χ².
const STALL_IMPROVEMENT: f64 = 1e-6;

struct WeightedResiduals<'a> {
    samples: &'a [LineSample],
}

impl WeightedResiduals<'_> {
    fn cost_of(&self, p: &LineParams) -> f64 {
        self.samples.iter().map(|s| s.weight * (s.signal - p.model(s.detuning)).powi(2)).sum()
    }
}

impl CostFunction for WeightedResiduals<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.cost_of(&LineParams::from_slice(p)))
    }
}

fn simplex(p: &LineParams) -> Vec<Vec<f64>> {
    let base = p.to_vec();
    let steps = [
        p.delta_int.max(1e-3 * p.qds_scale),
        0.3 * p.delta_int,
        0.3 * p.qds_scale + 0.5 * p.delta_int,
        0.1 * p.amplitude.abs().max(f64::MIN_POSITIVE),
    ];
    let mut out = vec![base.clone()];
    for (i, step) in steps.iter().enumerate() {
        let mut v = base.clone();
        v[i] += step;
        out.push(v);
    }
    out
}

/// Weighted least-squares fit of the line model, starting from `init`.
pub fn fit_line_center(samples: &[LineSample], init: &LineParams) -> Result<LineFit> {
    if samples.len() < FIT_MIN_SAMPLES {
        return Err(Error::DegenerateDesign(format!("need at least {FIT_MIN_SAMPLES} samples")));
    }
    if samples.iter().any(|s| !(s.detuning.is_finite() && s.signal.is_finite() && s.weight > 0.0)) {
        return Err(Error::invalid("samples must be finite with positive weights"));
    }
    let below = samples.iter().any(|s| s.detuning < init.center);
    let above = samples.iter().any(|s| s.detuning > init.center);
    if !(below && above) {
        return Err(Error::DegenerateDesign("samples lie on one side of the line".into()));
    }
    if !(init.delta_int > 0.0) {
        return Err(Error::invalid("initial delta_int must be positive"));
    }

    let problem = WeightedResiduals { samples };
    let scale = samples.iter().map(|s| s.weight * s.signal * s.signal).sum::<f64>().max(f64::MIN_POSITIVE);
    let mut best = *init;
    let mut iterations = 0;
    let mut converged = false;
    let mut restarts = 0;
    while restarts < FIT_MAX_RESTARTS {
        let solver = NelderMead::new(simplex(&best))
            .with_sd_tolerance(1e-15 * scale)
            .map_err(|e| Error::invalid(e.to_string()))?;
        let result = Executor::new(WeightedResiduals { samples }, solver)
            .configure(|s| s.max_iters(FIT_MAX_ITERATIONS))
            .run()
            .map_err(|e| Error::invalid(e.to_string()))?;
        let state = result.state();
        iterations += state.get_iter();
        let candidate = LineParams::from_slice(state.get_best_param().expect("solver keeps a best point"));
        let (before, after) = (problem.cost_of(&best), problem.cost_of(&candidate));
        let improved = after < before * (1.0 - 1e-12);
        // quadrature noise can keep the simplex spread above tolerance on a
        // flat valley; a whole restart that gains nothing is convergence too
        let stalled = restarts > 0 && after > before * (1.0 - STALL_IMPROVEMENT);
        best = candidate;
        restarts += 1;
        let done = matches!(
            state.get_termination_status(),
            TerminationStatus::Terminated(TerminationReason::SolverConverged)
        );
        if (done && !improved) || stalled {
            converged = true;
            break;
        }
    }
    let cost = problem.cost_of(&best);
    if !converged {
        return Err(Error::NoConvergence { iterations, cost });
    }
    let covariance = covariance(samples, &best, cost)?;
    Ok(LineFit { params: best, covariance, iterations, restarts, cost })
}

/// Gauss–Newton covariance s²·(JᵀWJ)⁻¹ with the reduced χ² as s².
fn covariance(samples: &[LineSample], p: &LineParams, cost: f64) -> Result<Matrix4<f64>> {
    let base = p.to_vec();
    let steps = [
        1e-4 * p.delta_int,
        1e-4 * p.delta_int,
        1e-4 * p.delta_int.max(p.qds_scale),
        1e-6 * p.amplitude.abs().max(f64::MIN_POSITIVE),
    ];
    let jac = DMatrix::from_fn(samples.len(), 4, |r, c| {
        let x = samples[r].detuning;
        let mut plus = base.clone();
        plus[c] += steps[c];
        if c == 2 && p.qds_scale < steps[c] {
            // one-sided at the σ = 0 boundary
            return (LineParams::from_slice(&plus).model(x) - p.model(x)) / steps[c];
        }
        let mut minus = base.clone();
        minus[c] -= steps[c];
        (LineParams::from_slice(&plus).model(x) - LineParams::from_slice(&minus).model(x)) / (2.0 * steps[c])
    });
    let weights = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(samples.len(), samples.iter().map(|s| s.weight)));
    let normal = jac.transpose() * weights * &jac;
    let inverse = normal
        .try_inverse()
        .ok_or_else(|| Error::DegenerateDesign("parameters are not separately determined by the samples".into()))?;
    let dof = samples.len().saturating_sub(4).max(1) as f64;
    let s2 = cost / dof;
    Ok(Matrix4::from_fn(|r, c| s2 * inverse[(r, c)]))
}

/// δ_int·√(τ_c/τ), the fractional uncertainty after averaging.
pub fn statistical_uncertainty(delta_int_fractional: f64, cycle_time: f64, total_time: f64) -> Result<f64> {
    if !(cycle_time > 0.0 && total_time >= cycle_time) {
        return Err(Error::invalid("need total_time >= cycle_time > 0"));
    }
    Ok(delta_int_fractional * (cycle_time / total_time).sqrt())
}

/// Samples of `truth` on `grid` with Gaussian noise of `noise` times the peak
/// signal, weighted by the inverse noise variance.
pub fn synthetic_samples(truth: &LineParams, grid: &[f64], noise: f64, rng: &mut ChaCha8Rng) -> Vec<LineSample> {
    let clean: Vec<f64> = grid.iter().map(|&f| truth.model(f)).collect();
    let peak = clean.iter().cloned().fold(0.0, f64::max);
    let sigma = noise * peak;
    let weight = if sigma > 0.0 { 1.0 / (sigma * sigma) } else { 1.0 };
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    grid.iter()
        .zip(clean)
        .map(|(&f, y)| LineSample { detuning: f, signal: y + sigma * normal.sample(rng), weight })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterMonteCarlo {
    /// Fitted minus true centre for each converged replica, Hz.
    pub errors: Vec<f64>,
    pub failures: usize,
}

impl CenterMonteCarlo {
    pub fn mean_error(&self) -> f64 {
        self.errors.iter().sum::<f64>() / self.errors.len().max(1) as f64
    }

    pub fn rms_error(&self) -> f64 {
        (self.errors.iter().map(|e| e * e).sum::<f64>() / self.errors.len().max(1) as f64).sqrt()
    }
}

/// Fits `replicas` noisy copies of `truth`, each from its own ChaCha stream of
/// `seed`, starting every fit from the data-driven guess.
pub fn center_monte_carlo(truth: &LineParams, grid: &[f64], noise: f64, replicas: usize, seed: u64) -> CenterMonteCarlo {
    let outcomes: Vec<Option<f64>> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let samples = synthetic_samples(truth, grid, noise, &mut rng);
            let init = LineParams::guess(&samples).ok()?;
            fit_line_center(&samples, &init).ok().map(|fit| fit.params.center - truth.center)
        })
        .collect();
    let failures = outcomes.iter().filter(|o| o.is_none()).count();
    CenterMonteCarlo { errors: outcomes.into_iter().flatten().collect(), failures }
}
