//! Energies, mass, Poisson residual and Fourier-mode amplitudes, plus
//! exponential rate fitting for growth and damping curves.

use std::collections::BTreeMap;

use rustfft::num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::flows::SimState;
use crate::grid::{moment, PhaseSpaceGrid, VelocityWeight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldComponent {
    E1,
    E2,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub e_pot: f64,
    pub e_mag: f64,
    pub e_kin: f64,
    pub e_tot: f64,
    pub mass: f64,
    pub poisson_residual: f64,
    pub mode_amps: BTreeMap<(FieldComponent, i64), f64>,
}

impl DiagnosticsRecord {
    /// Amplitude `|coefficient|` of mode `m`, if it was recorded.
    pub fn amp(&self, field: FieldComponent, m: i64) -> Option<f64> {
        self.mode_amps.get(&(field, m)).copied()
    }
}

/// Spectral charge density `rho_hat_m` of `int f dv - 1`.
pub fn charge_spectrum(grid: &PhaseSpaceGrid, state: &SimState) -> Vec<Complex64> {
    let mut rho = moment(grid, &state.f, VelocityWeight::One);
    for r in rho.iter_mut() {
        *r -= 1.0;
    }
    grid.forward_transform(&rho)
}

/// `max_{m != 0} |i k_m E1_hat_m - rho_hat_m| / max(1, max_{m != 0} |rho_hat_m|)`.
///
/// The density is normalized to a unit background, so the floor of one makes
/// this a residual relative to the background charge when the perturbation is
/// small.
pub fn poisson_residual(grid: &PhaseSpaceGrid, state: &SimState) -> f64 {
    let rho = charge_spectrum(grid, state);
    let e1 = grid.forward_transform(&state.fields.e1);
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for j in 1..grid.nx {
        let ik = Complex64::new(0.0, grid.wavenumbers[j]);
        worst = worst.max((ik * e1[j] - rho[j]).norm());
        scale = scale.max(rho[j].norm());
    }
    worst / scale
}

fn half_square_integral(grid: &PhaseSpaceGrid, g: &[f64]) -> f64 {
    0.5 * grid.dx * g.iter().map(|v| v * v).sum::<f64>()
}

/// Record with amplitudes of the fundamental mode (`m = 1`).
pub fn record(grid: &PhaseSpaceGrid, state: &SimState) -> DiagnosticsRecord {
    record_modes(grid, state, &[1])
}

pub fn record_modes(grid: &PhaseSpaceGrid, state: &SimState, modes: &[i64]) -> DiagnosticsRecord {
    let fields = &state.fields;
    let e_pot = half_square_integral(grid, &fields.e1) + half_square_integral(grid, &fields.e2);
    let e_mag = half_square_integral(grid, &fields.b);
    let e_kin = 0.5 * grid.dx * moment(grid, &state.f, VelocityWeight::SpeedSquared).iter().sum::<f64>();
    let mass = grid.dx * moment(grid, &state.f, VelocityWeight::One).iter().sum::<f64>();

    let mut mode_amps = BTreeMap::new();
    for (component, values) in [
        (FieldComponent::E1, &fields.e1),
        (FieldComponent::E2, &fields.e2),
        (FieldComponent::B, &fields.b),
    ] {
        let hat = grid.forward_transform(values);
        for &m in modes {
            mode_amps.insert((component, m), hat[grid.index_of_mode(m)].norm());
        }
    }
    DiagnosticsRecord {
        time: state.time,
        e_pot,
        e_mag,
        e_kin,
        e_tot: e_pot + e_mag + e_kin,
        mass,
        poisson_residual: poisson_residual(grid, state),
        mode_amps,
    }
}

/// Least-squares slope of `ln(value)` against time over `window`.
pub fn fit_rate(series: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let points: Vec<(f64, f64)> =
        series.iter().copied().filter(|&(t, _)| t >= window.0 && t <= window.1).collect();
    if points.len() < 10 {
        return Err(SimError::FitDomain(format!(
            "need at least 10 samples in [{}, {}], got {}",
            window.0,
            window.1,
            points.len()
        )));
    }
    log_linear_slope(&points)
}

/// Rate of the envelope through the local maxima of an oscillating series
/// inside `window`. Needs at least three maxima.
pub fn fit_envelope_rate(series: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let peaks: Vec<(f64, f64)> = local_maxima(series)
        .into_iter()
        .filter(|&(t, _)| t >= window.0 && t <= window.1)
        .collect();
    if peaks.len() < 3 {
        return Err(SimError::FitDomain(format!(
            "need at least 3 local maxima in [{}, {}], got {}",
            window.0,
            window.1,
            peaks.len()
        )));
    }
    log_linear_slope(&peaks)
}

pub fn local_maxima(series: &[(f64, f64)]) -> Vec<(f64, f64)> {
    series
        .windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 >= w[2].1)
        .map(|w| w[1])
        .collect()
}

fn log_linear_slope(points: &[(f64, f64)]) -> Result<f64> {
    if let Some(&(t, v)) = points.iter().find(|&&(_, v)| !(v > 0.0)) {
        return Err(SimError::FitDomain(format!("non-positive value {v} at t = {t}")));
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sty, mut stt) = (0.0, 0.0);
    for &(t, v) in points {
        let dt = t - mean_t;
        sty += dt * (v.ln() - mean_y);
        stt += dt * dt;
    }
    if stt == 0.0 {
        return Err(SimError::FitDomain("all samples share one time".into()));
    }
    Ok(sty / stt)
}

/// Linear-growth window of an instability: from the first time the series
/// exceeds ten times its early amplitude (largest value over the first 5% of
/// samples) to the first time it reaches 10% of its maximum.
pub fn auto_growth_window(series: &[(f64, f64)]) -> Option<(f64, f64)> {
    if series.len() < 20 {
        return None;
    }
    let early = (series.len() / 20).max(2);
    let reference = series[..early].iter().map(|p| p.1).fold(0.0, f64::max);
    let peak = series.iter().map(|p| p.1).fold(0.0, f64::max);
    let start = series.iter().position(|p| p.1 > 10.0 * reference)?;
    let end = series.iter().position(|p| p.1 >= 0.1 * peak)?;
    if end <= start + 10 {
        return None;
    }
    Some((series[start].0, series[end].0))
}
