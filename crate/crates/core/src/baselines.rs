//! Two predictor-corrector integrators from the literature, used as
//! references: a Mangeney-type scheme that advances `E` with nodal currents,
//! and VALIS, which takes the currents from the free-streaming step itself
//! and therefore keeps the discrete Poisson equation satisfied.
//!
//! Both keep `B` staggered by half a step and share one Vlasov substep:
//! half a step of free streaming, a velocity step
//! `shift(dt/2 E) . rotate(dt B) . shift(dt/2 E)` with frozen fields, and
//! another half step of streaming.

use rustfft::num_complex::Complex64;

use crate::advection;
use crate::error::{Result, SimError};
use crate::flows::{stream_x, FieldState, Flows, SimState, StreamedCurrents};
use crate::grid::{moment, DistributionFunction, PhaseSpaceGrid, VelocityWeight};

#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredFieldState {
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    /// `B` at `b_half_time`, half a step behind the electric field.
    pub b_half: Vec<f64>,
    pub b_half_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredState {
    pub f: DistributionFunction,
    pub fields: StaggeredFieldState,
    pub time: f64,
}

/// Staggers a collocated state for steps of size `dt`:
/// `B^{-1/2} = B^0 + dt/2 dE2/dx`.
pub fn bootstrap(grid: &PhaseSpaceGrid, state: &SimState, dt: f64) -> StaggeredState {
    let de2 = grid.spectral_derivative(&state.fields.e2);
    let b_half = state.fields.b.iter().zip(&de2).map(|(b, d)| b + 0.5 * dt * d).collect();
    StaggeredState {
        f: state.f.clone(),
        fields: StaggeredFieldState {
            e1: state.fields.e1.clone(),
            e2: state.fields.e2.clone(),
            b_half,
            b_half_time: state.time - 0.5 * dt,
        },
        time: state.time,
    }
}

impl StaggeredState {
    /// Collocated view with `B^n = B^{n-1/2} - (t - t_half) dE2/dx`.
    pub fn to_sim_state(&self, grid: &PhaseSpaceGrid) -> SimState {
        SimState {
            f: self.f.clone(),
            fields: FieldState {
                e1: self.fields.e1.clone(),
                e2: self.fields.e2.clone(),
                b: self.collocated_b(grid),
            },
            time: self.time,
        }
    }

    fn collocated_b(&self, grid: &PhaseSpaceGrid) -> Vec<f64> {
        let lag = self.time - self.fields.b_half_time;
        let de2 = grid.spectral_derivative(&self.fields.e2);
        self.fields.b_half.iter().zip(&de2).map(|(b, d)| b - lag * d).collect()
    }
}

/// Re-centers the staggered magnetic field for steps of size `dt`.
pub fn restagger(grid: &PhaseSpaceGrid, state: &mut StaggeredState, dt: f64) {
    let b = state.collocated_b(grid);
    let de2 = grid.spectral_derivative(&state.fields.e2);
    state.fields.b_half = b.iter().zip(&de2).map(|(b, d)| b + 0.5 * dt * d).collect();
    state.fields.b_half_time = state.time - 0.5 * dt;
}

/// Advances `f` over `dt` with frozen mid-step fields. Returns the
/// time-integrated currents of the two streaming half steps.
pub fn vlasov_strang_substep(
    flows: &Flows,
    f: &mut DistributionFunction,
    e1: &[f64],
    e2: &[f64],
    b: &[f64],
    dt: f64,
) -> Result<[StreamedCurrents; 2]> {
    let grid = &flows.grid;
    let max_angle = b.iter().fold(0.0f64, |m, b| m.max((dt * b).abs()));
    if !(max_angle < std::f64::consts::PI) {
        return Err(SimError::RotationAngleTooLarge { max_angle });
    }
    let first = stream_x(grid, f, 0.5 * dt);
    let s1: Vec<f64> = e1.iter().map(|e| 0.5 * dt * e).collect();
    let s2: Vec<f64> = e2.iter().map(|e| 0.5 * dt * e).collect();
    let theta: Vec<f64> = b.iter().map(|b| dt * b).collect();
    advection::shift_v(&flows.kernel, grid, f, &s1, &s2);
    advection::rotate(&flows.kernel, grid, f, &theta, flows.rotation)?;
    advection::shift_v(&flows.kernel, grid, f, &s1, &s2);
    let second = stream_x(grid, f, 0.5 * dt);
    Ok([first, second])
}

fn zero_mean_projection(grid: &PhaseSpaceGrid, g: &[f64]) -> Vec<f64> {
    let mut hat = grid.forward_transform(g);
    hat[0] = Complex64::new(0.0, 0.0);
    for (j, h) in hat.iter_mut().enumerate() {
        if !grid.is_retained(j) {
            *h = Complex64::new(0.0, 0.0);
        }
    }
    grid.inverse_transform(&hat)
}

struct MidStep {
    b_new: Vec<f64>,
    e1_mid: Vec<f64>,
    e2_mid: Vec<f64>,
    j1: Vec<f64>,
    j2: Vec<f64>,
}

/// `B^{n+1/2}` and the predicted `E^{n+1/2}` from the nodal currents of `f^n`.
fn predict(grid: &PhaseSpaceGrid, state: &StaggeredState, dt: f64) -> MidStep {
    let fields = &state.fields;
    let de2 = grid.spectral_derivative(&fields.e2);
    let b_new: Vec<f64> = fields.b_half.iter().zip(&de2).map(|(b, d)| b - dt * d).collect();
    let b_avg: Vec<f64> = fields.b_half.iter().zip(&b_new).map(|(a, b)| 0.5 * (a + b)).collect();
    let db = grid.spectral_derivative(&b_avg);
    let j1 = moment(grid, &state.f, VelocityWeight::V1);
    let j2 = moment(grid, &state.f, VelocityWeight::V2);
    let e1_mid: Vec<f64> = fields.e1.iter().zip(&j1).map(|(e, j)| e - 0.5 * dt * j).collect();
    let e2_mid: Vec<f64> =
        (0..grid.nx).map(|i| fields.e2[i] - 0.5 * dt * db[i] - 0.5 * dt * j2[i]).collect();
    MidStep { b_new, e1_mid: zero_mean_projection(grid, &e1_mid), e2_mid: grid.project(&e2_mid), j1, j2 }
}

/// Predictor-corrector step with nodal currents. Charge is not conserved.
pub fn step_mangeney(flows: &Flows, state: &mut StaggeredState, dt: f64) -> Result<()> {
    let grid = &flows.grid;
    ensure_staggered(grid, state, dt);
    let mid = predict(grid, state, dt);
    vlasov_strang_substep(flows, &mut state.f, &mid.e1_mid, &mid.e2_mid, &mid.b_new, dt)?;
    let j1 = moment(grid, &state.f, VelocityWeight::V1);
    let j2 = moment(grid, &state.f, VelocityWeight::V2);
    let db = grid.spectral_derivative(&mid.b_new);
    let fields = &mut state.fields;
    let e1: Vec<f64> = (0..grid.nx).map(|i| fields.e1[i] - 0.5 * dt * (mid.j1[i] + j1[i])).collect();
    let e2: Vec<f64> =
        (0..grid.nx).map(|i| fields.e2[i] - dt * db[i] - 0.5 * dt * (mid.j2[i] + j2[i])).collect();
    fields.e1 = zero_mean_projection(grid, &e1);
    fields.e2 = grid.project(&e2);
    fields.b_half = mid.b_new;
    fields.b_half_time = state.time + 0.5 * dt;
    state.time += dt;
    Ok(())
}

/// Mid-step spectral currents `J^{n+1/2}` used by a VALIS step.
#[derive(Debug, Clone, PartialEq)]
pub struct MidStepCurrents {
    pub j1: Vec<Complex64>,
    pub j2: Vec<Complex64>,
}

/// Charge-conserving step: `E` is advanced with the average of the currents
/// carried by the two streaming half steps, so
/// `rho^{n+1} = rho^n - i k dt J1^{n+1/2}` holds mode by mode.
pub fn step_valis(flows: &Flows, state: &mut StaggeredState, dt: f64) -> Result<MidStepCurrents> {
    let grid = &flows.grid;
    ensure_staggered(grid, state, dt);
    let mid = predict(grid, state, dt);
    let [first, second] =
        vlasov_strang_substep(flows, &mut state.f, &mid.e1_mid, &mid.e2_mid, &mid.b_new, dt)?;
    let j1: Vec<Complex64> = first.j1.iter().zip(&second.j1).map(|(a, b)| (a + b) / dt).collect();
    let j2: Vec<Complex64> = first.j2.iter().zip(&second.j2).map(|(a, b)| (a + b) / dt).collect();

    let fields = &mut state.fields;
    let mut e1 = grid.forward_transform(&fields.e1);
    let mut e2 = grid.forward_transform(&fields.e2);
    let b = grid.forward_transform(&mid.b_new);
    let zero = Complex64::new(0.0, 0.0);
    for j in 0..grid.nx {
        if j == 0 {
            e1[0] = zero;
            e2[0] -= dt * j2[0];
        } else if grid.is_retained(j) {
            let ik = Complex64::new(0.0, grid.wavenumbers[j]);
            e1[j] -= dt * j1[j];
            e2[j] -= dt * (ik * b[j] + j2[j]);
        } else {
            e1[j] = zero;
            e2[j] = zero;
        }
    }
    fields.e1 = grid.inverse_transform(&e1);
    fields.e2 = grid.inverse_transform(&e2);
    fields.b_half = mid.b_new;
    fields.b_half_time = state.time + 0.5 * dt;
    state.time += dt;
    Ok(MidStepCurrents { j1, j2 })
}

fn ensure_staggered(grid: &PhaseSpaceGrid, state: &mut StaggeredState, dt: f64) {
    let lag = state.time - state.fields.b_half_time;
    if (lag - 0.5 * dt).abs() > 1e-12 * dt.abs().max(1.0) {
        restagger(grid, state, dt);
    }
}
