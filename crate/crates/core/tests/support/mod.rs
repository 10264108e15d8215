//! Checks shared by the property tests and the acceptance harness. Each one
//! returns the measured quantity; callers decide the bound.
#![allow(dead_code)]

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use statrs::function::erf::erf;

use vlasov_core::advection::{rotate, shift_v};
use vlasov_core::baselines::{bootstrap, step_valis};
use vlasov_core::cases::{init_landau, poisson_consistent};
use vlasov_core::composition::SplitKind;
use vlasov_core::diagnostics::charge_spectrum;
use vlasov_core::grid::mass;
use vlasov_core::{
    AdvectionKernel, AdvectionMethod, Boundary, DistributionFunction, FieldState, Flows, PhaseSpaceGrid,
    RotationMethod, SimState, SplittingScheme,
};

fn max_gap<'a>(pairs: impl IntoIterator<Item = (&'a f64, &'a f64)>) -> f64 {
    pairs.into_iter().fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
}

pub fn observed_order(errors: &[f64]) -> f64 {
    let n = errors.len();
    (errors[n - 2] / errors[n - 1]).log2()
}

/// Relative round-trip error of the spatial transform.
pub fn transform_round_trip(g: &[f64]) -> f64 {
    let grid = PhaseSpaceGrid::new(g.len(), 3.0, 4, 4, 1.0, 1.0).unwrap();
    let back = grid.inverse_transform(&grid.forward_transform(g));
    let scale = g.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
    max_gap(g.iter().zip(&back)) / scale
}

/// Largest deviation of an integer translation from the index shift, over
/// both kernels.
pub fn integer_shift_gap(line: &[f64], shift: i64) -> f64 {
    let mut worst = 0.0f64;
    for method in [AdvectionMethod::FiniteVolume3, AdvectionMethod::SplineSemiLagrangian] {
        let out = AdvectionKernel::new(method).with_boundary(Boundary::ZeroInflow).translate_line(line, shift as f64);
        for (i, &o) in out.iter().enumerate() {
            let j = i as i64 - shift;
            let expected = if j >= 0 && (j as usize) < line.len() { line[j as usize] } else { 0.0 };
            worst = worst.max((o - expected).abs());
        }
    }
    worst
}

/// Cell averages of `exp(-(v - c)^2 / (2 s^2))` on `n` cells of `[-l, l]`.
pub fn gaussian_averages(n: usize, l: f64, c: f64, s: f64) -> Vec<f64> {
    let dv = 2.0 * l / n as f64;
    let scale = s * (PI / 2.0).sqrt() / dv;
    let edge = |v: f64| erf((v - c) / (s * 2f64.sqrt()));
    (0..n)
        .map(|i| {
            let a = -l + i as f64 * dv;
            scale * (edge(a + dv) - edge(a))
        })
        .collect()
}

/// L1 errors of one FV3 translation by `shift_cells` on refined grids,
/// against exact cell averages.
pub fn fv3_errors(shift_cells: f64) -> Vec<f64> {
    let (l, c, s) = (6.0, 0.3, 0.7);
    let kernel = AdvectionKernel::new(AdvectionMethod::FiniteVolume3);
    [32, 64, 128, 256]
        .iter()
        .map(|&n| {
            let dv = 2.0 * l / n as f64;
            let out = kernel.translate_line(&gaussian_averages(n, l, c, s), shift_cells);
            let exact = gaussian_averages(n, l, c + shift_cells * dv, s);
            out.iter().zip(&exact).map(|(a, b)| (a - b).abs()).sum::<f64>() * dv
        })
        .collect()
}

pub const ROTATION_SIGMA2: f64 = 0.64;

/// L1 error of a three-shear rotation by `theta` on an `nv x nv` slab of
/// `[-6, 6]^2` against the dense rotation `f0(Q(theta) v)`.
pub fn rotation_error(nv: usize, theta: f64, kernel: AdvectionKernel) -> f64 {
    let grid = PhaseSpaceGrid::new(4, 1.0, nv, nv, 6.0, 6.0).unwrap();
    let blob = |v1: f64, v2: f64| (-((v1 - 1.5).powi(2) + (v2 - 0.5).powi(2)) / (2.0 * ROTATION_SIGMA2)).exp();
    let mut f = DistributionFunction::from_fn(&grid, |_, v1, v2| blob(v1, v2));
    rotate(&kernel, &grid, &mut f, &[theta; 4], RotationMethod::ThreeShear).unwrap();
    let (c, s) = (theta.cos(), theta.sin());
    let mut err = 0.0;
    for i1 in 0..nv {
        for i2 in 0..nv {
            let (v1, v2) = (grid.v1(i1), grid.v2(i2));
            err += (f.get(2, i1, i2) - blob(c * v1 - s * v2, s * v1 + c * v2)).abs();
        }
    }
    err * grid.dv1 * grid.dv2
}

pub fn small_grid(nx: usize) -> PhaseSpaceGrid {
    PhaseSpaceGrid::new(nx, 2.0 * PI / 0.5, 16, 16, 6.0, 6.0).unwrap()
}

/// Smooth state parameterized by seven numbers in `[-1, 1]`.
pub fn seeded_state(grid: &PhaseSpaceGrid, seed: &[f64], amp: f64) -> SimState {
    let k = grid.k0();
    let f = DistributionFunction::from_fn(grid, |x, v1, v2| {
        let bump = 1.0 + 0.3 * seed[0] * (k * x).cos() + 0.2 * seed[1] * (2.0 * k * x + seed[2]).sin();
        bump * (-(v1 - seed[3]).powi(2) / 2.0 - v2 * v2 / 2.0).exp() / (2.0 * PI)
    });
    let wave = |a: f64, p: f64| (0..grid.nx).map(|j| amp * a * (k * grid.x(j) + p).sin()).collect::<Vec<_>>();
    let fields = FieldState { e1: wave(seed[4], 0.0), e2: wave(seed[5], 1.0), b: wave(seed[6], 2.0) };
    SimState { f, fields, time: 0.0 }
}

/// Largest relative mass change over `H_E`, `H_B`, `H_f` applied in turn.
pub fn flow_mass_drift(seed: &[f64], t: f64) -> f64 {
    let grid = small_grid(8);
    let flows = Flows::new(grid.clone());
    let mut state = seeded_state(&grid, seed, 1.0);
    let m0 = mass(&grid, &state.f);
    let mut worst = 0.0f64;
    flows.flow_he(&mut state, t);
    worst = worst.max((mass(&grid, &state.f) - m0).abs());
    flows.flow_hb(&mut state, t).unwrap();
    worst = worst.max((mass(&grid, &state.f) - m0).abs());
    flows.flow_hf(&mut state, t);
    worst = worst.max((mass(&grid, &state.f) - m0).abs());
    worst / m0
}

/// Relative change of every `x1` density after a zero-flux velocity shift.
pub fn zero_flux_line_drift(seed: &[f64], s1: f64, s2: f64) -> f64 {
    let grid = small_grid(4);
    let mut f = seeded_state(&grid, seed, 1.0).f;
    let density = |f: &DistributionFunction| -> Vec<f64> {
        (0..grid.nx)
            .map(|ix| (0..grid.nv1).flat_map(|a| (0..grid.nv2).map(move |b| (a, b))).map(|(a, b)| f.get(ix, a, b)).sum())
            .collect()
    };
    let before = density(&f);
    shift_v(&AdvectionKernel::default(), &grid, &mut f, &[s1; 4], &[s2; 4]);
    let after = density(&f);
    before.iter().zip(&after).map(|(b, a)| (a - b).abs() / b).fold(0.0, f64::max)
}

/// `flow_hf(-t) o flow_hf(t)` on a band-limited state: (f gap relative to
/// max f, field gap).
pub fn streaming_reversal_gap(seed: &[f64], t: f64) -> (f64, f64) {
    let grid = small_grid(16);
    let flows = Flows::new(grid.clone());
    let mut state = seeded_state(&grid, seed, 0.1);
    flows.flow_hf(&mut state, 0.5);
    let start = state.clone();
    flows.flow_hf(&mut state, t);
    flows.flow_hf(&mut state, -t);
    let f_gap = max_gap(start.f.values.iter().zip(&state.f.values)) / start.f.max();
    let e_gap = max_gap(start.fields.e1.iter().zip(&state.fields.e1).chain(start.fields.e2.iter().zip(&state.fields.e2)));
    (f_gap, e_gap)
}

/// `H_E` and `H_B` run forwards then backwards: (field gap, f gap relative
/// to max f). Fields return exactly; f only up to translation error.
pub fn velocity_flow_reversal_gap(seed: &[f64], t: f64) -> (f64, f64) {
    let grid = small_grid(8);
    let flows = Flows::new(grid.clone());
    let start = seeded_state(&grid, seed, 0.5);
    let mut state = start.clone();
    flows.flow_he(&mut state, t);
    flows.flow_he(&mut state, -t);
    flows.flow_hb(&mut state, t).unwrap();
    flows.flow_hb(&mut state, -t).unwrap();
    let (a, b) = (&start.fields, &state.fields);
    let fields = max_gap(a.e1.iter().zip(&b.e1).chain(a.e2.iter().zip(&b.e2)).chain(a.b.iter().zip(&b.b)));
    (fields, max_gap(start.f.values.iter().zip(&state.f.values)) / start.f.max())
}

/// Largest per-mode, per-step violation of
/// `rho^{n+1} = rho^n - i k dt J1^{n+1/2}` over `steps` VALIS steps.
pub fn valis_telescoping_gap(alpha: f64, dt: f64, steps: usize) -> f64 {
    let grid = PhaseSpaceGrid::new(8, 2.0 * PI / 0.5, 24, 24, 7.0, 7.0).unwrap();
    let flows = Flows::new(grid.clone());
    let mut s = bootstrap(&grid, &init_landau(&grid, alpha, 0.5), dt);
    let mut worst = 0.0f64;
    for _ in 0..steps {
        let before = charge_spectrum(&grid, &s.to_sim_state(&grid));
        let j = step_valis(&flows, &mut s, dt).unwrap();
        let after = charge_spectrum(&grid, &s.to_sim_state(&grid));
        for m in 1..grid.nx {
            let ik = Complex64::new(0.0, grid.wavenumbers[m]);
            worst = worst.max((after[m] - (before[m] - ik * dt * j.j1[m])).norm());
        }
    }
    worst
}

/// Vacuum fields, where every sub-flow is exact: gap left by a step of `h`
/// followed by a step of `-h`.
pub fn adjoint_round_trip_gap(kind: SplitKind, h: f64) -> f64 {
    let grid = PhaseSpaceGrid::new(16, 2.0 * PI, 8, 8, 4.0, 4.0).unwrap();
    let flows = Flows::new(grid.clone());
    let wave = |a: f64, m: f64, p: f64| (0..16).map(|j| a * (m * grid.x(j) + p).sin()).collect::<Vec<_>>();
    let fields = FieldState {
        e1: vec![0.0; 16],
        e2: wave(0.7, 1.0, 0.3).iter().zip(wave(0.2, 3.0, 1.0)).map(|(a, b)| a + b).collect(),
        b: wave(-0.4, 2.0, 0.1),
    };
    let start = SimState { f: DistributionFunction::zeros(&grid), fields, time: 0.0 };
    let mut s = start.clone();
    let scheme = SplittingScheme::new(kind, h).unwrap();
    scheme.step_by(&flows, &mut s, h).unwrap();
    scheme.step_by(&flows, &mut s, -h).unwrap();
    max_gap(start.fields.e2.iter().zip(&s.fields.e2).chain(start.fields.b.iter().zip(&s.fields.b)))
}

const ALPHA: f64 = 0.5;
const K: f64 = 0.4;
const DRIFT: f64 = 0.3;

/// Landau profile with a transverse drift `u2(x) = 0.3 sin(k x)`, so that
/// `J2` does not vanish.
fn drifting_landau(x: f64, v1: f64, v2: f64) -> f64 {
    let u2 = DRIFT * (K * x).sin();
    (1.0 + ALPHA * (K * x).cos()) * (-(v1 * v1 + (v2 - u2).powi(2)) / 2.0).exp() / (2.0 * PI)
}

/// `E2(dt) = E2(0) - int_0^dt J2(s) ds` with `J2(x, s)` the midpoint velocity
/// sum of `v2 f0(x - v1 s, v)` for the analytic `f0`, integrated in time by
/// composite Simpson with `substeps` intervals.
fn brute_force_e2(grid: &PhaseSpaceGrid, e2: &[f64], dt: f64, substeps: usize) -> Vec<f64> {
    let h = dt / substeps as f64;
    let vol = grid.cell_volume();
    let current = |x: f64, s: f64| -> f64 {
        let mut acc = 0.0;
        for &v1 in grid.v1_centers() {
            let xs = x - v1 * s;
            for &v2 in grid.v2_centers() {
                acc += v2 * drifting_landau(xs, v1, v2);
            }
        }
        acc * vol
    };
    (0..grid.nx)
        .map(|ix| {
            let x = grid.x(ix);
            let mut integral = current(x, 0.0) + current(x, dt);
            for n in 1..substeps {
                let w = if n % 2 == 1 { 4.0 } else { 2.0 };
                integral += w * current(x, n as f64 * h);
            }
            e2[ix] - integral * h / 3.0
        })
        .collect()
}

/// `H_f`'s `E2` update against the brute-force time quadrature with `10^4`
/// substeps: (gap relative to the size of the update, size of the update).
pub fn kinetic_e2_oracle_gap(dt: f64) -> (f64, f64) {
    let grid = PhaseSpaceGrid::new(32, 2.0 * PI / K, 32, 32, 6.0, 6.0).unwrap();
    let flows = Flows::new(grid.clone());
    let state = poisson_consistent(&grid, DistributionFunction::from_fn(&grid, drifting_landau), vec![0.0; 32]);
    let mut s = state.clone();
    flows.flow_hf(&mut s, dt);
    let oracle = brute_force_e2(&grid, &state.fields.e2, dt, 10_000);
    let change = max_gap(oracle.iter().zip(&state.fields.e2));
    (max_gap(oracle.iter().zip(&s.fields.e2)) / change, change)
}
