//! Exact sub-flows of the three energy terms of the reduced Vlasov-Maxwell
//! Hamiltonian: electric (`H_E`), magnetic (`H_B`) and kinetic (`H_f`).
//!
//! * `H_E`: `f <- f(x1, v - t E(x1))`, `B <- B - t dE2/dx1`, `E` fixed.
//! * `H_B`: velocities rotate by `t B(x1)`, `E2 <- E2 - t dB/dx1`, `B` fixed.
//! * `H_f`: free streaming in `x1` solved in Fourier space, with `E`
//!   receiving the exact time integral of the current.
//!
//! Only the velocity translations inside `H_E` and `H_B` carry a spatial
//! discretization error. In `H_f` the `E1` update is the difference
//! `rho(t) - rho(0)` divided by `ik`, so Poisson's equation carries over from
//! one step to the next up to roundoff.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::advection::{self, AdvectionKernel, RotationMethod};
use crate::error::Result;
use crate::grid::{DistributionFunction, PhaseSpaceGrid};

/// Electric and magnetic field profiles at the `x1` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    pub b: Vec<f64>,
}

impl FieldState {
    pub fn zeros(nx: usize) -> Self {
        Self { e1: vec![0.0; nx], e2: vec![0.0; nx], b: vec![0.0; nx] }
    }

    pub fn is_finite(&self) -> bool {
        self.e1.iter().chain(&self.e2).chain(&self.b).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub f: DistributionFunction,
    pub fields: FieldState,
    pub time: f64,
}

impl SimState {
    pub fn is_finite(&self) -> bool {
        self.time.is_finite() && self.f.is_finite() && self.fields.is_finite()
    }
}

/// `K(k, v1, t) = integral_0^t exp(-i k v1 s) ds = (1 - exp(-i k v1 t)) / (i k v1)`.
///
/// Evaluated as `t (sin z / z - 2i sin^2(z/2) / z)` with `z = k v1 t`, which has
/// no cancellation; below `|z| = 1e-6` the three-term Taylor series is used.
#[inline]
pub fn time_kernel(k: f64, v1: f64, t: f64) -> Complex64 {
    let z = k * v1 * t;
    if z.abs() < 1e-6 {
        t * Complex64::new(1.0 - z * z / 6.0, -0.5 * z)
    } else {
        let half = (0.5 * z).sin();
        t * Complex64::new(z.sin() / z, -2.0 * half * half / z)
    }
}

/// Time-integrated spectral currents `int_0^t J_hat(s) ds` of one free
/// streaming step, for each transform index.
#[derive(Debug, Clone)]
pub struct StreamedCurrents {
    pub j1: Vec<Complex64>,
    pub j2: Vec<Complex64>,
}

/// Free streaming `f(x1, v) <- f(x1 - v1 t, v)` done exactly in Fourier space.
/// Modes outside the grid's retained band are removed from `f`. Returns the
/// currents integrated over the step.
pub fn stream_x(grid: &PhaseSpaceGrid, f: &mut DistributionFunction, t: f64) -> StreamedCurrents {
    assert!(f.matches(grid));
    let nx = grid.nx;
    let nv2 = grid.nv2;
    let partials: Vec<Vec<Complex64>> = f
        .values
        .par_chunks_mut(nv2 * nx)
        .enumerate()
        .map(|(i1, block)| {
            let v1 = grid.v1(i1);
            let mut buf: Vec<Complex64> = block.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            grid.forward_in_place(&mut buf);
            let mut phase = vec![Complex64::new(0.0, 0.0); nx];
            let mut kern = vec![Complex64::new(0.0, 0.0); nx];
            for j in 0..nx {
                if grid.is_retained(j) {
                    let z = grid.wavenumbers[j] * v1 * t;
                    phase[j] = Complex64::new(z.cos(), -z.sin());
                    kern[j] = time_kernel(grid.wavenumbers[j], v1, t);
                }
            }
            let mut acc = vec![Complex64::new(0.0, 0.0); 2 * nx];
            for i2 in 0..nv2 {
                let v2 = grid.v2(i2);
                let line = &mut buf[i2 * nx..(i2 + 1) * nx];
                let (a1, a2) = acc.split_at_mut(nx);
                for j in 0..nx {
                    let fk = line[j] * kern[j];
                    a1[j] += fk * v1;
                    a2[j] += fk * v2;
                    line[j] *= phase[j];
                }
            }
            grid.inverse_in_place(&mut buf);
            for (b, c) in block.iter_mut().zip(&buf) {
                *b = c.re;
            }
            acc
        })
        .collect();

    let vol = grid.cell_volume();
    let mut j1 = vec![Complex64::new(0.0, 0.0); nx];
    let mut j2 = vec![Complex64::new(0.0, 0.0); nx];
    for p in &partials {
        for j in 0..nx {
            j1[j] += p[j];
            j2[j] += p[nx + j];
        }
    }
    for j in 0..nx {
        j1[j] *= vol;
        j2[j] *= vol;
    }
    StreamedCurrents { j1, j2 }
}

/// The discretization shared by all flows.
#[derive(Debug, Clone)]
pub struct Flows {
    pub grid: PhaseSpaceGrid,
    pub kernel: AdvectionKernel,
    pub rotation: RotationMethod,
}

impl Flows {
    pub fn new(grid: PhaseSpaceGrid) -> Self {
        Self { grid, kernel: AdvectionKernel::default(), rotation: RotationMethod::ThreeShear }
    }

    pub fn with_kernel(mut self, kernel: AdvectionKernel) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_rotation(mut self, rotation: RotationMethod) -> Self {
        self.rotation = rotation;
        self
    }

    /// Electric sub-flow over duration `t` (any sign).
    pub fn flow_he(&self, state: &mut SimState, t: f64) {
        let fields = &mut state.fields;
        let s1: Vec<f64> = fields.e1.iter().map(|e| t * e).collect();
        let s2: Vec<f64> = fields.e2.iter().map(|e| t * e).collect();
        advection::shift_v(&self.kernel, &self.grid, &mut state.f, &s1, &s2);
        let de2 = self.grid.spectral_derivative(&fields.e2);
        for (b, d) in fields.b.iter_mut().zip(&de2) {
            *b -= t * d;
        }
    }

    /// Magnetic sub-flow over duration `t`. Fails if `|t B|` reaches pi.
    pub fn flow_hb(&self, state: &mut SimState, t: f64) -> Result<()> {
        let fields = &mut state.fields;
        let theta: Vec<f64> = fields.b.iter().map(|b| t * b).collect();
        advection::rotate(&self.kernel, &self.grid, &mut state.f, &theta, self.rotation)?;
        let db = self.grid.spectral_derivative(&fields.b);
        for (e, d) in fields.e2.iter_mut().zip(&db) {
            *e -= t * d;
        }
        Ok(())
    }

    /// Kinetic sub-flow over duration `t`. The mean of `E1` is pinned to zero;
    /// the mean of `E2` follows the mean current.
    pub fn flow_hf(&self, state: &mut SimState, t: f64) {
        if t == 0.0 {
            return;
        }
        let grid = &self.grid;
        let currents = stream_x(grid, &mut state.f, t);
        let mut e1 = grid.forward_transform(&state.fields.e1);
        let mut e2 = grid.forward_transform(&state.fields.e2);
        for j in 0..grid.nx {
            if j == 0 {
                e1[0] = Complex64::new(0.0, 0.0);
                e2[0] -= currents.j2[0];
            } else if grid.is_retained(j) {
                e1[j] -= currents.j1[j];
                e2[j] -= currents.j2[j];
            } else {
                e1[j] = Complex64::new(0.0, 0.0);
                e2[j] = Complex64::new(0.0, 0.0);
            }
        }
        state.fields.e1 = grid.inverse_transform(&e1);
        state.fields.e2 = grid.inverse_transform(&e2);
    }
}
