//! Phase-space geometry: a periodic `x1` axis with a Fourier basis and a
//! truncated Cartesian `(v1, v2)` velocity box.
//!
//! Storage order of the distribution function is velocity-major with `x1`
//! fastest, `values[(i1 * nv2 + i2) * nx + ix]`, so every `x1` line used by the
//! spectral transforms is contiguous.
//!
//! Transform convention: `g(x_j) = sum_m ghat_m exp(i k_m x_j)`, i.e. the
//! forward transform carries the `1/nx` factor. Only modes with
//! `|m| <= max_mode` take part in derivatives and field dynamics; the default
//! band drops the Nyquist mode, whose odd derivative is not representable by
//! real data.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, SimError};

#[derive(Clone)]
pub struct PhaseSpaceGrid {
    pub nx: usize,
    pub lx: f64,
    pub nv1: usize,
    pub nv2: usize,
    pub v1max: f64,
    pub v2max: f64,
    pub dx: f64,
    pub dv1: f64,
    pub dv2: f64,
    /// `k_m` in transform storage order (index `j` holds mode `m = j` for
    /// `j < nx/2`, else `m = j - nx`).
    pub wavenumbers: Vec<f64>,
    max_mode: usize,
    v1_centers: Vec<f64>,
    v2_centers: Vec<f64>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PhaseSpaceGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhaseSpaceGrid")
            .field("nx", &self.nx)
            .field("lx", &self.lx)
            .field("nv1", &self.nv1)
            .field("nv2", &self.nv2)
            .field("v1max", &self.v1max)
            .field("v2max", &self.v2max)
            .field("max_mode", &self.max_mode)
            .finish()
    }
}

impl PhaseSpaceGrid {
    pub fn new(nx: usize, lx: f64, nv1: usize, nv2: usize, v1max: f64, v2max: f64) -> Result<Self> {
        if nx < 4 || nv1 < 4 || nv2 < 4 {
            return Err(SimError::InvalidParameter(format!(
                "grid counts must be >= 4 (nx={nx}, nv1={nv1}, nv2={nv2})"
            )));
        }
        for (name, value) in [("lx", lx), ("v1max", v1max), ("v2max", v2max)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(SimError::InvalidParameter(format!("{name} must be positive, got {value}")));
            }
        }
        let dx = lx / nx as f64;
        let dv1 = 2.0 * v1max / nv1 as f64;
        let dv2 = 2.0 * v2max / nv2 as f64;
        let wavenumbers = (0..nx).map(|j| 2.0 * PI * mode_of(j, nx) as f64 / lx).collect();
        let v1_centers = (0..nv1).map(|i| -v1max + (i as f64 + 0.5) * dv1).collect();
        let v2_centers = (0..nv2).map(|i| -v2max + (i as f64 + 0.5) * dv2).collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            nx,
            lx,
            nv1,
            nv2,
            v1max,
            v2max,
            dx,
            dv1,
            dv2,
            wavenumbers,
            max_mode: (nx - 1) / 2,
            v1_centers,
            v2_centers,
            fft_forward: planner.plan_fft_forward(nx),
            fft_inverse: planner.plan_fft_inverse(nx),
        })
    }

    /// Restrict the retained Fourier band to `|m| <= max_mode`. Values above
    /// the default band are clamped to it.
    pub fn with_max_mode(mut self, max_mode: usize) -> Self {
        self.max_mode = max_mode.min((self.nx - 1) / 2);
        self
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    /// Signed mode number stored at transform index `j`.
    pub fn mode(&self, j: usize) -> i64 {
        mode_of(j, self.nx)
    }

    pub fn is_retained(&self, j: usize) -> bool {
        self.mode(j).unsigned_abs() as usize <= self.max_mode
    }

    /// Transform index holding mode `m`.
    pub fn index_of_mode(&self, m: i64) -> usize {
        m.rem_euclid(self.nx as i64) as usize
    }

    pub fn x(&self, ix: usize) -> f64 {
        ix as f64 * self.dx
    }

    pub fn v1(&self, i1: usize) -> f64 {
        self.v1_centers[i1]
    }

    pub fn v2(&self, i2: usize) -> f64 {
        self.v2_centers[i2]
    }

    pub fn v1_centers(&self) -> &[f64] {
        &self.v1_centers
    }

    pub fn v2_centers(&self) -> &[f64] {
        &self.v2_centers
    }

    pub fn cell_volume(&self) -> f64 {
        self.dv1 * self.dv2
    }

    pub fn n_velocity_cells(&self) -> usize {
        self.nv1 * self.nv2
    }

    /// Fundamental wavenumber `2 pi / lx`.
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.lx
    }

    pub fn forward_transform(&self, g: &[f64]) -> Vec<Complex64> {
        assert_eq!(g.len(), self.nx, "forward_transform: length mismatch");
        let mut buf: Vec<Complex64> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_in_place(&mut buf);
        buf
    }

    pub fn inverse_transform(&self, ghat: &[Complex64]) -> Vec<f64> {
        assert_eq!(ghat.len(), self.nx, "inverse_transform: length mismatch");
        let mut buf = ghat.to_vec();
        self.fft_inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Forward transform of every consecutive `nx`-long line in `buf`,
    /// normalized so that the inverse needs no scaling.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len() % self.nx, 0, "forward_in_place: length mismatch");
        self.fft_forward.process(buf);
        let scale = 1.0 / self.nx as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len() % self.nx, 0, "inverse_in_place: length mismatch");
        self.fft_inverse.process(buf);
    }

    /// `d/dx1` through the Fourier basis; modes outside the retained band are
    /// mapped to zero.
    pub fn spectral_derivative(&self, g: &[f64]) -> Vec<f64> {
        let mut ghat = self.forward_transform(g);
        for (j, c) in ghat.iter_mut().enumerate() {
            *c = if self.is_retained(j) && j != 0 {
                *c * Complex64::new(0.0, self.wavenumbers[j])
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        self.inverse_transform(&ghat)
    }

    /// Zero every mode outside the retained band.
    pub fn project(&self, g: &[f64]) -> Vec<f64> {
        let mut ghat = self.forward_transform(g);
        for (j, c) in ghat.iter_mut().enumerate() {
            if !self.is_retained(j) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self.inverse_transform(&ghat)
    }

    pub fn mean(&self, g: &[f64]) -> f64 {
        g.iter().sum::<f64>() / g.len() as f64
    }
}

fn mode_of(j: usize, nx: usize) -> i64 {
    if j < nx / 2 {
        j as i64
    } else {
        j as i64 - nx as i64
    }
}

/// Cell values of `f(x1, v1, v2)` at every `x1` node.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFunction {
    pub nx: usize,
    pub nv1: usize,
    pub nv2: usize,
    pub values: Vec<f64>,
}

impl DistributionFunction {
    pub fn zeros(grid: &PhaseSpaceGrid) -> Self {
        Self {
            nx: grid.nx,
            nv1: grid.nv1,
            nv2: grid.nv2,
            values: vec![0.0; grid.nx * grid.nv1 * grid.nv2],
        }
    }

    /// Fill from a point function `(x1, v1, v2) -> f`, sampled at nodes in
    /// `x1` and at cell centers in velocity.
    pub fn from_fn(grid: &PhaseSpaceGrid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid);
        for i1 in 0..grid.nv1 {
            let v1 = grid.v1(i1);
            for i2 in 0..grid.nv2 {
                let v2 = grid.v2(i2);
                let base = (i1 * grid.nv2 + i2) * grid.nx;
                for ix in 0..grid.nx {
                    out.values[base + ix] = f(grid.x(ix), v1, v2);
                }
            }
        }
        out
    }

    #[inline]
    pub fn index(&self, ix: usize, i1: usize, i2: usize) -> usize {
        (i1 * self.nv2 + i2) * self.nx + ix
    }

    pub fn get(&self, ix: usize, i1: usize, i2: usize) -> f64 {
        self.values[self.index(ix, i1, i2)]
    }

    pub fn set(&mut self, ix: usize, i1: usize, i2: usize, value: f64) {
        let i = self.index(ix, i1, i2);
        self.values[i] = value;
    }

    pub fn matches(&self, grid: &PhaseSpaceGrid) -> bool {
        self.nx == grid.nx && self.nv1 == grid.nv1 && self.nv2 == grid.nv2
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Velocity weight for [`moment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityWeight {
    One,
    V1,
    V2,
    SpeedSquared,
}

impl VelocityWeight {
    #[inline]
    pub fn eval(self, v1: f64, v2: f64) -> f64 {
        match self {
            VelocityWeight::One => 1.0,
            VelocityWeight::V1 => v1,
            VelocityWeight::V2 => v2,
            VelocityWeight::SpeedSquared => v1 * v1 + v2 * v2,
        }
    }
}

/// Midpoint-rule velocity moment `sum_c w(v_c) f[x1, c] dv1 dv2` at each node.
/// Cells are visited in a fixed order, so results are bit-reproducible.
pub fn moment(grid: &PhaseSpaceGrid, f: &DistributionFunction, weight: VelocityWeight) -> Vec<f64> {
    assert!(f.matches(grid), "moment: distribution does not match grid");
    let nx = grid.nx;
    let mut out = vec![0.0; nx];
    for i1 in 0..grid.nv1 {
        let v1 = grid.v1(i1);
        for i2 in 0..grid.nv2 {
            let w = weight.eval(v1, grid.v2(i2));
            if w == 0.0 {
                continue;
            }
            let base = (i1 * grid.nv2 + i2) * nx;
            for (o, &fv) in out.iter_mut().zip(&f.values[base..base + nx]) {
                *o += w * fv;
            }
        }
    }
    let vol = grid.cell_volume();
    for o in out.iter_mut() {
        *o *= vol;
    }
    out
}

/// Total particle number `sum f dv1 dv2 dx`.
pub fn mass(grid: &PhaseSpaceGrid, f: &DistributionFunction) -> f64 {
    moment(grid, f, VelocityWeight::One).iter().sum::<f64>() * grid.dx
}
