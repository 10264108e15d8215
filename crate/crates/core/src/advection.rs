//! Constant-coefficient translation of cell values in velocity.
//!
//! A translation by `shift` cells maps `u(v)` to `u(v - shift * dv)`. The
//! integer part of the shift is an index offset; the fractional part
//! `theta in [0, 1)` is handled either by a third-order flux-form finite
//! volume update or by a clamped cubic spline of the primitive. Both forms
//! evaluate the primitive at displaced cell edges, so they are conservative up
//! to flux through the two ends of the line and exact on integer shifts.
//! Nothing flows in from outside the velocity box. With the zero-flux
//! boundary, mass that would leave is kept in the downstream end cell, so
//! every line keeps its total to roundoff.

use rayon::prelude::*;

use crate::error::{Result, SimError};
use crate::grid::{DistributionFunction, PhaseSpaceGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvectionMethod {
    FiniteVolume3,
    SplineSemiLagrangian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Mass leaving the box is lost.
    ZeroInflow,
    /// Closed box: outflow is deposited in the downstream end cell.
    ZeroFlux,
}

/// How the magnetic velocity rotation is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationMethod {
    /// Exact factorization into shears `v1 (tan(theta/2))`, `v2 (-sin theta)`,
    /// `v1 (tan(theta/2))`.
    ThreeShear,
    /// Second-order directional splitting: half `v1` shear, full `v2` shear,
    /// half `v1` shear with the linearized speeds.
    StrangSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdvectionKernel {
    pub method: AdvectionMethod,
    pub boundary: Boundary,
    /// Clip negative values after each translation. Breaks the flux identity.
    pub clip_negative: bool,
}

impl Default for AdvectionKernel {
    fn default() -> Self {
        Self::new(AdvectionMethod::FiniteVolume3)
    }
}

/// Work buffers reused across lines.
#[derive(Debug, Default)]
pub struct LineScratch {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl AdvectionKernel {
    pub fn new(method: AdvectionMethod) -> Self {
        Self { method, boundary: Boundary::ZeroFlux, clip_negative: false }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_clipping(mut self, clip: bool) -> Self {
        self.clip_negative = clip;
        self
    }

    pub fn translate_line(&self, line: &[f64], shift: f64) -> Vec<f64> {
        let mut out = vec![0.0; line.len()];
        self.translate_into(line, shift, &mut out, &mut LineScratch::default());
        out
    }

    /// Translate `line` by `shift` cells into `out`. Returns the mass that
    /// left the line through its ends, so that
    /// `sum(out) = sum(line) - outflow` (exact identity before clipping).
    /// Always zero under [`Boundary::ZeroFlux`].
    pub fn translate_into(&self, line: &[f64], shift: f64, out: &mut [f64], scratch: &mut LineScratch) -> f64 {
        assert!(shift.is_finite(), "translate: non-finite shift {shift}");
        assert_eq!(line.len(), out.len(), "translate: length mismatch");
        let mut outflow = match self.method {
            _ if shift.fract() == 0.0 => integer_translate(line, shift as i64, out),
            AdvectionMethod::FiniteVolume3 => fv3_translate(line, shift, out, scratch),
            AdvectionMethod::SplineSemiLagrangian => spline_translate(line, shift, out, scratch),
        };
        if self.boundary == Boundary::ZeroFlux && !out.is_empty() {
            // Nothing enters from upstream, so all of it left downstream.
            let end = if shift > 0.0 { out.len() - 1 } else { 0 };
            out[end] += outflow;
            outflow = 0.0;
        }
        if self.clip_negative {
            for v in out.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        outflow
    }
}

fn integer_translate(u: &[f64], offset: i64, out: &mut [f64]) -> f64 {
    let n = u.len() as i64;
    let mut landed = 0.0;
    for (i, o) in out.iter_mut().enumerate() {
        let j = i as i64 - offset;
        *o = if j >= 0 && j < n { u[j as usize] } else { 0.0 };
        landed += *o;
    }
    u.iter().sum::<f64>() - landed
}

/// Weights of the third-order face flux `Phi(theta)` on `(u[j-1], u[j], u[j+1])`:
/// the integral over the right `theta` fraction of cell `j` of the parabola
/// matching the three cell averages.
#[inline]
fn fv3_weights(theta: f64) -> [f64; 3] {
    let t2 = theta * theta;
    let c1 = theta;
    let c2 = 0.5 * (theta - t2);
    let d = theta / 6.0 - 0.5 * t2 + t2 * theta / 3.0;
    [0.5 * (d - c2), c1 - d, 0.5 * (c2 + d)]
}

fn fv3_translate(u: &[f64], shift: f64, out: &mut [f64], scratch: &mut LineScratch) -> f64 {
    let n = u.len() as i64;
    let whole = shift.floor();
    let theta = shift - whole;
    let offset = whole as i64;
    let at = |v: &[f64], j: i64| if j >= 0 && j < n { v[j as usize] } else { 0.0 };

    let phi = &mut scratch.a;
    phi.clear();
    if theta > 0.0 {
        let [wm, w0, wp] = fv3_weights(theta);
        phi.extend((0..n).map(|j| wm * at(u, j - 1) + w0 * at(u, j) + wp * at(u, j + 1)));
    } else {
        phi.resize(n as usize, 0.0);
    }
    for (i, o) in out.iter_mut().enumerate() {
        let j = i as i64 - offset;
        *o = at(u, j) - at(phi, j) + at(phi, j - 1);
    }

    // Telescoped mass balance over the donor range [-offset, n-1-offset].
    let lo = (-offset).max(0);
    let hi = (n - 1 - offset).min(n - 1);
    let kept: f64 = if lo <= hi { u[lo as usize..=hi as usize].iter().sum() } else { 0.0 };
    let landed = kept - at(phi, n - 1 - offset) + at(phi, -offset - 1);
    u.iter().sum::<f64>() - landed
}

fn spline_translate(u: &[f64], shift: f64, out: &mut [f64], scratch: &mut LineScratch) -> f64 {
    let n = u.len();
    let LineScratch { a: prim, b: second, c: work } = scratch;

    prim.clear();
    prim.push(0.0);
    let mut acc = 0.0;
    for &v in u {
        acc += v;
        prim.push(acc);
    }
    clamped_spline_second_derivatives(prim, second, work);

    let total = prim[n];
    let eval = |p: f64| -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= n as f64 {
            return total;
        }
        let i = (p.floor() as usize).min(n - 1);
        let t = p - i as f64;
        let s = 1.0 - t;
        s * prim[i] + t * prim[i + 1] + ((s * s * s - s) * second[i] + (t * t * t - t) * second[i + 1]) / 6.0
    };
    let mut left = eval(-shift);
    for (i, o) in out.iter_mut().enumerate() {
        let right = eval(i as f64 + 1.0 - shift);
        *o = right - left;
        left = right;
    }
    total - (eval(n as f64 - shift) - eval(-shift))
}

/// Second derivatives of the unit-spacing cubic spline through `y` with zero
/// end slopes (the primitive of a profile that vanishes at the box edges).
fn clamped_spline_second_derivatives(y: &[f64], m: &mut Vec<f64>, cp: &mut Vec<f64>) {
    let n = y.len();
    m.clear();
    m.resize(n, 0.0);
    cp.clear();
    cp.resize(n, 0.0);
    let rhs = |i: usize| -> f64 {
        if i == 0 {
            6.0 * (y[1] - y[0])
        } else if i == n - 1 {
            -6.0 * (y[n - 1] - y[n - 2])
        } else {
            6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1])
        }
    };
    // Thomas algorithm; diagonals are (2, 4, ..., 4, 2), off-diagonals 1.
    let diag = |i: usize| if i == 0 || i == n - 1 { 2.0 } else { 4.0 };
    cp[0] = 1.0 / diag(0);
    m[0] = rhs(0) / diag(0);
    for i in 1..n {
        let denom = diag(i) - cp[i - 1];
        cp[i] = if i < n - 1 { 1.0 / denom } else { 0.0 };
        m[i] = (rhs(i) - m[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        m[i] -= cp[i] * m[i + 1];
    }
}

/// Translate every line along `v1` (fixed `x1`, `v2`) by `shift(ix, i2)` cells.
fn translate_along_v1(
    kernel: &AdvectionKernel,
    f: &mut DistributionFunction,
    shift: impl Fn(usize, usize) -> f64 + Sync,
) {
    let (nx, nv1, nv2) = (f.nx, f.nv1, f.nv2);
    let src = &f.values;
    let columns: Vec<Option<Vec<f64>>> = (0..nv2)
        .into_par_iter()
        .map(|i2| {
            if (0..nx).all(|ix| shift(ix, i2) == 0.0) {
                return None;
            }
            let mut scratch = LineScratch::default();
            let mut line = vec![0.0; nv1];
            let mut moved = vec![0.0; nv1];
            let mut block = vec![0.0; nv1 * nx];
            for ix in 0..nx {
                let s = shift(ix, i2);
                for (i1, l) in line.iter_mut().enumerate() {
                    *l = src[(i1 * nv2 + i2) * nx + ix];
                }
                if s == 0.0 {
                    moved.copy_from_slice(&line);
                } else {
                    kernel.translate_into(&line, s, &mut moved, &mut scratch);
                }
                for (i1, &m) in moved.iter().enumerate() {
                    block[i1 * nx + ix] = m;
                }
            }
            Some(block)
        })
        .collect();
    for (i2, block) in columns.into_iter().enumerate() {
        if let Some(block) = block {
            for i1 in 0..nv1 {
                let dst = (i1 * nv2 + i2) * nx;
                f.values[dst..dst + nx].copy_from_slice(&block[i1 * nx..(i1 + 1) * nx]);
            }
        }
    }
}

/// Translate every line along `v2` (fixed `x1`, `v1`) by `shift(ix, i1)` cells.
fn translate_along_v2(
    kernel: &AdvectionKernel,
    f: &mut DistributionFunction,
    shift: impl Fn(usize, usize) -> f64 + Sync,
) {
    let (nx, nv2) = (f.nx, f.nv2);
    f.values.par_chunks_mut(nv2 * nx).enumerate().for_each(|(i1, block)| {
        let mut scratch = LineScratch::default();
        let mut line = vec![0.0; nv2];
        let mut moved = vec![0.0; nv2];
        for ix in 0..nx {
            let s = shift(ix, i1);
            if s == 0.0 {
                continue;
            }
            for (i2, l) in line.iter_mut().enumerate() {
                *l = block[i2 * nx + ix];
            }
            kernel.translate_into(&line, s, &mut moved, &mut scratch);
            for (i2, &m) in moved.iter().enumerate() {
                block[i2 * nx + ix] = m;
            }
        }
    });
}

/// `f(x1, v1, v2) <- f(x1, v1 - a(x1) v2, v2)`.
pub fn shear_v1(kernel: &AdvectionKernel, grid: &PhaseSpaceGrid, f: &mut DistributionFunction, a: &[f64]) {
    assert_eq!(a.len(), grid.nx, "shear_v1: coefficient length");
    assert!(f.matches(grid));
    let v2 = grid.v2_centers();
    let dv1 = grid.dv1;
    translate_along_v1(kernel, f, |ix, i2| a[ix] * v2[i2] / dv1);
}

/// `f(x1, v1, v2) <- f(x1, v1, v2 - b(x1) v1)`.
pub fn shear_v2(kernel: &AdvectionKernel, grid: &PhaseSpaceGrid, f: &mut DistributionFunction, b: &[f64]) {
    assert_eq!(b.len(), grid.nx, "shear_v2: coefficient length");
    assert!(f.matches(grid));
    let v1 = grid.v1_centers();
    let dv2 = grid.dv2;
    translate_along_v2(kernel, f, |ix, i1| b[ix] * v1[i1] / dv2);
}

/// `f(x1, v) <- f(x1, v - (s1(x1), s2(x1)))`, shifts in velocity units.
pub fn shift_v(
    kernel: &AdvectionKernel,
    grid: &PhaseSpaceGrid,
    f: &mut DistributionFunction,
    s1: &[f64],
    s2: &[f64],
) {
    assert_eq!(s1.len(), grid.nx, "shift_v: s1 length");
    assert_eq!(s2.len(), grid.nx, "shift_v: s2 length");
    assert!(f.matches(grid));
    let (dv1, dv2) = (grid.dv1, grid.dv2);
    translate_along_v1(kernel, f, |ix, _| s1[ix] / dv1);
    translate_along_v2(kernel, f, |ix, _| s2[ix] / dv2);
}

/// `f(x1, v) <- f(x1, Q(theta) v)` with `Q` the counter-clockwise rotation, the
/// exact solution of `df/dt + B (v2, -v1) . grad_v f = 0` for `theta = t B`.
pub fn rotate(
    kernel: &AdvectionKernel,
    grid: &PhaseSpaceGrid,
    f: &mut DistributionFunction,
    theta: &[f64],
    method: RotationMethod,
) -> Result<()> {
    assert_eq!(theta.len(), grid.nx, "rotate: angle length");
    let max_angle = theta.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if !(max_angle < std::f64::consts::PI) {
        return Err(SimError::RotationAngleTooLarge { max_angle });
    }
    if max_angle == 0.0 {
        return Ok(());
    }
    let (outer, inner): (Vec<f64>, Vec<f64>) = match method {
        RotationMethod::ThreeShear => theta.iter().map(|&t| ((0.5 * t).tan(), -t.sin())).unzip(),
        RotationMethod::StrangSplit => theta.iter().map(|&t| (0.5 * t, -t)).unzip(),
    };
    shear_v1(kernel, grid, f, &outer);
    shear_v2(kernel, grid, f, &inner);
    shear_v1(kernel, grid, f, &outer);
    Ok(())
}
