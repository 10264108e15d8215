//! Benchmark initial conditions: Landau damping, Weibel instability and a
//! magnetically seeded two-stream instability.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::flows::{FieldState, SimState};
use crate::grid::{moment, DistributionFunction, PhaseSpaceGrid, VelocityWeight};

/// Largest tolerated `|mean|` of a Poisson source.
pub const SOLVABILITY_TOL: f64 = 1e-10;

/// Edge-to-peak ratio above which the velocity box is reported as too small.
pub const EDGE_WARN_RATIO: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseName {
    LandauStrong,
    LandauLinear,
    Weibel,
    TwoStream,
}

impl CaseName {
    pub const ALL: [CaseName; 4] =
        [CaseName::LandauStrong, CaseName::LandauLinear, CaseName::Weibel, CaseName::TwoStream];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseName::LandauStrong => "landau-strong",
            CaseName::LandauLinear => "landau-linear",
            CaseName::Weibel => "weibel",
            CaseName::TwoStream => "two-stream",
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseName {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        CaseName::ALL.into_iter().find(|c| c.as_str() == key).ok_or_else(|| {
            let names: Vec<_> = CaseName::ALL.iter().map(|c| c.as_str()).collect();
            SimError::InvalidParameter(format!("unknown case '{s}', expected one of {}", names.join(", ")))
        })
    }
}

/// Physical parameters. Which ones matter depends on the case:
///
/// * Landau: `alpha` (density perturbation), `k`.
/// * Weibel: `alpha`, `k`, `v_th`, `t_r` (temperature ratio), `beta` (magnetic seed).
/// * TwoStream: `alpha` (magnetic seed), `k` (1, so the box is 2 pi long),
///   `beta` (beam temperature), `beam_speed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseParams {
    pub alpha: f64,
    pub k: f64,
    pub v_th: f64,
    pub t_r: f64,
    pub beta: f64,
    pub beam_speed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub name: CaseName,
    pub params: CaseParams,
    pub nx: usize,
    pub nv1: usize,
    pub nv2: usize,
    pub v1max: f64,
    pub v2max: f64,
    pub dt: f64,
    pub t_final: f64,
}

impl CaseSpec {
    pub fn defaults(name: CaseName) -> Self {
        let landau = |alpha| CaseParams { alpha, k: 0.4, v_th: 1.0, t_r: 1.0, beta: 0.0, beam_speed: 0.0 };
        let (params, v1max, v2max, dt, t_final) = match name {
            CaseName::LandauStrong => (landau(0.5), 8.0, 8.0, 0.05, 100.0),
            CaseName::LandauLinear => (landau(0.01), 8.0, 8.0, 0.05, 50.0),
            CaseName::Weibel => (
                CaseParams { alpha: 1e-4, k: 1.25, v_th: 0.02, t_r: 12.0, beta: 1e-4, beam_speed: 0.0 },
                0.4,
                0.8,
                0.2,
                300.0,
            ),
            CaseName::TwoStream => (
                CaseParams { alpha: 1e-3, k: 1.0, v_th: 0.0, t_r: 1.0, beta: 2e-3, beam_speed: 0.2 },
                // Trapping after saturation carries particles to |v1| ~ 0.85.
                1.0,
                0.4,
                0.1,
                200.0,
            ),
        };
        CaseSpec { name, params, nx: 32, nv1: 64, nv2: 64, v1max, v2max, dt, t_final }
    }

    pub fn lx(&self) -> f64 {
        2.0 * PI / self.params.k
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SimError::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        let finite_nonneg = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SimError::InvalidParameter(format!("{name} must be finite and non-negative, got {v}")))
            }
        };
        positive("k", p.k)?;
        positive("dt", self.dt)?;
        finite_nonneg("t_final", self.t_final)?;
        finite_nonneg("alpha", p.alpha)?;
        match self.name {
            CaseName::LandauStrong | CaseName::LandauLinear => {}
            CaseName::Weibel => {
                positive("v_th", p.v_th)?;
                positive("t_r", p.t_r)?;
                finite_nonneg("beta", p.beta)?;
            }
            CaseName::TwoStream => {
                positive("beta", p.beta)?;
                finite_nonneg("beam_speed", p.beam_speed)?;
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<PhaseSpaceGrid> {
        PhaseSpaceGrid::new(self.nx, self.lx(), self.nv1, self.nv2, self.v1max, self.v2max)
    }

    /// Initial state on `grid`, which must share this case's box length.
    pub fn initialize(&self, grid: &PhaseSpaceGrid) -> Result<SimState> {
        self.validate()?;
        if (grid.lx - self.lx()).abs() > 1e-12 * self.lx() {
            return Err(SimError::InvalidParameter(format!(
                "grid length {} does not match case length {}",
                grid.lx,
                self.lx()
            )));
        }
        let p = &self.params;
        Ok(match self.name {
            CaseName::LandauStrong | CaseName::LandauLinear => init_landau(grid, p.alpha, p.k),
            CaseName::Weibel => init_weibel_with(grid, p),
            CaseName::TwoStream => init_two_stream_with(grid, p),
        })
    }
}

/// Electric field `E1` with `dE1/dx = rho` and zero mean.
pub fn solve_poisson(grid: &PhaseSpaceGrid, rho: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(rho.len(), grid.nx, "source length must match nx");
    let mean = grid.mean(rho);
    if mean.abs() > SOLVABILITY_TOL {
        return Err(SimError::SolvabilityViolation { mean });
    }
    let mut hat = grid.forward_transform(rho);
    hat[0] = Complex64::new(0.0, 0.0);
    for j in 1..grid.nx {
        hat[j] = if grid.is_retained(j) { hat[j] / Complex64::new(0.0, grid.wavenumbers[j]) } else { Complex64::new(0.0, 0.0) };
    }
    Ok(grid.inverse_transform(&hat))
}

/// Builds a state from `f` and the magnetic field, solving for `E1`.
/// State with `f`, the given `B`, `E2 = 0` and `E1` from the density fluctuation.
pub fn poisson_consistent(grid: &PhaseSpaceGrid, f: DistributionFunction, b: Vec<f64>) -> SimState {
    warn_if_box_too_small(grid, &f);
    let density = moment(grid, &f, VelocityWeight::One);
    // The discrete mass differs from lx by quadrature error; only the
    // fluctuation drives E1.
    let mean = grid.mean(&density);
    let deviation: Vec<f64> = density.iter().map(|d| d - mean).collect();
    let e1 = solve_poisson(grid, &deviation).expect("deviation has zero mean by construction");
    let nx = grid.nx;
    SimState { f, fields: FieldState { e1, e2: vec![0.0; nx], b }, time: 0.0 }
}

/// Largest value on the velocity-box boundary divided by the global maximum.
pub fn edge_ratio(grid: &PhaseSpaceGrid, f: &DistributionFunction) -> f64 {
    let peak = f.max();
    if peak <= 0.0 {
        return 0.0;
    }
    let mut edge = 0.0f64;
    for i1 in 0..grid.nv1 {
        for i2 in 0..grid.nv2 {
            if i1 == 0 || i2 == 0 || i1 == grid.nv1 - 1 || i2 == grid.nv2 - 1 {
                for ix in 0..grid.nx {
                    edge = edge.max(f.get(ix, i1, i2).abs());
                }
            }
        }
    }
    edge / peak
}

fn warn_if_box_too_small(grid: &PhaseSpaceGrid, f: &DistributionFunction) {
    let ratio = edge_ratio(grid, f);
    if ratio > EDGE_WARN_RATIO {
        log::warn!(
            "velocity box [-{}, {}] x [-{}, {}] is small: edge value is {ratio:.2e} of the peak",
            grid.v1max,
            grid.v1max,
            grid.v2max,
            grid.v2max
        );
    }
}

/// Maxwellian with a cosine density perturbation `1 + alpha cos(k x)`.
pub fn init_landau(grid: &PhaseSpaceGrid, alpha: f64, k: f64) -> SimState {
    let f = DistributionFunction::from_fn(grid, |x, v1, v2| {
        (-(v1 * v1 + v2 * v2) / 2.0).exp() / (2.0 * PI) * (1.0 + alpha * (k * x).cos())
    });
    poisson_consistent(grid, f, vec![0.0; grid.nx])
}

/// Weibel setup with the default parameters.
pub fn init_weibel(grid: &PhaseSpaceGrid) -> SimState {
    init_weibel_with(grid, &CaseSpec::defaults(CaseName::Weibel).params)
}

/// Anisotropic Maxwellian, hotter along `v2` by `t_r`, with a density
/// perturbation `alpha` and magnetic seed `beta cos(k x)`.
pub fn init_weibel_with(grid: &PhaseSpaceGrid, p: &CaseParams) -> SimState {
    let vt2 = p.v_th * p.v_th;
    let norm = 1.0 / (PI * vt2 * p.t_r.sqrt());
    let f = DistributionFunction::from_fn(grid, |x, v1, v2| {
        norm * (-(v1 * v1 + v2 * v2 / p.t_r) / vt2).exp() * (1.0 + p.alpha * (p.k * x).cos())
    });
    let b = (0..grid.nx).map(|ix| p.beta * (p.k * grid.x(ix)).cos()).collect();
    poisson_consistent(grid, f, b)
}

/// Two-stream setup with the default parameters.
pub fn init_two_stream(grid: &PhaseSpaceGrid) -> SimState {
    init_two_stream_with(grid, &CaseSpec::defaults(CaseName::TwoStream).params)
}

/// Two counter-streaming beams along `v1` at `+-beam_speed`, seeded only by
/// `B = alpha sin(k x)`.
pub fn init_two_stream_with(grid: &PhaseSpaceGrid, p: &CaseParams) -> SimState {
    let (beta, u) = (p.beta, p.beam_speed);
    let f = DistributionFunction::from_fn(grid, |_, v1, v2| {
        let beams = (-(v1 - u).powi(2) / beta).exp() + (-(v1 + u).powi(2) / beta).exp();
        (-v2 * v2 / beta).exp() * beams / (2.0 * PI * beta)
    });
    let b = (0..grid.nx).map(|ix| p.alpha * (p.k * grid.x(ix)).sin()).collect();
    poisson_consistent(grid, f, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{poisson_residual, record, FieldComponent};

    fn case_grid(name: CaseName) -> (CaseSpec, PhaseSpaceGrid) {
        let spec = CaseSpec::defaults(name);
        let grid = spec.grid().unwrap();
        (spec, grid)
    }

    #[test]
    fn case_names_round_trip() {
        for c in CaseName::ALL {
            assert_eq!(c.as_str().parse::<CaseName>().unwrap(), c);
        }
        assert_eq!("Two_Stream".parse::<CaseName>().unwrap(), CaseName::TwoStream);
        assert!("plasma".parse::<CaseName>().is_err());
    }

    #[test]
    fn box_lengths() {
        assert!((CaseSpec::defaults(CaseName::LandauStrong).lx() - 2.0 * PI / 0.4).abs() < 1e-14);
        assert!((CaseSpec::defaults(CaseName::Weibel).lx() - 2.0 * PI / 1.25).abs() < 1e-14);
        assert!((CaseSpec::defaults(CaseName::TwoStream).lx() - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn validation_rejects_nonpositive_parameters() {
        let mut spec = CaseSpec::defaults(CaseName::Weibel);
        spec.params.t_r = 0.0;
        assert!(spec.validate().is_err());
        let mut spec = CaseSpec::defaults(CaseName::LandauLinear);
        spec.dt = -0.1;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn all_defaults_are_poisson_consistent_with_small_edges() {
        for name in CaseName::ALL {
            let (spec, grid) = case_grid(name);
            let state = spec.initialize(&grid).unwrap();
            assert!(poisson_residual(&grid, &state) < 1e-12, "{name}");
            assert!(state.f.min() >= 0.0, "{name}");
            assert!(edge_ratio(&grid, &state.f) < EDGE_WARN_RATIO, "{name}: {}", edge_ratio(&grid, &state.f));
        }
    }

    #[test]
    fn unperturbed_landau_is_field_free() {
        let (_, grid) = case_grid(CaseName::LandauStrong);
        let state = init_landau(&grid, 0.0, 0.4);
        assert!(state.fields.e1.iter().all(|e| e.abs() < 1e-15));
    }

    #[test]
    fn strong_landau_field_and_energy() {
        let (_, grid) = case_grid(CaseName::LandauStrong);
        let state = init_landau(&grid, 0.5, 0.4);
        for ix in 0..grid.nx {
            let expect = 1.25 * (0.4 * grid.x(ix)).sin();
            assert!((state.fields.e1[ix] - expect).abs() < 1e-9, "{} vs {expect}", state.fields.e1[ix]);
        }
        let e_pot = record(&grid, &state).e_pot;
        let exact = 0.5 * 0.5 * grid.lx / (4.0 * 0.16);
        assert!((e_pot - exact).abs() < 1e-8 * exact, "{e_pot} vs {exact}");
        assert!((exact - 6.1359).abs() < 1e-4);
    }

    #[test]
    fn weibel_moments_and_seed() {
        let (spec, grid) = case_grid(CaseName::Weibel);
        let p = spec.params;
        let state = init_weibel(&grid);
        let density = moment(&grid, &state.f, VelocityWeight::One);
        for ix in 0..grid.nx {
            let expect = 1.0 + p.alpha * (p.k * grid.x(ix)).cos();
            assert!((density[ix] - expect).abs() < 1e-8);
        }
        let unperturbed = init_weibel_with(&grid, &CaseParams { alpha: 0.0, beta: 0.0, ..p });
        let v1sq = DistributionFunction::from_fn(&grid, |_, v1, _| v1 * v1);
        let v2sq = DistributionFunction::from_fn(&grid, |_, _, v2| v2 * v2);
        let weighted = |w: &DistributionFunction| -> f64 {
            unperturbed.f.values.iter().zip(&w.values).map(|(a, b)| a * b).sum::<f64>() * grid.cell_volume()
                / grid.nx as f64
        };
        let vt2 = p.v_th * p.v_th;
        assert!((weighted(&v1sq) - vt2 / 2.0).abs() < 1e-8);
        assert!((weighted(&v2sq) - p.t_r * vt2 / 2.0).abs() < 1e-8);
        assert!((record(&grid, &state).amp(FieldComponent::B, 1).unwrap() - 5e-5).abs() < 1e-15);
    }

    #[test]
    fn two_stream_density_and_energy() {
        let (spec, grid) = case_grid(CaseName::TwoStream);
        let state = init_two_stream(&grid);
        let density = moment(&grid, &state.f, VelocityWeight::One);
        assert!(density.iter().all(|d| (d - 1.0).abs() < 1e-8));
        assert!(state.fields.e1.iter().all(|e| e.abs() < 1e-14));
        let j1 = moment(&grid, &state.f, VelocityWeight::V1);
        assert!(j1.iter().all(|j| j.abs() < 1e-14));
        let r = record(&grid, &state);
        let alpha = spec.params.alpha;
        assert!((r.e_tot - (r.e_kin + alpha * alpha * PI / 2.0)).abs() < 1e-14);
        assert!((r.mass - grid.lx).abs() < 1e-8 * grid.lx);
    }

    #[test]
    fn poisson_examples() {
        let grid = PhaseSpaceGrid::new(32, 2.0 * PI / 0.5, 4, 4, 1.0, 1.0).unwrap();
        assert!(solve_poisson(&grid, &vec![0.0; 32]).unwrap().iter().all(|e| *e == 0.0));
        let rho: Vec<f64> = (0..32).map(|i| 0.3 * (0.5 * grid.x(i)).cos()).collect();
        let e1 = solve_poisson(&grid, &rho).unwrap();
        for i in 0..32 {
            assert!((e1[i] - 0.6 * (0.5 * grid.x(i)).sin()).abs() < 1e-13);
        }
        let back = grid.spectral_derivative(&e1);
        assert!(back.iter().zip(&rho).all(|(a, b)| (a - b).abs() < 1e-12));
        let shifted: Vec<f64> = rho.iter().map(|r| r + 1e-6).collect();
        assert!(matches!(solve_poisson(&grid, &shifted), Err(SimError::SolvabilityViolation { .. })));
    }
}
