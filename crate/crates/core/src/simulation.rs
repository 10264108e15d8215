//! One driver for the three splittings and the two baselines.

use std::fmt;
use std::str::FromStr;

use crate::baselines::{self, StaggeredState};
use crate::composition::{self, triple_jump_coefficients, SplitKind, SplittingScheme};
use crate::error::{Result, SimError};
use crate::flows::{Flows, SimState};
use crate::grid::PhaseSpaceGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Lie,
    Strang,
    TripleJump,
    Valis,
    Mangeney,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] =
        [SchemeKind::Lie, SchemeKind::Strang, SchemeKind::TripleJump, SchemeKind::Valis, SchemeKind::Mangeney];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Lie => "lie",
            SchemeKind::Strang => "strang",
            SchemeKind::TripleJump => "triple-jump",
            SchemeKind::Valis => "valis",
            SchemeKind::Mangeney => "mangeney",
        }
    }

    pub fn splitting(self) -> Option<SplitKind> {
        match self {
            SchemeKind::Lie => Some(SplitKind::Lie),
            SchemeKind::Strang => Some(SplitKind::Strang),
            SchemeKind::TripleJump => Some(SplitKind::TripleJump),
            SchemeKind::Valis | SchemeKind::Mangeney => None,
        }
    }

    /// Largest mode `m` such that modes `1..=m` of the vacuum field waves,
    /// with the plasma frequency added, are stable under one step of size
    /// `dt`. Field substeps behave like leapfrog, which blows up once
    /// `k dt` passes 2 (with a safety margin here).
    pub fn stable_max_mode(self, grid: &PhaseSpaceGrid, dt: f64) -> usize {
        let cap = (grid.nx - 1) / 2;
        (1..=cap).take_while(|&m| self.wave_is_stable(grid.k0() * m as f64, dt)).last().unwrap_or(0)
    }

    fn wave_is_stable(self, k: f64, dt: f64) -> bool {
        let omega = (k * k + 1.0).sqrt();
        // On (E2_hat, -i B_hat) the electric flow is a lower shear and the
        // magnetic flow an upper shear, both with strength omega * h.
        let electric = |h: f64| [[1.0, 0.0], [-omega * h, 1.0]];
        let magnetic = |h: f64| [[1.0, omega * h], [0.0, 1.0]];
        let strang = |h: f64| mul(electric(h / 2.0), mul(magnetic(h), electric(h / 2.0)));
        let step = match self {
            SchemeKind::Lie => mul(magnetic(dt), electric(dt)),
            SchemeKind::Strang | SchemeKind::Valis | SchemeKind::Mangeney => strang(dt),
            SchemeKind::TripleJump => {
                let [a, b, c] = triple_jump_coefficients();
                mul(strang(c * dt), mul(strang(b * dt), strang(a * dt)))
            }
        };
        // The step has unit determinant, so it is stable iff |trace| <= 2;
        // the margin applies on the side where the eigenvalues turn negative.
        let trace = step[0][0] + step[1][1];
        (-1.95..=2.0 + 1e-12).contains(&trace)
    }
}

fn mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        SchemeKind::ALL.into_iter().find(|k| k.as_str() == key).ok_or_else(|| {
            let names: Vec<_> = SchemeKind::ALL.iter().map(|k| k.as_str()).collect();
            SimError::InvalidParameter(format!("unknown scheme '{s}', expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone)]
enum Stepper {
    Splitting(SplittingScheme, SimState),
    Baseline(SchemeKind, StaggeredState),
}

#[derive(Debug, Clone)]
pub struct Simulation {
    flows: Flows,
    dt: f64,
    stepper: Stepper,
}

impl Simulation {
    pub fn new(flows: Flows, scheme: SchemeKind, dt: f64, initial: SimState) -> Result<Self> {
        if !initial.f.matches(&flows.grid) {
            return Err(SimError::InvalidParameter("initial state does not match the grid".into()));
        }
        let stepper = match scheme.splitting() {
            Some(kind) => Stepper::Splitting(SplittingScheme::new(kind, dt)?, initial),
            None => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(SimError::InvalidParameter(format!("time step must be positive, got {dt}")));
                }
                Stepper::Baseline(scheme, baselines::bootstrap(&flows.grid, &initial, dt))
            }
        };
        Ok(Self { flows, dt, stepper })
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.flows.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self) -> f64 {
        match &self.stepper {
            Stepper::Splitting(_, s) => s.time,
            Stepper::Baseline(_, s) => s.time,
        }
    }

    /// Collocated state at the current time.
    pub fn snapshot(&self) -> SimState {
        match &self.stepper {
            Stepper::Splitting(_, s) => s.clone(),
            Stepper::Baseline(_, s) => s.to_sim_state(&self.flows.grid),
        }
    }

    /// One step of size `h` (the nominal step unless shortening the last one).
    pub fn advance(&mut self, h: f64) -> Result<()> {
        match &mut self.stepper {
            Stepper::Splitting(scheme, s) => scheme.step_by(&self.flows, s, h),
            Stepper::Baseline(SchemeKind::Valis, s) => baselines::step_valis(&self.flows, s, h).map(|_| ()),
            Stepper::Baseline(_, s) => baselines::step_mangeney(&self.flows, s, h),
        }
    }

    fn set_time(&mut self, t: f64) {
        match &mut self.stepper {
            Stepper::Splitting(_, s) => s.time = t,
            Stepper::Baseline(_, s) => {
                // Keep the half-step lag exact when snapping the clock.
                let lag = s.time - s.fields.b_half_time;
                s.time = t;
                s.fields.b_half_time = t - lag;
            }
        }
    }

    fn fields_finite(&self) -> bool {
        match &self.stepper {
            Stepper::Splitting(_, s) => s.fields.is_finite(),
            Stepper::Baseline(_, s) => {
                let f = &s.fields;
                f.e1.iter().chain(&f.e2).chain(&f.b_half).all(|v| v.is_finite())
            }
        }
    }

    /// Advances to `t_final`, handing collocated snapshots to `observer` at
    /// step 0, every `n_out` steps and at the end.
    pub fn run(
        &mut self,
        t_final: f64,
        n_out: usize,
        mut observer: impl FnMut(usize, &SimState) -> Result<()>,
    ) -> Result<()> {
        let t0 = self.time();
        let dt = self.dt;
        let this = std::cell::RefCell::new(self);
        composition::drive(
            t0,
            t_final,
            dt,
            n_out,
            |h, end| {
                let mut sim = this.borrow_mut();
                sim.advance(h)?;
                sim.set_time(end);
                if !sim.fields_finite() {
                    return Err(SimError::NonFinite { time: end });
                }
                Ok(())
            },
            |i| {
                let snap = this.borrow().snapshot();
                if !snap.is_finite() {
                    return Err(SimError::NonFinite { time: snap.time });
                }
                observer(i, &snap)
            },
        )
    }
}
