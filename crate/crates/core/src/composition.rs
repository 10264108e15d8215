//! Lie, Strang and triple-jump compositions of the exact sub-flows.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SimError};
use crate::flows::{Flows, SimState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitKind {
    Lie,
    Strang,
    TripleJump,
}

impl SplitKind {
    pub const ALL: [SplitKind; 3] = [SplitKind::Lie, SplitKind::Strang, SplitKind::TripleJump];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitKind::Lie => "lie",
            SplitKind::Strang => "strang",
            SplitKind::TripleJump => "triple-jump",
        }
    }

    pub fn order(self) -> u32 {
        match self {
            SplitKind::Lie => 1,
            SplitKind::Strang => 2,
            SplitKind::TripleJump => 4,
        }
    }
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        SplitKind::ALL
            .into_iter()
            .find(|k| k.as_str() == key)
            .ok_or_else(|| SimError::InvalidParameter(format!("unknown splitting '{s}'")))
    }
}

/// `[g1, g2, g1]` with `2 g1 + g2 = 1` and `2 g1^3 + g2^3 = 0`.
pub fn triple_jump_coefficients() -> [f64; 3] {
    let g1 = 1.0 / (2.0 - 2f64.powf(1.0 / 3.0));
    let g2 = 1.0 - 2.0 * g1;
    [g1, g2, g1]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingScheme {
    pub kind: SplitKind,
    pub dt: f64,
}

impl SplittingScheme {
    pub fn new(kind: SplitKind, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SimError::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        Ok(Self { kind, dt })
    }

    pub fn step(&self, flows: &Flows, state: &mut SimState) -> Result<()> {
        self.step_by(flows, state, self.dt)
    }

    /// One step of duration `h`; negative `h` runs the composition backwards.
    pub fn step_by(&self, flows: &Flows, state: &mut SimState, h: f64) -> Result<()> {
        match self.kind {
            SplitKind::Lie => {
                flows.flow_he(state, h);
                flows.flow_hb(state, h)?;
                flows.flow_hf(state, h);
            }
            SplitKind::Strang => strang(flows, state, h)?,
            SplitKind::TripleJump => {
                for g in triple_jump_coefficients() {
                    strang(flows, state, g * h)?;
                }
            }
        }
        state.time += h;
        Ok(())
    }
}

fn strang(flows: &Flows, state: &mut SimState, h: f64) -> Result<()> {
    flows.flow_he(state, 0.5 * h);
    flows.flow_hb(state, 0.5 * h)?;
    flows.flow_hf(state, h);
    flows.flow_hb(state, 0.5 * h)?;
    flows.flow_he(state, 0.5 * h);
    Ok(())
}

/// Step sizes taking `t0` to `t_final` in steps of `dt`, the last one
/// shortened if `dt` does not divide the interval.
pub fn step_schedule(t0: f64, t_final: f64, dt: f64) -> Vec<f64> {
    let span = t_final - t0;
    if span <= 0.0 {
        return Vec::new();
    }
    let tol = 1e-9 * dt;
    let full = ((span + tol) / dt).floor() as usize;
    let mut steps = vec![dt; full];
    let rest = span - full as f64 * dt;
    if rest > tol {
        steps.push(rest);
    }
    steps
}

/// Runs the schedule `t0 -> t_final`, calling `observe` before the first
/// step, after every `n_out`-th step and after the last one. Step `i` ends at
/// `t0 + i dt` exactly, and the final step ends at `t_final`.
pub(crate) fn drive(
    t0: f64,
    t_final: f64,
    dt: f64,
    n_out: usize,
    mut advance: impl FnMut(f64, f64) -> Result<()>,
    mut observe: impl FnMut(usize) -> Result<()>,
) -> Result<()> {
    if n_out == 0 {
        return Err(SimError::InvalidParameter("output interval must be at least 1".into()));
    }
    if !(t_final >= t0) {
        return Err(SimError::InvalidParameter(format!("final time {t_final} precedes current time {t0}")));
    }
    let steps = step_schedule(t0, t_final, dt);
    observe(0)?;
    let n = steps.len();
    for (i, h) in steps.into_iter().enumerate() {
        let index = i + 1;
        let end = if index == n { t_final } else { t0 + index as f64 * dt };
        advance(h, end)?;
        if index % n_out == 0 || index == n {
            observe(index)?;
        }
    }
    Ok(())
}

/// Advances `state` to `t_final`, calling `observer(step, state)` at step 0,
/// every `n_out` steps and at the end.
pub fn integrate(
    scheme: &SplittingScheme,
    flows: &Flows,
    state: &mut SimState,
    t_final: f64,
    n_out: usize,
    mut observer: impl FnMut(usize, &SimState) -> Result<()>,
) -> Result<()> {
    let t0 = state.time;
    let cell = std::cell::RefCell::new(state);
    drive(
        t0,
        t_final,
        scheme.dt,
        n_out,
        |h, end| {
            let mut s = cell.borrow_mut();
            scheme.step_by(flows, &mut s, h)?;
            s.time = end;
            if !s.fields.is_finite() {
                return Err(SimError::NonFinite { time: end });
            }
            Ok(())
        },
        |i| {
            let s = cell.borrow();
            if !s.is_finite() {
                return Err(SimError::NonFinite { time: s.time });
            }
            observer(i, &s)
        },
    )
}
