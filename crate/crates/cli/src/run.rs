use std::io::Write;

use vlasov_core::diagnostics::{record, DiagnosticsRecord};
use vlasov_core::{AdvectionKernel, FieldComponent, Flows, SimError, SimState, Simulation};

use crate::config::RunConfig;
use crate::CliError;

pub const CSV_HEADER: &str = "time,e_pot,e_mag,e_kin,e_tot,mass,poisson_residual,abs_E1_k,abs_E2_k,abs_B_k";

/// One CSV row, every value with 17 significant digits.
pub fn csv_row(r: &DiagnosticsRecord) -> String {
    let amp = |c| r.amp(c, 1).unwrap_or(f64::NAN);
    let values = [
        r.time,
        r.e_pot,
        r.e_mag,
        r.e_kin,
        r.e_tot,
        r.mass,
        r.poisson_residual,
        amp(FieldComponent::E1),
        amp(FieldComponent::E2),
        amp(FieldComponent::B),
    ];
    values.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
}

/// Simulation ready to run from the configured initial state.
pub fn prepare(config: &RunConfig) -> Result<Simulation, CliError> {
    let grid = config.grid()?;
    log::info!(
        "{} with {} on {}x{}x{}, dt = {}, keeping modes |m| <= {}",
        config.case.name,
        config.scheme,
        grid.nx,
        grid.nv1,
        grid.nv2,
        config.case.dt,
        grid.max_mode()
    );
    let state = config.case.initialize(&grid)?;
    let flows = Flows::new(grid)
        .with_kernel(AdvectionKernel::new(config.advection).with_boundary(config.boundary))
        .with_rotation(config.rotation);
    Ok(Simulation::new(flows, config.scheme, config.case.dt, state)?)
}

/// Runs to `t_final`, handing every output snapshot to `observe`.
pub fn run_with(
    config: &RunConfig,
    mut observe: impl FnMut(&SimState, &DiagnosticsRecord) -> Result<(), CliError>,
) -> Result<SimState, CliError> {
    let mut sim = prepare(config)?;
    let grid = sim.grid().clone();
    let mut failure = None;
    let result = sim.run(config.case.t_final, config.output_every, |_, state| {
        let rec = record(&grid, state);
        observe(state, &rec).map_err(|e| {
            let msg = e.to_string();
            failure = Some(e);
            SimError::Observer(msg)
        })
    });
    match (result, failure) {
        (Ok(()), _) => Ok(sim.snapshot()),
        (Err(_), Some(e)) => Err(e),
        (Err(e), None) => Err(e.into()),
    }
}

/// Writes the diagnostics CSV of a full run to `out`.
pub fn run_to_writer(config: &RunConfig, out: &mut dyn Write) -> Result<SimState, CliError> {
    writeln!(out, "{CSV_HEADER}")?;
    let state = run_with(config, |_, rec| {
        writeln!(out, "{}", csv_row(rec))?;
        Ok(())
    })?;
    out.flush()?;
    Ok(state)
}
