//! Convergence order of a scheme from a ladder of step sizes, measured
//! against a fine triple-jump reference.

use std::io::Write;

use vlasov_core::{FieldState, SchemeKind};

use crate::config::{ModeCutoff, RunConfig};
use crate::run::run_with;
use crate::CliError;

/// Reference step is the smallest ladder step divided by this.
pub const REFERENCE_REFINEMENT: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OrderRow {
    pub dt: f64,
    pub l1_error: f64,
    /// `log2(e_prev / e) / log2(dt_prev / dt)`; absent on the first row.
    pub order: Option<f64>,
}

/// Sum over `E1`, `E2`, `B` of the mean absolute nodal difference.
pub fn l1_field_error(a: &FieldState, b: &FieldState) -> f64 {
    let mean_abs = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum::<f64>() / x.len() as f64;
    mean_abs(&a.e1, &b.e1) + mean_abs(&a.e2, &b.e2) + mean_abs(&a.b, &b.b)
}

fn final_fields(config: &RunConfig) -> Result<FieldState, CliError> {
    let mut cfg = config.clone();
    cfg.output_every = usize::MAX;
    Ok(run_with(&cfg, |_, _| Ok(()))?.fields)
}

/// Runs `config.scheme` at every step in `ladder` (sorted descending) up to
/// `config.case.t_final` and compares with the reference.
///
/// The mode cutoff is frozen across the ladder and the reference, at the
/// value that keeps both this scheme at the largest step and the
/// triple-jump stable, so all runs solve the same semi-discrete problem.
pub fn order_study(config: &RunConfig, ladder: &[f64]) -> Result<Vec<OrderRow>, CliError> {
    if ladder.len() < 2 {
        return Err(CliError::Config("order study needs at least two step sizes".into()));
    }
    if ladder.iter().any(|dt| !(*dt > 0.0 && dt.is_finite())) {
        return Err(CliError::Config("ladder steps must be positive".into()));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Config("ladder must be sorted in descending order".into()));
    }
    let mut base = config.clone();
    let grid = base.case.grid()?;
    let largest = ladder[0];
    let frozen = match base.max_mode {
        ModeCutoff::Auto => base
            .scheme
            .stable_max_mode(&grid, largest)
            .min(SchemeKind::TripleJump.stable_max_mode(&grid, largest))
            .max(1),
        other => other.resolve(&grid, base.scheme, largest),
    };
    base.max_mode = ModeCutoff::Fixed(frozen);

    let mut reference = base.clone();
    reference.scheme = SchemeKind::TripleJump;
    reference.case.dt = ladder[ladder.len() - 1] / REFERENCE_REFINEMENT;
    log::info!("reference: triple-jump, dt = {}, modes |m| <= {frozen}", reference.case.dt);
    let exact = final_fields(&reference)?;

    let mut rows: Vec<OrderRow> = Vec::with_capacity(ladder.len());
    for &dt in ladder {
        let mut cfg = base.clone();
        cfg.case.dt = dt;
        let err = l1_field_error(&final_fields(&cfg)?, &exact);
        let order = rows.last().map(|prev| (prev.l1_error / err).log2() / (prev.dt / dt).log2());
        log::info!("dt = {dt}: l1 error {err:e}");
        rows.push(OrderRow { dt, l1_error: err, order });
    }
    Ok(rows)
}

pub fn write_table(rows: &[OrderRow], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "stepsize,l1_error,order")?;
    for r in rows {
        let order = r.order.map(|o| format!("{o:.16e}")).unwrap_or_default();
        writeln!(out, "{:.16e},{:.16e},{order}", r.dt, r.l1_error)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn ladder_validation() {
        let cfg = parse_config("").unwrap();
        for bad in [&[0.1][..], &[0.1, 0.2], &[0.1, -0.05]] {
            assert_eq!(order_study(&cfg, bad).unwrap_err().exit_code(), 2);
        }
    }

    #[test]
    fn l1_metric() {
        let a = FieldState { e1: vec![1.0, 2.0], e2: vec![0.0, 0.0], b: vec![1.0, 1.0] };
        let b = FieldState { e1: vec![0.0, 2.0], e2: vec![1.0, -1.0], b: vec![1.0, 1.0] };
        assert_eq!(l1_field_error(&a, &b), 0.5 + 1.0);
    }

    #[test]
    fn table_format() {
        let rows = vec![
            OrderRow { dt: 0.2, l1_error: 4e-6, order: None },
            OrderRow { dt: 0.1, l1_error: 1e-6, order: Some(2.0) },
        ];
        let mut buf = Vec::new();
        write_table(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "stepsize,l1_error,order\n2.0000000000000001e-1,3.9999999999999998e-6,\n1.0000000000000001e-1,9.9999999999999995e-7,2.0000000000000000e0\n"
        );
    }
}
