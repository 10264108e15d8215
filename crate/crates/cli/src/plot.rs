use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::CliError;

/// Gnuplot script drawing column `quantity` of a diagnostics CSV against
/// time on a logarithmic y axis.
pub fn emit_plot_script(csv_path: &Path, quantity: &str) -> Result<String, CliError> {
    let file = File::open(csv_path).map_err(|e| CliError::Io(format!("{}: {e}", csv_path.display())))?;
    let mut header = String::new();
    BufReader::new(file).read_line(&mut header)?;
    let columns: Vec<&str> = header.trim().split(',').collect();
    let Some(index) = columns.iter().position(|c| *c == quantity) else {
        return Err(CliError::Config(format!(
            "no column '{quantity}' in {}; available: {}",
            csv_path.display(),
            columns.join(", ")
        )));
    };
    let path = csv_path.display().to_string().replace('\'', "''");
    Ok(format!(
        "set datafile separator ','\n\
         set logscale y\n\
         set format y '%.0e'\n\
         set xlabel 'time'\n\
         set ylabel '{quantity}'\n\
         set grid\n\
         plot '{path}' skip 1 using 1:{col} with lines title '{quantity}'\n\
         pause mouse close\n",
        col = index + 1
    ))
}
