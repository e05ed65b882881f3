//! CSV emission: comma separated, header row, LF, 17 significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{CliError, CliResult};

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_record<W: Write>(out: &mut W, values: &[f64]) -> io::Result<()> {
    let line: Vec<String> = values.iter().map(|v| format_number(*v)).collect();
    writeln!(out, "{}", line.join(","))
}

/// Buffered sink for `--out`, or stdout when no path is given.
pub fn open_sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}
