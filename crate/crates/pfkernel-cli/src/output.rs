//! Output sinks and the reproducibility header.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Resolved parameters of a run, echoed into every output header.
pub type Resolved = BTreeMap<String, String>;

pub fn open(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// CSV: `# pfkernel <version> <command>` then one `# key=value` line per
/// parameter (valid config-file syntax). JSON lines: a leading header object.
pub fn write_header(out: &mut dyn Write, format: Format, command: &str, config: &Resolved) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "# pfkernel {} {command}", pfkernel::VERSION)?;
            for (k, v) in config {
                writeln!(out, "# {k}={v}")?;
            }
        }
        Format::Json => {
            let header = json!({ "pfkernel": pfkernel::VERSION, "command": command, "config": config });
            writeln!(out, "{header}")?;
        }
    }
    Ok(())
}
