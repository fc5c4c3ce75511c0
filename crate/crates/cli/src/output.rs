use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::args::Format;
use crate::Failure;

/// A command result in both output formats.
pub struct Rendered {
    pub json: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Set when the command ran but an invariant failed.
    pub failure: Option<String>,
}

impl Rendered {
    pub fn new<T: Serialize>(doc: &T, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        let mut json = serde_json::to_string_pretty(doc).expect("output documents serialize");
        json.push('\n');
        Rendered {
            json,
            header,
            rows,
            failure: None,
        }
    }
}

fn csv_bytes(r: &Rendered) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Failure::Io(io::Error::other(e));
    w.write_record(&r.header).map_err(io_err)?;
    for row in &r.rows {
        w.write_record(row).map_err(io_err)?;
    }
    w.into_inner().map_err(|e| Failure::Io(io::Error::other(e.to_string())))
}

pub fn emit(r: &Rendered, format: Format, path: Option<&Path>) -> Result<(), Failure> {
    let bytes = match format {
        Format::Json => r.json.clone().into_bytes(),
        Format::Csv => csv_bytes(r)?,
    };
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(&bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}
