//! Species files: one Feshbach resonance per CSV row,
//!
//! ```text
//! species,mass_amu,C6_au,B0_G,DeltaB_G,abg_a0,dmu_muB
//! ```
//!
//! Lines starting with `#` are comments. Rows are kept in their file units
//! ([`SpeciesRecord`]) and converted to SI [`ResonanceData`] on load.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{constants, ResonanceData, UnitSystem};

pub const HEADER: [&str; 7] = ["species", "mass_amu", "C6_au", "B0_G", "DeltaB_G", "abg_a0", "dmu_muB"];

/// One row, in file units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesRecord {
    pub name: String,
    pub mass_amu: f64,
    pub c6_au: f64,
    pub b0_g: f64,
    pub delta_b_g: f64,
    pub abg_a0: f64,
    pub dmu_mub: f64,
}

impl SpeciesRecord {
    pub fn to_resonance(&self) -> Result<ResonanceData> {
        use constants::*;
        let fields = [self.mass_amu, self.c6_au, self.b0_g, self.delta_b_g, self.abg_a0, self.dmu_mub];
        if let Some(i) = fields.iter().position(|v| !v.is_finite()) {
            return Err(Error::Unit(format!("{}: field {} is not a finite number", self.name, HEADER[i + 1])));
        }
        ResonanceData::new(
            self.abg_a0 * BOHR_RADIUS,
            self.delta_b_g * GAUSS,
            self.b0_g * GAUSS,
            self.dmu_mub * BOHR_MAGNETON,
            self.c6_au * HARTREE * BOHR_RADIUS.powi(6),
            self.mass_amu * ATOMIC_MASS_UNIT,
            UnitSystem::si(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub record: SpeciesRecord,
    /// SI.
    pub resonance: ResonanceData,
}

fn parse_error(line: u64, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    parse_error(line, 0, e.to_string())
}

/// Parse the records of a species file without unit conversion.
pub fn parse_records<R: Read>(input: R) -> Result<Vec<(u64, SpeciesRecord)>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(false)
        .from_reader(input);
    let mut rows = reader.records();
    let header = match rows.next() {
        None => return Err(parse_error(1, 1, "missing header")),
        Some(r) => r.map_err(csv_error)?,
    };
    let header_line = header.position().map_or(1, |p| p.line());
    for (i, expected) in HEADER.iter().enumerate() {
        if header.get(i) != Some(*expected) {
            return Err(parse_error(header_line, i + 1, format!("expected header field '{expected}'")));
        }
    }
    if header.len() != HEADER.len() {
        return Err(parse_error(header_line, HEADER.len() + 1, "unexpected extra header field"));
    }

    let mut out = Vec::new();
    for row in rows {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != HEADER.len() {
            return Err(parse_error(line, row.len().min(HEADER.len()) + 1, format!("expected {} fields", HEADER.len())));
        }
        let mut values = [0.0; 6];
        for (i, v) in values.iter_mut().enumerate() {
            let text = &row[i + 1];
            *v = text
                .parse()
                .map_err(|e| parse_error(line, i + 2, format!("{}: cannot parse '{text}': {e}", HEADER[i + 1])))?;
        }
        let [mass_amu, c6_au, b0_g, delta_b_g, abg_a0, dmu_mub] = values;
        out.push((
            line,
            SpeciesRecord { name: row[0].to_string(), mass_amu, c6_au, b0_g, delta_b_g, abg_a0, dmu_mub },
        ));
    }
    Ok(out)
}

pub fn read_species<R: Read>(input: R) -> Result<Vec<Species>> {
    parse_records(input)?
        .into_iter()
        .map(|(line, record)| {
            let resonance = record.to_resonance().map_err(|e| match e {
                Error::DegenerateResonance(m) => Error::DegenerateResonance(format!("line {line}: {m}")),
                Error::InvalidInput(m) => parse_error(line, 0, m),
                Error::Unit(m) => Error::Unit(format!("line {line}: {m}")),
                other => other,
            })?;
            Ok(Species { record, resonance })
        })
        .collect()
}

pub fn load_species(path: impl AsRef<Path>) -> Result<Vec<Species>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))?;
    read_species(file)
}

/// Writes records with 17 significant digits, so that reading them back
/// reproduces every value exactly.
pub fn write_species<W: Write>(output: W, records: &[SpeciesRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(output);
    let io = |e: csv::Error| Error::InvalidInput(format!("write failed: {e}"));
    writer.write_record(HEADER).map_err(io)?;
    for r in records {
        let values = [r.mass_amu, r.c6_au, r.b0_g, r.delta_b_g, r.abg_a0, r.dmu_mub];
        let mut fields = vec![r.name.clone()];
        fields.extend(values.iter().map(|v| format!("{v:.16e}")));
        writer.write_record(&fields).map_err(io)?;
    }
    writer.flush().map_err(|e| Error::InvalidInput(format!("write failed: {e}")))
}
