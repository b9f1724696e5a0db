//! Resolves state/observable arguments: a built-in name or a JSON file path.

use std::fs;
use std::path::Path;

use weakphase_core::io::{named_ket, named_operator, parse_ket_json, parse_operator_json};
use weakphase_core::sic::{builtin_sic, wh_orbit, SicSet};
use weakphase_core::{HermitianOperator, Ket};

use crate::{CliError, SicSelect};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn ket(arg: &str) -> Result<Ket, CliError> {
    if let Some(k) = named_ket(arg) {
        return Ok(k);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "state '{arg}' is neither a built-in name (z+, z-, x+, x-, y+, y-, eK, eK/D) nor an existing file"
        )));
    }
    parse_ket_json(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn observable(arg: &str) -> Result<HermitianOperator, CliError> {
    if let Some(op) = named_operator(arg) {
        return Ok(op);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "observable '{arg}' is neither a built-in name (sigmax, sigmay, sigmaz) nor an existing file"
        )));
    }
    parse_operator_json(&read(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn sic(select: &SicSelect) -> Result<SicSet, CliError> {
    match (&select.dim, &select.fiducial) {
        (Some(d), None) => Ok(builtin_sic(*d)?),
        (None, Some(path)) => {
            let fid = parse_ket_json(&read(path)?)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            Ok(wh_orbit(&fid)?)
        }
        _ => Err(CliError::Usage(
            "exactly one of --dim or --fiducial is required".into(),
        )),
    }
}
