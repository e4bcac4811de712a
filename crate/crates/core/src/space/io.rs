//! CSV serialization of broken fields with a JSON sidecar.
//!
//! `name.csv` has columns `element_index, coeff_0 .. coeff_p`; `name.json`
//! records the mesh hash, degree and time stamp so a field is never read back
//! onto the wrong mesh.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Mesh1D;

use super::field::BrokenField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub mesh_hash: String,
    pub degree: usize,
    pub time: f64,
    pub n_elements: usize,
    #[serde(default)]
    pub continuous: bool,
}

/// Formats a float in scientific notation with 16 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn paths(base: &Path) -> (PathBuf, PathBuf) {
    (base.with_extension("csv"), base.with_extension("json"))
}

pub fn write_field(base: &Path, field: &BrokenField, time: f64, continuous: bool) -> Result<()> {
    let (csv_path, json_path) = paths(base);
    let mut w = csv::Writer::from_path(&csv_path)?;
    let mut header = vec!["element_index".to_string()];
    header.extend((0..=field.degree()).map(|k| format!("coeff_{k}")));
    w.write_record(&header)?;
    for i in 0..field.n_elements() {
        let mut rec = vec![i.to_string()];
        rec.extend(field.element(i).iter().map(|c| sci(*c)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    let sidecar = FieldSidecar {
        mesh_hash: field.mesh().content_hash(),
        degree: field.degree(),
        time,
        n_elements: field.n_elements(),
        continuous,
    };
    serde_json::to_writer_pretty(File::create(json_path)?, &sidecar)?;
    Ok(())
}

pub fn read_field(base: &Path, mesh: Arc<Mesh1D>) -> Result<(BrokenField, FieldSidecar)> {
    let (csv_path, json_path) = paths(base);
    let sidecar: FieldSidecar = serde_json::from_reader(File::open(json_path)?)?;
    if sidecar.mesh_hash != mesh.content_hash() {
        return Err(Error::InvalidArgument(format!(
            "field was written on mesh {} but target mesh is {}",
            sidecar.mesh_hash,
            mesh.content_hash()
        )));
    }
    let nb = sidecar.degree + 1;
    let mut coeffs = vec![0.0; mesh.n_elements() * nb];
    let mut r = csv::Reader::from_path(csv_path)?;
    for rec in r.records() {
        let rec = rec?;
        let i: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad element index {:?}", &rec[0])))?;
        if i >= mesh.n_elements() || rec.len() != nb + 1 {
            return Err(Error::InvalidArgument(format!("bad row for element {i}")));
        }
        for k in 0..nb {
            coeffs[i * nb + k] = rec[k + 1]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad coefficient {:?}", &rec[k + 1])))?;
        }
    }
    Ok((BrokenField::from_coeffs(mesh, sidecar.degree, coeffs)?, sidecar))
}
