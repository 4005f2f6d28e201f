//! Curve serialization: fixed-column CSV with 17-significant-digit scientific
//! notation and LF line endings, or a JSON document that round-trips.

use std::io::Write;
use std::path::Path;

use cp_thermal::engine::PotentialCurve;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CurveRow {
    pub position_um: f64,
    pub u_nonres_j: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub u_res_prop_j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub u_res_evan_j: Option<f64>,
    pub u_res_j: f64,
    pub u_total_j: f64,
    pub f_n: f64,
    pub status: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CurveDocument {
    pub geometry: String,
    pub temperature_k: f64,
    pub molecule: String,
    pub rows: Vec<CurveRow>,
}

pub fn document(
    curve: &PotentialCurve,
    geometry: &str,
    temperature: f64,
    molecule: &str,
) -> CurveDocument {
    let rows = (0..curve.positions.len())
        .map(|i| CurveRow {
            position_um: curve.positions[i] * 1e6,
            u_nonres_j: curve.u_nonresonant[i],
            u_res_prop_j: curve.u_resonant_propagating.as_ref().map(|v| v[i]),
            u_res_evan_j: curve.u_resonant_evanescent.as_ref().map(|v| v[i]),
            u_res_j: curve.u_resonant_total[i],
            u_total_j: curve.u_total[i],
            f_n: curve.force[i],
            status: curve.status[i].label(),
        })
        .collect();
    CurveDocument {
        geometry: geometry.to_string(),
        temperature_k: temperature,
        molecule: molecule.to_string(),
        rows,
    }
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_csv(path: &Path, doc: &CurveDocument, planar_split: bool) -> Result<(), String> {
    let mut out = Vec::new();
    if planar_split {
        out.extend_from_slice(
            b"z_um,U_nonres_J,U_res_prop_J,U_res_evan_J,U_res_J,U_total_J,F_N,status\n",
        );
        for r in &doc.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                fmt(r.position_um),
                fmt(r.u_nonres_j),
                fmt(r.u_res_prop_j.unwrap_or(f64::NAN)),
                fmt(r.u_res_evan_j.unwrap_or(f64::NAN)),
                fmt(r.u_res_j),
                fmt(r.u_total_j),
                fmt(r.f_n),
                r.status
            )
            .expect("writing to memory");
        }
    } else {
        out.extend_from_slice(b"rho_um,U_nonres_J,U_res_J,U_total_J,F_N,status\n");
        for r in &doc.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt(r.position_um),
                fmt(r.u_nonres_j),
                fmt(r.u_res_j),
                fmt(r.u_total_j),
                fmt(r.f_n),
                r.status
            )
            .expect("writing to memory");
        }
    }
    std::fs::write(path, out).map_err(|e| format!("writing '{}': {e}", path.display()))
}

pub fn write_json(path: &Path, doc: &CurveDocument) -> Result<(), String> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| e.to_string())?;
    std::fs::write(path, text.as_bytes())
        .map_err(|e| format!("writing '{}': {e}", path.display()))
}
