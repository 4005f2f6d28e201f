//! Scenario configuration: a flat `key = value` file plus the molecule file.
//!
//! Grammar: one `key = value` pair per line; `#` starts a comment; blank
//! lines ignored; keys are snake_case. Unknown keys are rejected so typos
//! fail loudly. Lengths are given in micrometers, energies in eV, the
//! temperature in kelvin.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use cp_thermal::materials::PermittivityModel;
use cp_thermal::molecule::MoleculeSpec;
use cp_thermal::units::{EV, HBAR};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    HalfSpace,
    Cavity,
    Cylinder,
}

impl GeometryKind {
    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::HalfSpace => "half_space",
            GeometryKind::Cavity => "cavity",
            GeometryKind::Cylinder => "cylinder",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub geometry: GeometryKind,
    /// Cylinder radius (m).
    pub radius: Option<f64>,
    /// Cavity width (m).
    pub width: Option<f64>,
    pub material: PermittivityModel,
    pub molecule: MoleculeSpec,
    pub temperature: f64,
    /// Scan positions (m), strictly increasing.
    pub scan: Vec<f64>,
}

pub fn parse_file(path: &Path, geometry: GeometryKind) -> Result<Scenario, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("reading config '{}': {e}", path.display()))?;
    parse(&text, geometry, path.parent().unwrap_or(Path::new(".")))
}

const KNOWN_KEYS: &[&str] = &[
    "geometry",
    "radius_um",
    "width_um",
    "material",
    "plasma_frequency_ev",
    "relaxation_rate_ev",
    "plasma_frequency_rad_s",
    "relaxation_rate_rad_s",
    "epsilon_re",
    "epsilon_im",
    "molecule_file",
    "temperature_k",
    "scan_start_um",
    "scan_stop_um",
    "scan_count",
    "scan_spacing",
];

pub fn parse(text: &str, geometry: GeometryKind, base_dir: &Path) -> Result<Scenario, String> {
    let mut kv: HashMap<String, String> = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key '{key}'", lineno + 1));
        }
        if kv.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key '{key}'", lineno + 1));
        }
    }

    let get = |k: &str| kv.get(k).cloned();
    let get_f64 = |k: &str| -> Result<Option<f64>, String> {
        match kv.get(k) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|e| format!("key '{k}': {e}")),
        }
    };

    if let Some(g) = get("geometry") {
        if g != geometry.name() {
            return Err(format!(
                "config geometry '{g}' does not match the '{}' subcommand",
                geometry.name()
            ));
        }
    }

    let material = match get("material").as_deref() {
        None | Some("drude") => {
            let wp = match (get_f64("plasma_frequency_ev")?, get_f64("plasma_frequency_rad_s")?) {
                (Some(ev), None) => ev * EV / HBAR,
                (None, Some(w)) => w,
                (None, None) => 9.0 * EV / HBAR,
                _ => return Err("give the plasma frequency in eV or rad/s, not both".into()),
            };
            let gamma = match (get_f64("relaxation_rate_ev")?, get_f64("relaxation_rate_rad_s")?) {
                (Some(ev), None) => ev * EV / HBAR,
                (None, Some(w)) => w,
                (None, None) => 0.035 * EV / HBAR,
                _ => return Err("give the relaxation rate in eV or rad/s, not both".into()),
            };
            if !(wp > 0.0) || !(gamma >= 0.0) {
                return Err("drude parameters must be positive".into());
            }
            PermittivityModel::Drude {
                plasma_frequency: wp,
                relaxation_rate: gamma,
            }
        }
        Some("perfect_conductor") => PermittivityModel::PerfectConductor,
        Some("constant") => {
            let re = get_f64("epsilon_re")?.ok_or("constant material needs epsilon_re")?;
            let im = get_f64("epsilon_im")?.unwrap_or(0.0);
            PermittivityModel::Constant {
                value: Complex64::new(re, im),
            }
        }
        Some(other) => return Err(format!("unknown material '{other}'")),
    };

    let molecule_file: PathBuf = get("molecule_file")
        .ok_or("missing molecule_file")?
        .into();
    let molecule_path = if molecule_file.is_absolute() {
        molecule_file
    } else {
        base_dir.join(molecule_file)
    };
    let molecule_text = std::fs::read_to_string(&molecule_path)
        .map_err(|e| format!("reading molecule file '{}': {e}", molecule_path.display()))?;
    let name = molecule_path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "molecule".to_string());
    let molecule = MoleculeSpec::parse(&molecule_text, name).map_err(|e| e.to_string())?;

    let temperature = get_f64("temperature_k")?.ok_or("missing temperature_k")?;
    if !(temperature > 0.0) {
        return Err("temperature_k must be > 0".into());
    }

    let radius = get_f64("radius_um")?.map(|v| v * 1e-6);
    let width = get_f64("width_um")?.map(|v| v * 1e-6);
    match geometry {
        GeometryKind::Cylinder if radius.is_none() => {
            return Err("cylinder runs need radius_um".into())
        }
        GeometryKind::Cavity if width.is_none() => return Err("cavity runs need width_um".into()),
        _ => {}
    }

    let start = get_f64("scan_start_um")?.ok_or("missing scan_start_um")? * 1e-6;
    let stop = get_f64("scan_stop_um")?.ok_or("missing scan_stop_um")? * 1e-6;
    let count = get_f64("scan_count")?.ok_or("missing scan_count")? as usize;
    if count < 2 {
        return Err("scan_count must be >= 2".into());
    }
    if !(stop > start) {
        return Err("scan_stop_um must exceed scan_start_um".into());
    }
    let spacing = match get("scan_spacing").as_deref() {
        None | Some("linear") => Spacing::Linear,
        Some("log") => Spacing::Log,
        Some(other) => return Err(format!("unknown scan_spacing '{other}'")),
    };
    let scan: Vec<f64> = match spacing {
        Spacing::Linear => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
        Spacing::Log => {
            if !(start > 0.0) {
                return Err("log spacing needs scan_start_um > 0".into());
            }
            let (a, b) = (start.ln(), stop.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    };

    // scan grid strictly inside the geometry's valid domain
    let upper = match geometry {
        GeometryKind::HalfSpace => f64::INFINITY,
        GeometryKind::Cavity => width.unwrap(),
        GeometryKind::Cylinder => radius.unwrap(),
    };
    let lower_ok = match geometry {
        GeometryKind::Cylinder => start >= 0.0,
        _ => start > 0.0,
    };
    if !lower_ok || stop >= upper {
        return Err(format!(
            "scan grid [{:.3e}, {:.3e}] m must lie strictly inside the geometry domain (upper bound {upper:.3e} m)",
            start, stop
        ));
    }

    Ok(Scenario {
        geometry,
        radius,
        width,
        material,
        molecule,
        temperature,
        scan,
    })
}
