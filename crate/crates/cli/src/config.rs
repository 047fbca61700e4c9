//! INI configuration: defaults, file values, `--set` overrides and the
//! effective-config dump.

use std::collections::BTreeMap;
use std::path::Path;

use dotforge::basis3d::BasisOptions;
use dotforge::coulombk::CoulombOptions;
use dotforge::wells1d::Well1DParams;
use dotforge::{DotGeometry, MaterialParams, MoleculeConfig};
use ini::Ini;
use nalgebra::Vector3;

use crate::error::CliError;

/// Section order of the effective config.
const SECTIONS: [&str; 9] = [
    "material", "dot_I", "dot_II", "field", "basis", "coulomb", "well", "design", "dynamics",
];

/// Recognised keys per section; `sweep` keys are free-form lists.
fn keys(section: &str) -> &'static [&'static str] {
    match section {
        "material" => &["m_e", "m_h", "v_e", "v_h", "eps_r", "kp_halfwidth_x"],
        "dot_I" => &["base_half", "height"],
        "dot_II" => &["base_half", "height", "separation"],
        "field" => &["x", "y", "z"],
        "basis" => &["n_unbound", "box_factor", "field_reach"],
        "coulomb" => &["tol", "direct_shells", "exchange_shells", "max_evals"],
        "well" => &["width_w", "depth_V", "mass", "box_L", "n_unbound"],
        "design" => &["coulomb", "full_forster"],
        "dynamics" => &[
            "omega1", "delta0", "v_f", "v_xx", "omega", "control", "hold", "off_time", "wait", "dt",
        ],
        "sweep" => &[
            "family", "sizes", "depths", "fields", "separations", "aspects", "ratios", "b_values", "gaps",
        ],
        _ => &[],
    }
}

fn defaults() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("material", "m_e", "0.06"),
        ("material", "m_h", "0.6"),
        ("material", "v_e", "500"),
        ("material", "v_h", "500"),
        ("material", "eps_r", "10"),
        ("material", "kp_halfwidth_x", "0.5"),
        ("dot_I", "base_half", "8"),
        ("dot_I", "height", "2"),
        ("dot_II", "base_half", "10"),
        ("dot_II", "height", "2"),
        ("dot_II", "separation", "5"),
        ("field", "x", "0"),
        ("field", "y", "0"),
        ("field", "z", "0"),
        ("basis", "n_unbound", "4"),
        ("basis", "box_factor", "10"),
        ("basis", "field_reach", "1.5"),
        ("coulomb", "tol", "1e-4"),
        ("coulomb", "direct_shells", "0"),
        ("coulomb", "exchange_shells", "1"),
        ("coulomb", "max_evals", "20000000"),
        ("well", "width_w", "10"),
        ("well", "depth_V", "500"),
        ("well", "mass", "0.06"),
        ("well", "n_unbound", "4"),
        ("design", "coulomb", "true"),
        ("design", "full_forster", "false"),
        ("dynamics", "omega1", "1000"),
        ("dynamics", "delta0", "0"),
        ("dynamics", "v_f", "0.45"),
        ("dynamics", "v_xx", "10"),
        ("dynamics", "omega", "0.5"),
        ("dynamics", "control", "1"),
        ("dynamics", "off_time", "10"),
        ("dynamics", "wait", "1"),
        ("dynamics", "dt", "0.001"),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    values: BTreeMap<(String, String), String>,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl Config {
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut cfg = Config {
            values: defaults()
                .into_iter()
                .map(|(s, k, v)| ((s.to_string(), k.to_string()), v.to_string()))
                .collect(),
        };
        if let Some(path) = path {
            let ini = Ini::load_from_file(path).map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
            for (section, props) in ini.iter() {
                let Some(section) = section else {
                    if let Some((k, _)) = props.iter().next() {
                        return Err(config_error(format!("key `{k}` must sit inside a section")));
                    }
                    continue;
                };
                for (k, v) in props.iter() {
                    cfg.set(section, k, v)?;
                }
            }
        }
        for item in overrides {
            let (lhs, value) = item
                .split_once('=')
                .ok_or_else(|| config_error(format!("override `{item}` must look like section.key=value")))?;
            let (section, key) = lhs
                .split_once('.')
                .ok_or_else(|| config_error(format!("override `{item}` must look like section.key=value")))?;
            cfg.set(section.trim(), key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), CliError> {
        if !keys(section).contains(&key) {
            return Err(config_error(if keys(section).is_empty() {
                format!("unknown section [{section}]")
            } else {
                format!("unknown key `{key}` in [{section}]; expected one of {}", keys(section).join(", "))
            }));
        }
        self.values.insert((section.to_string(), key.to_string()), value.to_string());
        Ok(())
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.values.get(&(section.to_string(), key.to_string())).map(String::as_str)
    }

    pub fn f64(&self, section: &str, key: &str) -> Result<f64, CliError> {
        let raw = self
            .raw(section, key)
            .ok_or_else(|| config_error(format!("missing [{section}] {key}")))?;
        parse_f64(section, key, raw)
    }

    pub fn opt_f64(&self, section: &str, key: &str) -> Result<Option<f64>, CliError> {
        self.raw(section, key).map(|raw| parse_f64(section, key, raw)).transpose()
    }

    pub fn usize(&self, section: &str, key: &str) -> Result<usize, CliError> {
        let raw = self.raw(section, key).unwrap_or_default();
        raw.parse()
            .map_err(|_| config_error(format!("[{section}] {key} = `{raw}` is not a non-negative integer")))
    }

    pub fn bool(&self, section: &str, key: &str) -> Result<bool, CliError> {
        match self.raw(section, key).unwrap_or_default() {
            "true" | "yes" | "1" | "on" => Ok(true),
            "false" | "no" | "0" | "off" => Ok(false),
            other => Err(config_error(format!("[{section}] {key} = `{other}` is not a boolean"))),
        }
    }

    pub fn sweep_text(&self, key: &str) -> Option<&str> {
        self.raw("sweep", key)
    }

    /// A sweep list: comma-separated values or `start:stop:step`.
    pub fn sweep(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.raw("sweep", key) {
            None => Ok(default.to_vec()),
            Some(raw) => parse_list(key, raw),
        }
    }

    pub fn material(&self) -> Result<MaterialParams, CliError> {
        let m = MaterialParams {
            m_e_eff: self.f64("material", "m_e")?,
            m_h_eff: self.f64("material", "m_h")?,
            v_e: self.f64("material", "v_e")?,
            v_h: self.f64("material", "v_h")?,
            eps_r: self.f64("material", "eps_r")?,
            kp_halfwidth_x: self.f64("material", "kp_halfwidth_x")?,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn dot(&self, section: &str) -> Result<DotGeometry, CliError> {
        let d = DotGeometry::new(self.f64(section, "base_half")?, self.f64(section, "height")?);
        d.validate().map_err(|e| config_error(format!("[{section}] {e}")))?;
        Ok(d)
    }

    pub fn field(&self) -> Result<Vector3<f64>, CliError> {
        Ok(Vector3::new(self.f64("field", "x")?, self.f64("field", "y")?, self.f64("field", "z")?))
    }

    pub fn molecule(&self) -> Result<MoleculeConfig, CliError> {
        let mol = MoleculeConfig::stacked(self.dot("dot_I")?, self.dot("dot_II")?, self.f64("dot_II", "separation")?, self.material()?)
            .with_field(self.field()?);
        mol.validate()?;
        Ok(mol)
    }

    pub fn basis(&self) -> Result<BasisOptions, CliError> {
        Ok(BasisOptions {
            n_unbound: self.usize("basis", "n_unbound")?,
            box_factor: self.f64("basis", "box_factor")?,
            field_reach: self.f64("basis", "field_reach")?,
        })
    }

    pub fn coulomb(&self) -> Result<CoulombOptions, CliError> {
        let opts = CoulombOptions {
            tol: self.f64("coulomb", "tol")?,
            direct_shells: self.usize("coulomb", "direct_shells")?,
            exchange_shells: self.usize("coulomb", "exchange_shells")?,
            max_evals: self.usize("coulomb", "max_evals")?,
        };
        opts.validate()?;
        Ok(opts)
    }

    pub fn well(&self) -> Result<(Well1DParams, usize), CliError> {
        let mut p = Well1DParams::new(self.f64("well", "width_w")?, self.f64("well", "depth_V")?, self.f64("well", "mass")?);
        if let Some(box_l) = self.opt_f64("well", "box_L")? {
            p = p.with_box(box_l);
        }
        p.validate()?;
        Ok((p, self.usize("well", "n_unbound")?))
    }

    /// Every set value as INI text, sections in a fixed order.
    pub fn effective(&self) -> String {
        let mut out = String::new();
        for section in SECTIONS.iter().copied().chain(["sweep"]) {
            let entries: Vec<_> = keys(section)
                .iter()
                .filter_map(|k| self.raw(section, k).map(|v| (k, v)))
                .collect();
            if entries.is_empty() {
                continue;
            }
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&format!("[{section}]\n"));
            for (k, v) in entries {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }
}

fn parse_f64(section: &str, key: &str, raw: &str) -> Result<f64, CliError> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| config_error(format!("[{section}] {key} = `{raw}` is not a finite number")))
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    let bad = || config_error(format!("[sweep] {key} = `{raw}` is not a list or start:stop:step range"));
    let parts: Vec<&str> = raw.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts.iter().map(|p| p.parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let (start, stop, step) = (v[0], v[1], v[2]);
        if !(step > 0.0 && stop >= start && step.is_finite()) {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    let v: Vec<f64> = raw
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(v)
}
