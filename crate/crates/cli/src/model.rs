//! JSON model files.
//!
//! A model file names a measuring process and the triple `(A, B, ρ)`.
//! Matrices are row-major arrays of `[re, im]` pairs; any matrix may instead
//! be a preset name. The process itself may come from the `"spin:θ=<value>"`
//! preset.

use std::path::Path;

use edr_core::linalg::{pauli, ComplexMatrix};
use edr_core::spinlab::{build_spin_model, SpinModelParams};
use edr_core::{DensityOperator, MeasuringProcess, Observable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const MODEL_FORMAT: &str = "edr-model/1";

type M = ComplexMatrix<f64>;

/// On-disk shape before validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sys_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_state: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meter: Option<Value>,
    pub a: Value,
    pub b: Value,
    pub rho: Value,
}

/// A validated model.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub process: MeasuringProcess,
    pub a: Observable,
    pub b: Observable,
    pub rho: DensityOperator,
}

fn field_err(field: &str, message: impl Into<String>) -> CliError {
    CliError::Model { field: field.to_string(), message: message.into() }
}

/// Parses `0.3`, `pi`, `π/4`, `3pi/8` or `3*pi/8`.
pub fn parse_angle(s: &str) -> Option<f64> {
    let t = s.trim().replace('π', "pi").replace(' ', "");
    if let Ok(v) = t.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().ok()?),
        None => (t.as_str(), 1.0),
    };
    let coef = num.strip_suffix("pi")?.trim_end_matches('*');
    let coef = match coef {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    let v = coef * std::f64::consts::PI / den;
    v.is_finite().then_some(v)
}

fn spin_preset(name: &str) -> Option<Result<SpinModelParams, CliError>> {
    let rest = name.trim().strip_prefix("spin:")?;
    let value = rest
        .strip_prefix("θ=")
        .or_else(|| rest.strip_prefix("theta="))
        .unwrap_or(rest);
    Some(
        parse_angle(value)
            .map(SpinModelParams::new)
            .ok_or_else(|| field_err("preset", format!("cannot read angle `{value}`"))),
    )
}

fn complex_entry(field: &str, v: &Value, at: &str) -> Result<Complex64, CliError> {
    let pair = v.as_array().filter(|p| p.len() == 2);
    let parts = pair.and_then(|p| Some((p[0].as_f64()?, p[1].as_f64()?)));
    match parts {
        Some((re, im)) => Ok(Complex64::new(re, im)),
        None => Err(field_err(field, format!("{at}: expected an [re, im] pair of numbers, found {v}"))),
    }
}

fn parse_matrix(field: &str, v: &Value) -> Result<M, CliError> {
    let rows = v
        .as_array()
        .ok_or_else(|| field_err(field, "expected a preset name or an array of rows"))?;
    let mut out = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let cells = row
            .as_array()
            .ok_or_else(|| field_err(field, format!("row {r}: expected an array of [re, im] pairs")))?;
        let parsed = cells
            .iter()
            .enumerate()
            .map(|(c, cell)| complex_entry(field, cell, &format!("row {r}, column {c}")))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = out.first().map(|f: &Vec<Complex64>| f.len()) {
            if parsed.len() != first {
                return Err(field_err(field, format!("row {r}: has {} entries, row 0 has {first}", parsed.len())));
            }
        }
        out.push(parsed);
    }
    M::from_rows(out).map_err(|e| field_err(field, e.to_string()))
}

fn parse_ket(field: &str, v: &Value) -> Result<Vec<Complex64>, CliError> {
    let items = v.as_array().ok_or_else(|| field_err(field, "expected an array of [re, im] pairs"))?;
    items.iter().enumerate().map(|(i, x)| complex_entry(field, x, &format!("entry {i}"))).collect()
}

fn observable(field: &str, v: &Value) -> Result<Observable, CliError> {
    let m = match v.as_str() {
        Some(name) => pauli::by_name(name.trim())
            .ok_or_else(|| field_err(field, format!("unknown observable preset `{name}` (use I, X, Y or Z)")))?,
        None => parse_matrix(field, v)?,
    };
    Observable::new(m).map_err(|e| field_err(field, e.to_string()))
}

/// `maximally_mixed`, `maximally_mixed:<d>` or `bloch:x,y,z`.
fn state(field: &str, v: &Value, dim: Option<usize>) -> Result<DensityOperator, CliError> {
    if let Some(name) = v.as_str() {
        let name = name.trim();
        if let Some(rest) = name.strip_prefix("bloch:") {
            let xs: Vec<f64> = rest.split(',').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(
                |_| field_err(field, format!("cannot read Bloch vector `{rest}`")),
            )?;
            let [x, y, z] = xs[..] else {
                return Err(field_err(field, "Bloch vector needs three components"));
            };
            return DensityOperator::qubit_bloch(x, y, z).map_err(|e| field_err(field, e.to_string()));
        }
        if name == "maximally_mixed" {
            return Ok(DensityOperator::maximally_mixed(dim.unwrap_or(2)));
        }
        if let Some(d) = name.strip_prefix("maximally_mixed:") {
            let d = d.parse().map_err(|_| field_err(field, format!("bad dimension `{d}`")))?;
            return Ok(DensityOperator::maximally_mixed(d));
        }
        return Err(field_err(field, format!("unknown state preset `{name}`")));
    }
    DensityOperator::new(parse_matrix(field, v)?).map_err(|e| field_err(field, e.to_string()))
}

impl RawModel {
    pub fn validate(&self) -> Result<ModelFile, CliError> {
        if let Some(f) = &self.format {
            if f != MODEL_FORMAT {
                return Err(field_err("format", format!("unsupported format `{f}`, expected `{MODEL_FORMAT}`")));
            }
        }
        let process = match &self.preset {
            Some(p) => {
                let params = spin_preset(p).ok_or_else(|| field_err("preset", format!("unknown preset `{p}`")))??;
                for (name, present) in [
                    ("probe_state", self.probe_state.is_some()),
                    ("interaction", self.interaction.is_some()),
                    ("meter", self.meter.is_some()),
                ] {
                    if present {
                        return Err(field_err(name, "not allowed together with a process preset"));
                    }
                }
                build_spin_model(params)
            }
            None => {
                let need = |name: &str, v: &Option<Value>| v.clone().ok_or_else(|| field_err(name, "missing"));
                let sys = self.sys_dim.ok_or_else(|| field_err("sys_dim", "missing"))?;
                let probe = self.probe_dim.ok_or_else(|| field_err("probe_dim", "missing"))?;
                let xi = parse_ket("probe_state", &need("probe_state", &self.probe_state)?)?;
                let u = parse_matrix("interaction", &need("interaction", &self.interaction)?)?;
                let meter = observable("meter", &need("meter", &self.meter)?)?;
                MeasuringProcess::new(sys, probe, xi, u, meter).map_err(|e| field_err("process", e.to_string()))?
            }
        };
        if let Some(d) = self.sys_dim {
            if d != process.sys_dim() {
                return Err(field_err("sys_dim", format!("{d} does not match the process ({})", process.sys_dim())));
            }
        }
        let a = observable("a", &self.a)?;
        let b = observable("b", &self.b)?;
        let rho = state("rho", &self.rho, Some(process.sys_dim()))?;
        for (name, dim) in [("a", a.dim()), ("b", b.dim()), ("rho", rho.dim())] {
            if dim != process.sys_dim() {
                return Err(field_err(name, format!("dimension {dim} does not match system dimension {}", process.sys_dim())));
            }
        }
        Ok(ModelFile { process, a, b, rho })
    }
}

fn matrix_value(m: &M) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| pair(m[(i, j)])).collect()))
            .collect(),
    )
}

fn pair(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

impl ModelFile {
    /// Fully explicit form: every matrix written out.
    pub fn to_raw(&self) -> RawModel {
        let p = &self.process;
        RawModel {
            format: Some(MODEL_FORMAT.to_string()),
            preset: None,
            sys_dim: Some(p.sys_dim()),
            probe_dim: Some(p.probe_dim()),
            probe_state: Some(Value::Array(p.probe_state().iter().map(|z| pair(*z)).collect())),
            interaction: Some(matrix_value(p.interaction())),
            meter: Some(matrix_value(p.meter().matrix())),
            a: matrix_value(self.a.matrix()),
            b: matrix_value(self.b.matrix()),
            rho: matrix_value(self.rho.matrix()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("model serializes")
    }
}

pub fn parse_model(text: &str) -> Result<ModelFile, CliError> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_string(),
            None => full,
        };
        CliError::Parse { line: e.line(), column: e.column(), message }
    })?;
    raw.validate()
}

pub fn load_model(path: &Path) -> Result<ModelFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_model(&text).map_err(|e| e.in_file(path))
}

/// Observable override given on the command line: preset name or JSON matrix.
pub fn observable_arg(field: &str, s: &str) -> Result<Observable, CliError> {
    let v = if s.trim_start().starts_with('[') {
        serde_json::from_str(s).map_err(|e| field_err(field, e.to_string()))?
    } else {
        Value::String(s.to_string())
    };
    observable(field, &v)
}

/// State given on the command line: preset name or JSON matrix.
pub fn state_arg(field: &str, s: &str, dim: Option<usize>) -> Result<DensityOperator, CliError> {
    let v = if s.trim_start().starts_with('[') {
        serde_json::from_str(s).map_err(|e| field_err(field, e.to_string()))?
    } else {
        Value::String(s.to_string())
    };
    state(field, &v, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        let pi = std::f64::consts::PI;
        assert_eq!(parse_angle("0.25"), Some(0.25));
        assert_eq!(parse_angle("pi/4"), Some(pi / 4.0));
        assert_eq!(parse_angle("π/8"), Some(pi / 8.0));
        assert_eq!(parse_angle("3*pi/8"), Some(3.0 * pi / 8.0));
        assert_eq!(parse_angle("-pi"), Some(-pi));
        assert_eq!(parse_angle("x"), None);
    }

    #[test]
    fn preset_model() {
        let m = parse_model(r#"{"preset": "spin:θ=0", "a": "Z", "b": "X", "rho": "maximally_mixed"}"#).unwrap();
        assert_eq!(m.process.sys_dim(), 2);
        assert_eq!(m.rho.dim(), 2);
    }

    #[test]
    fn malformed_entry_is_located() {
        let text = r#"{"preset": "spin:0", "a": [[[1,0],[0,0]],[[0,0],[1]]], "b": "X", "rho": "maximally_mixed"}"#;
        let err = parse_model(text).unwrap_err().to_string();
        assert!(err.contains("row 1, column 1"), "{err}");
        assert!(err.contains("`a`"), "{err}");
    }

    #[test]
    fn syntax_error_has_line_and_column() {
        let err = parse_model("{\n  \"a\": [\n}").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn validation_names_the_invariant() {
        let text = r#"{"preset": "spin:0", "a": [[[1,0],[1,0]],[[0,0],[1,0]]], "b": "X", "rho": "maximally_mixed"}"#;
        let err = parse_model(text).unwrap_err().to_string();
        assert!(err.contains("Hermitian"), "{err}");
    }

    #[test]
    fn explicit_round_trip() {
        let m = parse_model(r#"{"preset": "spin:theta=0.3", "a": "Z", "b": "X", "rho": "bloch:0.1,0.2,0.3"}"#).unwrap();
        let again = parse_model(&m.to_json()).unwrap();
        assert_eq!(again.process.interaction(), m.process.interaction());
        assert_eq!(again.rho.matrix(), m.rho.matrix());
    }
}
