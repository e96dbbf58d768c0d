//! JSON state documents.
//!
//! ```json
//! { "parties": [{"label": "A", "dim": 2}],
//!   "matrix": [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]] }
//! ```
//!
//! Exactly one of `matrix` (row-major `[re, im]` pairs), `ensemble`
//! (`{"weights": [...], "vectors": [[[re, im], ...], ...]}`) or `preset`
//! (`{"name": ..., "params": [...]}`) must be present. `parties` is required
//! except for presets, where it may relabel the preset's parties.
//! Every validation error names the offending field.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::qmat::{CMatrix, C64};

use super::{preset, AnyState, Ensemble, EnsembleMember, Mstate, Party, PureState, SystemLayout};

const BODY_FIELDS: [&str; 3] = ["matrix", "ensemble", "preset"];

#[derive(Serialize)]
struct MatrixDoc<'a> {
    parties: &'a [Party],
    matrix: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct EnsembleBody {
    weights: Vec<f64>,
    vectors: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct EnsembleDoc<'a> {
    parties: &'a [Party],
    ensemble: EnsembleBody,
}

fn pairs(z: &[C64]) -> Vec<[f64; 2]> {
    z.iter().map(|z| [z.re, z.im]).collect()
}

/// Matrix-form document. Parsing it back gives a bit-identical state.
pub fn to_json(rho: &Mstate) -> String {
    let doc = MatrixDoc {
        parties: rho.layout().parties(),
        matrix: pairs(rho.matrix().data()),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

/// Single-vector ensemble document.
pub fn pure_to_json(psi: &PureState) -> String {
    let doc = EnsembleDoc {
        parties: psi.layout().parties(),
        ensemble: EnsembleBody {
            weights: vec![1.0],
            vectors: vec![pairs(psi.amplitudes())],
        },
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

pub fn read_state_file(path: &Path) -> Result<AnyState> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::InvalidArgument(format!("cannot read state file {}: {e}", path.display()))
    })?;
    parse_state(&text)
}

pub fn parse_state(text: &str) -> Result<AnyState> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::field("<document>", e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::field("<document>", "expected a JSON object"))?;
    for key in obj.keys() {
        if key != "parties" && !BODY_FIELDS.contains(&key.as_str()) {
            return Err(Error::field(key.clone(), "unknown field"));
        }
    }
    let present: Vec<&str> = BODY_FIELDS
        .iter()
        .copied()
        .filter(|k| obj.contains_key(*k))
        .collect();
    if present.len() != 1 {
        return Err(Error::field(
            "matrix|ensemble|preset",
            format!("exactly one must be present, found {}", present.len()),
        ));
    }
    let layout = obj.get("parties").map(parse_parties).transpose()?;
    match present[0] {
        "matrix" => {
            let layout = layout.ok_or_else(|| Error::field("parties", "missing"))?;
            parse_matrix(&obj["matrix"], layout).map(AnyState::Mixed)
        }
        "ensemble" => {
            let layout = layout.ok_or_else(|| Error::field("parties", "missing"))?;
            parse_ensemble(&obj["ensemble"], layout)
        }
        _ => parse_preset(&obj["preset"], layout),
    }
}

fn object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::field(field, "expected an object"))
}

fn array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::field(field, "expected an array"))
}

fn number(v: &Value, field: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::field(field, "expected a finite number"))
}

fn check_keys(obj: &Map<String, Value>, field: &str, allowed: &[&str]) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::field(format!("{field}.{key}"), "unknown field"));
        }
    }
    Ok(())
}

fn parse_parties(v: &Value) -> Result<SystemLayout> {
    let mut parties = Vec::new();
    for (i, p) in array(v, "parties")?.iter().enumerate() {
        let f = format!("parties[{i}]");
        let obj = object(p, &f)?;
        check_keys(obj, &f, &["label", "dim"])?;
        let label = obj
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::field(format!("{f}.label"), "expected a string"))?;
        let dim = obj
            .get("dim")
            .and_then(Value::as_u64)
            .filter(|&d| d >= 2)
            .ok_or_else(|| Error::field(format!("{f}.dim"), "expected an integer >= 2"))?;
        parties.push(Party {
            label: label.to_string(),
            dim: dim as usize,
        });
    }
    SystemLayout::from_parties(parties).map_err(|e| Error::field("parties", e.to_string()))
}

fn parse_complex(v: &Value, field: &str) -> Result<C64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(C64::new(number(re, field)?, number(im, field)?)),
        _ => Err(Error::field(field, "expected an [re, im] pair")),
    }
}

fn parse_vector(v: &Value, field: &str, len: usize) -> Result<Vec<C64>> {
    let items = array(v, field)?;
    if items.len() != len {
        return Err(Error::field(
            field,
            format!("expected {len} entries, found {}", items.len()),
        ));
    }
    items
        .iter()
        .enumerate()
        .map(|(k, z)| parse_complex(z, &format!("{field}[{k}]")))
        .collect()
}

fn parse_matrix(v: &Value, layout: SystemLayout) -> Result<Mstate> {
    let n = layout.total_dim();
    crate::qmat::check_dim(n)?;
    let data = parse_vector(v, "matrix", n * n)?;
    let m = CMatrix::from_vec(n, n, data).map_err(|e| Error::field("matrix", e.to_string()))?;
    Mstate::new(layout, m).map_err(|e| Error::field("matrix", e.to_string()))
}

fn parse_ensemble(v: &Value, layout: SystemLayout) -> Result<AnyState> {
    let obj = object(v, "ensemble")?;
    check_keys(obj, "ensemble", &["weights", "vectors"])?;
    let n = layout.total_dim();
    crate::qmat::check_dim(n)?;
    let weights = obj
        .get("weights")
        .ok_or_else(|| Error::field("ensemble.weights", "missing"))
        .and_then(|w| array(w, "ensemble.weights"))?
        .iter()
        .enumerate()
        .map(|(i, w)| number(w, &format!("ensemble.weights[{i}]")))
        .collect::<Result<Vec<f64>>>()?;
    let vectors = obj
        .get("vectors")
        .ok_or_else(|| Error::field("ensemble.vectors", "missing"))
        .and_then(|w| array(w, "ensemble.vectors"))?;
    if vectors.len() != weights.len() {
        return Err(Error::field(
            "ensemble.vectors",
            format!("{} vectors for {} weights", vectors.len(), weights.len()),
        ));
    }
    let mut members = Vec::with_capacity(vectors.len());
    for (i, vec) in vectors.iter().enumerate() {
        let f = format!("ensemble.vectors[{i}]");
        let amps = parse_vector(vec, &f, n)?;
        let psi = PureState::new(layout.clone(), amps).map_err(|e| Error::field(&f, e.to_string()))?;
        members.push(EnsembleMember::Pure(psi));
    }
    if members.len() == 1 && weights[0] == 1.0 {
        if let Some(EnsembleMember::Pure(psi)) = members.pop() {
            return Ok(AnyState::Pure(psi));
        }
    }
    let e = Ensemble::new(weights, members)
        .map_err(|e| Error::field("ensemble.weights", e.to_string()))?;
    Ok(AnyState::Mixed(e.average()))
}

fn parse_preset(v: &Value, layout: Option<SystemLayout>) -> Result<AnyState> {
    let obj = object(v, "preset")?;
    check_keys(obj, "preset", &["name", "params"])?;
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::field("preset.name", "expected a string"))?;
    let params = match obj.get("params") {
        None => Vec::new(),
        Some(p) => array(p, "preset.params")?
            .iter()
            .enumerate()
            .map(|(i, x)| number(x, &format!("preset.params[{i}]")))
            .collect::<Result<Vec<f64>>>()?,
    };
    let state = preset(name, &params).map_err(|e| {
        if matches!(e, Error::DimensionTooLarge { .. }) {
            return e;
        }
        let field = if name.parse::<super::PresetName>().is_err() {
            "preset.name"
        } else {
            "preset.params"
        };
        Error::field(field, e.to_string())
    })?;
    let Some(layout) = layout else {
        return Ok(state);
    };
    if layout.dims() != state.layout().dims() {
        return Err(Error::field(
            "parties",
            format!(
                "dimensions {:?} do not match preset `{name}` ({})",
                layout.dims(),
                state.layout()
            ),
        ));
    }
    Ok(match state {
        AnyState::Mixed(m) => AnyState::Mixed(Mstate::from_parts(layout, m.matrix().clone())),
        AnyState::Pure(p) => AnyState::Pure(
            PureState::new(layout, p.amplitudes().to_vec()).expect("same amplitudes"),
        ),
    })
}
