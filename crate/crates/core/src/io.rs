//! JSON file formats.
//!
//! States: `{"dims": [...], "labels": [...], "matrix": [[[re, im], ...], ...]}`
//! for density matrices or `"vector": [[re, im], ...]` for pure states,
//! row-major in the lexicographic basis. POVMs:
//! `{"target_label": "...", "elements": [matrix, ...]}`. Extensions are state
//! files with an extra `"marginal_of"` list naming the base subsystems.

use std::fs;
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::keyrates::Instrument;
use crate::linalg::{c, CMatrix};
use crate::povm::{LabeledEnsemble, Povm};
use crate::qstate::{default_labels, PureState, QState, State};
use crate::squashed::Extension;

type Entry = [f64; 2];

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StateFile {
    dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vector: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    marginal_of: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PovmFile {
    target_label: String,
    elements: Vec<Vec<Vec<Entry>>>,
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<Entry>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &[Vec<Entry>]) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidState("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn state_file(state: &State) -> StateFile {
    match state {
        State::Mixed(s) => StateFile {
            dims: s.dims().to_vec(),
            labels: Some(s.labels().to_vec()),
            matrix: Some(matrix_to_rows(s.matrix())),
            vector: None,
            marginal_of: None,
        },
        State::Pure(p) => StateFile {
            dims: p.dims().to_vec(),
            labels: Some(p.labels().to_vec()),
            matrix: None,
            vector: Some(p.vector().iter().map(|z| [z.re, z.im]).collect()),
            marginal_of: None,
        },
    }
}

fn parse_state(f: StateFile) -> Result<State> {
    let labels = f.labels.unwrap_or_else(|| default_labels(f.dims.len()));
    match (f.matrix, f.vector) {
        (Some(m), None) => {
            let m = rows_to_matrix(&m)?;
            Ok(State::Mixed(QState::new(f.dims, labels, m)?))
        }
        (None, Some(v)) => {
            let v = DVector::from_iterator(v.len(), v.iter().map(|e| c(e[0], e[1])));
            Ok(State::Pure(PureState::new(f.dims, labels, v)?))
        }
        _ => Err(Error::InvalidState(
            "state file needs exactly one of \"matrix\" or \"vector\"".into(),
        )),
    }
}

pub fn state_to_json(state: &State) -> Value {
    serde_json::to_value(state_file(state)).expect("state file serializes")
}

pub fn state_from_json(v: &Value) -> Result<State> {
    parse_state(serde_json::from_value(v.clone())?)
}

pub fn state_from_str(s: &str) -> Result<State> {
    parse_state(serde_json::from_str(s)?)
}

pub fn read_state(path: impl AsRef<Path>) -> Result<State> {
    state_from_str(&fs::read_to_string(path)?)
}

pub fn write_state(path: impl AsRef<Path>, state: &State) -> Result<()> {
    write_json(path, &state_to_json(state))
}

pub fn povm_to_json(p: &Povm) -> Value {
    serde_json::to_value(PovmFile {
        target_label: p.target().to_string(),
        elements: p.elements().iter().map(matrix_to_rows).collect(),
    })
    .expect("povm file serializes")
}

fn parse_povm(f: PovmFile) -> Result<Povm> {
    let elements = f
        .elements
        .iter()
        .map(|m| rows_to_matrix(m))
        .collect::<Result<Vec<_>>>()?;
    Povm::new(f.target_label, elements)
}

pub fn povm_from_json(v: &Value) -> Result<Povm> {
    parse_povm(serde_json::from_value(v.clone())?)
}

pub fn povm_from_str(s: &str) -> Result<Povm> {
    parse_povm(serde_json::from_str(s)?)
}

pub fn read_povm(path: impl AsRef<Path>) -> Result<Povm> {
    povm_from_str(&fs::read_to_string(path)?)
}

pub fn write_povm(path: impl AsRef<Path>, p: &Povm) -> Result<()> {
    write_json(path, &povm_to_json(p))
}

pub fn extension_to_json(ext: &Extension) -> Value {
    let mut f = state_file(&State::Mixed(ext.state().clone()));
    f.marginal_of = Some(ext.base().labels().to_vec());
    serde_json::to_value(f).expect("extension file serializes")
}

/// Reads an extension; the base state is the marginal on `"marginal_of"`.
pub fn extension_from_json(v: &Value) -> Result<Extension> {
    let mut f: StateFile = serde_json::from_value(v.clone())?;
    let base_labels = f
        .marginal_of
        .take()
        .ok_or_else(|| Error::InvalidExtension("missing \"marginal_of\"".into()))?;
    let state = parse_state(f)?.to_density();
    let refs: Vec<&str> = base_labels.iter().map(String::as_str).collect();
    let base = state.partial_trace(&refs)?.reorder(&refs)?;
    Extension::new(&base, state)
}

/// Members as `{"outcome", "probability", "state"}` with the state in the
/// state file format.
pub fn ensemble_to_json(e: &LabeledEnsemble) -> Value {
    Value::Array(
        e.members()
            .iter()
            .map(|m| {
                serde_json::json!({
                    "outcome": m.outcome,
                    "probability": m.probability,
                    "state": state_to_json(&m.state),
                })
            })
            .collect(),
    )
}

/// One entry per outcome, each a list of Kraus matrices.
pub fn instrument_to_json(inst: &Instrument) -> Value {
    serde_json::json!({
        "target_label": inst.target(),
        "maps": inst
            .maps()
            .iter()
            .map(|ks| ks.iter().map(matrix_to_rows).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

pub fn write_json(path: impl AsRef<Path>, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{catalog, random_state, CatalogEntry};
    use crate::squashed::random_extension;

    #[test]
    fn states_round_trip_exactly() {
        let s = random_state(&[2, 3], 4, 8).unwrap();
        let back = state_from_json(&state_to_json(&State::Mixed(s.clone()))).unwrap();
        assert_eq!(back, State::Mixed(s));
        let p = catalog(&CatalogEntry::AntisymQutrit).unwrap();
        let text = serde_json::to_string(&state_to_json(&p)).unwrap();
        assert_eq!(state_from_str(&text).unwrap(), p);
    }

    #[test]
    fn missing_labels_get_defaults() {
        let s = state_from_str(r#"{"dims":[2],"vector":[[1,0],[0,0]]}"#).unwrap();
        assert_eq!(s.labels(), &["A".to_string()]);
    }

    #[test]
    fn invalid_files_are_rejected() {
        assert!(matches!(
            state_from_str(r#"{"dims":[2],"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#),
            Err(Error::InvalidState(_))
        ));
        assert!(state_from_str(r#"{"dims":[2]}"#).is_err());
        assert!(matches!(state_from_str("not json"), Err(Error::Json(_))));
        assert!(matches!(
            povm_from_str(r#"{"target_label":"B","elements":[[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]]}"#),
            Err(Error::InvalidPovm(_))
        ));
    }

    #[test]
    fn povms_and_extensions_round_trip() {
        let p = crate::povm::random_povm("B", 3, 5, 2).unwrap();
        assert_eq!(povm_from_json(&povm_to_json(&p)).unwrap(), p);
        let s = random_state(&[2, 2], 2, 3).unwrap();
        let ext = random_extension(&s, 2, 4).unwrap();
        let back = extension_from_json(&extension_to_json(&ext)).unwrap();
        assert_eq!(back.state(), ext.state());
        assert_eq!(back.ancilla(), ext.ancilla());
    }
}
