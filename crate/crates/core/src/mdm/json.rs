//! JSON exchange format:
//!
//! ```json
//! { "machine": { "dot": "digraph ..." },
//!   "delays": { "s0/a": { "exp": 2.0 }, "s1/a": { "point": 0.5 },
//!               "s1/b": { "empirical": [0.1, 0.3], "fit": { "exp": 5.0 } } } }
//! ```
//!
//! `machine` may instead be `{ "file": "path.dot" }`, resolved relative to the
//! JSON file. Delay keys are `state/input`, split at the last `/`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DelayModel, MealyDelayMachine};
use crate::automata::{parse_dot, serialize_dot};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MachineSource {
    Dot(String),
    File(PathBuf),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DelayEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<Fit>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fit {
    pub exp: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MdmFile {
    pub machine: MachineSource,
    pub delays: BTreeMap<String, DelayEntry>,
}

impl DelayEntry {
    fn model(&self, key: &str) -> Result<DelayModel> {
        match (&self.exp, &self.point, &self.empirical) {
            (Some(r), None, None) => DelayModel::exponential(*r),
            (None, Some(v), None) => DelayModel::point(*v),
            (None, None, Some(s)) => DelayModel::empirical(s.clone()),
            _ => Err(Error::InvalidDelay(format!(
                "entry `{key}` must have exactly one of exp, point, empirical"
            ))),
        }
    }

    fn from_model(model: &DelayModel) -> Self {
        match model {
            DelayModel::Exponential { rate } => DelayEntry {
                exp: Some(*rate),
                ..Default::default()
            },
            DelayModel::Point { value } => DelayEntry {
                point: Some(*value),
                ..Default::default()
            },
            DelayModel::Empirical { samples } => DelayEntry {
                empirical: Some(samples.clone()),
                ..Default::default()
            },
        }
    }
}

/// Parses the JSON format. `base` resolves relative machine file references.
pub fn mdm_from_json(text: &str, base: Option<&Path>) -> Result<MealyDelayMachine> {
    let file: MdmFile = serde_json::from_str(text)?;
    let machine = match &file.machine {
        MachineSource::Dot(dot) => parse_dot(dot)?,
        MachineSource::File(path) => {
            let path = match base {
                Some(b) if path.is_relative() => b.join(path),
                _ => path.clone(),
            };
            parse_dot(&std::fs::read_to_string(path)?)?
        }
    };
    let mut delays: Vec<Option<DelayModel>> = vec![None; machine.num_transitions()];
    for (key, entry) in &file.delays {
        let (state, input) = key
            .rsplit_once('/')
            .ok_or_else(|| Error::InvalidDelay(format!("key `{key}` is not state/input")))?;
        let s = machine
            .state_index(state)
            .ok_or_else(|| Error::InvalidDelay(format!("unknown state `{state}` in key `{key}`")))?;
        let i = machine
            .input_index(input)
            .ok_or_else(|| Error::UnknownInput(input.to_string()))?;
        delays[machine.transition_index(s, i)] = Some(entry.model(key)?);
    }
    let delays = delays
        .into_iter()
        .enumerate()
        .map(|(t, d)| {
            let k = machine.num_inputs();
            d.ok_or_else(|| {
                Error::InvalidDelay(format!(
                    "missing delay for `{}/{}`",
                    machine.state_name(t / k),
                    machine.inputs()[t % k]
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MealyDelayMachine::new(machine, delays)
}

/// Writes the JSON format with an inline DOT machine. When `fits` is given,
/// each entry gets an exponential rate annotation.
pub fn mdm_to_json(mdm: &MealyDelayMachine, fits: Option<&[f64]>) -> String {
    let m = mdm.machine();
    let mut delays = BTreeMap::new();
    for (t, (s, i, _, _)) in m.transitions().enumerate() {
        let mut entry = DelayEntry::from_model(&mdm.delays()[t]);
        if let Some(f) = fits {
            entry.fit = Some(Fit { exp: f[t] });
        }
        delays.insert(format!("{}/{}", m.state_name(s), m.inputs()[i]), entry);
    }
    let file = MdmFile {
        machine: MachineSource::Dot(serialize_dot(m)),
        delays,
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}
